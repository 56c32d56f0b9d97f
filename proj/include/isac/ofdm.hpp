#pragma once

#include <cstddef>
#include <vector>

#include "isac/cgrid.hpp"

namespace isac {

/// OFDM numerology. All timing fields are derived from the subcarrier
/// spacing at construction: t_symbol = 1/delta_f, t_cp = cp_fraction *
/// t_symbol, t_total = t_symbol + t_cp.
struct OfdmParams {
  double delta_f = 120e3;    // subcarrier spacing, Hz
  double f_c = 25e9;         // carrier frequency, Hz
  double cp_fraction = 144.0 / 2048.0;
  double t_symbol = 0.0;     // s
  double t_cp = 0.0;         // s
  double t_total = 0.0;      // s

  static constexpr double kSpeedOfLight = 299792458.0;  // m/s

  static OfdmParams make(double delta_f, double f_c,
                         double cp_fraction = 144.0 / 2048.0);
  void validate() const;
  int cp_samples(int num_subcarriers, int oversample) const;
};

/// Per-symbol inverse DFT with cyclic prefix. Subcarrier m of column n maps
/// to frequency m*delta_f; oversampling zero-pads the transform. Amplitude
/// convention: sample = sum_m X(m) e^{+j2pi m i / L}, so the demodulator
/// divides by L.
std::vector<cplx> ofdm_modulate(const CGrid& grid, const OfdmParams& params,
                                int oversample = 1);

/// Inverse of ofdm_modulate: strips the prefix and applies the forward DFT
/// per symbol. Throws if the stream length does not match.
CGrid ofdm_demodulate(const std::vector<cplx>& stream,
                      const OfdmParams& params, int num_subcarriers,
                      int num_symbols, int oversample = 1);

}  // namespace isac
