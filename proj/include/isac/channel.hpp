#pragma once

#include <cstdint>
#include <vector>

#include "isac/cgrid.hpp"
#include "isac/ofdm.hpp"

namespace isac {

/// One point scatterer on the transmitter-target-receiver path.
struct Target {
  cplx attenuation{1.0, 0.0};
  double bistatic_range_m = 0.0;  // >= 0
  double velocity_mps = 0.0;

  double delay_s() const { return bistatic_range_m / OfdmParams::kSpeedOfLight; }
  void validate() const;
};

struct ChannelConfig {
  std::vector<Target> targets;
  double snr_db = 15.0;  // +infinity disables noise
  std::uint64_t noise_seed = 99;

  void validate() const;
};

/// Doppler shift of a target moving at v: f_d = 2 v f_c / c0.
double velocity_to_doppler(double velocity_mps, const OfdmParams& params);

/// Per-RE channel factor H(m,n) = sum_k a_k e^{j2pi n t_total f_dk}
/// e^{-j2pi m delta_f tau_k}.
CGrid channel_matrix(int num_subcarriers, int num_symbols,
                     const ChannelConfig& cfg, const OfdmParams& params);

/// Frequency-domain multi-target channel: y(m,n) = H(m,n) x(m,n). Inter-
/// symbol interference is not modeled; delays are assumed within CP scale.
CGrid apply_channel_freq(const CGrid& x, const ChannelConfig& cfg,
                         const OfdmParams& params);

/// Adds circularly symmetric Gaussian noise of total power
/// P_sig / 10^(snr_db/10), with P_sig the mean squared magnitude of y over
/// REs flagged in `occupied` (all REs when the mask is empty). An infinite
/// snr_db returns the input unchanged.
CGrid add_awgn(const CGrid& y, double snr_db, std::uint64_t seed,
               const std::vector<std::uint8_t>& occupied = {});

/// Time-domain validation path: per target, integer-sample delay plus a
/// continuous Doppler rotation over the stream. Throws if a delay exceeds
/// the stream length. Matches apply_channel_freq only for zero velocity and
/// delays within the cyclic prefix.
std::vector<cplx> apply_channel_time(const std::vector<cplx>& stream,
                                     const ChannelConfig& cfg,
                                     const OfdmParams& params,
                                     double sample_rate_hz);

}  // namespace isac
