#include "isac/ofdm.hpp"

#include <cmath>
#include <stdexcept>

#include "isac/fft.hpp"

namespace isac {

OfdmParams OfdmParams::make(double delta_f, double f_c, double cp_fraction) {
  OfdmParams p;
  p.delta_f = delta_f;
  p.f_c = f_c;
  p.cp_fraction = cp_fraction;
  p.t_symbol = 1.0 / delta_f;
  p.t_cp = cp_fraction * p.t_symbol;
  p.t_total = p.t_symbol + p.t_cp;
  p.validate();
  return p;
}

void OfdmParams::validate() const {
  if (!(delta_f > 0.0)) throw std::invalid_argument("delta_f must be positive");
  if (!(f_c > 0.0)) throw std::invalid_argument("f_c must be positive");
  if (cp_fraction < 0.0) throw std::invalid_argument("cp_fraction must be >= 0");
  double rel_ts = std::abs(t_symbol * delta_f - 1.0);
  double rel_t0 = std::abs((t_symbol + t_cp) / t_total - 1.0);
  if (rel_ts > 1e-15 || rel_t0 > 1e-15)
    throw std::invalid_argument("inconsistent ofdm timing fields");
}

int OfdmParams::cp_samples(int num_subcarriers, int oversample) const {
  return static_cast<int>(
      std::lround(cp_fraction * num_subcarriers * oversample));
}

std::vector<cplx> ofdm_modulate(const CGrid& grid, const OfdmParams& params,
                                int oversample) {
  if (oversample < 1) throw std::invalid_argument("oversample must be >= 1");
  int m_count = static_cast<int>(grid.rows());
  int fft_len = m_count * oversample;
  int cp_len = params.cp_samples(m_count, oversample);
  Fft fft(static_cast<std::size_t>(fft_len));

  std::vector<cplx> stream;
  stream.reserve(grid.cols() * static_cast<std::size_t>(fft_len + cp_len));
  std::vector<cplx> sym(fft_len);
  for (std::size_t n = 0; n < grid.cols(); ++n) {
    std::fill(sym.begin(), sym.end(), cplx{});
    auto col = grid.col(n);
    std::copy(col.begin(), col.end(), sym.begin());
    fft.inverse(sym);
    // inverse() scales by 1/L; restore the per-subcarrier amplitude.
    for (auto& x : sym) x *= static_cast<double>(fft_len);
    stream.insert(stream.end(), sym.end() - cp_len, sym.end());
    stream.insert(stream.end(), sym.begin(), sym.end());
  }
  return stream;
}

CGrid ofdm_demodulate(const std::vector<cplx>& stream,
                      const OfdmParams& params, int num_subcarriers,
                      int num_symbols, int oversample) {
  if (oversample < 1) throw std::invalid_argument("oversample must be >= 1");
  int fft_len = num_subcarriers * oversample;
  int cp_len = params.cp_samples(num_subcarriers, oversample);
  std::size_t per_symbol = static_cast<std::size_t>(fft_len + cp_len);
  if (stream.size() != per_symbol * static_cast<std::size_t>(num_symbols))
    throw std::invalid_argument("stream length mismatch");

  Fft fft(static_cast<std::size_t>(fft_len));
  CGrid grid(static_cast<std::size_t>(num_subcarriers),
             static_cast<std::size_t>(num_symbols));
  std::vector<cplx> sym(fft_len);
  for (int n = 0; n < num_symbols; ++n) {
    auto* base = stream.data() + per_symbol * n + cp_len;
    std::copy(base, base + fft_len, sym.begin());
    fft.forward(sym);
    double scale = 1.0 / static_cast<double>(fft_len);
    for (int m = 0; m < num_subcarriers; ++m)
      grid(m, n) = sym[m] * scale;
  }
  return grid;
}

}  // namespace isac
