#include "isac/comms.hpp"

#include <cmath>
#include <stdexcept>

#include "isac/rng.hpp"

namespace isac {

CGrid compensate_bulk_delay(const CGrid& y, double delay_s,
                            const OfdmParams& params) {
  constexpr double kTwoPi = 6.28318530717958647692528676655900577;
  CGrid out(y.rows(), y.cols());
  std::vector<cplx> ramp(y.rows());
  for (std::size_t m = 0; m < y.rows(); ++m) {
    double ph = kTwoPi * static_cast<double>(m) * params.delta_f * delay_s;
    ramp[m] = {std::cos(ph), std::sin(ph)};
  }
  for (std::size_t n = 0; n < y.cols(); ++n)
    for (std::size_t m = 0; m < y.rows(); ++m) out(m, n) = y(m, n) * ramp[m];
  return out;
}

ChannelEstimate estimate_channel(const CGrid& y, const ResourceGrid& grid) {
  if (grid.split.gamma_c <= 0.0)
    throw std::invalid_argument("no communication power, channel unobservable");

  std::size_t m_count = y.rows();
  ChannelEstimate est;
  est.method = EstimateMethod::LsInterp;
  est.h_hat = CGrid(m_count, y.cols());

  auto pattern = dmrs_re_pattern(grid.dims.num_subcarriers);
  double amp = grid.split.amp_comm();
  std::vector<cplx> ls(pattern.size());
  std::vector<cplx> interp(m_count);

  for (int s = 0; s < grid.dims.num_slots; ++s) {
    int n_d = s * kSymbolsPerSlot + grid.dmrs_cfg.symbol_index;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      cplx pilot = grid.dmrs_layer(pattern[i], n_d);
      ls[i] = y(pattern[i], n_d) / (amp * pilot);
    }

    // Linear interpolation between pilot subcarriers, edge-held outside.
    std::size_t seg = 0;
    for (std::size_t m = 0; m < m_count; ++m) {
      int mi = static_cast<int>(m);
      if (mi <= pattern.front()) {
        interp[m] = ls.front();
        continue;
      }
      if (mi >= pattern.back()) {
        interp[m] = ls.back();
        continue;
      }
      while (pattern[seg + 1] < mi) ++seg;
      int m0 = pattern[seg];
      int m1 = pattern[seg + 1];
      double w = static_cast<double>(mi - m0) / static_cast<double>(m1 - m0);
      interp[m] = ls[seg] * (1.0 - w) + ls[seg + 1] * w;
    }

    for (int k = 0; k < kSymbolsPerSlot; ++k) {
      int n = s * kSymbolsPerSlot + k;
      for (std::size_t m = 0; m < m_count; ++m) est.h_hat(m, n) = interp[m];
    }
  }
  return est;
}

ChannelEstimate perfect_channel_estimate(const ChannelConfig& cfg,
                                         const OfdmParams& params,
                                         const GridDims& dims) {
  ChannelEstimate est;
  est.method = EstimateMethod::Perfect;
  est.h_hat =
      channel_matrix(dims.num_subcarriers, dims.num_symbols, cfg, params);
  return est;
}

CGrid reconstruct_prs(const ChannelEstimate& est, const ResourceGrid& grid) {
  double amp = grid.split.amp_sensing();
  CGrid out(grid.prs_layer.rows(), grid.prs_layer.cols());
  for (std::size_t i = 0; i < out.size(); ++i) {
    cplx prs = grid.prs_layer.data()[i];
    if (prs == cplx{}) continue;
    out.data()[i] = est.h_hat.data()[i] * amp * prs;
  }
  return out;
}

CGrid cancel_interference(const CGrid& y, const CGrid& y_hat) {
  if (!y.same_shape(y_hat))
    throw std::invalid_argument("cancel_interference shape mismatch");
  CGrid out(y.rows(), y.cols());
  for (std::size_t i = 0; i < y.size(); ++i)
    out.data()[i] = y.data()[i] - y_hat.data()[i];
  return out;
}

std::vector<std::uint8_t> demodulate(const CGrid& y_eff,
                                     const ChannelEstimate& est,
                                     const ResourceGrid& grid,
                                     std::uint64_t coin_seed,
                                     DemodDiagnostics* diag) {
  double amp = grid.split.amp_comm();
  if (amp <= 0.0)
    throw std::invalid_argument("no communication power, nothing to decode");

  std::vector<std::uint8_t> bits;
  bits.reserve(grid.tx_bits.size());
  BitSource coin(coin_seed);
  std::size_t zero_res = 0;
  grid.for_each_data_re([&](int m, int n) {
    cplx h = est.h_hat(m, n);
    if (h == cplx{}) {
      ++zero_res;
      bits.push_back(coin.next());
      bits.push_back(coin.next());
      return;
    }
    cplx z = y_eff(m, n) / (amp * h);
    bits.push_back(z.real() < 0.0 ? 1 : 0);
    bits.push_back(z.imag() < 0.0 ? 1 : 0);
  });
  if (diag) diag->zero_estimate_res = zero_res;
  return bits;
}

BerReport compute_ber_report(const std::vector<std::uint8_t>& tx_bits,
                             const std::vector<std::uint8_t>& rx_nic,
                             const std::vector<std::uint8_t>& rx_ic,
                             const GridDims& dims) {
  if (tx_bits.size() != rx_nic.size() || tx_bits.size() != rx_ic.size())
    throw std::invalid_argument("bit stream length mismatch");

  BerReport rep;
  rep.total_bits = tx_bits.size();
  for (std::size_t i = 0; i < tx_bits.size(); ++i) {
    rep.error_bits_nic += (tx_bits[i] != rx_nic[i]) ? 1 : 0;
    rep.error_bits_ic += (tx_bits[i] != rx_ic[i]) ? 1 : 0;
  }
  if (rep.total_bits > 0) {
    rep.ber_nic = static_cast<double>(rep.error_bits_nic) / rep.total_bits;
    rep.ber_ic = static_cast<double>(rep.error_bits_ic) / rep.total_bits;
  }
  double bits_per_slot =
      static_cast<double>(rep.total_bits) / std::max(1, dims.num_slots);
  rep.goodput_proxy_nic = bits_per_slot * (1.0 - rep.ber_nic);
  rep.goodput_proxy_ic = bits_per_slot * (1.0 - rep.ber_ic);
  return rep;
}

}  // namespace isac
