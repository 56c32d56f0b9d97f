#pragma once

#include <cstdint>
#include <vector>

#include "isac/cgrid.hpp"
#include "isac/channel.hpp"
#include "isac/resource_grid.hpp"

namespace isac {

enum class EstimateMethod { LsInterp, Perfect };

struct ChannelEstimate {
  CGrid h_hat;
  EstimateMethod method = EstimateMethod::LsInterp;
};

struct BerReport {
  std::size_t total_bits = 0;
  std::size_t error_bits_nic = 0;
  std::size_t error_bits_ic = 0;
  double ber_nic = 0.0;
  double ber_ic = 0.0;
  double goodput_proxy_nic = 0.0;  // bits/slot * (1 - BER)
  double goodput_proxy_ic = 0.0;
};

struct DemodDiagnostics {
  std::size_t zero_estimate_res = 0;
};

/// Receiver-side timing alignment: rotates subcarrier m by
/// e^{+j2pi m delta_f delay_s}, removing a bulk propagation delay so the
/// residual channel stays within the DMRS interpolation bandwidth.
CGrid compensate_bulk_delay(const CGrid& y, double delay_s,
                            const OfdmParams& params);

/// Least-squares channel estimate at the DMRS REs, linearly interpolated
/// across subcarriers (edges held), then held constant across the slot's
/// symbols. Throws when gamma_c is zero.
ChannelEstimate estimate_channel(const CGrid& y, const ResourceGrid& grid);

/// Oracle estimate equal to the true channel factor.
ChannelEstimate perfect_channel_estimate(const ChannelConfig& cfg,
                                         const OfdmParams& params,
                                         const GridDims& dims);

/// Received-PRS replica H_hat * sqrt(gamma_s) * prs; zero off PRS support.
CGrid reconstruct_prs(const ChannelEstimate& est, const ResourceGrid& grid);

/// y - y_hat, element-wise.
CGrid cancel_interference(const CGrid& y, const CGrid& y_hat);

/// Equalizes every data RE by sqrt(gamma_c) * H_hat and slices QPSK bits in
/// transmit mapping order. REs with an exactly zero estimate contribute two
/// coin-flip bits from the seeded generator and are counted in `diag`.
std::vector<std::uint8_t> demodulate(const CGrid& y_eff,
                                     const ChannelEstimate& est,
                                     const ResourceGrid& grid,
                                     std::uint64_t coin_seed,
                                     DemodDiagnostics* diag = nullptr);

/// Hamming-distance BER for both decode branches plus the goodput proxy.
/// Throws on length mismatch.
BerReport compute_ber_report(const std::vector<std::uint8_t>& tx_bits,
                             const std::vector<std::uint8_t>& rx_nic,
                             const std::vector<std::uint8_t>& rx_ic,
                             const GridDims& dims);

}  // namespace isac
