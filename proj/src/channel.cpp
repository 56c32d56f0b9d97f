#include "isac/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "isac/rng.hpp"

namespace isac {

namespace {
constexpr double kTwoPi = 6.28318530717958647692528676655900577;
}

void Target::validate() const {
  if (bistatic_range_m < 0.0)
    throw std::invalid_argument("bistatic_range must be >= 0");
}

void ChannelConfig::validate() const {
  if (targets.empty())
    throw std::invalid_argument("channel needs at least one target");
  for (const auto& t : targets) t.validate();
  if (std::isnan(snr_db)) throw std::invalid_argument("snr_db must not be NaN");
}

double velocity_to_doppler(double velocity_mps, const OfdmParams& params) {
  return 2.0 * velocity_mps * params.f_c / OfdmParams::kSpeedOfLight;
}

CGrid channel_matrix(int num_subcarriers, int num_symbols,
                     const ChannelConfig& cfg, const OfdmParams& params) {
  cfg.validate();
  CGrid h(static_cast<std::size_t>(num_subcarriers),
          static_cast<std::size_t>(num_symbols));
  std::vector<cplx> row_phase(num_subcarriers);
  std::vector<cplx> col_phase(num_symbols);
  for (const auto& target : cfg.targets) {
    double doppler = velocity_to_doppler(target.velocity_mps, params);
    double tau = target.delay_s();
    for (int m = 0; m < num_subcarriers; ++m) {
      double ph = -kTwoPi * m * params.delta_f * tau;
      row_phase[m] = {std::cos(ph), std::sin(ph)};
    }
    for (int n = 0; n < num_symbols; ++n) {
      double ph = kTwoPi * n * params.t_total * doppler;
      col_phase[n] = target.attenuation * cplx{std::cos(ph), std::sin(ph)};
    }
    for (int n = 0; n < num_symbols; ++n)
      for (int m = 0; m < num_subcarriers; ++m)
        h(m, n) += col_phase[n] * row_phase[m];
  }
  return h;
}

CGrid apply_channel_freq(const CGrid& x, const ChannelConfig& cfg,
                         const OfdmParams& params) {
  CGrid h = channel_matrix(static_cast<int>(x.rows()),
                           static_cast<int>(x.cols()), cfg, params);
  CGrid y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i)
    y.data()[i] = h.data()[i] * x.data()[i];
  return y;
}

CGrid add_awgn(const CGrid& y, double snr_db, std::uint64_t seed,
               const std::vector<std::uint8_t>& occupied) {
  if (std::isinf(snr_db) && snr_db > 0.0) return y;

  double power_sum = 0.0;
  std::size_t count = 0;
  if (occupied.empty()) {
    for (const auto& v : y.data()) power_sum += std::norm(v);
    count = y.size();
  } else {
    if (occupied.size() != y.size())
      throw std::invalid_argument("occupancy mask size mismatch");
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!occupied[i]) continue;
      power_sum += std::norm(y.data()[i]);
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("no occupied REs for SNR reference");
  double sig_power = power_sum / static_cast<double>(count);
  double noise_power = sig_power / std::pow(10.0, snr_db / 10.0);
  double sigma = std::sqrt(noise_power / 2.0);

  NormalSource normal(seed);
  CGrid out(y.rows(), y.cols());
  for (std::size_t i = 0; i < y.size(); ++i) {
    double re = normal();
    double im = normal();
    out.data()[i] = y.data()[i] + cplx{sigma * re, sigma * im};
  }
  return out;
}

std::vector<cplx> apply_channel_time(const std::vector<cplx>& stream,
                                     const ChannelConfig& cfg,
                                     const OfdmParams& params,
                                     double sample_rate_hz) {
  cfg.validate();
  std::vector<cplx> out(stream.size(), cplx{});
  for (const auto& target : cfg.targets) {
    double tau = target.delay_s();
    auto delay = static_cast<std::ptrdiff_t>(std::llround(tau * sample_rate_hz));
    if (delay < 0 || static_cast<std::size_t>(delay) >= stream.size())
      throw std::invalid_argument("target delay exceeds the stream length");
    double doppler = velocity_to_doppler(target.velocity_mps, params);
    for (std::size_t i = static_cast<std::size_t>(delay); i < stream.size();
         ++i) {
      double t = static_cast<double>(i) / sample_rate_hz;
      double ph = kTwoPi * doppler * t;
      out[i] += target.attenuation * stream[i - delay] *
                cplx{std::cos(ph), std::sin(ph)};
    }
  }
  return out;
}

}  // namespace isac
