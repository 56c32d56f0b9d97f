#include "isac/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "isac/fft.hpp"

namespace isac {

namespace {
constexpr double kTwoPi = 6.28318530717958647692528676655900577;

int circular_distance(int a, int b, int n) {
  int d = std::abs(a - b) % n;
  return std::min(d, n - d);
}
}  // namespace

double doppler_time(const OfdmParams& params, DopplerTimeBase base) {
  return base == DopplerTimeBase::T0 ? params.t_total : params.t_symbol;
}

double velocity_bin_width(const OfdmParams& params, int num_symbols,
                          DopplerTimeBase base) {
  return OfdmParams::kSpeedOfLight /
         (2.0 * doppler_time(params, base) * params.f_c * num_symbols);
}

double max_velocity(const OfdmParams& params, DopplerTimeBase base) {
  return OfdmParams::kSpeedOfLight /
         (2.0 * doppler_time(params, base) * params.f_c);
}

CGrid reciprocal_filter(const CGrid& y, const CGrid& ref_layer) {
  if (!y.same_shape(ref_layer))
    throw std::invalid_argument("reciprocal_filter shape mismatch");
  CGrid g(y.rows(), y.cols());
  for (std::size_t i = 0; i < y.size(); ++i) {
    cplx ref = ref_layer.data()[i];
    g.data()[i] = (ref == cplx{}) ? cplx{} : y.data()[i] / ref;
  }
  return g;
}

RangeProfile range_profile(const CGrid& g, const std::vector<int>& columns,
                           const OfdmParams& params) {
  if (columns.empty())
    throw std::invalid_argument("range_profile needs at least one column");
  std::size_t m_count = g.rows();
  Fft fft(m_count);
  RangeProfile profile;
  profile.magnitudes.assign(m_count, 0.0);
  profile.bin_width_m = range_resolution(params, static_cast<int>(m_count));

  std::vector<cplx> buf(m_count);
  for (int n : columns) {
    auto col = g.col(static_cast<std::size_t>(n));
    std::copy(col.begin(), col.end(), buf.begin());
    fft.inverse(buf);
    for (std::size_t l = 0; l < m_count; ++l)
      profile.magnitudes[l] += std::abs(buf[l]);
  }
  double inv = 1.0 / static_cast<double>(columns.size());
  for (auto& v : profile.magnitudes) v *= inv;
  return profile;
}

double range_resolution(const OfdmParams& params, int num_subcarriers) {
  return OfdmParams::kSpeedOfLight / (params.delta_f * num_subcarriers);
}

double max_range(const OfdmParams& params) {
  return OfdmParams::kSpeedOfLight / params.delta_f;
}

AmbiguitySpec ambiguity_interval(int comb_size, double delta_f) {
  if (comb_size != 2 && comb_size != 4 && comb_size != 6 && comb_size != 12)
    throw std::invalid_argument("comb_size must be one of 2, 4, 6, 12");
  AmbiguitySpec spec;
  spec.comb_size = comb_size;
  spec.delta_f = delta_f;
  spec.interval_two_way_m =
      OfdmParams::kSpeedOfLight / (2.0 * comb_size * delta_f);
  spec.interval_profile_axis_m = 2.0 * spec.interval_two_way_m;
  return spec;
}

namespace {

// g(m,n) * e^{+j2pi m delta_f tau}, applied per row.
std::vector<cplx> delay_ramp(std::size_t m_count, double delta_f, double tau) {
  std::vector<cplx> ramp(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    double ph = kTwoPi * static_cast<double>(m) * delta_f * tau;
    ramp[m] = {std::cos(ph), std::sin(ph)};
  }
  return ramp;
}

}  // namespace

VelocityProfile doppler_profile(const CGrid& g, const std::vector<int>& rows,
                                double compensated_delay_s,
                                const OfdmParams& params,
                                DopplerTimeBase base) {
  if (rows.empty())
    throw std::invalid_argument("doppler_profile needs at least one row");
  std::size_t n_count = g.cols();
  Fft fft(n_count);
  auto ramp = delay_ramp(g.rows(), params.delta_f, compensated_delay_s);

  VelocityProfile profile;
  profile.magnitudes.assign(n_count, 0.0);
  profile.bin_width_mps =
      velocity_bin_width(params, static_cast<int>(n_count), base);

  std::vector<cplx> buf(n_count);
  for (int m : rows) {
    for (std::size_t n = 0; n < n_count; ++n)
      buf[n] = g(static_cast<std::size_t>(m), n) * ramp[m];
    fft.forward(buf);
    for (std::size_t d = 0; d < n_count; ++d)
      profile.magnitudes[d] += std::abs(buf[d]);
  }
  double inv = 1.0 / static_cast<double>(rows.size());
  for (auto& v : profile.magnitudes) v *= inv;
  return profile;
}

VelocityProfile doppler_profile_coherent(const CGrid& g,
                                         double compensated_delay_s,
                                         const OfdmParams& params,
                                         DopplerTimeBase base) {
  std::size_t n_count = g.cols();
  Fft fft(n_count);
  auto ramp = delay_ramp(g.rows(), params.delta_f, compensated_delay_s);

  std::vector<cplx> series(n_count, cplx{});
  for (std::size_t n = 0; n < n_count; ++n) {
    cplx acc{};
    for (std::size_t m = 0; m < g.rows(); ++m) acc += g(m, n) * ramp[m];
    series[n] = acc;
  }
  fft.forward(series);

  VelocityProfile profile;
  profile.magnitudes.resize(n_count);
  profile.bin_width_mps =
      velocity_bin_width(params, static_cast<int>(n_count), base);
  for (std::size_t d = 0; d < n_count; ++d)
    profile.magnitudes[d] = std::abs(series[d]);
  return profile;
}

std::vector<int> local_maxima(const std::vector<double>& magnitudes,
                              double rel_floor) {
  int n = static_cast<int>(magnitudes.size());
  std::vector<int> maxima;
  if (n == 1) return {0};
  double floor = rel_floor * *std::max_element(magnitudes.begin(),
                                               magnitudes.end());
  for (int i = 0; i < n; ++i) {
    if (magnitudes[i] < floor) continue;
    double left = magnitudes[(i + n - 1) % n];
    double right = magnitudes[(i + 1) % n];
    if (magnitudes[i] > left && magnitudes[i] >= right) maxima.push_back(i);
  }
  return maxima;
}

std::vector<int> detect_peaks(const std::vector<double>& magnitudes, int count,
                              int min_separation_bins) {
  if (count < 1) throw std::invalid_argument("peak count must be >= 1");
  int n = static_cast<int>(magnitudes.size());
  std::vector<int> candidates = local_maxima(magnitudes);

  std::vector<int> selected;
  std::vector<bool> used(candidates.size(), false);
  while (static_cast<int>(selected.size()) < count) {
    int best = -1;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (used[i]) continue;
      int bin = candidates[i];
      bool blocked = false;
      for (int s : selected)
        if (circular_distance(bin, s, n) < min_separation_bins) {
          blocked = true;
          break;
        }
      if (blocked) {
        used[i] = true;
        continue;
      }
      if (best < 0) {
        best = static_cast<int>(i);
        continue;
      }
      double a = magnitudes[candidates[i]];
      double b = magnitudes[candidates[best]];
      double tie = 1e-9 * std::max(std::abs(a), std::abs(b));
      if (a > b + tie) {
        best = static_cast<int>(i);
      } else if (std::abs(a - b) <= tie &&
                 candidates[i] < candidates[best]) {
        best = static_cast<int>(i);
      }
    }
    if (best < 0) throw std::runtime_error("insufficient peaks");
    used[best] = true;
    selected.push_back(candidates[best]);
  }
  return selected;
}

SensingResult estimate_ranges(const RangeProfile& profile, int num_targets,
                              int min_separation_bins) {
  if (num_targets < 1) throw std::invalid_argument("num_targets must be >= 1");
  SensingResult result;
  result.peak_bins =
      detect_peaks(profile.magnitudes, num_targets, min_separation_bins);
  for (int bin : result.peak_bins)
    result.ranges_m.push_back(bin * profile.bin_width_m);
  return result;
}

SensingResult estimate_velocities(const VelocityProfile& profile,
                                  int num_targets, int min_separation_bins) {
  if (num_targets < 1) throw std::invalid_argument("num_targets must be >= 1");
  int n = static_cast<int>(profile.magnitudes.size());
  SensingResult result;
  result.peak_bins =
      detect_peaks(profile.magnitudes, num_targets, min_separation_bins);
  for (int bin : result.peak_bins) {
    int signed_bin = (bin >= (n + 1) / 2) ? bin - n : bin;
    result.velocities_mps.push_back(signed_bin * profile.bin_width_mps);
  }
  return result;
}

RangeProfile prs_dmrs_product_profile(const RangeProfile& prs,
                                      const RangeProfile& dmrs) {
  if (prs.magnitudes.size() != dmrs.magnitudes.size())
    throw std::invalid_argument("profile length mismatch");
  RangeProfile out;
  out.bin_width_m = prs.bin_width_m;
  out.magnitudes.resize(prs.magnitudes.size());
  for (std::size_t i = 0; i < prs.magnitudes.size(); ++i)
    out.magnitudes[i] = prs.magnitudes[i] * dmrs.magnitudes[i];
  return out;
}

RangeProfile prs_dmrs_sum_profile(const CGrid& g_prs, const CGrid& g_dmrs,
                                  const GridDims& dims, const PrsConfig& prs,
                                  const DmrsConfig& dmrs,
                                  const OfdmParams& params,
                                  SlotSumDiagnostics* diag) {
  if (!g_prs.same_shape(g_dmrs))
    throw std::invalid_argument("grid shape mismatch");
  std::size_t m_count = g_prs.rows();
  Fft fft(m_count);

  RangeProfile profile;
  profile.magnitudes.assign(m_count, 0.0);
  profile.bin_width_m = range_resolution(params, static_cast<int>(m_count));

  auto peak_abs = [](const std::vector<cplx>& v) {
    double best = 0.0;
    for (const auto& x : v) best = std::max(best, std::abs(x));
    return best;
  };

  int used_slots = 0;
  int skipped = 0;
  std::vector<cplx> prs_sum(m_count);
  std::vector<cplx> dmrs_col(m_count);
  std::vector<cplx> joint(m_count);
  for (int s = 0; s < dims.num_slots; ++s) {
    std::fill(prs_sum.begin(), prs_sum.end(), cplx{});
    for (int k = 0; k < prs.num_symbols; ++k) {
      int n = s * kSymbolsPerSlot + prs.start_symbol + k;
      auto col = g_prs.col(static_cast<std::size_t>(n));
      for (std::size_t m = 0; m < m_count; ++m) prs_sum[m] += col[m];
    }
    {
      int n = s * kSymbolsPerSlot + dmrs.symbol_index;
      auto col = g_dmrs.col(static_cast<std::size_t>(n));
      std::copy(col.begin(), col.end(), dmrs_col.begin());
    }

    double prs_max = peak_abs(prs_sum);
    double dmrs_max = peak_abs(dmrs_col);
    if (prs_max == 0.0 && dmrs_max == 0.0) {
      ++skipped;
      continue;
    }
    for (std::size_t m = 0; m < m_count; ++m) {
      cplx v{};
      if (prs_max > 0.0) v += prs_sum[m] / prs_max;
      if (dmrs_max > 0.0) v += dmrs_col[m] / dmrs_max;
      joint[m] = v;
    }
    fft.inverse(joint);
    for (std::size_t l = 0; l < m_count; ++l)
      profile.magnitudes[l] += std::abs(joint[l]);
    ++used_slots;
  }
  if (diag) diag->skipped_slots = skipped;
  if (used_slots == 0)
    throw std::runtime_error("all slots empty, no profile to form");
  return profile;
}

}  // namespace isac
