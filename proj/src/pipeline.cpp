#include "isac/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "isac/fft.hpp"
#include "isac/ofdm.hpp"
#include "isac/rng.hpp"
#include "isac/sequences.hpp"

namespace isac {

namespace {

constexpr std::uint64_t kTagPayload = 0x70617931;
constexpr std::uint64_t kTagNoise = 0x6e6f6973;
constexpr std::uint64_t kTagCoinNic = 0x636f696e;
constexpr std::uint64_t kTagCoinIc = 0x636f6969;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

ResourceGrid build_scenario_grid(const ScenarioConfig& cfg,
                                 std::uint64_t payload_seed) {
  PdschConfig pdsch = cfg.pdsch;
  pdsch.payload_seed = payload_seed;
  return build_grid(cfg.grid_dims(), cfg.prs, cfg.dmrs, pdsch, cfg.split);
}

}  // namespace

SenseOutput run_sense(const ScenarioConfig& cfg) {
  cfg.validate();
  OfdmParams params = cfg.ofdm_params();

  std::uint64_t payload_seed =
      derive_seed(cfg.master_seed, kTagPayload, cfg.pdsch.payload_seed);
  std::uint64_t noise_seed =
      derive_seed(cfg.master_seed, kTagNoise, cfg.channel.noise_seed);

  ResourceGrid grid = build_scenario_grid(cfg, payload_seed);
  CGrid y = apply_channel_freq(grid.combined, cfg.channel, params);
  y = add_awgn(y, cfg.channel.snr_db, noise_seed, grid.occupied);

  CGrid g_prs = reciprocal_filter(y, grid.prs_layer);
  SenseOutput out;

  bool big_comb = cfg.prs.comb_size == 6 || cfg.prs.comb_size == 12;
  if (cfg.algorithm == Algorithm::PrsDmrsProduct && big_comb)
    out.warnings.push_back(
        "comb " + std::to_string(cfg.prs.comb_size) +
        ": PRS and DMRS replicas partly coincide, the product profile may "
        "keep ghosts; prs_dmrs_sum is the intended estimator here");
  if (cfg.algorithm == Algorithm::PrsDmrsSum && !big_comb)
    out.warnings.push_back(
        "comb " + std::to_string(cfg.prs.comb_size) +
        ": prs_dmrs_sum accepted, though the product profile is the "
        "intended estimator for small combs");

  switch (cfg.algorithm) {
    case Algorithm::PrsOnly: {
      out.profile = range_profile(g_prs, grid.prs_symbols(), params);
      out.result.kind = ProfileKind::PrsOnly;
      break;
    }
    case Algorithm::PrsDmrsProduct: {
      CGrid g_dmrs = reciprocal_filter(y, grid.dmrs_layer);
      RangeProfile prs_prof = range_profile(g_prs, grid.prs_symbols(), params);
      RangeProfile dmrs_prof =
          range_profile(g_dmrs, grid.dmrs_symbols(), params);
      out.profile = prs_dmrs_product_profile(prs_prof, dmrs_prof);
      out.result.kind = ProfileKind::PrsDmrsProduct;
      break;
    }
    case Algorithm::PrsDmrsSum: {
      CGrid g_dmrs = reciprocal_filter(y, grid.dmrs_layer);
      out.profile = prs_dmrs_sum_profile(g_prs, g_dmrs, cfg.grid_dims(),
                                         cfg.prs, cfg.dmrs, params,
                                         &out.slot_diag);
      out.result.kind = ProfileKind::PrsDmrsSum;
      break;
    }
  }

  SensingResult ranges = estimate_ranges(out.profile, cfg.num_targets(),
                                         cfg.min_separation_bins);

  // Present targets in ascending range order.
  std::vector<std::size_t> order(ranges.ranges_m.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ranges.ranges_m[a] < ranges.ranges_m[b];
  });

  out.result.ranges_m.reserve(order.size());
  out.result.peak_bins.reserve(order.size());
  for (std::size_t idx : order) {
    out.result.ranges_m.push_back(ranges.ranges_m[idx]);
    out.result.peak_bins.push_back(ranges.peak_bins[idx]);
  }

  // Doppler per target after compensating that target's delay.
  for (double range_m : out.result.ranges_m) {
    double tau = range_m / OfdmParams::kSpeedOfLight;
    VelocityProfile vp = doppler_profile_coherent(g_prs, tau, params,
                                                  cfg.doppler_time_base);
    SensingResult vel = estimate_velocities(vp, 1, 1);
    out.result.velocities_mps.push_back(vel.velocities_mps.front());
    out.velocity_profiles.push_back(std::move(vp));
  }
  return out;
}

namespace {

struct TrialCounts {
  std::uint64_t bits = 0;
  std::uint64_t err_nic = 0;
  std::uint64_t err_ic = 0;
};

TrialCounts run_comm_trial(const ScenarioConfig& cfg, const OfdmParams& params,
                           const CGrid& h_slot, double sync_delay_s, int comb,
                           double sqrt_gamma_c, std::uint64_t point,
                           std::uint64_t trial) {
  GridDims dims = GridDims::from_prbs(cfg.prb_count, 1);
  PrsConfig prs = cfg.prs;
  prs.comb_size = comb;
  if (prs.comb_offset >= comb) prs.comb_offset = 0;
  PdschConfig pdsch = cfg.pdsch;
  pdsch.payload_seed = derive_seed(cfg.master_seed, kTagPayload, point, trial);
  PowerSplit split = PowerSplit::from_sqrt_gamma_c(sqrt_gamma_c);

  ResourceGrid grid = build_grid(dims, prs, cfg.dmrs, pdsch, split);

  CGrid y(grid.combined.rows(), grid.combined.cols());
  for (std::size_t i = 0; i < y.size(); ++i)
    y.data()[i] = h_slot.data()[i] * grid.combined.data()[i];
  y = add_awgn(y, cfg.channel.snr_db,
               derive_seed(cfg.master_seed, kTagNoise, point, trial),
               grid.occupied);
  y = compensate_bulk_delay(y, sync_delay_s, params);

  ChannelEstimate est = estimate_channel(y, grid);
  auto rx_nic = demodulate(y, est, grid,
                           derive_seed(cfg.master_seed, kTagCoinNic, point,
                                       trial));
  CGrid y_clean = cancel_interference(y, reconstruct_prs(est, grid));
  auto rx_ic = demodulate(y_clean, est, grid,
                          derive_seed(cfg.master_seed, kTagCoinIc, point,
                                      trial));

  TrialCounts counts;
  counts.bits = grid.tx_bits.size();
  for (std::size_t i = 0; i < grid.tx_bits.size(); ++i) {
    counts.err_nic += (grid.tx_bits[i] != rx_nic[i]) ? 1 : 0;
    counts.err_ic += (grid.tx_bits[i] != rx_ic[i]) ? 1 : 0;
  }
  return counts;
}

}  // namespace

std::vector<SweepPoint> run_power_sweep(const ScenarioConfig& cfg,
                                        int threads) {
  cfg.validate();
  OfdmParams params = cfg.ofdm_params();

  struct PointSpec {
    double sqrt_gamma_c;
    int comb;
  };
  std::vector<PointSpec> specs;
  for (double x : cfg.sweep.sqrt_gamma_c)
    for (int comb : cfg.sweep.comb_sizes) specs.push_back({x, comb});

  // The channel repeats every trial; receiver sync removes the bulk delay.
  CGrid h_slot = channel_matrix(cfg.prb_count * kSubcarriersPerPrb,
                                kSymbolsPerSlot, cfg.channel, params);
  double sync_delay = cfg.channel.targets.front().delay_s();
  for (const auto& t : cfg.channel.targets)
    sync_delay = std::min(sync_delay, t.delay_s());

  std::size_t total = specs.size() * static_cast<std::size_t>(cfg.trial_count);
  std::vector<TrialCounts> counts(total);
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::string first_error;
  auto worker = [&]() {
    for (;;) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      std::size_t p = idx / cfg.trial_count;
      std::size_t t = idx % cfg.trial_count;
      try {
        counts[idx] = run_comm_trial(cfg, params, h_slot, sync_delay,
                                     specs[p].comb, specs[p].sqrt_gamma_c, p,
                                     t);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (first_error.empty())
          first_error = "sweep trial failed at sqrt_gamma_c=" +
                        fmt(specs[p].sqrt_gamma_c) +
                        " comb=" + std::to_string(specs[p].comb) +
                        " trial=" + std::to_string(t) + ": " + e.what();
        next.store(total);
        return;
      }
    }
  };

  int n_threads = std::max(1, threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (!first_error.empty()) throw std::runtime_error(first_error);

  std::vector<SweepPoint> points;
  points.reserve(specs.size());
  GridDims slot_dims = GridDims::from_prbs(cfg.prb_count, 1);
  for (std::size_t p = 0; p < specs.size(); ++p) {
    TrialCounts sum;
    for (int t = 0; t < cfg.trial_count; ++t) {
      const TrialCounts& c = counts[p * cfg.trial_count + t];
      sum.bits += c.bits;
      sum.err_nic += c.err_nic;
      sum.err_ic += c.err_ic;
    }
    SweepPoint point;
    point.sqrt_gamma_c = specs[p].sqrt_gamma_c;
    point.comb_size = specs[p].comb;
    point.report.total_bits = sum.bits;
    point.report.error_bits_nic = sum.err_nic;
    point.report.error_bits_ic = sum.err_ic;
    point.report.ber_nic = static_cast<double>(sum.err_nic) / sum.bits;
    point.report.ber_ic = static_cast<double>(sum.err_ic) / sum.bits;
    double bits_per_slot =
        static_cast<double>(sum.bits) /
        (cfg.trial_count * std::max(1, slot_dims.num_slots));
    point.report.goodput_proxy_nic = bits_per_slot * (1.0 - point.report.ber_nic);
    point.report.goodput_proxy_ic = bits_per_slot * (1.0 - point.report.ber_ic);
    points.push_back(point);
  }
  return points;
}

const std::array<int, 5> kAmbiguityScsKhz = {15, 30, 60, 120, 240};
const std::array<int, 4> kAmbiguityCombs = {2, 4, 6, 12};

std::array<std::array<double, 4>, 5> ambiguity_table() {
  std::array<std::array<double, 4>, 5> table{};
  for (std::size_t r = 0; r < kAmbiguityScsKhz.size(); ++r)
    for (std::size_t c = 0; c < kAmbiguityCombs.size(); ++c)
      table[r][c] = ambiguity_interval(kAmbiguityCombs[c],
                                       kAmbiguityScsKhz[r] * 1e3)
                        .interval_two_way_m;
  return table;
}

bool SelfcheckResult::all_pass() const {
  for (const auto& item : items)
    if (!item.pass) return false;
  return true;
}

namespace {

void check(SelfcheckResult& result, const std::string& name, bool pass,
           const std::string& detail = "") {
  result.items.push_back({name, pass, detail});
}

}  // namespace

SelfcheckResult run_selfcheck(const ScenarioConfig& cfg) {
  SelfcheckResult result;
  OfdmParams params = cfg.ofdm_params();

  // Gold generator: determinism and linearity of the seeded register.
  {
    GoldSeed a{12345}, b{67890}, z{0}, ab{12345 ^ 67890};
    auto sa = gold_sequence(a, 64);
    auto sb = gold_sequence(b, 64);
    auto sz = gold_sequence(z, 64);
    auto sab = gold_sequence(ab, 64);
    bool linear = true;
    for (int i = 0; i < 64; ++i) {
      std::uint8_t lhs = (sa[i] ^ sz[i]) ^ (sb[i] ^ sz[i]);
      std::uint8_t rhs = sab[i] ^ sz[i];
      if (lhs != rhs) linear = false;
    }
    bool deterministic = gold_sequence(a, 64) == sa;
    check(result, "gold_linearity", linear && deterministic);
  }

  // QPSK corner points.
  {
    auto s00 = qpsk_map({0, 0});
    auto s11 = qpsk_map({1, 1});
    auto s10 = qpsk_map({1, 0});
    double inv = 0.70710678118654752440;
    bool ok = std::abs(s00.values[0] - cplx{inv, inv}) < 1e-15 &&
              std::abs(s11.values[0] - cplx{-inv, -inv}) < 1e-15 &&
              std::abs(s10.values[0] - cplx{-inv, inv}) < 1e-15;
    check(result, "qpsk_corners", ok);
  }

  // Stagger coverage: one period hits every subcarrier exactly once.
  {
    bool ok = true;
    for (int comb : {2, 4, 6, 12}) {
      PrsConfig prs;
      prs.comb_size = comb;
      prs.start_symbol = 0;
      prs.num_symbols = 12;
      std::vector<int> hits(24, 0);
      for (int sym = 0; sym < comb; ++sym)
        for (int m : prs_re_pattern(prs, sym, 24)) ++hits[m];
      for (int h : hits)
        if (h != 1) ok = false;
    }
    check(result, "prs_stagger_coverage", ok);
  }

  // Canonical small scenario, independent of the caller's grid settings.
  GridDims dims = GridDims::from_prbs(24, 1);
  PrsConfig prs;  // comb 4, symbols 1-12
  DmrsConfig dmrs;
  PdschConfig pdsch;
  pdsch.symbol_allocation.resize(13);
  for (int i = 0; i < 13; ++i) pdsch.symbol_allocation[i] = i;

  // Modulate/demodulate round trip.
  {
    ResourceGrid grid =
        build_grid(dims, prs, dmrs, pdsch, PowerSplit{0.25, 0.75});
    auto stream = ofdm_modulate(grid.combined, params, 1);
    CGrid back = ofdm_demodulate(stream, params, dims.num_subcarriers,
                                 dims.num_symbols, 1);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < back.size(); ++i) {
      num += std::norm(back.data()[i] - grid.combined.data()[i]);
      den += std::norm(grid.combined.data()[i]);
    }
    check(result, "ofdm_round_trip", std::sqrt(num / den) < 1e-9,
          "rel err " + fmt(std::sqrt(num / den)));
  }

  // Ghost periodicity: exact comb aliases in the per-symbol profile, and a
  // single surviving peak after the staggered slot sum.
  {
    ResourceGrid grid = build_grid(dims, prs, dmrs, pdsch,
                                   PowerSplit{1.0, 0.0});
    int m_count = dims.num_subcarriers;
    int l0 = 30;
    ChannelConfig chan;
    chan.targets = {
        Target{{1.0, 0.0}, l0 * range_resolution(params, m_count), 0.0}};
    chan.snr_db = std::numeric_limits<double>::infinity();
    CGrid y = apply_channel_freq(grid.combined, chan, params);
    CGrid g = reciprocal_filter(y, grid.prs_layer);
    RangeProfile prof = range_profile(g, grid.prs_symbols(), params);

    int comb = prs.comb_size;
    auto maxima = local_maxima(prof.magnitudes, 1e-6);
    bool ok = static_cast<int>(maxima.size()) == comb;
    double ref = prof.magnitudes[l0];
    for (int k = 0; ok && k < comb; ++k) {
      int bin = (l0 + k * m_count / comb) % m_count;
      if (std::find(maxima.begin(), maxima.end(), bin) == maxima.end())
        ok = false;
      else if (std::abs(prof.magnitudes[bin] - ref) > 0.01 * ref)
        ok = false;
    }

    CGrid g_dmrs(g.rows(), g.cols());  // zero; PRS part alone
    RangeProfile slot_sum =
        prs_dmrs_sum_profile(g, g_dmrs, dims, prs, dmrs, params);
    double peak = slot_sum.magnitudes[l0];
    for (int bin : local_maxima(slot_sum.magnitudes))
      if (bin != l0 && slot_sum.magnitudes[bin] >= 0.45 * peak) ok = false;
    check(result, "ghost_periodicity", ok);
  }

  // Perfect estimate + no noise cancels the PRS exactly.
  {
    ResourceGrid grid = build_grid(dims, prs, dmrs, pdsch,
                                   PowerSplit{0.25, 0.75});
    ChannelConfig chan = cfg.channel;
    chan.snr_db = std::numeric_limits<double>::infinity();
    CGrid y = apply_channel_freq(grid.combined, chan, params);
    ChannelEstimate est = perfect_channel_estimate(chan, params, dims);
    CGrid y_clean = cancel_interference(y, reconstruct_prs(est, grid));
    auto rx = demodulate(y_clean, est, grid, 0);
    std::size_t errors = 0;
    for (std::size_t i = 0; i < rx.size(); ++i)
      errors += (rx[i] != grid.tx_bits[i]) ? 1 : 0;
    check(result, "exact_cancellation", errors == 0,
          std::to_string(errors) + " bit errors");
  }

  // Ghost spacing table against the frozen reference grid, +-1 m.
  {
    static const int expected[5][4] = {{4996, 2498, 1665, 832},
                                       {2498, 1249, 832, 416},
                                       {1250, 624, 416, 208},
                                       {624, 312, 208, 104},
                                       {312, 156, 104, 52}};
    auto table = ambiguity_table();
    bool ok = true;
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < 4; ++c)
        if (std::abs(std::trunc(table[r][c]) - expected[r][c]) > 1.0)
          ok = false;
    check(result, "ambiguity_table", ok);
  }

  // Mini-sweep determinism across thread counts.
  {
    ScenarioConfig mini = cfg;
    mini.prb_count = 24;
    mini.trial_count = 2;
    mini.sweep.sqrt_gamma_c = {0.7};
    mini.sweep.comb_sizes = {2};
    std::ostringstream a, b;
    write_sweep_csv(a, run_power_sweep(mini, 1), mini.channel.snr_db);
    write_sweep_csv(b, run_power_sweep(mini, 2), mini.channel.snr_db);
    check(result, "sweep_determinism", a.str() == b.str());
  }

  if (cfg.doppler_time_base == DopplerTimeBase::Ts) {
    result.infos.push_back(
        "doppler_time_base=ts: velocity bins use the bare symbol duration "
        "while the channel phase advances per whole symbol (prefix "
        "included); on-grid tones land off-bin by the ratio of the two. "
        "Informational, not a failure.");
  }
  return result;
}

void write_range_profile_csv(std::ostream& out, const RangeProfile& profile) {
  double peak = 0.0;
  for (double v : profile.magnitudes) peak = std::max(peak, v);
  double scale = peak > 0.0 ? 1.0 / peak : 1.0;
  out << "bin,range_m,magnitude\n";
  for (std::size_t l = 0; l < profile.magnitudes.size(); ++l)
    out << l << ',' << fmt(l * profile.bin_width_m) << ','
        << fmt(profile.magnitudes[l] * scale) << '\n';
}

void write_velocity_profile_csv(std::ostream& out,
                                const VelocityProfile& profile) {
  double peak = 0.0;
  for (double v : profile.magnitudes) peak = std::max(peak, v);
  double scale = peak > 0.0 ? 1.0 / peak : 1.0;
  int n = static_cast<int>(profile.magnitudes.size());
  out << "bin,velocity_mps,magnitude\n";
  for (int d = 0; d < n; ++d) {
    int signed_bin = (d >= (n + 1) / 2) ? d - n : d;
    out << d << ',' << fmt(signed_bin * profile.bin_width_mps) << ','
        << fmt(profile.magnitudes[d] * scale) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points,
                     double snr_db) {
  out << "sqrt_gamma_c,comb_size,snr_db,ber_nic,ber_ic,goodput_nic,"
         "goodput_ic,total_bits\n";
  for (const auto& p : points) {
    out << fmt(p.sqrt_gamma_c) << ',' << p.comb_size << ',' << fmt(snr_db)
        << ',' << fmt(p.report.ber_nic) << ',' << fmt(p.report.ber_ic) << ','
        << fmt(p.report.goodput_proxy_nic) << ','
        << fmt(p.report.goodput_proxy_ic) << ',' << p.report.total_bits
        << '\n';
  }
}

void write_ambiguity_table_csv(std::ostream& out) {
  auto table = ambiguity_table();
  out << "scs_khz,comb_2,comb_4,comb_6,comb_12\n";
  for (std::size_t r = 0; r < kAmbiguityScsKhz.size(); ++r) {
    out << kAmbiguityScsKhz[r];
    for (std::size_t c = 0; c < kAmbiguityCombs.size(); ++c)
      out << ',' << static_cast<long long>(std::trunc(table[r][c]));
    out << '\n';
  }
}

}  // namespace isac
