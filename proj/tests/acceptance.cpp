// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Reads the shipped reference scenario from --config-dir
// (default "configs").

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "isac/pipeline.hpp"

using namespace isac;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::string g_config_dir = "configs";

ScenarioConfig reference_config() {
  return load_config(g_config_dir + "/reference_scenario.conf");
}

struct Criterion {
  int number;
  std::string title;
  std::function<void(std::string&)> run;  // throws or appends detail
};

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw Failure(what);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// Shared evaluation for the ghost-suppression criteria: detects the two
// strongest peaks, locates the true bins, and measures every other local
// maximum against the smaller true peak.
struct GhostCheck {
  bool top2_at_true = false;
  double max_spurious_ratio = 0.0;  // vs the smaller true-peak value
  int top_bins[2] = {-1, -1};
};

GhostCheck evaluate_ghosts(const RangeProfile& profile,
                           const std::vector<double>& true_ranges_m,
                           int min_sep) {
  GhostCheck out;
  int n = static_cast<int>(profile.magnitudes.size());
  std::vector<int> true_bins;
  for (double r : true_ranges_m)
    true_bins.push_back(
        static_cast<int>(std::lround(r / profile.bin_width_m)));

  auto top2 = detect_peaks(profile.magnitudes, 2, min_sep);
  out.top_bins[0] = top2[0];
  out.top_bins[1] = top2[1];
  out.top2_at_true = true;
  for (double r : true_ranges_m) {
    int want = static_cast<int>(std::lround(r / profile.bin_width_m));
    bool matched = false;
    for (int got : top2)
      if (std::abs(got - want) <= 1) matched = true;
    if (!matched) out.top2_at_true = false;
  }

  // True peak values: best bin within +-1 of each true position.
  double smaller_true = kInf;
  for (int want : true_bins) {
    double v = 0.0;
    for (int d = -1; d <= 1; ++d)
      v = std::max(v, profile.magnitudes[(want + d + n) % n]);
    smaller_true = std::min(smaller_true, v);
  }

  for (int bin : local_maxima(profile.magnitudes)) {
    bool near_true = false;
    for (int want : true_bins) {
      int dist = std::abs(bin - want);
      if (std::min(dist, n - dist) <= min_sep) near_true = true;
    }
    if (near_true) continue;
    out.max_spurious_ratio = std::max(
        out.max_spurious_ratio, profile.magnitudes[bin] / smaller_true);
  }
  return out;
}

RangeProfile sense_profile(ScenarioConfig cfg) { return run_sense(cfg).profile; }

// --- criteria -------------------------------------------------------------

void criterion_1_table(std::string& detail) {
  static const int expected[5][4] = {{4996, 2498, 1665, 832},
                                     {2498, 1249, 832, 416},
                                     {1250, 624, 416, 208},
                                     {624, 312, 208, 104},
                                     {312, 156, 104, 52}};
  auto table = ambiguity_table();
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 4; ++c) {
      double got = std::trunc(table[r][c]);
      require(std::abs(got - expected[r][c]) <= 1.0,
              "cell scs=" + std::to_string(kAmbiguityScsKhz[r]) + " comb=" +
                  std::to_string(kAmbiguityCombs[c]) + ": got " + fmt(got) +
                  " want " + std::to_string(expected[r][c]) + " +-1");
    }
  detail = "20/20 cells within 1 m";
}

void criterion_2_ghost_periodicity(std::string& detail) {
  ScenarioConfig cfg = default_config();  // 272 PRB -> M = 3264
  cfg.prs.comb_size = 4;
  cfg.split = PowerSplit{1.0, 0.0};
  cfg.channel.snr_db = kInf;
  OfdmParams p = cfg.ofdm_params();
  int m_count = cfg.grid_dims().num_subcarriers;
  require(m_count == 3264, "expected 3264 subcarriers");
  int l0 = 500;
  cfg.channel.targets = {
      Target{{1.0, 0.0}, l0 * range_resolution(p, m_count), 0.0}};
  cfg.algorithm = Algorithm::PrsOnly;

  RangeProfile profile = sense_profile(cfg);
  auto maxima = local_maxima(profile.magnitudes, 1e-6);
  require(maxima.size() == 4, "expected 4 local maxima, found " +
                                  std::to_string(maxima.size()));
  double ref = profile.magnitudes[l0];
  for (int k = 0; k < 4; ++k) {
    int bin = (l0 + k * 816) % m_count;
    bool found = false;
    for (int m : maxima)
      if (m == bin) found = true;
    require(found, "missing replica at bin " + std::to_string(bin));
    require(std::abs(profile.magnitudes[bin] - ref) <= 0.01 * ref,
            "replica magnitudes differ by more than 1%");
  }
  double spacing_m = 816 * profile.bin_width_m;
  double table_two_way = ambiguity_interval(4, p.delta_f).interval_two_way_m;
  require(std::abs(spacing_m - 2.0 * table_two_way) < 1e-6,
          "spacing does not equal twice the two-way interval");
  require(std::abs(spacing_m - 624.0) <= 1.2,
          "spacing " + fmt(spacing_m) + " m not within 1.2 m of 624");
  detail = "replicas every 816 bins = " + fmt(spacing_m) + " m";
}

void criterion_3_product_success(std::string& detail) {
  ScenarioConfig cfg = reference_config();
  cfg.prs.comb_size = 4;
  cfg.algorithm = Algorithm::PrsDmrsProduct;
  cfg.split = PowerSplit::from_sqrt_gamma_c(std::sqrt(0.75));  // sqrt_gs 0.5
  GhostCheck check = evaluate_ghosts(sense_profile(cfg), {711.0, 846.0},
                                     cfg.min_separation_bins);
  require(check.top2_at_true, "top-2 peaks missed the true bins");
  require(check.max_spurious_ratio < 0.5,
          "spurious ratio " + fmt(check.max_spurious_ratio) + " >= 0.5");
  detail = "top-2 on target, worst spurious " + fmt(check.max_spurious_ratio);
}

void criterion_4_product_failure(std::string& detail) {
  ScenarioConfig cfg = reference_config();
  cfg.prs.comb_size = 4;
  cfg.algorithm = Algorithm::PrsDmrsProduct;
  cfg.split = PowerSplit::from_sqrt_gamma_c(std::sqrt(1.0 - 0.01));
  GhostCheck check = evaluate_ghosts(sense_profile(cfg), {711.0, 846.0},
                                     cfg.min_separation_bins);
  // Violation of the criterion-3 suppression clause: some other local
  // maximum reaches 0.5x the smaller true peak.
  require(check.max_spurious_ratio >= 0.5,
          "suppression unexpectedly held, worst ratio " +
              fmt(check.max_spurious_ratio));
  detail = "suppression violated, worst spurious " +
           fmt(check.max_spurious_ratio);
}

void criterion_5_sum_both_modes(std::string& detail) {
  ScenarioConfig cfg = reference_config();
  cfg.prs.comb_size = 12;
  cfg.algorithm = Algorithm::PrsDmrsSum;

  cfg.split = PowerSplit::from_sqrt_gamma_c(std::sqrt(0.75));
  GhostCheck good = evaluate_ghosts(sense_profile(cfg), {711.0, 846.0},
                                    cfg.min_separation_bins);
  require(good.top2_at_true, "top-2 peaks missed the true bins at 0.5");
  require(good.max_spurious_ratio < 0.5,
          "spurious ratio " + fmt(good.max_spurious_ratio) + " >= 0.5");

  cfg.split = PowerSplit::from_sqrt_gamma_c(std::sqrt(1.0 - 0.01));
  GhostCheck bad = evaluate_ghosts(sense_profile(cfg), {711.0, 846.0},
                                   cfg.min_separation_bins);
  require(bad.max_spurious_ratio >= 0.5,
          "suppression unexpectedly held at 0.1, worst ratio " +
              fmt(bad.max_spurious_ratio));
  detail = "0.5: spurious " + fmt(good.max_spurious_ratio) + "; 0.1: " +
           fmt(bad.max_spurious_ratio);
}

void criterion_6_estimator_accuracy(std::string& detail) {
  ScenarioConfig cfg = default_config();
  cfg.prs.comb_size = 2;
  cfg.algorithm = Algorithm::PrsOnly;
  cfg.split = PowerSplit{1.0, 0.0};
  cfg.channel.snr_db = kInf;
  OfdmParams p = cfg.ofdm_params();
  int m_count = cfg.grid_dims().num_subcarriers;
  int n_count = cfg.grid_dims().num_symbols;
  double dr = range_resolution(p, m_count);
  double dv = velocity_bin_width(p, n_count, cfg.doppler_time_base);

  // On-grid: exact bins.
  int l0 = 500, d0 = 5;
  cfg.channel.targets = {Target{{1.0, 0.0}, l0 * dr, d0 * dv}};
  SenseOutput on = run_sense(cfg);
  require(on.result.peak_bins[0] == l0,
          "on-grid range bin " + std::to_string(on.result.peak_bins[0]) +
              " != " + std::to_string(l0));
  require(std::abs(on.result.velocities_mps[0] - d0 * dv) < 1e-9,
          "on-grid velocity bin missed");

  // Off-grid: inside one bin width.
  double r_true = (l0 + 0.37) * dr;
  double v_true = (d0 + 0.29) * dv;
  cfg.channel.targets = {Target{{1.0, 0.0}, r_true, v_true}};
  SenseOutput off = run_sense(cfg);
  double r_err = std::abs(off.result.ranges_m[0] - r_true);
  double v_err = std::abs(off.result.velocities_mps[0] - v_true);
  require(r_err <= dr, "off-grid range error " + fmt(r_err) + " > " + fmt(dr));
  require(v_err <= dv,
          "off-grid velocity error " + fmt(v_err) + " > " + fmt(dv));
  detail = "exact on-grid; off-grid errors " + fmt(r_err) + " m, " +
           fmt(v_err) + " m/s";
}

void criterion_7_exact_cancellation(std::string& detail) {
  ScenarioConfig cfg = default_config();
  cfg.slots = 2;  // 165k data bits
  cfg.channel.snr_db = kInf;
  OfdmParams p = cfg.ofdm_params();
  GridDims dims = cfg.grid_dims();

  std::size_t checked_bits = 0;
  for (double sqrt_gc : {0.1, 0.5, 0.9}) {
    PdschConfig pdsch = cfg.pdsch;
    ResourceGrid grid = build_grid(dims, cfg.prs, cfg.dmrs, pdsch,
                                   PowerSplit::from_sqrt_gamma_c(sqrt_gc));
    CGrid y = apply_channel_freq(grid.combined, cfg.channel, p);
    ChannelEstimate est = perfect_channel_estimate(cfg.channel, p, dims);
    CGrid y_clean = cancel_interference(y, reconstruct_prs(est, grid));
    auto rx = demodulate(y_clean, est, grid, 1);
    std::size_t errors = 0;
    for (std::size_t i = 0; i < rx.size(); ++i)
      errors += (rx[i] != grid.tx_bits[i]) ? 1 : 0;
    require(errors == 0, "BER not zero at sqrt_gamma_c=" + fmt(sqrt_gc) +
                             " (" + std::to_string(errors) + " errors)");
    checked_bits += rx.size();
  }
  require(checked_bits >= 100000, "insufficient bits checked");
  detail = std::to_string(checked_bits) + " bits, zero errors at 3 splits";
}

void criterion_8_ic_dominance(std::string& detail) {
  ScenarioConfig cfg = reference_config();
  cfg.sweep.sqrt_gamma_c = {0.5, 0.6, 0.7, 0.8, 0.9};
  cfg.sweep.comb_sizes = {2, 12};
  auto points = run_power_sweep(cfg, 2);

  auto at = [&](double sgc, int comb) -> const BerReport& {
    for (const auto& pt : points)
      if (pt.comb_size == comb && std::abs(pt.sqrt_gamma_c - sgc) < 1e-12)
        return pt.report;
    throw Failure("missing sweep point");
  };

  bool strict_somewhere = false;
  for (double sgc : cfg.sweep.sqrt_gamma_c) {
    for (int comb : cfg.sweep.comb_sizes) {
      const BerReport& rep = at(sgc, comb);
      require(rep.total_bits >= 100000, "fewer than 1e5 bits at a point");
      require(rep.ber_ic <= rep.ber_nic,
              "ic > nic at sqrt_gamma_c=" + fmt(sgc) + " comb=" +
                  std::to_string(comb));
      if (rep.error_bits_ic < rep.error_bits_nic) strict_somewhere = true;
    }
    require(at(sgc, 2).ber_nic >= at(sgc, 12).ber_nic,
            "comb-2 interference not above comb-12 at sqrt_gamma_c=" +
                fmt(sgc));
  }
  require(strict_somewhere, "cancellation never strictly helped");

  // BER nonincreasing in gamma_c within pooled 3-sigma, both branches.
  for (int comb : cfg.sweep.comb_sizes) {
    for (std::size_t i = 0; i + 1 < cfg.sweep.sqrt_gamma_c.size(); ++i) {
      const BerReport& lo = at(cfg.sweep.sqrt_gamma_c[i], comb);
      const BerReport& hi = at(cfg.sweep.sqrt_gamma_c[i + 1], comb);
      auto sigma = [&](std::size_t e_lo, std::size_t e_hi) {
        double pooled =
            static_cast<double>(e_lo + e_hi) / (lo.total_bits + hi.total_bits);
        return std::sqrt(pooled * (1.0 - pooled) *
                         (1.0 / lo.total_bits + 1.0 / hi.total_bits));
      };
      require(hi.ber_nic <= lo.ber_nic +
                                3.0 * sigma(lo.error_bits_nic,
                                            hi.error_bits_nic),
              "nic ber rose beyond 3 sigma at comb " + std::to_string(comb));
      require(hi.ber_ic <= lo.ber_ic + 3.0 * sigma(lo.error_bits_ic,
                                                   hi.error_bits_ic),
              "ic ber rose beyond 3 sigma at comb " + std::to_string(comb));
    }
  }
  detail = "ic<=nic at 10/10 points, comb and power trends hold (" +
           std::to_string(at(0.5, 2).total_bits) + " bits/point)";
}

void criterion_9_round_trip(std::string& detail) {
  ScenarioConfig cfg = default_config();
  cfg.slots = 1;
  OfdmParams p = cfg.ofdm_params();
  GridDims dims = cfg.grid_dims();
  ResourceGrid grid = build_grid(dims, cfg.prs, cfg.dmrs, cfg.pdsch,
                                 PowerSplit::from_sqrt_gamma_c(0.7));

  auto stream = ofdm_modulate(grid.combined, p, 1);
  CGrid back =
      ofdm_demodulate(stream, p, dims.num_subcarriers, dims.num_symbols, 1);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) {
    num += std::norm(back.data()[i] - grid.combined.data()[i]);
    den += std::norm(grid.combined.data()[i]);
  }
  double rt_err = std::sqrt(num / den);
  require(rt_err < 1e-9, "round-trip error " + fmt(rt_err));

  // Integer-sample delay within the prefix, zero velocity.
  double sample_rate = dims.num_subcarriers * p.delta_f;
  int delay_samples = 100;
  require(delay_samples < p.cp_samples(dims.num_subcarriers, 1),
          "test delay must stay inside the prefix");
  ChannelConfig chan;
  chan.targets = {Target{
      {0.8, 0.5}, delay_samples * OfdmParams::kSpeedOfLight / sample_rate,
      0.0}};
  auto faded = apply_channel_time(stream, chan, p, sample_rate);
  CGrid via_time =
      ofdm_demodulate(faded, p, dims.num_subcarriers, dims.num_symbols, 1);
  CGrid via_freq = apply_channel_freq(grid.combined, chan, p);
  num = den = 0.0;
  for (std::size_t i = 0; i < via_time.size(); ++i) {
    num += std::norm(via_time.data()[i] - via_freq.data()[i]);
    den += std::norm(via_freq.data()[i]);
  }
  double path_err = std::sqrt(num / den);
  require(path_err < 1e-6, "time/frequency path error " + fmt(path_err));
  detail = "round trip " + fmt(rt_err) + ", path agreement " + fmt(path_err);
}

void criterion_10_determinism(std::string& detail) {
  ScenarioConfig cfg = reference_config();
  cfg.trial_count = 5;
  std::ostringstream one, three;
  write_sweep_csv(one, run_power_sweep(cfg, 1), cfg.channel.snr_db);
  write_sweep_csv(three, run_power_sweep(cfg, 3), cfg.channel.snr_db);
  require(one.str() == three.str(), "CSV differs across thread counts");
  require(!one.str().empty(), "empty CSV");
  detail = "byte-identical across 1 and 3 threads";
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--config-dir") == 0 && i + 1 < argc)
      g_config_dir = argv[++i];
  }

  std::vector<Criterion> criteria = {
      {1, "ghost spacing table", criterion_1_table},
      {2, "comb-4 ghost periodicity", criterion_2_ghost_periodicity},
      {3, "product estimator suppresses ghosts at sqrt_gamma_s 0.5",
       criterion_3_product_success},
      {4, "product estimator fails at sqrt_gamma_s 0.1",
       criterion_4_product_failure},
      {5, "slot-sum estimator passes at 0.5 and fails at 0.1",
       criterion_5_sum_both_modes},
      {6, "single-target estimator accuracy", criterion_6_estimator_accuracy},
      {7, "perfect estimate cancels exactly", criterion_7_exact_cancellation},
      {8, "cancellation dominance and power trends", criterion_8_ic_dominance},
      {9, "ofdm round trip and channel path agreement",
       criterion_9_round_trip},
      {10, "sweep determinism across threads", criterion_10_determinism},
  };

  int failures = 0;
  for (auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = true;
    std::string error;
    try {
      c.run(detail);
    } catch (const std::exception& e) {
      pass = false;
      error = e.what();
    }
    auto elapsed = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << c.number
              << ": " << c.title;
    if (pass && !detail.empty()) std::cout << " — " << detail;
    if (!pass) std::cout << " — " << error;
    std::cout << " (" << fmt(elapsed) << " s)\n";
    if (!pass) ++failures;
  }
  if (failures > 0)
    std::cout << failures << " criterion(s) failed\n";
  else
    std::cout << "all criteria passed\n";
  return failures == 0 ? 0 : 1;
}
