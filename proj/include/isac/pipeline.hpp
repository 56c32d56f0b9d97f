#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "isac/comms.hpp"
#include "isac/scenario.hpp"
#include "isac/sensing.hpp"

namespace isac {

/// End-to-end sensing run: grid build, channel, noise, selected range
/// estimator, then per-target Doppler from the delay-compensated coherent
/// profile.
struct SenseOutput {
  SensingResult result;
  RangeProfile profile;
  std::vector<VelocityProfile> velocity_profiles;  // one per target
  SlotSumDiagnostics slot_diag;
  std::vector<std::string> warnings;  // advisory comb/algorithm pairings
};

SenseOutput run_sense(const ScenarioConfig& cfg);

/// One point of the power-allocation sweep.
struct SweepPoint {
  double sqrt_gamma_c = 0.0;
  int comb_size = 0;
  BerReport report;
};

/// Monte-Carlo BER sweep over sweep.sqrt_gamma_c x sweep.comb_sizes. Each
/// trial simulates one slot with per-trial payload and noise seeds derived
/// from the master seed; decoding runs both without and with PRS
/// cancellation. The thread count never changes the aggregated numbers.
std::vector<SweepPoint> run_power_sweep(const ScenarioConfig& cfg,
                                        int threads = 1);

/// 5 x 4 table of two-way ghost spacings for SCS {15,30,60,120,240} kHz and
/// comb {2,4,6,12}, in meters (untruncated).
std::array<std::array<double, 4>, 5> ambiguity_table();
extern const std::array<int, 5> kAmbiguityScsKhz;
extern const std::array<int, 4> kAmbiguityCombs;

struct SelfcheckResult {
  struct Item {
    std::string name;
    bool pass;
    std::string detail;
  };
  std::vector<Item> items;
  std::vector<std::string> infos;
  bool all_pass() const;
};

/// Fast invariant sweep: sequence oracles, transform round trips, ghost
/// periodicity, exact cancellation, ambiguity table. Finishes in seconds.
SelfcheckResult run_selfcheck(const ScenarioConfig& cfg);

// CSV emitters. Profiles are normalized to a unit maximum.
void write_range_profile_csv(std::ostream& out, const RangeProfile& profile);
void write_velocity_profile_csv(std::ostream& out,
                                const VelocityProfile& profile);
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points,
                     double snr_db);
void write_ambiguity_table_csv(std::ostream& out);

}  // namespace isac
