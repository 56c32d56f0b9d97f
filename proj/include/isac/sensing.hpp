#pragma once

#include <vector>

#include "isac/cgrid.hpp"
#include "isac/ofdm.hpp"
#include "isac/resource_grid.hpp"

namespace isac {

/// Magnitude-vs-delay-bin profile. Bin l maps to a bistatic range of
/// l * bin_width_m = l * c0 / (delta_f * M).
struct RangeProfile {
  std::vector<double> magnitudes;
  double bin_width_m = 0.0;
};

/// Magnitude-vs-Doppler-bin profile over the N symbols.
struct VelocityProfile {
  std::vector<double> magnitudes;
  double bin_width_mps = 0.0;
};

enum class ProfileKind { PrsOnly, PrsDmrsProduct, PrsDmrsSum };

struct SensingResult {
  std::vector<double> ranges_m;
  std::vector<double> velocities_mps;
  std::vector<int> peak_bins;
  ProfileKind kind = ProfileKind::PrsOnly;
};

/// Spacing of ghost-target replicas for a comb-sampled spectrum. The
/// two-way figure is c0 / (2 K delta_f); on the bistatic profile axis the
/// spacing doubles.
struct AmbiguitySpec {
  int comb_size = 0;
  double delta_f = 0.0;
  double interval_two_way_m = 0.0;
  double interval_profile_axis_m = 0.0;
};

/// Time base used when converting Doppler bins to velocity. T0 (symbol plus
/// prefix) matches the per-symbol phase advance of the channel model; Ts is
/// the bare symbol duration.
enum class DopplerTimeBase { T0, Ts };

double doppler_time(const OfdmParams& params, DopplerTimeBase base);

/// Velocity bin width c0 / (2 T f_c N).
double velocity_bin_width(const OfdmParams& params, int num_symbols,
                          DopplerTimeBase base = DopplerTimeBase::T0);

/// Maximum unambiguous velocity c0 / (2 T f_c).
double max_velocity(const OfdmParams& params,
                    DopplerTimeBase base = DopplerTimeBase::T0);

/// Point-wise division by the reference layer; REs where the reference is
/// zero map to zero.
CGrid reciprocal_filter(const CGrid& y, const CGrid& ref_layer);

/// Per-column inverse DFT magnitudes averaged over the given columns.
RangeProfile range_profile(const CGrid& g, const std::vector<int>& columns,
                           const OfdmParams& params);

double range_resolution(const OfdmParams& params, int num_subcarriers);
double max_range(const OfdmParams& params);

AmbiguitySpec ambiguity_interval(int comb_size, double delta_f);

/// Per-row forward DFT magnitudes averaged over the given rows, after
/// compensating the estimated delay with a subcarrier-domain phase ramp.
VelocityProfile doppler_profile(const CGrid& g, const std::vector<int>& rows,
                                double compensated_delay_s,
                                const OfdmParams& params,
                                DopplerTimeBase base = DopplerTimeBase::T0);

/// Coherent variant: compensates the delay, sums all rows into one time
/// series, then takes the DFT magnitude. Rows belonging to other targets
/// decohere in the sum, so this resolves targets whose Doppler bins are
/// closer than the profile resolution.
VelocityProfile doppler_profile_coherent(const CGrid& g,
                                         double compensated_delay_s,
                                         const OfdmParams& params,
                                         DopplerTimeBase base = DopplerTimeBase::T0);

/// All circular local maxima (strictly above the left neighbour, at least
/// the right one), ascending bin order. rel_floor drops maxima below that
/// fraction of the global peak; the default keeps everything.
std::vector<int> local_maxima(const std::vector<double>& magnitudes,
                              double rel_floor = 0.0);

/// Greedy selection of the `count` highest local maxima with a circular
/// exclusion radius. Near-equal magnitudes (within 1e-9 relative) tie-break
/// toward the lower bin. Throws "insufficient peaks" when fewer maxima
/// survive the separation rule.
std::vector<int> detect_peaks(const std::vector<double>& magnitudes, int count,
                              int min_separation_bins);

/// Peak-picks a range profile and maps bins through the profile axis.
SensingResult estimate_ranges(const RangeProfile& profile, int num_targets,
                              int min_separation_bins);

/// Peak-picks a velocity profile; bins at or above N/2 wrap to negative
/// velocities.
SensingResult estimate_velocities(const VelocityProfile& profile,
                                  int num_targets, int min_separation_bins);

/// Ghost suppression for comb sizes 2 and 4: element-wise product of the
/// PRS-derived and DMRS-derived range profiles. The replica patterns of the
/// two pilots only coincide where one of them vanishes, so ghosts of either
/// profile are annihilated by the other.
RangeProfile prs_dmrs_product_profile(const RangeProfile& prs,
                                      const RangeProfile& dmrs);

struct SlotSumDiagnostics {
  int skipped_slots = 0;
};

/// Ghost suppression for comb sizes 6 and 12. Per slot: sum the reciprocal-
/// filtered PRS columns (the stagger fills every subcarrier), normalize that
/// sum and the slot's DMRS column each by its own peak magnitude, transform
/// the sum of the two, and accumulate magnitudes across slots. Slots with no
/// energy are skipped and counted; throws when every slot is empty.
RangeProfile prs_dmrs_sum_profile(const CGrid& g_prs, const CGrid& g_dmrs,
                                  const GridDims& dims, const PrsConfig& prs,
                                  const DmrsConfig& dmrs,
                                  const OfdmParams& params,
                                  SlotSumDiagnostics* diag = nullptr);

}  // namespace isac
