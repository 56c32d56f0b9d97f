#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "isac/channel.hpp"
#include "isac/ofdm.hpp"
#include "isac/resource_grid.hpp"
#include "isac/sensing.hpp"

namespace isac {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Algorithm { PrsOnly, PrsDmrsProduct, PrsDmrsSum };

std::string to_string(Algorithm a);
std::string to_string(DopplerTimeBase b);

struct SweepConfig {
  std::vector<double> sqrt_gamma_c{0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<int> comb_sizes{2, 12};
};

/// Full scenario description. Defaults reproduce the reference scenario:
/// 25 GHz carrier, 120 kHz spacing, 15 dB SNR, two targets at 711 m / 2 m/s
/// and 846 m / 10 m/s, PRS on symbols 1-12, DMRS on symbol 0, data on
/// symbols 0-12.
struct ScenarioConfig {
  // ofdm.*
  double delta_f_hz = 120e3;
  double f_c_hz = 25e9;
  double cp_fraction = 144.0 / 2048.0;
  // grid.*
  int prb_count = 272;
  int slots = 4;
  // prs.* / dmrs.* / pdsch.*
  PrsConfig prs;
  DmrsConfig dmrs;
  PdschConfig pdsch;
  // split.*
  PowerSplit split;
  // channel.*
  ChannelConfig channel;
  // seeds.*
  std::uint64_t master_seed = 1;
  int trial_count = 200;
  // estimator.*
  Algorithm algorithm = Algorithm::PrsDmrsProduct;
  DopplerTimeBase doppler_time_base = DopplerTimeBase::T0;
  int min_separation_bins = 2;
  // sweep.*
  SweepConfig sweep;

  OfdmParams ofdm_params() const;
  GridDims grid_dims() const;
  int num_targets() const { return static_cast<int>(channel.targets.size()); }

  /// Revalidates every component invariant plus the cross-field rules
  /// (targets inside the unambiguous range/velocity window).
  void validate() const;
};

ScenarioConfig default_config();

/// Parses the flat key=value format. Unknown keys, duplicates, malformed
/// values and invariant violations raise ConfigError with the line number
/// or field name.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::string& path);

/// Canonical serialization listing every effective key, defaults included.
/// parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ScenarioConfig& cfg);

}  // namespace isac
