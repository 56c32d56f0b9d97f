#include "isac/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace isac {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct RawConfig {
  std::map<std::string, std::pair<std::string, int>> kv;  // key -> (value, line)

  bool has(const std::string& k) const { return kv.count(k) != 0; }

  std::string take(const std::string& k, std::vector<std::string>& seen) {
    seen.push_back(k);
    auto it = kv.find(k);
    return it == kv.end() ? std::string{} : it->second.first;
  }
};

double parse_double(const std::string& key, const std::string& v) {
  if (lower(v) == "inf" || lower(v) == "+inf")
    return std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw ConfigError(key + ": not a number: '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return i;
  } catch (...) {
    throw ConfigError(key + ": not an integer: '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    std::uint64_t i = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return i;
  } catch (...) {
    throw ConfigError(key + ": not an unsigned integer: '" + v + "'");
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

// "0-12" or "0,1,2,...".
std::vector<int> parse_symbol_set(const std::string& key,
                                  const std::string& v) {
  std::vector<int> out;
  auto dash = v.find('-');
  if (dash != std::string::npos && v.find(',') == std::string::npos) {
    int a = static_cast<int>(parse_int(key, trim(v.substr(0, dash))));
    int b = static_cast<int>(parse_int(key, trim(v.substr(dash + 1))));
    if (b < a) throw ConfigError(key + ": descending range");
    for (int s = a; s <= b; ++s) out.push_back(s);
    return out;
  }
  for (const auto& item : split_list(v))
    out.push_back(static_cast<int>(parse_int(key, item)));
  return out;
}

std::string format_double(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::PrsOnly: return "prs_only";
    case Algorithm::PrsDmrsProduct: return "prs_dmrs_product";
    case Algorithm::PrsDmrsSum: return "prs_dmrs_sum";
  }
  return "?";
}

std::string to_string(DopplerTimeBase b) {
  return b == DopplerTimeBase::T0 ? "t0" : "ts";
}

OfdmParams ScenarioConfig::ofdm_params() const {
  return OfdmParams::make(delta_f_hz, f_c_hz, cp_fraction);
}

GridDims ScenarioConfig::grid_dims() const {
  return GridDims::from_prbs(prb_count, slots);
}

void ScenarioConfig::validate() const {
  OfdmParams params = ofdm_params();
  GridDims dims = grid_dims();
  dims.validate();
  prs.validate();
  dmrs.validate();
  pdsch.validate(dmrs);
  split.validate();
  channel.validate();
  if (trial_count < 1) throw ConfigError("seeds.trial_count: must be >= 1");
  if (min_separation_bins < 1)
    throw ConfigError("estimator.min_separation_bins: must be >= 1");

  double r_max = max_range(params);
  double v_max = max_velocity(params, doppler_time_base);
  for (std::size_t i = 0; i < channel.targets.size(); ++i) {
    const Target& t = channel.targets[i];
    if (t.bistatic_range_m >= r_max)
      throw ConfigError("channel.targets." + std::to_string(i) +
                        ".range_m: exceeds the unambiguous range " +
                        format_double(r_max));
    if (std::abs(t.velocity_mps) >= v_max)
      throw ConfigError("channel.targets." + std::to_string(i) +
                        ".velocity_mps: exceeds the unambiguous velocity " +
                        format_double(v_max));
  }
  for (double x : sweep.sqrt_gamma_c)
    if (!(x > 0.0 && x < 1.0))
      throw ConfigError("sweep.sqrt_gamma_c: values must lie in (0,1)");
  if (sweep.sqrt_gamma_c.empty() || sweep.comb_sizes.empty())
    throw ConfigError("sweep: lists must be non-empty");
  for (int c : sweep.comb_sizes)
    if (c != 2 && c != 4 && c != 6 && c != 12)
      throw ConfigError("sweep.comb_sizes: must be among 2,4,6,12");
}

ScenarioConfig default_config() {
  ScenarioConfig cfg;
  cfg.pdsch.symbol_allocation.resize(13);
  for (int i = 0; i < 13; ++i) cfg.pdsch.symbol_allocation[i] = i;
  cfg.channel.targets = {
      Target{{1.0, 0.0}, 711.0, 2.0},
      Target{{1.0, 0.0}, 846.0, 10.0},
  };
  return cfg;
}

ScenarioConfig parse_config(std::istream& in) {
  RawConfig raw;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (raw.kv.count(key))
      throw ConfigError("line " + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    raw.kv[key] = {value, line_no};
  }

  ScenarioConfig cfg = default_config();
  std::vector<std::string> seen;
  auto get = [&](const std::string& k) { return raw.take(k, seen); };

  if (auto v = get("ofdm.delta_f_hz"); !v.empty())
    cfg.delta_f_hz = parse_double("ofdm.delta_f_hz", v);
  if (auto v = get("ofdm.f_c_hz"); !v.empty())
    cfg.f_c_hz = parse_double("ofdm.f_c_hz", v);
  if (auto v = get("ofdm.cp_fraction"); !v.empty())
    cfg.cp_fraction = parse_double("ofdm.cp_fraction", v);
  if (auto v = get("grid.prb_count"); !v.empty())
    cfg.prb_count = static_cast<int>(parse_int("grid.prb_count", v));
  if (auto v = get("grid.slots"); !v.empty())
    cfg.slots = static_cast<int>(parse_int("grid.slots", v));
  if (auto v = get("prs.comb_size"); !v.empty())
    cfg.prs.comb_size = static_cast<int>(parse_int("prs.comb_size", v));
  if (auto v = get("prs.start_symbol"); !v.empty())
    cfg.prs.start_symbol = static_cast<int>(parse_int("prs.start_symbol", v));
  if (auto v = get("prs.num_symbols"); !v.empty())
    cfg.prs.num_symbols = static_cast<int>(parse_int("prs.num_symbols", v));
  if (auto v = get("prs.comb_offset"); !v.empty())
    cfg.prs.comb_offset = static_cast<int>(parse_int("prs.comb_offset", v));
  if (auto v = get("prs.id"); !v.empty())
    cfg.prs.id = static_cast<unsigned>(parse_u64("prs.id", v));
  if (auto v = get("dmrs.symbol_index"); !v.empty())
    cfg.dmrs.symbol_index =
        static_cast<int>(parse_int("dmrs.symbol_index", v));
  if (auto v = get("dmrs.id"); !v.empty())
    cfg.dmrs.id = static_cast<unsigned>(parse_u64("dmrs.id", v));
  if (auto v = get("pdsch.symbols"); !v.empty())
    cfg.pdsch.symbol_allocation = parse_symbol_set("pdsch.symbols", v);
  if (auto v = get("pdsch.payload_seed"); !v.empty())
    cfg.pdsch.payload_seed = parse_u64("pdsch.payload_seed", v);
  if (auto v = get("split.gamma_s"); !v.empty())
    cfg.split.gamma_s = parse_double("split.gamma_s", v);
  if (auto v = get("split.gamma_c"); !v.empty())
    cfg.split.gamma_c = parse_double("split.gamma_c", v);
  if (auto v = get("channel.snr_db"); !v.empty())
    cfg.channel.snr_db = parse_double("channel.snr_db", v);
  if (auto v = get("channel.noise_seed"); !v.empty())
    cfg.channel.noise_seed = parse_u64("channel.noise_seed", v);

  int target_count = cfg.num_targets();
  if (auto v = get("channel.targets.count"); !v.empty())
    target_count = static_cast<int>(parse_int("channel.targets.count", v));
  if (target_count < 1)
    throw ConfigError("channel.targets.count: must be >= 1");
  {
    std::vector<Target> defaults = cfg.channel.targets;
    cfg.channel.targets.assign(target_count, Target{});
    for (int i = 0; i < target_count; ++i) {
      if (i < static_cast<int>(defaults.size()))
        cfg.channel.targets[i] = defaults[i];
      std::string base = "channel.targets." + std::to_string(i);
      if (auto v = get(base + ".range_m"); !v.empty())
        cfg.channel.targets[i].bistatic_range_m =
            parse_double(base + ".range_m", v);
      if (auto v = get(base + ".velocity_mps"); !v.empty())
        cfg.channel.targets[i].velocity_mps =
            parse_double(base + ".velocity_mps", v);
      double re = cfg.channel.targets[i].attenuation.real();
      double im = cfg.channel.targets[i].attenuation.imag();
      if (auto v = get(base + ".alpha_re"); !v.empty())
        re = parse_double(base + ".alpha_re", v);
      if (auto v = get(base + ".alpha_im"); !v.empty())
        im = parse_double(base + ".alpha_im", v);
      cfg.channel.targets[i].attenuation = {re, im};
    }
  }

  if (auto v = get("seeds.master_seed"); !v.empty())
    cfg.master_seed = parse_u64("seeds.master_seed", v);
  if (auto v = get("seeds.trial_count"); !v.empty())
    cfg.trial_count = static_cast<int>(parse_int("seeds.trial_count", v));

  if (auto v = get("estimator.algorithm"); !v.empty()) {
    std::string a = lower(v);
    if (a == "prs_only")
      cfg.algorithm = Algorithm::PrsOnly;
    else if (a == "prs_dmrs_product" || a == "alg1")
      cfg.algorithm = Algorithm::PrsDmrsProduct;
    else if (a == "prs_dmrs_sum" || a == "alg2")
      cfg.algorithm = Algorithm::PrsDmrsSum;
    else
      throw ConfigError("estimator.algorithm: unknown value '" + v + "'");
  }
  if (auto v = get("estimator.doppler_time_base"); !v.empty()) {
    std::string b = lower(v);
    if (b == "t0")
      cfg.doppler_time_base = DopplerTimeBase::T0;
    else if (b == "ts")
      cfg.doppler_time_base = DopplerTimeBase::Ts;
    else
      throw ConfigError("estimator.doppler_time_base: unknown value '" + v +
                        "'");
  }
  if (auto v = get("estimator.min_separation_bins"); !v.empty())
    cfg.min_separation_bins =
        static_cast<int>(parse_int("estimator.min_separation_bins", v));

  if (auto v = get("sweep.sqrt_gamma_c"); !v.empty()) {
    cfg.sweep.sqrt_gamma_c.clear();
    for (const auto& item : split_list(v))
      cfg.sweep.sqrt_gamma_c.push_back(parse_double("sweep.sqrt_gamma_c", item));
  }
  if (auto v = get("sweep.comb_sizes"); !v.empty()) {
    cfg.sweep.comb_sizes.clear();
    for (const auto& item : split_list(v))
      cfg.sweep.comb_sizes.push_back(
          static_cast<int>(parse_int("sweep.comb_sizes", item)));
  }

  // Anything not consumed is unknown.
  std::sort(seen.begin(), seen.end());
  for (const auto& [key, vp] : raw.kv) {
    if (!std::binary_search(seen.begin(), seen.end(), key))
      throw ConfigError("line " + std::to_string(vp.second) +
                        ": unknown key '" + key + "'");
  }

  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in);
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "ofdm.delta_f_hz=" << format_double(cfg.delta_f_hz) << '\n';
  out << "ofdm.f_c_hz=" << format_double(cfg.f_c_hz) << '\n';
  out << "ofdm.cp_fraction=" << format_double(cfg.cp_fraction) << '\n';
  out << "grid.prb_count=" << cfg.prb_count << '\n';
  out << "grid.slots=" << cfg.slots << '\n';
  out << "prs.comb_size=" << cfg.prs.comb_size << '\n';
  out << "prs.start_symbol=" << cfg.prs.start_symbol << '\n';
  out << "prs.num_symbols=" << cfg.prs.num_symbols << '\n';
  out << "prs.comb_offset=" << cfg.prs.comb_offset << '\n';
  out << "prs.id=" << cfg.prs.id << '\n';
  out << "dmrs.symbol_index=" << cfg.dmrs.symbol_index << '\n';
  out << "dmrs.id=" << cfg.dmrs.id << '\n';
  out << "pdsch.symbols=";
  for (std::size_t i = 0; i < cfg.pdsch.symbol_allocation.size(); ++i)
    out << (i ? "," : "") << cfg.pdsch.symbol_allocation[i];
  out << '\n';
  out << "pdsch.payload_seed=" << cfg.pdsch.payload_seed << '\n';
  out << "split.gamma_s=" << format_double(cfg.split.gamma_s) << '\n';
  out << "split.gamma_c=" << format_double(cfg.split.gamma_c) << '\n';
  out << "channel.snr_db=" << format_double(cfg.channel.snr_db) << '\n';
  out << "channel.noise_seed=" << cfg.channel.noise_seed << '\n';
  out << "channel.targets.count=" << cfg.channel.targets.size() << '\n';
  for (std::size_t i = 0; i < cfg.channel.targets.size(); ++i) {
    const Target& t = cfg.channel.targets[i];
    std::string base = "channel.targets." + std::to_string(i);
    out << base << ".range_m=" << format_double(t.bistatic_range_m) << '\n';
    out << base << ".velocity_mps=" << format_double(t.velocity_mps) << '\n';
    out << base << ".alpha_re=" << format_double(t.attenuation.real()) << '\n';
    out << base << ".alpha_im=" << format_double(t.attenuation.imag()) << '\n';
  }
  out << "seeds.master_seed=" << cfg.master_seed << '\n';
  out << "seeds.trial_count=" << cfg.trial_count << '\n';
  out << "estimator.algorithm=" << to_string(cfg.algorithm) << '\n';
  out << "estimator.doppler_time_base=" << to_string(cfg.doppler_time_base)
      << '\n';
  out << "estimator.min_separation_bins=" << cfg.min_separation_bins << '\n';
  out << "sweep.sqrt_gamma_c=";
  for (std::size_t i = 0; i < cfg.sweep.sqrt_gamma_c.size(); ++i)
    out << (i ? "," : "") << format_double(cfg.sweep.sqrt_gamma_c[i]);
  out << '\n';
  out << "sweep.comb_sizes=";
  for (std::size_t i = 0; i < cfg.sweep.comb_sizes.size(); ++i)
    out << (i ? "," : "") << cfg.sweep.comb_sizes[i];
  out << '\n';
  return out.str();
}

}  // namespace isac
