#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "isac/cgrid.hpp"

namespace isac {

constexpr int kSymbolsPerSlot = 14;
constexpr int kSubcarriersPerPrb = 12;
constexpr int kMinPrbs = 24;
constexpr int kMaxPrbs = 272;

struct GridDims {
  int num_subcarriers = 0;  // M, multiple of 12
  int num_symbols = 0;      // N = 14 * num_slots
  int num_slots = 0;        // S

  static GridDims from_prbs(int prb_count, int slots);
  void validate() const;
};

/// Comb-patterned pilot occupying num_symbols consecutive symbols per slot,
/// one active subcarrier per comb_size, staggered across symbols.
struct PrsConfig {
  int comb_size = 4;    // one of 2, 4, 6, 12
  int start_symbol = 1;
  int num_symbols = 12; // one of 1, 2, 4, 6, 12
  int comb_offset = 0;  // < comb_size
  unsigned id = 0;

  void validate() const;
};

struct DmrsConfig {
  int symbol_index = 0;  // within slot
  unsigned id = 1;

  void validate() const;
};

struct PdschConfig {
  std::vector<int> symbol_allocation;  // ascending, within slot
  std::uint64_t payload_seed = 7;

  void validate(const DmrsConfig& dmrs) const;
};

/// Power allocation between the communication layer (data + DMRS) and the
/// sensing layer (PRS). The fractions must sum to one.
struct PowerSplit {
  double gamma_s = 0.25;  // sensing fraction
  double gamma_c = 0.75;  // communication fraction

  static PowerSplit from_sqrt_gamma_c(double sqrt_gamma_c);
  double amp_sensing() const;  // sqrt(gamma_s)
  double amp_comm() const;     // sqrt(gamma_c)
  void validate() const;
};

struct OverlapReport {
  bool ok = true;
  int symbol_in_slot = -1;  // colliding symbol when !ok
  std::string message;
};

/// One built transmit grid. Layers store unit-power constellation points;
/// the power split is applied only in `combined`:
///   combined = amp_comm * (data + dmrs) + amp_sensing * prs, per RE.
/// tx_bits records payload bits in mapping order (subcarrier-major within
/// each symbol, symbols in time order).
struct ResourceGrid {
  GridDims dims;
  PrsConfig prs_cfg;
  DmrsConfig dmrs_cfg;
  PdschConfig pdsch_cfg;
  PowerSplit split;

  CGrid prs_layer;
  CGrid dmrs_layer;
  CGrid data_layer;
  CGrid combined;
  std::vector<std::uint8_t> tx_bits;
  std::vector<std::uint8_t> occupied;  // column-major RE occupancy mask

  std::vector<int> prs_symbols() const;   // absolute symbol indices
  std::vector<int> dmrs_symbols() const;

  /// Visits every data-bearing RE in bit-mapping order.
  template <typename Fn>
  void for_each_data_re(Fn&& fn) const {
    for (int s = 0; s < dims.num_slots; ++s) {
      for (int sym : pdsch_cfg.symbol_allocation) {
        int n = s * kSymbolsPerSlot + sym;
        bool is_dmrs_symbol = (sym == dmrs_cfg.symbol_index);
        for (int m = 0; m < dims.num_subcarriers; ++m) {
          if (is_dmrs_symbol && (m % 12 == 0 || m % 12 == 1 || m % 12 == 6 ||
                                 m % 12 == 7))
            continue;
          fn(m, n);
        }
      }
    }
  }
};

namespace detail {
/// Test hook: swaps two comb-4 stagger entries while enabled.
void set_stagger_corruption(bool enabled);
}  // namespace detail

/// Active subcarriers of a PRS symbol: {m : m mod comb =
/// (stagger[rel] + comb_offset) mod comb}, rel = (symbol - start) mod comb.
/// Throws if the symbol lies outside the PRS span.
std::vector<int> prs_re_pattern(const PrsConfig& cfg, int symbol_in_slot,
                                int num_subcarriers);

/// Type-2 single-CDM-group DMRS footprint: {12p + q : q in {0,1,6,7}}.
std::vector<int> dmrs_re_pattern(int num_subcarriers);

/// Checks that the DMRS symbol lies outside the PRS span.
OverlapReport validate_no_overlap(const PrsConfig& prs, const DmrsConfig& dmrs);

/// Builds all layers and the power-weighted combination. Throws on invalid
/// configuration or PRS/DMRS overlap.
ResourceGrid build_grid(const GridDims& dims, const PrsConfig& prs,
                        const DmrsConfig& dmrs, const PdschConfig& pdsch,
                        const PowerSplit& split);

/// Debug dump, columns m,n,layer,re,im.
void dump_grid_csv(const ResourceGrid& grid, std::ostream& out);

}  // namespace isac
