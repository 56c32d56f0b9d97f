#include "isac/resource_grid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "isac/rng.hpp"
#include "isac/sequences.hpp"

namespace isac {

namespace {

std::atomic<bool> g_stagger_corrupt{false};

// Frequency offset of each PRS symbol relative to the comb, indexed by
// (symbol - start) mod comb.
const int* stagger_table(int comb_size) {
  static const int comb2[] = {0, 1};
  static const int comb4[] = {0, 2, 1, 3};
  static const int comb4_bad[] = {0, 2, 1, 1};  // test hook: offset 3 lost
  static const int comb6[] = {0, 3, 1, 4, 2, 5};
  static const int comb12[] = {0, 6, 3, 9, 1, 7, 4, 10, 2, 8, 5, 11};
  switch (comb_size) {
    case 2: return comb2;
    case 4: return g_stagger_corrupt.load() ? comb4_bad : comb4;
    case 6: return comb6;
    case 12: return comb12;
    default:
      throw std::invalid_argument("comb_size must be one of 2, 4, 6, 12");
  }
}

bool valid_num_symbols(int n) {
  return n == 1 || n == 2 || n == 4 || n == 6 || n == 12;
}

}  // namespace

namespace detail {
void set_stagger_corruption(bool enabled) { g_stagger_corrupt.store(enabled); }
}  // namespace detail

GridDims GridDims::from_prbs(int prb_count, int slots) {
  GridDims d;
  d.num_subcarriers = prb_count * kSubcarriersPerPrb;
  d.num_slots = slots;
  d.num_symbols = slots * kSymbolsPerSlot;
  d.validate();
  return d;
}

void GridDims::validate() const {
  if (num_subcarriers % kSubcarriersPerPrb != 0)
    throw std::invalid_argument("num_subcarriers must be a multiple of 12");
  int prbs = num_subcarriers / kSubcarriersPerPrb;
  if (prbs < kMinPrbs || prbs > kMaxPrbs)
    throw std::invalid_argument("prb_count must lie in [24, 272], got " +
                                std::to_string(prbs));
  if (num_slots < 1) throw std::invalid_argument("num_slots must be >= 1");
  if (num_symbols != num_slots * kSymbolsPerSlot)
    throw std::invalid_argument("num_symbols must equal 14 * num_slots");
}

void PrsConfig::validate() const {
  stagger_table(comb_size);  // throws on bad comb
  if (!valid_num_symbols(num_symbols))
    throw std::invalid_argument("prs num_symbols must be one of 1,2,4,6,12");
  if (start_symbol < 0 || start_symbol + num_symbols > kSymbolsPerSlot)
    throw std::invalid_argument("prs span exceeds the slot");
  if (comb_offset < 0 || comb_offset >= comb_size)
    throw std::invalid_argument("comb_offset must be < comb_size");
  if (id >= 4096) throw std::invalid_argument("prs id must be < 4096");
}

void DmrsConfig::validate() const {
  if (symbol_index < 0 || symbol_index >= kSymbolsPerSlot)
    throw std::invalid_argument("dmrs symbol_index must be < 14");
  if (id >= 4096) throw std::invalid_argument("dmrs id must be < 4096");
}

void PdschConfig::validate(const DmrsConfig& dmrs) const {
  if (symbol_allocation.empty())
    throw std::invalid_argument("pdsch symbol allocation is empty");
  int prev = -1;
  for (int s : symbol_allocation) {
    if (s < 0 || s >= kSymbolsPerSlot)
      throw std::invalid_argument("pdsch symbol index out of slot");
    if (s <= prev)
      throw std::invalid_argument("pdsch symbols must be ascending and unique");
    prev = s;
  }
  if (!std::binary_search(symbol_allocation.begin(), symbol_allocation.end(),
                          dmrs.symbol_index))
    throw std::invalid_argument(
        "dmrs symbol_index must be inside the pdsch allocation");
}

PowerSplit PowerSplit::from_sqrt_gamma_c(double sqrt_gamma_c) {
  PowerSplit p;
  p.gamma_c = sqrt_gamma_c * sqrt_gamma_c;
  p.gamma_s = 1.0 - p.gamma_c;
  return p;
}

double PowerSplit::amp_sensing() const { return std::sqrt(gamma_s); }
double PowerSplit::amp_comm() const { return std::sqrt(gamma_c); }

void PowerSplit::validate() const {
  if (gamma_s < 0.0 || gamma_s > 1.0 || gamma_c < 0.0 || gamma_c > 1.0)
    throw std::invalid_argument("power fractions must lie in [0,1]");
  if (std::abs(gamma_s + gamma_c - 1.0) > 1e-12)
    throw std::invalid_argument("gamma_s + gamma_c must equal 1");
}

std::vector<int> ResourceGrid::prs_symbols() const {
  std::vector<int> out;
  for (int s = 0; s < dims.num_slots; ++s)
    for (int k = 0; k < prs_cfg.num_symbols; ++k)
      out.push_back(s * kSymbolsPerSlot + prs_cfg.start_symbol + k);
  return out;
}

std::vector<int> ResourceGrid::dmrs_symbols() const {
  std::vector<int> out;
  for (int s = 0; s < dims.num_slots; ++s)
    out.push_back(s * kSymbolsPerSlot + dmrs_cfg.symbol_index);
  return out;
}

std::vector<int> prs_re_pattern(const PrsConfig& cfg, int symbol_in_slot,
                                int num_subcarriers) {
  cfg.validate();
  if (symbol_in_slot < cfg.start_symbol ||
      symbol_in_slot >= cfg.start_symbol + cfg.num_symbols)
    throw std::invalid_argument("symbol " + std::to_string(symbol_in_slot) +
                                " lies outside the PRS span");
  const int* stagger = stagger_table(cfg.comb_size);
  int rel = (symbol_in_slot - cfg.start_symbol) % cfg.comb_size;
  int offset = (stagger[rel] + cfg.comb_offset) % cfg.comb_size;
  std::vector<int> out;
  out.reserve(num_subcarriers / cfg.comb_size + 1);
  for (int m = offset; m < num_subcarriers; m += cfg.comb_size)
    out.push_back(m);
  return out;
}

std::vector<int> dmrs_re_pattern(int num_subcarriers) {
  if (num_subcarriers % kSubcarriersPerPrb != 0)
    throw std::invalid_argument("num_subcarriers must be a multiple of 12");
  static const int offsets[] = {0, 1, 6, 7};
  std::vector<int> out;
  out.reserve(num_subcarriers / 3);
  for (int p = 0; p < num_subcarriers / kSubcarriersPerPrb; ++p)
    for (int q : offsets) out.push_back(p * kSubcarriersPerPrb + q);
  return out;
}

OverlapReport validate_no_overlap(const PrsConfig& prs, const DmrsConfig& dmrs) {
  OverlapReport rep;
  if (dmrs.symbol_index >= prs.start_symbol &&
      dmrs.symbol_index < prs.start_symbol + prs.num_symbols) {
    rep.ok = false;
    rep.symbol_in_slot = dmrs.symbol_index;
    rep.message = "dmrs symbol " + std::to_string(dmrs.symbol_index) +
                  " collides with the PRS span [" +
                  std::to_string(prs.start_symbol) + ", " +
                  std::to_string(prs.start_symbol + prs.num_symbols) + ")";
  }
  return rep;
}

ResourceGrid build_grid(const GridDims& dims, const PrsConfig& prs,
                        const DmrsConfig& dmrs, const PdschConfig& pdsch,
                        const PowerSplit& split) {
  dims.validate();
  prs.validate();
  dmrs.validate();
  pdsch.validate(dmrs);
  split.validate();

  OverlapReport rep = validate_no_overlap(prs, dmrs);
  if (!rep.ok) {
    // Name the first colliding RE of the first slot.
    throw std::invalid_argument(
        rep.message + "; first colliding RE (m,n)=(0," +
        std::to_string(rep.symbol_in_slot) + ")");
  }

  ResourceGrid grid;
  grid.dims = dims;
  grid.prs_cfg = prs;
  grid.dmrs_cfg = dmrs;
  grid.pdsch_cfg = pdsch;
  grid.split = split;

  std::size_t rows = static_cast<std::size_t>(dims.num_subcarriers);
  std::size_t cols = static_cast<std::size_t>(dims.num_symbols);
  grid.prs_layer = CGrid(rows, cols);
  grid.dmrs_layer = CGrid(rows, cols);
  grid.data_layer = CGrid(rows, cols);
  grid.occupied.assign(rows * cols, 0);

  // PRS: every slot, staggered comb on each configured symbol.
  for (int s = 0; s < dims.num_slots; ++s) {
    for (int k = 0; k < prs.num_symbols; ++k) {
      int sym = prs.start_symbol + k;
      int n = s * kSymbolsPerSlot + sym;
      auto pattern = prs_re_pattern(prs, sym, dims.num_subcarriers);
      auto seq = gen_reference_sequence(RefKind::Prs, s, sym, prs.id,
                                        pattern.size());
      for (std::size_t i = 0; i < pattern.size(); ++i)
        grid.prs_layer(pattern[i], n) = seq.values[i];
    }
  }

  // DMRS: one symbol per slot.
  auto dmrs_pattern = dmrs_re_pattern(dims.num_subcarriers);
  for (int s = 0; s < dims.num_slots; ++s) {
    int n = s * kSymbolsPerSlot + dmrs.symbol_index;
    auto seq = gen_reference_sequence(RefKind::Dmrs, s, dmrs.symbol_index,
                                      dmrs.id, dmrs_pattern.size());
    for (std::size_t i = 0; i < dmrs_pattern.size(); ++i)
      grid.dmrs_layer(dmrs_pattern[i], n) = seq.values[i];
  }

  // Payload: QPSK on every allocated RE except DMRS REs. PRS REs carry data
  // too; the two coexist through the power split.
  BitSource bits(pdsch.payload_seed);
  grid.for_each_data_re([&](int m, int n) {
    std::uint8_t b0 = bits.next();
    std::uint8_t b1 = bits.next();
    grid.tx_bits.push_back(b0);
    grid.tx_bits.push_back(b1);
    constexpr double kInvSqrt2 = 0.70710678118654752440;
    grid.data_layer(m, n) = {(1.0 - 2.0 * b0) * kInvSqrt2,
                             (1.0 - 2.0 * b1) * kInvSqrt2};
  });

  double ac = split.amp_comm();
  double as = split.amp_sensing();
  grid.combined = CGrid(rows, cols);
  for (std::size_t n = 0; n < cols; ++n) {
    for (std::size_t m = 0; m < rows; ++m) {
      cplx c = ac * (grid.data_layer(m, n) + grid.dmrs_layer(m, n)) +
               as * grid.prs_layer(m, n);
      grid.combined(m, n) = c;
      bool occ = grid.data_layer(m, n) != cplx{} ||
                 grid.dmrs_layer(m, n) != cplx{} ||
                 grid.prs_layer(m, n) != cplx{};
      grid.occupied[n * rows + m] = occ ? 1 : 0;
    }
  }
  return grid;
}

void dump_grid_csv(const ResourceGrid& grid, std::ostream& out) {
  out << "m,n,layer,re,im\n";
  auto emit = [&](const CGrid& layer, const char* name) {
    for (std::size_t n = 0; n < layer.cols(); ++n)
      for (std::size_t m = 0; m < layer.rows(); ++m) {
        cplx v = layer(m, n);
        if (v == cplx{}) continue;
        out << m << ',' << n << ',' << name << ',' << v.real() << ','
            << v.imag() << '\n';
      }
  };
  emit(grid.prs_layer, "prs");
  emit(grid.dmrs_layer, "dmrs");
  emit(grid.data_layer, "data");
}

}  // namespace isac
