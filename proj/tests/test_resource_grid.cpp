#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "isac/resource_grid.hpp"

using namespace isac;

namespace {

PdschConfig full_allocation() {
  PdschConfig pdsch;
  for (int i = 0; i < 13; ++i) pdsch.symbol_allocation.push_back(i);
  return pdsch;
}

}  // namespace

TEST_CASE("comb-2 pattern at relative symbol 0 takes even subcarriers") {
  PrsConfig cfg;
  cfg.comb_size = 2;
  cfg.start_symbol = 0;
  cfg.num_symbols = 12;
  std::vector<int> want;
  for (int m = 0; m < 24; m += 2) want.push_back(m);
  CHECK(prs_re_pattern(cfg, 0, 24) == want);
}

TEST_CASE("comb-4 pattern at relative symbol 1 is shifted by 2") {
  PrsConfig cfg;
  cfg.comb_size = 4;
  cfg.start_symbol = 0;
  cfg.num_symbols = 12;
  CHECK(prs_re_pattern(cfg, 1, 24) == std::vector<int>{2, 6, 10, 14, 18, 22});
}

TEST_CASE("comb-12 puts one RE per PRB") {
  PrsConfig cfg;
  cfg.comb_size = 12;
  cfg.start_symbol = 0;
  cfg.num_symbols = 12;
  CHECK(prs_re_pattern(cfg, 0, 24) == std::vector<int>{0, 12});
}

TEST_CASE("pattern rejects symbols outside the PRS span") {
  PrsConfig cfg;  // symbols 1..12
  CHECK_THROWS_AS(prs_re_pattern(cfg, 0, 24), std::invalid_argument);
  CHECK_THROWS_AS(prs_re_pattern(cfg, 13, 24), std::invalid_argument);
}

TEST_CASE("stagger union covers every subcarrier within one period") {
  for (int comb : {2, 4, 6, 12}) {
    PrsConfig cfg;
    cfg.comb_size = comb;
    cfg.start_symbol = 0;
    cfg.num_symbols = 12;
    std::set<int> seen;
    for (int sym = 0; sym < comb; ++sym)
      for (int m : prs_re_pattern(cfg, sym, 48)) seen.insert(m);
    CAPTURE(comb);
    CHECK(seen.size() == 48);
  }
}

TEST_CASE("dmrs pattern tiles {0,1,6,7} across PRBs") {
  CHECK(dmrs_re_pattern(12) == std::vector<int>{0, 1, 6, 7});
  CHECK(dmrs_re_pattern(24) ==
        std::vector<int>{0, 1, 6, 7, 12, 13, 18, 19});
  for (int m : {12, 36, 288}) CHECK(dmrs_re_pattern(m).size() ==
                                    static_cast<std::size_t>(m) / 3);
}

TEST_CASE("overlap validation separates DMRS from the PRS span") {
  PrsConfig prs;  // symbols 1..12
  DmrsConfig dmrs;
  dmrs.symbol_index = 0;
  CHECK(validate_no_overlap(prs, dmrs).ok);
  dmrs.symbol_index = 1;
  auto rep = validate_no_overlap(prs, dmrs);
  CHECK_FALSE(rep.ok);
  CHECK(rep.symbol_in_slot == 1);
}

TEST_CASE("degenerate PRS span is rejected by the config invariant") {
  PrsConfig prs;
  prs.num_symbols = 0;
  CHECK_THROWS_AS(prs.validate(), std::invalid_argument);
}

TEST_CASE("grid dims bounds") {
  CHECK_THROWS_AS(GridDims::from_prbs(23, 1), std::invalid_argument);
  CHECK_THROWS_AS(GridDims::from_prbs(273, 1), std::invalid_argument);
  auto d = GridDims::from_prbs(24, 2);
  CHECK(d.num_subcarriers == 288);
  CHECK(d.num_symbols == 28);
}

TEST_CASE("power split must sum to one") {
  PowerSplit bad{0.3, 0.8};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  PowerSplit ok = PowerSplit::from_sqrt_gamma_c(0.7);
  ok.validate();
  CHECK(ok.gamma_c == doctest::Approx(0.49));
}

TEST_CASE("combined grid is the exact weighted layer sum") {
  GridDims dims = GridDims::from_prbs(24, 2);
  PrsConfig prs;
  DmrsConfig dmrs;
  PowerSplit split = PowerSplit::from_sqrt_gamma_c(0.8);
  ResourceGrid grid = build_grid(dims, prs, dmrs, full_allocation(), split);

  double ac = split.amp_comm();
  double as = split.amp_sensing();
  for (std::size_t n = 0; n < grid.combined.cols(); ++n)
    for (std::size_t m = 0; m < grid.combined.rows(); ++m) {
      cplx want = ac * (grid.data_layer(m, n) + grid.dmrs_layer(m, n)) +
                  as * grid.prs_layer(m, n);
      REQUIRE(grid.combined(m, n) == want);  // bit-exact by construction
    }
}

TEST_CASE("PRS and DMRS layers have disjoint support") {
  GridDims dims = GridDims::from_prbs(24, 2);
  ResourceGrid grid = build_grid(dims, PrsConfig{}, DmrsConfig{},
                                 full_allocation(),
                                 PowerSplit::from_sqrt_gamma_c(0.5));
  for (std::size_t i = 0; i < grid.prs_layer.size(); ++i) {
    bool both = grid.prs_layer.data()[i] != cplx{} &&
                grid.dmrs_layer.data()[i] != cplx{};
    REQUIRE_FALSE(both);
  }
}

TEST_CASE("zero sensing weight removes the PRS from the combination") {
  GridDims dims = GridDims::from_prbs(24, 1);
  ResourceGrid grid = build_grid(dims, PrsConfig{}, DmrsConfig{},
                                 full_allocation(), PowerSplit{0.0, 1.0});
  for (std::size_t n = 0; n < grid.combined.cols(); ++n)
    for (std::size_t m = 0; m < grid.combined.rows(); ++m) {
      cplx data_part = grid.data_layer(m, n) + grid.dmrs_layer(m, n);
      CHECK(std::abs(grid.combined(m, n) - data_part) < 1e-15);
    }
}

TEST_CASE("full sensing weight leaves exactly the PRS layer") {
  GridDims dims = GridDims::from_prbs(24, 1);
  ResourceGrid grid = build_grid(dims, PrsConfig{}, DmrsConfig{},
                                 full_allocation(), PowerSplit{1.0, 0.0});
  for (std::size_t i = 0; i < grid.combined.size(); ++i)
    CHECK(grid.combined.data()[i] == grid.prs_layer.data()[i]);
}

TEST_CASE("reference scenario layout populates all allocated REs") {
  GridDims dims = GridDims::from_prbs(24, 4);
  ResourceGrid grid = build_grid(dims, PrsConfig{}, DmrsConfig{},
                                 full_allocation(),
                                 PowerSplit::from_sqrt_gamma_c(0.5));
  // Symbols 0..12 of every slot carry either data or DMRS on every RE;
  // symbol 13 stays empty.
  for (int s = 0; s < dims.num_slots; ++s) {
    for (int sym = 0; sym < kSymbolsPerSlot; ++sym) {
      int n = s * kSymbolsPerSlot + sym;
      for (int m = 0; m < dims.num_subcarriers; ++m) {
        bool has_comm = grid.data_layer(m, n) != cplx{} ||
                        grid.dmrs_layer(m, n) != cplx{};
        REQUIRE(has_comm == (sym <= 12));
      }
    }
  }
  CHECK(grid.tx_bits.size() ==
        static_cast<std::size_t>(4) * 2 * (13 * 288 - 288 / 3));
}

TEST_CASE("grid build is reproducible bit for bit") {
  GridDims dims = GridDims::from_prbs(24, 1);
  auto a = build_grid(dims, PrsConfig{}, DmrsConfig{}, full_allocation(),
                      PowerSplit::from_sqrt_gamma_c(0.6));
  auto b = build_grid(dims, PrsConfig{}, DmrsConfig{}, full_allocation(),
                      PowerSplit::from_sqrt_gamma_c(0.6));
  CHECK(a.tx_bits == b.tx_bits);
  CHECK(a.combined.data() == b.combined.data());
}

TEST_CASE("overlapping DMRS symbol aborts the build naming the RE") {
  GridDims dims = GridDims::from_prbs(24, 1);
  DmrsConfig dmrs;
  dmrs.symbol_index = 1;  // inside the default PRS span
  CHECK_THROWS_WITH_AS(
      build_grid(dims, PrsConfig{}, dmrs, full_allocation(),
                 PowerSplit::from_sqrt_gamma_c(0.5)),
      doctest::Contains("(0,1)"), std::invalid_argument);
}

TEST_CASE("average combined power follows the PRS density") {
  // gamma_c + gamma_s * density over the allocated REs, Monte-Carlo sense.
  GridDims dims = GridDims::from_prbs(24, 4);
  for (int comb : {2, 12}) {
    PrsConfig prs;
    prs.comb_size = comb;
    PowerSplit split = PowerSplit::from_sqrt_gamma_c(0.6);
    ResourceGrid grid =
        build_grid(dims, prs, DmrsConfig{}, full_allocation(), split);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < grid.combined.size(); ++i) {
      if (!grid.occupied[i]) continue;
      sum += std::norm(grid.combined.data()[i]);
      ++count;
    }
    double density = (12.0 / comb) / 13.0;  // PRS REs per occupied RE
    double want = split.gamma_c + split.gamma_s * density;
    CAPTURE(comb);
    CHECK(sum / count == doctest::Approx(want).epsilon(0.02));
  }
}

TEST_CASE("grid dump uses the m,n,layer,re,im format") {
  GridDims dims = GridDims::from_prbs(24, 1);
  ResourceGrid grid = build_grid(dims, PrsConfig{}, DmrsConfig{},
                                 full_allocation(),
                                 PowerSplit::from_sqrt_gamma_c(0.5));
  std::ostringstream out;
  dump_grid_csv(grid, out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "m,n,layer,re,im");
  std::string line;
  std::getline(in, line);
  CHECK(line.find(",prs,") != std::string::npos);
}
