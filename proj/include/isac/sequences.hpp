#pragma once

#include <cstdint>
#include <vector>

#include "isac/cgrid.hpp"

namespace isac {

/// Seed for the length-31 Gold generator. c_init loads the second register;
/// the first register always starts from the fixed unit state. The generator
/// discards advance_offset outputs before emitting.
struct GoldSeed {
  std::uint32_t c_init = 0;  // must be < 2^31
  int advance_offset = 1600;
};

enum class RefKind { Prs, Dmrs };

/// QPSK-mapped reference sequence; every element is (+-1 +-j)/sqrt(2).
struct SymbolSequence {
  std::vector<cplx> values;
  RefKind origin = RefKind::Prs;
};

/// Gold sequence c(i) = (x1(i+off) + x2(i+off)) mod 2 from two 31-bit LFSRs:
/// x1 feedback taps {0,3} from the unit state, x2 feedback taps {0,1,2,3}
/// from c_init.
std::vector<std::uint8_t> gold_sequence(const GoldSeed& seed,
                                        std::size_t length);

/// Maps bit pairs to QPSK: pair (b0,b1) -> ((1-2 b0) + j(1-2 b1))/sqrt(2).
/// Throws on an odd bit count.
SymbolSequence qpsk_map(const std::vector<std::uint8_t>& bits,
                        RefKind origin = RefKind::Prs);

/// Reference sequence for one (slot, symbol) position. The init word is
/// c_init = (2^10 (14 slot + symbol + 1)(2 id + 1) + id + kind_offset)
/// mod 2^31 with kind_offset 0 for PRS and 2^17 for DMRS. id must be < 4096.
SymbolSequence gen_reference_sequence(RefKind kind, int slot, int symbol,
                                      unsigned id, std::size_t length);

}  // namespace isac
