#include "isac/sequences.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace isac {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

// 31-bit registers packed into uint32, bit k holding x(i+k).
struct Lfsr31 {
  std::uint32_t x1;
  std::uint32_t x2;

  void step() {
    std::uint32_t n1 = ((x1 >> 3) ^ x1) & 1u;
    std::uint32_t n2 = ((x2 >> 3) ^ (x2 >> 2) ^ (x2 >> 1) ^ x2) & 1u;
    x1 = (x1 >> 1) | (n1 << 30);
    x2 = (x2 >> 1) | (n2 << 30);
  }

  std::uint8_t output() const { return static_cast<std::uint8_t>((x1 ^ x2) & 1u); }
};

}  // namespace

std::vector<std::uint8_t> gold_sequence(const GoldSeed& seed,
                                        std::size_t length) {
  if (seed.c_init >= (1u << 31))
    throw std::invalid_argument("c_init out of range (must be < 2^31)");
  if (seed.advance_offset < 0)
    throw std::invalid_argument("advance_offset must be non-negative");

  Lfsr31 reg{1u, seed.c_init};
  for (int i = 0; i < seed.advance_offset; ++i) reg.step();

  std::vector<std::uint8_t> out(length);
  for (std::size_t i = 0; i < length; ++i) {
    out[i] = reg.output();
    reg.step();
  }
  return out;
}

SymbolSequence qpsk_map(const std::vector<std::uint8_t>& bits, RefKind origin) {
  if (bits.size() % 2 != 0) throw std::invalid_argument("odd bit count");
  SymbolSequence seq;
  seq.origin = origin;
  seq.values.resize(bits.size() / 2);
  for (std::size_t m = 0; m < seq.values.size(); ++m) {
    double re = (1.0 - 2.0 * bits[2 * m]) * kInvSqrt2;
    double im = (1.0 - 2.0 * bits[2 * m + 1]) * kInvSqrt2;
    seq.values[m] = {re, im};
  }
  return seq;
}

SymbolSequence gen_reference_sequence(RefKind kind, int slot, int symbol,
                                      unsigned id, std::size_t length) {
  if (id >= 4096)
    throw std::invalid_argument("sequence id out of range (must be < 4096): " +
                                std::to_string(id));
  if (slot < 0 || symbol < 0)
    throw std::invalid_argument("slot and symbol must be non-negative");

  std::uint64_t kind_offset = (kind == RefKind::Dmrs) ? (1ull << 17) : 0ull;
  std::uint64_t init = (1ull << 10);
  init *= static_cast<std::uint64_t>(14 * slot + symbol + 1);
  init *= static_cast<std::uint64_t>(2 * id + 1);
  init += id + kind_offset;
  GoldSeed seed{static_cast<std::uint32_t>(init % (1ull << 31)), 1600};

  return qpsk_map(gold_sequence(seed, 2 * length), kind);
}

}  // namespace isac
