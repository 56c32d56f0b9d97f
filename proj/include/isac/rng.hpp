#pragma once

#include <cstdint>
#include <random>

namespace isac {

// splitmix64 finalizer; used to decorrelate seed streams.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Deterministic per-stream seed derived from a master seed and up to three
/// stream labels. Every stochastic stage of the pipeline draws its seed here
/// so that runs are reproducible regardless of scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = mix64(master ^ 0xA5A5A5A5A5A5A5A5ull);
  s = mix64(s ^ mix64(a));
  s = mix64(s ^ mix64(b));
  s = mix64(s ^ mix64(c));
  return s;
}

/// Uniform double in (0,1], fully specified given the engine state.
inline double uniform_unit(std::mt19937_64& eng) {
  return static_cast<double>((eng() >> 11) + 1) * 0x1.0p-53;
}

/// One standard normal via Box-Muller. Avoids std::normal_distribution,
/// whose output sequence is implementation-defined.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : eng_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform_unit(eng_);
    double u2 = uniform_unit(eng_);
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Stream of uniform bits taken MSB-first from mt19937_64 words.
class BitSource {
 public:
  explicit BitSource(std::uint64_t seed) : eng_(seed) {}

  std::uint8_t next() {
    if (remaining_ == 0) {
      word_ = eng_();
      remaining_ = 64;
    }
    --remaining_;
    return static_cast<std::uint8_t>((word_ >> remaining_) & 1u);
  }

 private:
  std::mt19937_64 eng_;
  std::uint64_t word_ = 0;
  int remaining_ = 0;
};

}  // namespace isac
