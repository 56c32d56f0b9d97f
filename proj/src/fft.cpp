#include "isac/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace isac {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

bool power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("fft size must be positive");
  is_pow2_ = power_of_two(n);
  if (is_pow2_) return;

  // Bluestein: N-point DFT as a cyclic convolution of length >= 2N-1.
  conv_n_ = next_pow2(2 * n - 1);
  chirp_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the phase argument small.
    std::uint64_t q = (static_cast<std::uint64_t>(k) * k) % (2 * n);
    double phase = -kPi * static_cast<double>(q) / static_cast<double>(n);
    chirp_[k] = {std::cos(phase), std::sin(phase)};
  }
  std::vector<cplx> kernel(conv_n_, cplx{0.0, 0.0});
  kernel[0] = std::conj(chirp_[0]);
  for (std::size_t k = 1; k < n; ++k) {
    kernel[k] = std::conj(chirp_[k]);
    kernel[conv_n_ - k] = std::conj(chirp_[k]);
  }
  pow2_transform(kernel.data(), conv_n_, false);
  kernel_fft_ = std::move(kernel);
}

void Fft::pow2_transform(cplx* data, std::size_t n, bool invert) const {
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * kPi / static_cast<double>(len) * (invert ? 1.0 : -1.0);
    cplx wlen{std::cos(ang), std::sin(ang)};
    for (std::size_t i = 0; i < n; i += len) {
      cplx w{1.0, 0.0};
      for (std::size_t k = 0; k < len / 2; ++k) {
        cplx u = data[i + k];
        cplx v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

void Fft::bluestein_forward(std::span<cplx> data) const {
  std::vector<cplx> a(conv_n_, cplx{0.0, 0.0});
  for (std::size_t k = 0; k < n_; ++k) a[k] = data[k] * chirp_[k];
  pow2_transform(a.data(), conv_n_, false);
  for (std::size_t k = 0; k < conv_n_; ++k) a[k] *= kernel_fft_[k];
  pow2_transform(a.data(), conv_n_, true);
  double scale = 1.0 / static_cast<double>(conv_n_);
  for (std::size_t k = 0; k < n_; ++k) data[k] = a[k] * scale * chirp_[k];
}

void Fft::forward(std::span<cplx> data) const {
  if (data.size() != n_) throw std::invalid_argument("fft buffer size mismatch");
  if (is_pow2_) {
    pow2_transform(data.data(), n_, false);
  } else {
    bluestein_forward(data);
  }
}

void Fft::inverse(std::span<cplx> data) const {
  if (data.size() != n_) throw std::invalid_argument("fft buffer size mismatch");
  for (auto& x : data) x = std::conj(x);
  forward(data);
  double scale = 1.0 / static_cast<double>(n_);
  for (auto& x : data) x = std::conj(x) * scale;
}

std::vector<cplx> Fft::forward_copy(std::span<const cplx> in) const {
  std::vector<cplx> out(in.begin(), in.end());
  forward(out);
  return out;
}

std::vector<cplx> Fft::inverse_copy(std::span<const cplx> in) const {
  std::vector<cplx> out(in.begin(), in.end());
  inverse(out);
  return out;
}

}  // namespace isac
