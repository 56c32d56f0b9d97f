#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "isac/cgrid.hpp"

namespace isac {

/// Discrete Fourier transform of a fixed size. Power-of-two sizes run the
/// iterative radix-2 kernel; everything else goes through Bluestein's
/// chirp-z reduction onto a power-of-two convolution. Construction
/// precomputes all tables; forward()/inverse() are const and safe to call
/// from multiple threads on distinct buffers.
///
/// Conventions: forward X[k] = sum_n x[n] e^{-j2pi nk/N} (unscaled),
/// inverse x[n] = (1/N) sum_k X[k] e^{+j2pi nk/N}.
class Fft {
 public:
  explicit Fft(std::size_t n);

  std::size_t size() const { return n_; }

  void forward(std::span<cplx> data) const;
  void inverse(std::span<cplx> data) const;

  std::vector<cplx> forward_copy(std::span<const cplx> in) const;
  std::vector<cplx> inverse_copy(std::span<const cplx> in) const;

 private:
  void pow2_transform(cplx* data, std::size_t n, bool invert) const;
  void bluestein_forward(std::span<cplx> data) const;

  std::size_t n_ = 0;
  bool is_pow2_ = false;

  // Bluestein state (empty for power-of-two sizes).
  std::size_t conv_n_ = 0;
  std::vector<cplx> chirp_;      // e^{-j pi k^2 / n}, k < n
  std::vector<cplx> kernel_fft_; // forward FFT of the padded conjugate chirp
};

}  // namespace isac
