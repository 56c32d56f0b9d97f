#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace isac {

using cplx = std::complex<double>;

/// Dense complex matrix in column-major order. Rows index subcarriers,
/// columns index OFDM symbols, so one column is one symbol's spectrum.
class CGrid {
 public:
  CGrid() = default;
  CGrid(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), v_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return v_.size(); }

  cplx& operator()(std::size_t r, std::size_t c) { return v_[c * rows_ + r]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return v_[c * rows_ + r];
  }

  std::span<cplx> col(std::size_t c) { return {v_.data() + c * rows_, rows_}; }
  std::span<const cplx> col(std::size_t c) const {
    return {v_.data() + c * rows_, rows_};
  }

  std::vector<cplx>& data() { return v_; }
  const std::vector<cplx>& data() const { return v_; }

  bool same_shape(const CGrid& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> v_;
};

}  // namespace isac
