#pragma once

#include <stdexcept>
#include <vector>

namespace fslhd {

/// Dense row-major matrix with 1-based indexing.
///
/// All public interfaces in this library use 1-based row/column indices;
/// keeping the accessor 1-based as well confines the offset arithmetic to
/// this one place.
template <typename T>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Mat: negative dimensions");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& operator()(int r, int c) { return data_[index(r, c)]; }
  const T& operator()(int r, int c) const { return data_[index(r, c)]; }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  bool operator==(const Mat&) const = default;

 private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r - 1) * cols_ + (c - 1);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using IntMat = Mat<int>;
using RealMat = Mat<double>;

/// Ceiling of a/b for positive integers.
inline long long ceil_div(long long a, long long b) { return (a + b - 1) / b; }

}  // namespace fslhd
