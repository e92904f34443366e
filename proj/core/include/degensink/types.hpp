#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace degensink {

// Measures are nonnegative weight vectors, couplings nonnegative N x M
// matrices. Both are plain Eigen objects so callers can use the full
// Eigen toolbox on them.
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Measure = Vec;
using Coupling = Mat;

// Sorted, duplicate-free list of 0-based indices into D or F.
using IndexSet = std::vector<int>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative tolerance for "balanced" total masses.
inline constexpr double kMassTol = 1e-12;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidInput : Error {
  using Error::Error;
};
struct InfeasibleProjection : Error {
  using Error::Error;
};
struct Assumption1Violated : Error {
  using Error::Error;
};
struct Assumption2Violated : Error {
  using Error::Error;
};
struct DimensionTooLarge : Error {
  using Error::Error;
};
struct OverflowDetected : Error {
  using Error::Error;
};

// Boolean adjacency of the bipartite graph (D u F, x_i ~ y_j iff R_ij > 0).
class BipartiteSupport {
 public:
  BipartiteSupport() = default;
  BipartiteSupport(int rows, int cols, bool value = false)
      : rows_(rows), cols_(cols), bits_(static_cast<size_t>(rows) * cols, value ? 1 : 0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool operator()(int i, int j) const { return bits_[index(i, j)] != 0; }
  void set(int i, int j, bool v) { bits_[index(i, j)] = v ? 1 : 0; }

  long count() const {
    long n = 0;
    for (auto b : bits_) n += b;
    return n;
  }

  // True iff every edge of *this is also an edge of other.
  bool subset_of(const BipartiteSupport& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) return false;
    for (size_t k = 0; k < bits_.size(); ++k)
      if (bits_[k] && !other.bits_[k]) return false;
    return true;
  }

  bool operator==(const BipartiteSupport& o) const = default;

  // 1 on edges, 0 elsewhere.
  Mat indicator() const {
    Mat m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j) ? 1.0 : 0.0;
    return m;
  }

 private:
  size_t index(int i, int j) const { return static_cast<size_t>(i) * cols_ + j; }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

}  // namespace degensink
