#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace otsm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Block partition d_1..d_m of a D-dimensional space together with the
/// common column count r of the semi-orthogonal blocks.
class BlockSpec {
 public:
  BlockSpec() = default;
  /// Throws InvalidInput unless every d_i >= r >= 1 and dims is non-empty.
  BlockSpec(std::vector<int> dims, int r);

  /// m blocks of equal size d.
  static BlockSpec uniform(int m, int d, int r);

  int m() const { return static_cast<int>(dims_.size()); }
  int r() const { return r_; }
  int D() const { return total_; }
  int dim(int i) const { return dims_[static_cast<std::size_t>(i)]; }
  int offset(int i) const { return offsets_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& dims() const { return dims_; }
  /// D / m, the average block size used by the noise thresholds.
  double mean_dim() const { return static_cast<double>(total_) / m(); }

  bool operator==(const BlockSpec& other) const {
    return r_ == other.r_ && dims_ == other.dims_;
  }

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  int r_ = 0;
  int total_ = 0;
};

/// Symmetric D x D matrix partitioned by a BlockSpec. The entries are
/// symmetrized as (A + A^T) / 2 on construction so symmetry holds exactly.
class BlockSymMatrix {
 public:
  BlockSymMatrix() = default;
  BlockSymMatrix(BlockSpec spec, const Matrix& entries);

  static BlockSymMatrix zeros(const BlockSpec& spec);

  const BlockSpec& spec() const { return spec_; }
  const Matrix& matrix() const { return entries_; }

  auto block(int i, int j) const {
    return entries_.block(spec_.offset(i), spec_.offset(j), spec_.dim(i), spec_.dim(j));
  }
  /// Block row i: d_i x D.
  auto block_row(int i) const {
    return entries_.middleRows(spec_.offset(i), spec_.dim(i));
  }

 private:
  BlockSpec spec_;
  Matrix entries_;
};

/// Tuple (O_1, ..., O_m) of column-orthonormal d_i x r blocks.
class StiefelBlocks {
 public:
  static constexpr double kDefaultOrthoTol = 1e-10;

  StiefelBlocks() = default;
  /// Throws InvalidInput if a block has the wrong shape or
  /// ||O_i^T O_i - I_r||_F exceeds ortho_tol.
  StiefelBlocks(BlockSpec spec, std::vector<Matrix> blocks,
                double ortho_tol = kDefaultOrthoTol);

  /// Splits a D x r matrix into blocks; each block must already be orthonormal.
  static StiefelBlocks from_stacked(const BlockSpec& spec, const Matrix& stacked,
                                    double ortho_tol = kDefaultOrthoTol);

  const BlockSpec& spec() const { return spec_; }
  const Matrix& block(int i) const { return blocks_[static_cast<std::size_t>(i)]; }
  const std::vector<Matrix>& blocks() const { return blocks_; }

  /// Stacked D x r matrix [O_1; ...; O_m].
  Matrix stacked() const;
  /// (O_1 Q, ..., O_m Q) for an r x r orthogonal Q.
  StiefelBlocks rotated(const Matrix& q) const;
  /// max_i ||O_i^T O_i - I_r||_F
  double max_ortho_residual() const;

 private:
  BlockSpec spec_;
  std::vector<Matrix> blocks_;
};

}  // namespace otsm
