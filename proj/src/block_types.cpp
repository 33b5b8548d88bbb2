#include "otsm/block_types.hpp"

#include "otsm/error.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace otsm {

BlockSpec::BlockSpec(std::vector<int> dims, int r) : dims_(std::move(dims)), r_(r) {
  if (dims_.empty()) throw InvalidInput("BlockSpec: at least one block is required");
  if (r_ < 1) throw InvalidInput("BlockSpec: r must be positive");
  offsets_.reserve(dims_.size());
  for (int d : dims_) {
    if (d < r_) {
      throw InvalidInput("BlockSpec: block size " + std::to_string(d) +
                         " is smaller than r = " + std::to_string(r_));
    }
    offsets_.push_back(total_);
    total_ += d;
  }
}

BlockSpec BlockSpec::uniform(int m, int d, int r) {
  if (m < 1) throw InvalidInput("BlockSpec: m must be positive");
  return BlockSpec(std::vector<int>(static_cast<std::size_t>(m), d), r);
}

BlockSymMatrix::BlockSymMatrix(BlockSpec spec, const Matrix& entries) : spec_(std::move(spec)) {
  if (entries.rows() != spec_.D() || entries.cols() != spec_.D()) {
    throw InvalidInput("BlockSymMatrix: expected a " + std::to_string(spec_.D()) + "x" +
                       std::to_string(spec_.D()) + " matrix");
  }
  if (!entries.allFinite()) throw InvalidInput("BlockSymMatrix: non-finite entries");
  entries_ = 0.5 * (entries + entries.transpose());
}

BlockSymMatrix BlockSymMatrix::zeros(const BlockSpec& spec) {
  return BlockSymMatrix(spec, Matrix::Zero(spec.D(), spec.D()));
}

StiefelBlocks::StiefelBlocks(BlockSpec spec, std::vector<Matrix> blocks, double ortho_tol)
    : spec_(std::move(spec)), blocks_(std::move(blocks)) {
  if (static_cast<int>(blocks_.size()) != spec_.m()) {
    throw InvalidInput("StiefelBlocks: block count does not match spec");
  }
  const Matrix eye = Matrix::Identity(spec_.r(), spec_.r());
  for (int i = 0; i < spec_.m(); ++i) {
    const Matrix& b = block(i);
    if (b.rows() != spec_.dim(i) || b.cols() != spec_.r()) {
      throw InvalidInput("StiefelBlocks: block " + std::to_string(i) + " has the wrong shape");
    }
    if (!b.allFinite()) throw InvalidInput("StiefelBlocks: non-finite entries");
    const double res = (b.transpose() * b - eye).norm();
    if (res > ortho_tol) {
      throw InvalidInput("StiefelBlocks: block " + std::to_string(i) +
                         " is not column-orthonormal (residual " + std::to_string(res) + ")");
    }
  }
}

StiefelBlocks StiefelBlocks::from_stacked(const BlockSpec& spec, const Matrix& stacked,
                                          double ortho_tol) {
  if (stacked.rows() != spec.D() || stacked.cols() != spec.r()) {
    throw InvalidInput("StiefelBlocks: stacked matrix must be D x r");
  }
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(spec.m()));
  for (int i = 0; i < spec.m(); ++i) blocks.push_back(stacked.middleRows(spec.offset(i), spec.dim(i)));
  return StiefelBlocks(spec, std::move(blocks), ortho_tol);
}

Matrix StiefelBlocks::stacked() const {
  Matrix out(spec_.D(), spec_.r());
  for (int i = 0; i < spec_.m(); ++i) out.middleRows(spec_.offset(i), spec_.dim(i)) = block(i);
  return out;
}

StiefelBlocks StiefelBlocks::rotated(const Matrix& q) const {
  std::vector<Matrix> out;
  out.reserve(blocks_.size());
  for (const Matrix& b : blocks_) out.push_back(b * q);
  // Rotation by an orthogonal q preserves orthonormality up to rounding.
  return StiefelBlocks(spec_, std::move(out), 1e-8);
}

double StiefelBlocks::max_ortho_residual() const {
  const Matrix eye = Matrix::Identity(spec_.r(), spec_.r());
  double worst = 0.0;
  for (const Matrix& b : blocks_) worst = std::max(worst, (b.transpose() * b - eye).norm());
  return worst;
}

}  // namespace otsm
