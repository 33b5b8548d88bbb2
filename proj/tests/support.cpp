#include "support.hpp"

#include "otsm/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace otsm::testing {

Matrix gaussian_matrix(int rows, int cols, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = rng.normal();
  return g;
}

Matrix random_symmetric(int n, std::uint64_t seed) {
  const Matrix g = gaussian_matrix(n, n, seed);
  return 0.5 * (g + g.transpose());
}

Matrix random_orthogonal(int r, std::uint64_t seed) {
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(r, r, seed));
  return qr.householderQ() * Matrix::Identity(r, r);
}

StiefelBlocks random_stiefel(const BlockSpec& spec, std::uint64_t seed) {
  std::vector<Matrix> blocks;
  for (int i = 0; i < spec.m(); ++i) {
    Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(spec.dim(i), spec.r(), derive_seed(seed, {std::uint64_t(i)})));
    blocks.push_back(qr.householderQ() * Matrix::Identity(spec.dim(i), spec.r()));
  }
  return StiefelBlocks(spec, std::move(blocks));
}

Matrix polar_oracle(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m);
  const Vector inv_sqrt = es.eigenvalues().array().rsqrt();
  return m * es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

Vector projection_oracle(const Vector& v, double hi, double total, std::optional<double> lo) {
  using LD = long double;
  const int n = static_cast<int>(v.size());
  const int states = lo ? 3 : 2;
  int patterns = 1;
  for (int k = 0; k < n; ++k) patterns *= states;

  LD best_dist = std::numeric_limits<LD>::infinity();
  std::vector<LD> best(static_cast<std::size_t>(n));
  std::vector<int> state(static_cast<std::size_t>(n));
  for (int p = 0; p < patterns; ++p) {
    int code = p;
    int n_free = 0;
    LD fixed_sum = 0;
    LD free_sum = 0;
    for (int k = 0; k < n; ++k) {
      state[k] = code % states;
      code /= states;
      if (state[k] == 0) {
        ++n_free;
        free_sum += v[k];
      } else {
        fixed_sum += state[k] == 1 ? LD(hi) : LD(*lo);
      }
    }
    std::vector<LD> x(static_cast<std::size_t>(n));
    LD theta = 0;
    if (n_free > 0) theta = (free_sum - (LD(total) - fixed_sum)) / n_free;
    bool ok = true;
    LD sum = 0;
    LD dist = 0;
    for (int k = 0; k < n; ++k) {
      if (state[k] == 0) {
        x[k] = LD(v[k]) - theta;
        if (x[k] > LD(hi) + 1e-15L) ok = false;
        if (lo && x[k] < LD(*lo) - 1e-15L) ok = false;
      } else {
        x[k] = state[k] == 1 ? LD(hi) : LD(*lo);
      }
      sum += x[k];
      dist += (x[k] - LD(v[k])) * (x[k] - LD(v[k]));
    }
    if (!ok || std::fabs(static_cast<double>(sum - LD(total))) > 1e-12) continue;
    if (dist < best_dist) {
      best_dist = dist;
      best = x;
    }
  }
  Vector out(n);
  for (int k = 0; k < n; ++k) out[k] = static_cast<double>(best[k]);
  return out;
}

BlockSpec random_spec(std::uint64_t seed, int m_lo, int m_hi, int r_hi, int d_hi) {
  CounterRng rng(seed);
  auto pick = [&](int a, int b) {
    return a + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(b - a + 1));
  };
  const int m = pick(m_lo, m_hi);
  const int r = pick(1, r_hi);
  std::vector<int> dims;
  for (int i = 0; i < m; ++i) dims.push_back(pick(r, d_hi));
  return BlockSpec(dims, r);
}

}  // namespace otsm::testing
