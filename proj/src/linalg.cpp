#include "otsm/linalg.hpp"

#include "otsm/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace otsm {
namespace {

void require_square_finite(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) throw InvalidInput(std::string(what) + ": matrix must be square");
  if (!a.allFinite()) throw InvalidInput(std::string(what) + ": non-finite entries");
}

// Flip v so its largest-magnitude entry is positive. Entries within a
// relative 1e-10 of the maximum count as ties; the lowest index wins.
void normalize_sign(Eigen::Ref<Vector> v) {
  if (v.size() == 0) return;
  const double peak = v.cwiseAbs().maxCoeff();
  if (peak == 0.0) return;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v[k]) >= peak * (1.0 - 1e-10)) {
      if (v[k] < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

SymEig eigh(const Matrix& a, bool with_vectors) {
  const Matrix sa = symmetrize(a);
  const int opts = with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sa, opts);
  if (solver.info() == Eigen::Success) {
    return {solver.eigenvalues(), with_vectors ? solver.eigenvectors() : Matrix()};
  }
  // Eigen's tridiagonal QR can stall on exactly repeated spectra (for example
  // a noiseless Gram matrix); a shift leaves the eigenvectors unchanged.
  const Eigen::Index n = sa.rows();
  const double scale = sa.norm() / std::sqrt(static_cast<double>(n)) + 1.0;
  for (double t : {0.5, -0.5, 1.3, -1.7}) {
    const double shift = t * scale;
    solver.compute(sa + shift * Matrix::Identity(n, n), opts);
    if (solver.info() == Eigen::Success) {
      return {solver.eigenvalues().array() - shift, with_vectors ? solver.eigenvectors() : Matrix()};
    }
  }
  throw InvalidInput("eigh: eigensolver failed");
}

SymEig sym_eig(const Matrix& a) {
  require_square_finite(a, "sym_eig");
  const SymEig asc = eigh(a);
  const Eigen::Index n = a.rows();
  SymEig out;
  out.values = asc.values.reverse();
  out.vectors = asc.vectors.rowwise().reverse();
  for (Eigen::Index k = 0; k < n; ++k) normalize_sign(out.vectors.col(k));
  return out;
}

Vector sym_eigenvalues(const Matrix& a) {
  require_square_finite(a, "sym_eigenvalues");
  return eigh(a, false).values.reverse();
}

double min_eigenvalue(const Matrix& a) {
  const Vector v = sym_eigenvalues(a);
  return v.size() ? v[v.size() - 1] : 0.0;
}

double max_eigenvalue(const Matrix& a) {
  const Vector v = sym_eigenvalues(a);
  return v.size() ? v[0] : 0.0;
}

double op_norm(const Matrix& a) {
  const Vector v = sym_eigenvalues(a);
  if (v.size() == 0) return 0.0;
  return std::max(std::abs(v[0]), std::abs(v[v.size() - 1]));
}

PolarResult polar_factor(const Matrix& m, const LinalgTolerances& tol) {
  const Eigen::Index d = m.rows();
  const Eigen::Index r = m.cols();
  if (d < r) throw InvalidInput("polar_factor: requires rows >= cols");
  if (!m.allFinite()) throw InvalidInput("polar_factor: non-finite entries");

  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Matrix u = svd.matrixU();
  const Matrix& v = svd.matrixV();

  PolarResult out;
  const double cutoff = tol.polar_rank_rel * (r > 0 ? s[0] : 0.0);
  Eigen::Index kept = 0;
  while (kept < r && s[kept] > cutoff && s[kept] > 0.0) ++kept;
  if (kept < r) {
    out.rank_deficient = true;
    // Replace the left singular vectors of the null directions by
    // Gram-Schmidt on e_1, e_2, ... against the retained columns.
    Eigen::Index next = kept;
    for (Eigen::Index e = 0; e < d && next < r; ++e) {
      Vector cand = Vector::Unit(d, e);
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index k = 0; k < next; ++k) cand -= u.col(k).dot(cand) * u.col(k);
      }
      const double nrm = cand.norm();
      if (nrm > 0.5) u.col(next++) = cand / nrm;
    }
  }
  out.factor = u * v.transpose();
  return out;
}

Matrix qr_orthonormalize(const Matrix& m, const LinalgTolerances& tol) {
  const Eigen::Index d = m.rows();
  const Eigen::Index r = m.cols();
  if (d < r) throw RankDeficient("qr_orthonormalize: more columns than rows");
  if (!m.allFinite()) throw InvalidInput("qr_orthonormalize: non-finite entries");
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(d, r);
  const Matrix& packed = qr.matrixQR();
  const double scale = m.norm();
  for (Eigen::Index k = 0; k < r; ++k) {
    const double rkk = packed(k, k);
    if (!(std::abs(rkk) > tol.qr_rank_rel * scale)) {
      throw RankDeficient("qr_orthonormalize: input does not have full column rank");
    }
    if (rkk < 0.0) q.col(k) = -q.col(k);
  }
  return q;
}

Matrix orthonormal_complement(const Matrix& m) {
  const Eigen::Index d = m.rows();
  const Eigen::Index r = m.cols();
  if (r >= d) return Matrix(d, 0);
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix full = qr.householderQ() * Matrix::Identity(d, d);
  return full.rightCols(d - r);
}

Vector project_box_hyperplane(const Vector& v, double hi, double total,
                              std::optional<double> lo, const LinalgTolerances& tol) {
  const Eigen::Index n = v.size();
  if (n == 0) throw InfeasibleProjection("project_box_hyperplane: empty vector");
  if (!v.allFinite() || !std::isfinite(hi) || !std::isfinite(total)) {
    throw InvalidInput("project_box_hyperplane: non-finite input");
  }
  const double floor = lo.value_or(-std::numeric_limits<double>::infinity());
  const double nn = static_cast<double>(n);
  const double slack = tol.projection_sum * std::max(1.0, std::abs(total));
  if (floor > hi || nn * hi < total - slack || (lo && nn * floor > total + slack)) {
    throw InfeasibleProjection("project_box_hyperplane: caps cannot meet the required sum");
  }

  auto clamp_at = [&](double theta) {
    Vector x(n);
    for (Eigen::Index k = 0; k < n; ++k) x[k] = std::clamp(v[k] - theta, floor, hi);
    return x;
  };

  // sum(clamp(v - theta)) is non-increasing in theta.
  double t_lo = v.minCoeff() - hi;  // every entry at the cap: sum = n * hi >= total
  double t_hi = lo ? v.maxCoeff() - floor : v.maxCoeff() - total / nn;
  for (int it = 0; it < 200 && t_hi - t_lo > 0.0; ++it) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (mid <= t_lo || mid >= t_hi) break;
    if (clamp_at(mid).sum() > total) t_lo = mid; else t_hi = mid;
  }
  double theta = 0.5 * (t_lo + t_hi);
  Vector x = clamp_at(theta);

  // Bisection identifies the active set; solve for theta exactly on it.
  double fixed_sum = 0.0;
  double free_sum = 0.0;
  int free_count = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double y = v[k] - theta;
    if (y > floor && y < hi) {
      free_sum += v[k];
      ++free_count;
    } else {
      fixed_sum += x[k];
    }
  }
  if (free_count > 0) {
    const double exact = (free_sum - (total - fixed_sum)) / free_count;
    Vector refined = clamp_at(exact);
    if (std::abs(refined.sum() - total) <= std::abs(x.sum() - total)) x = std::move(refined);
  }
  return x;
}

AlignmentResult procrustes_align(const StiefelBlocks& o, const StiefelBlocks& target,
                                 const LinalgTolerances& tol) {
  if (!(o.spec() == target.spec())) throw InvalidInput("procrustes_align: spec mismatch");
  const BlockSpec& spec = o.spec();
  Matrix cross = Matrix::Zero(spec.r(), spec.r());
  for (int i = 0; i < spec.m(); ++i) cross.noalias() += o.block(i).transpose() * target.block(i);
  PolarResult polar = polar_factor(cross, tol);

  AlignmentResult out;
  out.rotation = std::move(polar.factor);
  out.rank_deficient = polar.rank_deficient;
  out.residual_per_block.reserve(static_cast<std::size_t>(spec.m()));
  for (int i = 0; i < spec.m(); ++i) {
    const double res = (o.block(i) * out.rotation - target.block(i)).norm();
    out.residual_per_block.push_back(res);
    out.max_residual = std::max(out.max_residual, res);
  }
  return out;
}

}  // namespace otsm
