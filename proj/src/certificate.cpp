#include "otsm/certificate.hpp"

#include "otsm/block_ascent.hpp"
#include "otsm/error.hpp"
#include "otsm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace otsm {
namespace {

void require_same_spec(const BlockSymMatrix& s, const StiefelBlocks& o, const char* what) {
  if (!(s.spec() == o.spec())) throw InvalidInput(std::string(what) + ": spec mismatch");
}

Matrix block_diag_zero_like(const BlockSpec& spec) { return Matrix::Zero(spec.D(), spec.D()); }

}  // namespace

std::vector<Matrix> multipliers(const BlockSymMatrix& s, const StiefelBlocks& o) {
  require_same_spec(s, o, "multipliers");
  const BlockSpec& spec = s.spec();
  const Matrix grad = s.matrix() * o.stacked();
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(spec.m()));
  for (int i = 0; i < spec.m(); ++i) {
    out.push_back(o.block(i).transpose() * grad.middleRows(spec.offset(i), spec.dim(i)));
  }
  return out;
}

bool qualify_candidate(const std::vector<Matrix>& lambdas, double tol) {
  for (const Matrix& lam : lambdas) {
    const double scale = 1.0 + lam.norm();
    if ((lam - lam.transpose()).norm() > tol * scale) return false;
    if (min_eigenvalue(symmetrize(lam)) < -tol * scale) return false;
  }
  return true;
}

Matrix certificate_matrix(const StiefelBlocks& o, const std::vector<Matrix>& lambdas,
                          const BlockSymMatrix& s) {
  require_same_spec(s, o, "certificate_matrix");
  const BlockSpec& spec = s.spec();
  if (static_cast<int>(lambdas.size()) != spec.m()) {
    throw InvalidInput("certificate_matrix: one multiplier per block is required");
  }
  Matrix lift = block_diag_zero_like(spec);
  for (int i = 0; i < spec.m(); ++i) {
    const Matrix lam = symmetrize(lambdas[static_cast<std::size_t>(i)]);
    const double tau = min_eigenvalue(lam);
    const Matrix& oi = o.block(i);
    const int d = spec.dim(i);
    lift.block(spec.offset(i), spec.offset(i), d, d) =
        oi * lam * oi.transpose() + tau * (Matrix::Identity(d, d) - oi * oi.transpose());
  }
  return symmetrize(lift) - s.matrix();
}

CertificateReport certify_global(const BlockSymMatrix& s, const StiefelBlocks& o,
                                 const std::vector<Matrix>& lambdas, double tol) {
  CertificateReport rep;
  rep.tol = tol;
  rep.lambdas = lambdas;
  for (const Matrix& lam : lambdas) {
    rep.taus.push_back(min_eigenvalue(symmetrize(lam)));
    rep.symmetry_residuals.push_back((lam - lam.transpose()).norm());
  }
  rep.L_min_eig = min_eigenvalue(certificate_matrix(o, lambdas, s));
  rep.qualified = qualify_candidate(lambdas, tol);
  rep.globally_optimal = rep.qualified && rep.L_min_eig >= -tol * (1.0 + op_norm(s.matrix()));
  return rep;
}

CertificateReport certify_global(const BlockSymMatrix& s, const StiefelBlocks& o, double tol) {
  return certify_global(s, o, multipliers(s, o), tol);
}

bool check_assumption(const BlockSymMatrix& s, const StiefelBlocks& o,
                      const StiefelBlocks& theta, double tol) {
  const double at_o = objective(s, o);
  const double at_theta = objective(s, theta);
  return at_theta <= at_o + tol * (1.0 + std::abs(at_o));
}

PrimalDecomposition build_primal_decomposition(const BlockSymMatrix& s, const StiefelBlocks& v) {
  require_same_spec(s, v, "build_primal_decomposition");
  const BlockSpec& spec = s.spec();
  const Matrix stacked = v.stacked();
  const Matrix grad = s.matrix() * stacked;

  Matrix s2 = block_diag_zero_like(spec);
  for (int i = 0; i < spec.m(); ++i) {
    const int off = spec.offset(i);
    const int d = spec.dim(i);
    s2.block(off, off, d, d) = symmetrize(grad.middleRows(off, d) * v.block(i).transpose());
  }
  PrimalDecomposition out{BlockSymMatrix(spec, s.matrix() - s2), BlockSymMatrix(spec, s2)};
  out.residual_reconstruction = (s.matrix() - out.s1.matrix() - out.s2.matrix()).norm();

  const Matrix perp = orthonormal_complement(stacked);
  const Matrix p_perp = perp * perp.transpose();
  out.residual_range1 = (p_perp * out.s1.matrix() * p_perp - out.s1.matrix()).norm();
  for (int i = 0; i < spec.m(); ++i) {
    const Matrix basis = qr_orthonormalize(v.block(i));
    const Matrix p = basis * basis.transpose();
    const auto blk = out.s2.block(i, i);
    out.residual_range2 = std::max(out.residual_range2, (p * blk * p - blk).norm());
  }
  return out;
}

DualCertificate build_dual_certificate(const BlockSymMatrix& s, const StiefelBlocks& v,
                                       double tol_rel) {
  const BlockSpec& spec = s.spec();
  const PrimalDecomposition primal = build_primal_decomposition(s, v);
  const double c = 0.5 * spec.m();

  Matrix t1 = primal.s1.matrix();
  Matrix t2 = primal.s2.matrix();
  std::vector<Matrix> bases;
  bases.reserve(static_cast<std::size_t>(spec.m()));
  for (int i = 0; i < spec.m(); ++i) {
    const int off = spec.offset(i);
    const int d = spec.dim(i);
    bases.push_back(qr_orthonormalize(v.block(i)));
    const Matrix p = bases.back() * bases.back().transpose();
    t1.block(off, off, d, d) -= c * (Matrix::Identity(d, d) - p);
    t2.block(off, off, d, d) -= c * p;
  }

  DualCertificate out{BlockSymMatrix(spec, t1), BlockSymMatrix(spec, t2), c};
  out.residual_reconstruction =
      (s.matrix() - out.t1.matrix() - out.t2.matrix() -
       c * Matrix::Identity(spec.D(), spec.D())).norm();

  out.margin_T2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < spec.m(); ++i) {
    const Matrix& b = bases[static_cast<std::size_t>(i)];
    const auto blk = out.t2.block(i, i);
    out.margin_T2 = std::min(out.margin_T2, min_eigenvalue(b.transpose() * blk * b));
    const Matrix p = b * b.transpose();
    out.residual_range2 = std::max(out.residual_range2, (p * blk * p - blk).norm());
  }

  const Matrix perp = orthonormal_complement(v.stacked());
  if (perp.cols() > 0) {
    out.margin_T1 = max_eigenvalue(perp.transpose() * out.t1.matrix() * perp);
  } else {
    out.margin_T1 = -std::numeric_limits<double>::infinity();
  }
  const Matrix p_perp = perp * perp.transpose();
  out.residual_range1 = (p_perp * out.t1.matrix() * p_perp - out.t1.matrix()).norm();

  out.tol = tol_rel * op_norm(s.matrix());
  out.verified = out.margin_T2 > out.tol && out.margin_T1 < -out.tol &&
                 out.residual_range1 <= out.tol && out.residual_range2 <= out.tol &&
                 out.residual_reconstruction <= out.tol;
  return out;
}

}  // namespace otsm
