#include "otsm/sdp.hpp"

#include "otsm/block_ascent.hpp"
#include "otsm/error.hpp"
#include "otsm/linalg.hpp"


#include <algorithm>
#include <cmath>

namespace otsm {

Matrix project_psd(const Matrix& a) {
  const SymEig eig = eigh(a);
  const Vector clipped = eig.values.cwiseMax(0.0);
  const Matrix& v = eig.vectors;
  return symmetrize(v * clipped.asDiagonal() * v.transpose());
}

Matrix project_block_constraints(const Matrix& a, const BlockSpec& spec) {
  Matrix out = a;
  const double r = spec.r();
  for (int i = 0; i < spec.m(); ++i) {
    const int off = spec.offset(i);
    const int d = spec.dim(i);
    const SymEig eig = eigh(a.block(off, off, d, d));
    const Vector mapped = project_box_hyperplane(eig.values, 1.0, r);
    const Matrix& v = eig.vectors;
    out.block(off, off, d, d) = symmetrize(v * mapped.asDiagonal() * v.transpose());
  }
  return out;
}

GramSolution solve_sdp(const BlockSymMatrix& s, const SdpOptions& options) {
  if (!(options.rho > 0) || options.max_iter < 1 || !(options.tol_primal > 0) ||
      !(options.tol_dual > 0) || options.over_relaxation < 1.0 || options.over_relaxation > 1.8) {
    throw InvalidInput("solve_sdp: invalid options");
  }
  const BlockSpec& spec = s.spec();
  const int n = spec.D();
  const Matrix& c = s.matrix();
  const double s_scale = op_norm(c);

  double rho = options.rho * std::max(s_scale / n, 1e-12);
  Matrix z = Matrix::Zero(n, n);
  for (int i = 0; i < spec.m(); ++i) {
    const int off = spec.offset(i);
    z.block(off, off, spec.dim(i), spec.dim(i)).diagonal().setConstant(
        static_cast<double>(spec.r()) / spec.dim(i));
  }
  Matrix y = Matrix::Zero(n, n);  // scaled dual variable
  Matrix x(n, n);

  GramSolution out;
  out.merit.reserve(static_cast<std::size_t>(options.max_iter));
  const double alpha = options.over_relaxation;
  for (int k = 1; k <= options.max_iter; ++k) {
    x = project_psd(z - y + c / rho);
    const Matrix x_relaxed = alpha * x + (1.0 - alpha) * z;
    Matrix z_next = project_block_constraints(x_relaxed + y, spec);
    y += x_relaxed - z_next;

    const double primal = (x - z_next).norm();
    const double dual = rho * (z_next - z).norm();
    z = std::move(z_next);

    out.primal_residual = primal / std::max({1.0, x.norm(), z.norm()});
    out.dual_residual = dual / std::max(1.0, rho * y.norm());
    out.iters = k;
    out.merit.push_back(c.cwiseProduct(z).sum());
    if (out.primal_residual <= options.tol_primal && out.dual_residual <= options.tol_dual) {
      out.converged = true;
      break;
    }
    if (options.adapt_interval > 0 && k % options.adapt_interval == 0) {
      if (out.primal_residual > 10.0 * out.dual_residual) {
        rho *= 2.0;
        y *= 0.5;
      } else if (out.dual_residual > 10.0 * out.primal_residual) {
        rho *= 0.5;
        y *= 2.0;
      }
    }
  }

  out.u = symmetrize(z);
  out.objective = c.cwiseProduct(out.u).sum();
  const Vector values = sym_eigenvalues(out.u);
  out.spectrum = values.head(std::min<Eigen::Index>(n, 2 * spec.r() + 2));
  out.final_rho = rho;
  return out;
}

RoundingResult round_rank_r(const Matrix& u, const BlockSpec& spec) {
  if (u.rows() != spec.D() || u.cols() != spec.D()) throw InvalidInput("round_rank_r: shape mismatch");
  const int r = spec.r();
  const SymEig eig = sym_eig(u);
  const double top = eig.values[0];
  RoundingResult out;
  const double next = r < spec.D() ? eig.values[r] : 0.0;
  out.gap = next / std::max(top, 1e-300);
  out.degenerate_rank = eig.values[r - 1] <= 1e-10 * top ||
                        (r < spec.D() && eig.values[r - 1] - next <= 1e-10 * top);
  const Vector scale = eig.values.head(r).cwiseMax(0.0).cwiseSqrt();
  const Matrix factor = eig.vectors.leftCols(r) * scale.asDiagonal();
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(spec.m()));
  for (int i = 0; i < spec.m(); ++i) {
    blocks.push_back(polar_factor(factor.middleRows(spec.offset(i), spec.dim(i))).factor);
  }
  out.v = StiefelBlocks(spec, std::move(blocks));
  return out;
}

TightnessReport tightness_report(const Matrix& u, const StiefelBlocks& o, const BlockSymMatrix& s,
                                 const TightnessThresholds& thresholds) {
  const int r = s.spec().r();
  const Vector values = sym_eigenvalues(u);
  TightnessReport rep;
  rep.thresholds = thresholds;
  const double next = r < values.size() ? values[r] : 0.0;
  rep.eig_gap_ratio = next / std::max(values[0], 1e-300);
  const double relaxed = s.matrix().cwiseProduct(u).sum();
  const double nonconvex = objective(s, o);
  rep.objective_gap = (relaxed - nonconvex) / std::max(std::abs(relaxed), 1e-300);
  if (relaxed == nonconvex) rep.objective_gap = 0.0;
  rep.tight = rep.eig_gap_ratio <= thresholds.eig_gap && rep.objective_gap <= thresholds.objective_gap;
  return rep;
}

}  // namespace otsm
