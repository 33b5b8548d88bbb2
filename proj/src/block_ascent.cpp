#include "otsm/block_ascent.hpp"

#include "otsm/error.hpp"
#include "otsm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace otsm {

double objective(const BlockSymMatrix& s, const StiefelBlocks& o) {
  if (!(s.spec() == o.spec())) throw InvalidInput("objective: spec mismatch");
  const Matrix stacked = o.stacked();
  return (stacked.transpose() * s.matrix() * stacked).trace();
}

InitResult init_spectral(const BlockSymMatrix& s) {
  const BlockSpec& spec = s.spec();
  const int r = spec.r();
  const SymEig eig = sym_eig(s.matrix());
  InitResult out;
  if (r < spec.D()) {
    const double scale = std::max(1.0, std::abs(eig.values[0]));
    out.gap_warning = eig.values[r - 1] - eig.values[r] <= 1e-10 * scale;
  }
  const Matrix top = eig.vectors.leftCols(r);
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(spec.m()));
  for (int i = 0; i < spec.m(); ++i) {
    blocks.push_back(polar_factor(top.middleRows(spec.offset(i), spec.dim(i))).factor);
  }
  out.o = StiefelBlocks(spec, std::move(blocks));
  return out;
}

StiefelBlocks init_random(const BlockSpec& spec, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<Matrix> blocks;
  for (int i = 0; i < spec.m(); ++i) {
    Matrix g(spec.dim(i), spec.r());
    for (Eigen::Index a = 0; a < g.rows(); ++a) {
      for (Eigen::Index b = 0; b < g.cols(); ++b) g(a, b) = rng.normal();
    }
    blocks.push_back(qr_orthonormalize(g));
  }
  return StiefelBlocks(spec, std::move(blocks));
}

std::vector<double> proximal_shifts(const BlockSymMatrix& s, double eta) {
  const BlockSpec& spec = s.spec();
  std::vector<double> shifts;
  shifts.reserve(static_cast<std::size_t>(spec.m()));
  for (int i = 0; i < spec.m(); ++i) {
    shifts.push_back(std::max(0.0, -min_eigenvalue(s.block(i, i))) + eta);
  }
  return shifts;
}

SweepResult sweep(const BlockSymMatrix& s, const StiefelBlocks& o,
                  const std::vector<double>& shifts, const std::vector<int>& order) {
  const BlockSpec& spec = s.spec();
  if (!(spec == o.spec())) throw InvalidInput("sweep: spec mismatch");
  Matrix stacked = o.stacked();
  SweepResult out;
  for (int i : order) {
    const int off = spec.offset(i);
    const int d = spec.dim(i);
    // The full block row already includes S_ii O_i.
    Matrix target = s.matrix().middleRows(off, d) * stacked;
    target += shifts[static_cast<std::size_t>(i)] * stacked.middleRows(off, d);
    PolarResult polar = polar_factor(target);
    if (polar.rank_deficient) ++out.rank_deficient_updates;
    stacked.middleRows(off, d) = polar.factor;
  }
  out.o = StiefelBlocks::from_stacked(spec, stacked);
  return out;
}

SweepResult sweep(const BlockSymMatrix& s, const StiefelBlocks& o, const AscentOptions& options) {
  std::vector<int> order(static_cast<std::size_t>(s.spec().m()));
  std::iota(order.begin(), order.end(), 0);
  return sweep(s, o, proximal_shifts(s, options.proximal_margin), order);
}

double stationarity_residual(const BlockSymMatrix& s, const StiefelBlocks& o, double s_norm) {
  const BlockSpec& spec = s.spec();
  const Matrix stacked = o.stacked();
  const Matrix grad = s.matrix() * stacked;
  double worst = 0.0;
  for (int i = 0; i < spec.m(); ++i) {
    const auto g = grad.middleRows(spec.offset(i), spec.dim(i));
    const Matrix lambda = symmetrize(o.block(i).transpose() * g);
    worst = std::max(worst, (o.block(i) * lambda - g).norm());
  }
  return worst / (1.0 + s_norm);
}

AscentResult solve_block_ascent(const BlockSymMatrix& s, const AscentOptions& options) {
  if (options.max_sweeps < 0 || !(options.tol_stationarity > 0) || !(options.tol_objective > 0) ||
      !(options.proximal_margin > 0)) {
    throw InvalidInput("solve_block_ascent: tolerances must be positive");
  }
  const BlockSpec& spec = s.spec();
  AscentResult result;
  switch (options.init) {
    case InitKind::kSpectral: {
      InitResult init = init_spectral(s);
      result.o = std::move(init.o);
      result.trace.gap_warning = init.gap_warning;
      break;
    }
    case InitKind::kRandom:
      result.o = init_random(spec, options.init_seed);
      break;
    case InitKind::kWarm:
      if (!options.warm_start) throw InvalidInput("solve_block_ascent: warm start missing");
      if (!(options.warm_start->spec() == spec)) throw InvalidInput("solve_block_ascent: spec mismatch");
      result.o = *options.warm_start;
      break;
  }

  const double s_norm = op_norm(s.matrix());
  const std::vector<double> shifts = proximal_shifts(s, options.proximal_margin);
  std::vector<int> order(static_cast<std::size_t>(spec.m()));
  std::iota(order.begin(), order.end(), 0);
  CounterRng order_rng(options.order_seed);

  SolveTrace& trace = result.trace;
  double current = objective(s, result.o);
  trace.objective_per_sweep.push_back(current);
  trace.stationarity_residual = stationarity_residual(s, result.o, s_norm);

  for (int k = 0; k < options.max_sweeps; ++k) {
    if (options.randomize_order) {
      for (std::size_t a = order.size(); a > 1; --a) {
        std::swap(order[a - 1], order[order_rng.next_u64() % a]);
      }
    }
    SweepResult step = sweep(s, result.o, shifts, order);
    result.o = std::move(step.o);
    trace.rank_deficient_updates += step.rank_deficient_updates;
    ++trace.sweeps_used;

    const double next = objective(s, result.o);
    trace.objective_per_sweep.push_back(next);
    const double change = std::abs(next - current) / std::max(1.0, std::abs(next));
    current = next;
    if (change <= options.tol_objective) {
      trace.stationarity_residual = stationarity_residual(s, result.o, s_norm);
      if (trace.stationarity_residual <= options.tol_stationarity) {
        trace.converged = true;
        break;
      }
    }
  }
  if (!trace.converged) trace.stationarity_residual = stationarity_residual(s, result.o, s_norm);
  // max_sweeps = 0 still reports whether the start point is stationary.
  if (options.max_sweeps == 0) trace.converged = trace.stationarity_residual <= options.tol_stationarity;
  return result;
}

}  // namespace otsm
