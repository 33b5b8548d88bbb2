#pragma once

#include "otsm/block_types.hpp"

#include <vector>

namespace otsm {

struct SdpOptions {
  /// Base penalty; the solver starts from rho * max(||S|| / D, 1e-12).
  double rho = 1.0;
  int max_iter = 5000;
  /// Scale-relative stopping tolerances on ||X - Z|| and rho ||Z - Z_prev||.
  double tol_primal = 1e-7;
  double tol_dual = 1e-7;
  /// Relaxation factor in [1, 1.8].
  double over_relaxation = 1.6;
  /// Rebalance rho every `adapt_interval` iterations when the residuals drift
  /// more than a factor 10 apart. 0 disables rebalancing.
  int adapt_interval = 25;
};

/// Approximate solution of
///   max <S, U>  s.t.  U >= 0,  U_ii <= I,  tr(U_ii) = r.
struct GramSolution {
  /// Block-feasible iterate: every U_ii satisfies the cap and trace exactly
  /// up to rounding; positive semidefinite up to the primal residual.
  Matrix u;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  /// Top min(D, 2r + 2) eigenvalues of U, descending.
  Vector spectrum;
  int iters = 0;
  bool converged = false;
  /// <S, U> after every iteration.
  std::vector<double> merit;
  double final_rho = 0.0;
};

/// Consensus ADMM between the PSD cone and the block constraint set.
GramSolution solve_sdp(const BlockSymMatrix& s, const SdpOptions& options = {});

/// Projection of a symmetric matrix onto the PSD cone.
Matrix project_psd(const Matrix& a);

/// Projection onto {U : U_ii <= I, tr(U_ii) = r}; off-diagonal blocks are
/// left unchanged.
Matrix project_block_constraints(const Matrix& a, const BlockSpec& spec);

struct RoundingResult {
  StiefelBlocks v;
  /// lambda_{r+1}(U) / max(lambda_1(U), 1e-300)
  double gap = 0.0;
  /// lambda_r <= 1e-10 lambda_1, or lambda_r and lambda_{r+1} tie within
  /// 1e-10 lambda_1: the rank-r factor is not well defined.
  bool degenerate_rank = false;
};

/// V = E diag(sqrt(lambda)) from the top-r eigenpairs of U, then V_i <- polar(V_i).
RoundingResult round_rank_r(const Matrix& u, const BlockSpec& spec);

struct TightnessThresholds {
  double eig_gap = 1e-5;
  double objective_gap = 1e-6;
};

struct TightnessReport {
  double eig_gap_ratio = 0.0;
  double objective_gap = 0.0;
  bool tight = false;
  TightnessThresholds thresholds;
};

/// Compares the relaxation with a block-ascent point O.
TightnessReport tightness_report(const Matrix& u, const StiefelBlocks& o, const BlockSymMatrix& s,
                                 const TightnessThresholds& thresholds = {});

}  // namespace otsm
