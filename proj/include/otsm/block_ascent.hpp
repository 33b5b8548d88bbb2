#pragma once

#include "otsm/block_types.hpp"
#include "otsm/linalg.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace otsm {

enum class InitKind { kSpectral, kRandom, kWarm };

struct AscentOptions {
  int max_sweeps = 2000;
  /// Bound on max_i ||O_i sym(Lambda_i) - sum_j S_ij O_j||_F / (1 + ||S||).
  double tol_stationarity = 1e-8;
  /// Bound on the relative objective change of one sweep.
  double tol_objective = 1e-12;
  /// eta in the proximal shift alpha_i = max(0, -lambda_min(S_ii)) + eta.
  double proximal_margin = 1e-8;
  InitKind init = InitKind::kSpectral;
  std::uint64_t init_seed = 0;
  std::optional<StiefelBlocks> warm_start;
  /// Visit blocks in a seeded random order each sweep instead of 1..m.
  bool randomize_order = false;
  std::uint64_t order_seed = 0;
};

struct SolveTrace {
  /// Objective of the initial point followed by one entry per sweep.
  std::vector<double> objective_per_sweep;
  double stationarity_residual = 0.0;
  int sweeps_used = 0;
  bool converged = false;
  /// Number of block updates whose polar input was rank deficient.
  int rank_deficient_updates = 0;
  /// Spectral initialization met a (near) tie between lambda_r and lambda_{r+1}.
  bool gap_warning = false;
};

struct AscentResult {
  StiefelBlocks o;
  SolveTrace trace;
};

/// sum_{i,j} tr(O_i^T S_ij O_j).
double objective(const BlockSymMatrix& s, const StiefelBlocks& o);

struct InitResult {
  StiefelBlocks o;
  bool gap_warning = false;
};

/// Blockwise polar factors of the top-r eigenvectors of S.
InitResult init_spectral(const BlockSymMatrix& s);

/// Blockwise QR of a seeded Gaussian draw.
StiefelBlocks init_random(const BlockSpec& spec, std::uint64_t seed);

/// alpha_i = max(0, -lambda_min(S_ii)) + eta for every block.
std::vector<double> proximal_shifts(const BlockSymMatrix& s, double eta);

struct SweepResult {
  StiefelBlocks o;
  int rank_deficient_updates = 0;
};

/// One Gauss-Seidel pass: for each block i (ascending unless `order` is
/// given) O_i <- polar(sum_{j != i} S_ij O_j + (S_ii + alpha_i I) O_i).
SweepResult sweep(const BlockSymMatrix& s, const StiefelBlocks& o, const AscentOptions& options);
SweepResult sweep(const BlockSymMatrix& s, const StiefelBlocks& o,
                  const std::vector<double>& shifts, const std::vector<int>& order);

/// Scale-normalized first-order residual
/// max_i ||O_i sym(Lambda_i) - sum_j S_ij O_j||_F / (1 + ||S||).
double stationarity_residual(const BlockSymMatrix& s, const StiefelBlocks& o, double s_norm);

/// Repeats sweeps until both the objective change and the stationarity
/// residual fall under their tolerances, or max_sweeps is reached.
AscentResult solve_block_ascent(const BlockSymMatrix& s, const AscentOptions& options = {});

}  // namespace otsm
