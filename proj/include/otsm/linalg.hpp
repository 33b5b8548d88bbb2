#pragma once

#include "otsm/block_types.hpp"

#include <optional>
#include <vector>

namespace otsm {

/// Numerical thresholds shared by the dense kernels. The defaults are the
/// values used throughout the test suite; callers may override them.
struct LinalgTolerances {
  /// sigma_r(M) <= polar_rank_rel * sigma_1(M) marks a rank-deficient polar input.
  double polar_rank_rel = 1e-12;
  /// |R_kk| <= qr_rank_rel * ||M||_F marks a rank-deficient QR input.
  double qr_rank_rel = 1e-12;
  /// Target accuracy of the hyperplane constraint in project_box_hyperplane.
  double projection_sum = 1e-12;
};

/// Spectral decomposition with eigenvalues in descending order. Column k of
/// `vectors` pairs with values[k]; its largest-magnitude entry is positive
/// (ties resolved toward the lowest index).
struct SymEig {
  Vector values;
  Matrix vectors;
};

SymEig sym_eig(const Matrix& a);
/// Ascending eigenvalues (and vectors when requested) of sym(a), no sign
/// normalization. Retries on a shifted spectrum when the QR iteration stalls.
SymEig eigh(const Matrix& a, bool with_vectors = true);
/// Eigenvalues only, descending.
Vector sym_eigenvalues(const Matrix& a);
double min_eigenvalue(const Matrix& a);
double max_eigenvalue(const Matrix& a);

/// Operator (spectral) norm of a symmetric matrix.
double op_norm(const Matrix& a);

inline Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

struct PolarResult {
  Matrix factor;
  bool rank_deficient = false;
};

/// Orthonormal polar factor U V^T of the thin SVD M = U S V^T, i.e. the
/// maximizer of tr(O^T M) over column-orthonormal O. Null directions of a
/// rank-deficient M are filled by Gram-Schmidt on the standard basis.
PolarResult polar_factor(const Matrix& m, const LinalgTolerances& tol = {});

/// Q factor of a thin QR decomposition with diag(R) > 0.
/// Throws RankDeficient when M does not have full column rank.
Matrix qr_orthonormalize(const Matrix& m, const LinalgTolerances& tol = {});

/// Orthonormal basis (D x (D - r)) of the orthogonal complement of span(M),
/// taken from the trailing columns of a full Householder QR of M.
Matrix orthonormal_complement(const Matrix& m);

/// Euclidean projection of v onto {x : lo <= x_i <= hi, sum_i x_i = total}.
/// Throws InfeasibleProjection when the set is empty.
Vector project_box_hyperplane(const Vector& v, double hi, double total,
                              std::optional<double> lo = std::nullopt,
                              const LinalgTolerances& tol = {});

struct AlignmentResult {
  Matrix rotation;
  std::vector<double> residual_per_block;
  double max_residual = 0.0;
  bool rank_deficient = false;
};

/// Frobenius-optimal common rotation Q with O Q ~ target, plus the
/// per-block residuals ||O_i Q - target_i||_F.
AlignmentResult procrustes_align(const StiefelBlocks& o, const StiefelBlocks& target,
                                 const LinalgTolerances& tol = {});

}  // namespace otsm
