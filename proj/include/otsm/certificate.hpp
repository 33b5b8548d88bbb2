#pragma once

#include "otsm/block_types.hpp"

#include <vector>

namespace otsm {

/// Default scale-relative tolerance of the certificate checks.
inline constexpr double kCertificateTol = 1e-6;

struct CertificateReport {
  std::vector<Matrix> lambdas;
  std::vector<double> taus;
  std::vector<double> symmetry_residuals;
  double L_min_eig = 0.0;
  bool qualified = false;
  bool globally_optimal = false;
  double tol = kCertificateTol;
};

/// Lambda_i = O_i^T sum_j S_ij O_j, not symmetrized.
std::vector<Matrix> multipliers(const BlockSymMatrix& s, const StiefelBlocks& o);

/// True iff every Lambda_i is symmetric and positive semidefinite within
/// tol * (1 + ||Lambda_i||).
bool qualify_candidate(const std::vector<Matrix>& lambdas, double tol = kCertificateTol);

/// L = blockdiag(O_i Lambda_i O_i^T + tau_i (I - O_i O_i^T)) - S with
/// symmetrized Lambda_i and tau_i = lambda_min(Lambda_i).
Matrix certificate_matrix(const StiefelBlocks& o, const std::vector<Matrix>& lambdas,
                          const BlockSymMatrix& s);

/// globally_optimal = qualified && lambda_min(L) >= -tol (1 + ||S||).
CertificateReport certify_global(const BlockSymMatrix& s, const StiefelBlocks& o,
                                 const std::vector<Matrix>& lambdas, double tol = kCertificateTol);
CertificateReport certify_global(const BlockSymMatrix& s, const StiefelBlocks& o,
                                 double tol = kCertificateTol);

/// tr(Theta^T S Theta) <= tr(O^T S O) + tol (1 + |tr(O^T S O)|).
bool check_assumption(const BlockSymMatrix& s, const StiefelBlocks& o,
                      const StiefelBlocks& theta, double tol = kCertificateTol);

/// S = S1 + S2 with S2 block diagonal, S2_ii = sym((sum_j S_ij V_j) V_i^T).
struct PrimalDecomposition {
  BlockSymMatrix s1;
  BlockSymMatrix s2;
  /// ||S - S1 - S2||_F
  double residual_reconstruction = 0.0;
  /// ||P_perp S1 P_perp - S1||_F with P_perp the projector onto span(V)^perp.
  double residual_range1 = 0.0;
  /// max_i ||P_i S2_ii P_i - S2_ii||_F with P_i the projector onto span(V_i).
  double residual_range2 = 0.0;
};

PrimalDecomposition build_primal_decomposition(const BlockSymMatrix& s, const StiefelBlocks& v);

struct DualCertificate {
  BlockSymMatrix t1;
  BlockSymMatrix t2;
  double c = 0.0;
  /// min_i lambda_min(B_i^T T2_ii B_i), B_i an orthonormal basis of span(V_i).
  double margin_T2 = 0.0;
  /// lambda_max(B^T T1 B), B an orthonormal basis of span(V)^perp.
  double margin_T1 = 0.0;
  /// ||S - T1 - T2 - c I||_F
  double residual_reconstruction = 0.0;
  /// ||P_perp T1 P_perp - T1||_F
  double residual_range1 = 0.0;
  /// max_i ||P_i T2_ii P_i - T2_ii||_F
  double residual_range2 = 0.0;
  /// Absolute tolerance the margins and residuals were judged against.
  double tol = 0.0;
  bool verified = false;
};

/// Builds (T1, T2, c = m/2) from the primal decomposition at V and checks
/// margin_T2 > tol, margin_T1 < -tol and every structural residual <= tol,
/// where tol is scale-relative: tol_rel * max(1, ||S||).
DualCertificate build_dual_certificate(const BlockSymMatrix& s, const StiefelBlocks& v,
                                       double tol_rel = kCertificateTol);

}  // namespace otsm
