#pragma once

#include <string>

namespace otsm::testing {

/// Outcome of one randomized property suite. `cases` counts the instances
/// examined, `fired` the ones where an implication's antecedent held.
struct PropertyOutcome {
  bool passed = true;
  int cases = 0;
  int fired = 0;
  double worst = 0.0;
  std::string detail;
};

/// Objective never drops by more than 1e-10 relative per sweep, for spectral
/// and random starts, both models, sigma in {0, 0.01, 0.1, 1}.
PropertyOutcome check_ascent_monotonicity();

/// Every iterate, initializer and rounding output keeps ||O_i^T O_i - I|| <= 1e-10.
PropertyOutcome check_stiefel_feasibility();

/// <S, U> >= tr(O^T S O) - 1e-6 * scale for the solver output, ground truth
/// and random feasible points.
PropertyOutcome check_relaxation_upper_bound();

/// certify_global reports agree within 1e-9 for O and O Q.
PropertyOutcome check_certificate_rotation_invariance();

/// ||S - T1 - T2 - (m/2) I||_F <= 1e-12 ||S||.
PropertyOutcome check_dual_reconstruction();

/// cond_thm2 and qualified and assumption imply a global certificate.
PropertyOutcome check_optimality_condition_implication();

/// cond_thm1 implies the relaxation is tight at the block-ascent point.
PropertyOutcome check_tightness_condition_implication();

}  // namespace otsm::testing
