#pragma once

#include "otsm/block_types.hpp"
#include "otsm/problem.hpp"

#include <map>
#include <string>

namespace otsm {

/// Both ratios <= 1 means sigma^{-1} W is Theta-discordant:
///   ||W/sigma|| <= 3 sqrt(D)  and  max_i ||[(W/sigma) Theta]_i||_F <= 3 sqrt(D r ln m).
struct DiscordanceReport {
  double opnorm_ratio = 0.0;
  double rowblock_ratio = 0.0;
  bool discordant = false;
};

DiscordanceReport check_discordance(const Matrix& w, const StiefelBlocks& theta, double sigma);

/// One sigma threshold m^{1/4} / (k sqrt(d r)) with the least m it is stated for.
struct SigmaThreshold {
  double constant = 0.0;
  double value = 0.0;
  int min_m = 0;
};

/// Keys: "sdp60", "local31", "maxdiff_sdp120", "maxdiff_local64".
std::map<std::string, SigmaThreshold> sigma_thresholds(int m, double d, int r);

/// Noise statistics that enter the deterministic conditions.
struct NoiseStats {
  double w_norm = 0.0;          // ||W||
  double rowblock_max = 0.0;    // max_i ||[W Theta]_i||_F
};

NoiseStats noise_stats(const Matrix& w, const StiefelBlocks& theta);

/// Every intermediate term of the two deterministic noise conditions.
struct ConditionTerms {
  double a = 0.0;  // rowblock_max + 4 ||W||^2 sqrt(r/m)
  // Tightness condition of the relaxation (strict inequality).
  double thm1_precondition_rhs = 0.0;  // ||W|| (4 sqrt r + 1) + 1
  double thm1_denominator = 0.0;       // m - ||W|| (4 sqrt r + 1) - 1
  double thm1_fraction = 0.0;          // 4 m 2a / denominator
  double thm1_rhs = 0.0;
  // Global optimality of candidate critical points (non-strict inequality).
  double thm2_denominator = 0.0;  // m - 4 ||W|| sqrt r
  double thm2_fraction = 0.0;     // 2 m a / denominator
  double thm2_rhs = 0.0;
};

struct BoundsReport {
  NoiseStats stats;
  ConditionTerms terms;
  bool precond_thm1 = false;
  bool cond_thm1 = false;
  double slack_thm1 = 0.0;  // m - rhs, -inf when the denominator is <= 0
  bool cond_thm2 = false;
  double slack_thm2 = 0.0;
  std::map<std::string, SigmaThreshold> thresholds;
  /// sigma <= threshold for each key of `thresholds` (false without sigma).
  std::map<std::string, bool> sigma_below;
  double consistency_bound_sdp = 0.0;
  double consistency_bound_local = 0.0;
};

/// Evaluates the tightness and global-optimality conditions on (W, Theta).
BoundsReport check_deterministic_conditions(const Matrix& w, const StiefelBlocks& theta);

struct ConsistencyBounds {
  double bound_sdp = 0.0;
  double bound_local = 0.0;
};

/// Closed-form estimation-error bounds; +inf where a denominator or a
/// validity gate is not positive.
ConsistencyBounds consistency_bounds(double sigma, double d, int m, int r, NoiseModel model);

/// Max-over-blocks error after the Frobenius-optimal common rotation.
double estimation_error(const StiefelBlocks& o, const StiefelBlocks& theta);

/// Full report for a generated instance: conditions on the effective noise,
/// thresholds and consistency bounds at the instance's sigma.
BoundsReport bounds_for_instance(const Instance& inst);

}  // namespace otsm
