#include "otsm/bounds.hpp"

#include "otsm/error.hpp"
#include "otsm/linalg.hpp"

#include <cmath>
#include <limits>

namespace otsm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Ratio with the convention 0/0 = 0 and x/0 = +inf.
double safe_ratio(double num, double den) {
  if (den > 0.0) return num / den;
  return num == 0.0 ? 0.0 : kInf;
}

}  // namespace

NoiseStats noise_stats(const Matrix& w, const StiefelBlocks& theta) {
  const BlockSpec& spec = theta.spec();
  if (w.rows() != spec.D() || w.cols() != spec.D()) throw InvalidInput("noise_stats: shape mismatch");
  NoiseStats out;
  out.w_norm = op_norm(w);
  const Matrix wt = w * theta.stacked();
  for (int i = 0; i < spec.m(); ++i) {
    out.rowblock_max = std::max(out.rowblock_max, wt.middleRows(spec.offset(i), spec.dim(i)).norm());
  }
  return out;
}

DiscordanceReport check_discordance(const Matrix& w, const StiefelBlocks& theta, double sigma) {
  if (!(sigma > 0.0)) throw InvalidInput("check_discordance: sigma must be positive");
  const BlockSpec& spec = theta.spec();
  const NoiseStats stats = noise_stats(w, theta);
  const double dd = spec.D();
  DiscordanceReport out;
  out.opnorm_ratio = safe_ratio(stats.w_norm / sigma, 3.0 * std::sqrt(dd));
  out.rowblock_ratio =
      safe_ratio(stats.rowblock_max / sigma, 3.0 * std::sqrt(dd * spec.r() * std::log(spec.m())));
  out.discordant = out.opnorm_ratio <= 1.0 && out.rowblock_ratio <= 1.0;
  return out;
}

std::map<std::string, SigmaThreshold> sigma_thresholds(int m, double d, int r) {
  if (m < 1 || !(d >= 1.0) || r < 1) throw InvalidInput("sigma_thresholds: m, d, r must be >= 1");
  const double base = std::pow(static_cast<double>(m), 0.25) / std::sqrt(d * r);
  auto make = [&](double k, int min_m) { return SigmaThreshold{k, base / k, min_m}; };
  return {
      {"sdp60", make(60.0, 8)},
      {"local31", make(31.0, 2)},
      {"maxdiff_sdp120", make(120.0, 10)},
      {"maxdiff_local64", make(64.0, 4)},
  };
}

BoundsReport check_deterministic_conditions(const Matrix& w, const StiefelBlocks& theta) {
  const BlockSpec& spec = theta.spec();
  const double m = spec.m();
  const double r = spec.r();
  const double sr = std::sqrt(r);
  const double sqrt_r_m = std::sqrt(r / m);

  BoundsReport rep;
  rep.stats = noise_stats(w, theta);
  const double wn = rep.stats.w_norm;
  ConditionTerms& t = rep.terms;
  t.a = rep.stats.rowblock_max + 4.0 * wn * wn * sqrt_r_m;

  t.thm1_precondition_rhs = wn * (4.0 * sr + 1.0) + 1.0;
  rep.precond_thm1 = m >= t.thm1_precondition_rhs;
  t.thm1_denominator = m - wn * (4.0 * sr + 1.0) - 1.0;
  if (t.thm1_denominator > 0.0) {
    t.thm1_fraction = 4.0 * m * 2.0 * t.a / t.thm1_denominator;
    t.thm1_rhs = t.thm1_fraction + 2.0 * t.a + 8.0 * wn * sqrt_r_m + 2.0 * wn;
    rep.slack_thm1 = m - t.thm1_rhs;
    rep.cond_thm1 = m > t.thm1_rhs;
  } else {
    t.thm1_fraction = kInf;
    t.thm1_rhs = kInf;
    rep.slack_thm1 = -kInf;
    rep.cond_thm1 = false;
  }

  t.thm2_denominator = m - 4.0 * wn * sr;
  if (t.thm2_denominator > 0.0) {
    t.thm2_fraction = 2.0 * m * t.a / t.thm2_denominator;
    t.thm2_rhs = wn * (4.0 * sr + 1.0) + t.a + t.thm2_fraction + 16.0 * wn * wn * r / m;
    rep.slack_thm2 = m - t.thm2_rhs;
    rep.cond_thm2 = m >= t.thm2_rhs;
  } else {
    t.thm2_fraction = kInf;
    t.thm2_rhs = kInf;
    rep.slack_thm2 = -kInf;
    rep.cond_thm2 = false;
  }

  rep.thresholds = sigma_thresholds(spec.m(), spec.mean_dim(), spec.r());
  for (const auto& [key, th] : rep.thresholds) rep.sigma_below[key] = false;
  rep.consistency_bound_sdp = kInf;
  rep.consistency_bound_local = kInf;
  return rep;
}

ConsistencyBounds consistency_bounds(double sigma, double d, int m, int r, NoiseModel model) {
  if (!(sigma >= 0.0)) throw InvalidInput("consistency_bounds: sigma must be non-negative");
  if (m < 1 || !(d >= 1.0) || r < 1) throw InvalidInput("consistency_bounds: m, d, r must be >= 1");
  const double mm = m;
  const double rr = r;
  const double lg = std::log(mm);
  const double s2 = sigma * sigma;
  ConsistencyBounds out{kInf, kInf};

  if (model == NoiseModel::kMaxbet) {
    const double den_sdp = mm - 3.0 * sigma * std::sqrt(d * mm) * (4.0 * std::sqrt(rr) + 1.0) - 1.0;
    if (den_sdp > 0.0) {
      const double num = 2.0 * (3.0 * sigma * std::sqrt(d * mm * rr * lg) +
                                36.0 * s2 * d * std::sqrt(rr * mm));
      out.bound_sdp = num / den_sdp;
    }
    if (mm > 144.0 * s2 * d * rr) {
      const double den = 1.0 - 12.0 * sigma * std::sqrt(d * rr / mm);
      const double num = 2.0 * (3.0 * sigma * std::sqrt(d * rr * lg / mm) +
                                36.0 * s2 * d * std::sqrt(rr / mm));
      if (den > 0.0) out.bound_local = num / den;
    }
    return out;
  }

  if (m <= 2) return out;
  const double den_sdp = mm - 12.0 * sigma * std::sqrt(d * mm * mm * mm * rr) / (mm - 2.0);
  if (den_sdp > 0.0) {
    const double num = 6.0 * sigma * std::sqrt(d * mm * rr * lg) +
                       72.0 * s2 * d * mm * std::sqrt(rr * mm) / (mm - 2.0);
    out.bound_sdp = num / den_sdp;
  }
  const double gate = std::pow(mm, 1.5) - 2.0 * std::sqrt(mm) - 12.0 * sigma * std::sqrt(d * rr) * mm - 3.0;
  if (gate > 0.0) {
    const double q = std::sqrt(mm) - 2.0 / std::sqrt(mm);
    const double den = 1.0 - 12.0 * sigma * std::sqrt(d * rr) / q - 3.0 / mm;
    const double num = 2.0 * (3.0 * sigma * std::sqrt(d * rr * lg / mm) +
                              36.0 * s2 * d * std::sqrt(rr) / q);
    if (den > 0.0) out.bound_local = num / den;
  }
  return out;
}

double estimation_error(const StiefelBlocks& o, const StiefelBlocks& theta) {
  return procrustes_align(o, theta).max_residual;
}

BoundsReport bounds_for_instance(const Instance& inst) {
  if (!inst.ground_truth) throw MissingGroundTruth();
  BoundsReport rep = check_deterministic_conditions(inst.effective_noise(), *inst.ground_truth);
  if (inst.sigma) {
    const double sigma = *inst.sigma;
    for (const auto& [key, th] : rep.thresholds) rep.sigma_below[key] = sigma <= th.value;
    const ConsistencyBounds cb =
        consistency_bounds(sigma, inst.spec.mean_dim(), inst.spec.m(), inst.spec.r(), inst.model);
    rep.consistency_bound_sdp = cb.bound_sdp;
    rep.consistency_bound_local = cb.bound_local;
  }
  return rep;
}

}  // namespace otsm
