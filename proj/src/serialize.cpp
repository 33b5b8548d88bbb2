#include "otsm/serialize.hpp"

#include <cmath>

namespace otsm {

using nlohmann::json;

json json_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

namespace {

json number_array(const std::vector<double>& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(json_number(x));
  return out;
}

json number_array(const Vector& xs) {
  json out = json::array();
  for (Eigen::Index k = 0; k < xs.size(); ++k) out.push_back(json_number(xs[k]));
  return out;
}

json matrix_rows(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json_number(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

json to_json(const SolveTrace& trace) {
  const auto& obj = trace.objective_per_sweep;
  json j;
  j["sweeps_used"] = trace.sweeps_used;
  j["converged"] = trace.converged;
  j["stationarity_residual"] = json_number(trace.stationarity_residual);
  j["rank_deficient_updates"] = trace.rank_deficient_updates;
  j["gap_warning"] = trace.gap_warning;
  j["objective_count"] = obj.size();
  j["final_objective"] = obj.empty() ? json(nullptr) : json_number(obj.back());
  if (obj.size() <= 100) {
    j["objective_first"] = number_array(obj);
    j["objective_last"] = json::array();
  } else {
    j["objective_first"] = number_array(std::vector<double>(obj.begin(), obj.begin() + 50));
    j["objective_last"] = number_array(std::vector<double>(obj.end() - 50, obj.end()));
  }
  return j;
}

json to_json(const CertificateReport& report) {
  json j;
  json lambdas = json::array();
  for (const Matrix& lam : report.lambdas) lambdas.push_back(matrix_rows(lam));
  j["lambdas"] = std::move(lambdas);
  j["taus"] = number_array(report.taus);
  j["symmetry_residuals"] = number_array(report.symmetry_residuals);
  j["L_min_eig"] = json_number(report.L_min_eig);
  j["qualified"] = report.qualified;
  j["globally_optimal"] = report.globally_optimal;
  j["tol"] = report.tol;
  return j;
}

json to_json(const PrimalDecomposition& decomposition) {
  return {{"residual_reconstruction", json_number(decomposition.residual_reconstruction)},
          {"residual_range1", json_number(decomposition.residual_range1)},
          {"residual_range2", json_number(decomposition.residual_range2)}};
}

json to_json(const DualCertificate& certificate) {
  return {{"c", certificate.c},
          {"margin_T1", json_number(certificate.margin_T1)},
          {"margin_T2", json_number(certificate.margin_T2)},
          {"residual_reconstruction", json_number(certificate.residual_reconstruction)},
          {"residual_range1", json_number(certificate.residual_range1)},
          {"residual_range2", json_number(certificate.residual_range2)},
          {"tol", json_number(certificate.tol)},
          {"verified", certificate.verified}};
}

json to_json(const GramSolution& solution) {
  return {{"objective", json_number(solution.objective)},
          {"primal_residual", json_number(solution.primal_residual)},
          {"dual_residual", json_number(solution.dual_residual)},
          {"spectrum", number_array(solution.spectrum)},
          {"iters", solution.iters},
          {"converged", solution.converged},
          {"final_rho", json_number(solution.final_rho)}};
}

json to_json(const RoundingResult& rounding) {
  return {{"gap", json_number(rounding.gap)}, {"degenerate_rank", rounding.degenerate_rank}};
}

json to_json(const TightnessReport& report) {
  return {{"eig_gap_ratio", json_number(report.eig_gap_ratio)},
          {"objective_gap", json_number(report.objective_gap)},
          {"tight", report.tight},
          {"thresholds",
           {{"eig_gap", report.thresholds.eig_gap},
            {"objective_gap", report.thresholds.objective_gap}}}};
}

json to_json(const DiscordanceReport& report) {
  return {{"opnorm_ratio", json_number(report.opnorm_ratio)},
          {"rowblock_ratio", json_number(report.rowblock_ratio)},
          {"discordant", report.discordant}};
}

json to_json(const BoundsReport& report) {
  const ConditionTerms& t = report.terms;
  json j;
  j["w_norm"] = json_number(report.stats.w_norm);
  j["rowblock_max"] = json_number(report.stats.rowblock_max);
  j["thm1"] = {{"precondition_rhs", json_number(t.thm1_precondition_rhs)},
               {"precondition_holds", report.precond_thm1},
               {"a", json_number(t.a)},
               {"denominator", json_number(t.thm1_denominator)},
               {"fraction", json_number(t.thm1_fraction)},
               {"rhs", json_number(t.thm1_rhs)},
               {"slack", json_number(report.slack_thm1)},
               {"holds", report.cond_thm1}};
  j["thm2"] = {{"a", json_number(t.a)},
               {"denominator", json_number(t.thm2_denominator)},
               {"fraction", json_number(t.thm2_fraction)},
               {"rhs", json_number(t.thm2_rhs)},
               {"slack", json_number(report.slack_thm2)},
               {"holds", report.cond_thm2}};
  json thresholds = json::object();
  for (const auto& [key, th] : report.thresholds) {
    const auto below = report.sigma_below.find(key);
    thresholds[key] = {{"constant", th.constant},
                       {"value", json_number(th.value)},
                       {"min_m", th.min_m},
                       {"sigma_below", below != report.sigma_below.end() && below->second}};
  }
  j["sigma_thresholds"] = std::move(thresholds);
  j["consistency_bound_sdp"] = json_number(report.consistency_bound_sdp);
  j["consistency_bound_local"] = json_number(report.consistency_bound_local);
  return j;
}

}  // namespace otsm
