#pragma once

#include "otsm/block_ascent.hpp"
#include "otsm/certificate.hpp"
#include "otsm/problem.hpp"
#include "otsm/sdp.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace otsm {

inline constexpr const char* kCodeVersion = "otsm-lab 1.0.0";

struct ExperimentConfig {
  int d = 5;
  int r = 3;
  std::vector<int> m_list{10, 20, 30};
  std::vector<double> sigma_list{0.01, 0.10, 1.00, 1.50};
  int replicates = 100;
  NoiseModel model = NoiseModel::kMaxbet;
  std::uint64_t base_seed = 20240601;
  AscentOptions ascent;
  double certificate_tol = kCertificateTol;
  /// Also solve the relaxation for every replicate (adds the SDP gap column).
  bool run_sdp = false;
  SdpOptions sdp;
  int workers = 1;
  /// When set, every replicate's instance and solution are written below it.
  std::optional<std::filesystem::path> keep_instances;

  /// Throws InvalidInput on an empty grid, replicates < 1 or bad dimensions.
  void validate() const;
};

/// Flags and metrics of one seeded replicate.
struct ReplicateResult {
  std::uint64_t seed = 0;
  bool qualified = false;
  /// Qualified candidate critical point with tr(T^T S T) <= tr(O^T S O).
  bool assumption = false;
  bool cond_thm2 = false;
  bool certificate = false;
  bool converged = false;
  int sweeps = 0;
  double objective = 0.0;
  double L_min_eig = 0.0;
  double estimation_error = 0.0;
  std::optional<double> sdp_objective_gap;
};

struct CellResult {
  int m = 0;
  double sigma = 0.0;
  int replicates = 0;
  int freq_assumption = 0;
  int freq_cond_thm2 = 0;
  int freq_certificate = 0;
  int freq_qualified = 0;
  int freq_converged = 0;
  /// sigma <= m^{1/4} / (31 sqrt(d r)); a function of the cell alone.
  bool cond_discordant_threshold = false;
  double mean_estimation_error = 0.0;
  double max_estimation_error = 0.0;
  std::optional<double> mean_sdp_objective_gap;
  double wall_time = 0.0;
  std::vector<ReplicateResult> details;
};

/// Seed of replicate `rep` in cell (m_index, sigma_index).
std::uint64_t replicate_seed(std::uint64_t base_seed, int m_index, int sigma_index, int rep);

/// Generates, solves and certifies one replicate.
ReplicateResult run_replicate(const ExperimentConfig& config, int m, double sigma,
                              std::uint64_t seed);

/// Runs every replicate of the cell at grid position (m_index, sigma_index).
CellResult run_cell(const ExperimentConfig& config, int m_index, int sigma_index);
/// Same, locating m and sigma in the configured grid.
CellResult run_cell_at(const ExperimentConfig& config, int m, double sigma);

/// Runs the full m x sigma grid (m-major order). Replicates are spread over
/// `config.workers` threads; the result does not depend on the worker count.
std::vector<CellResult> reproduce_table(const ExperimentConfig& config);

/// Fixed CSV layout, header included; decimals carry 17 significant digits.
void write_results_csv(std::ostream& os, const std::vector<CellResult>& table);
std::string results_csv_header();
/// JSON document with metadata (seeds, PRNG, tolerances, version) and rows.
std::string results_json(const ExperimentConfig& config, const std::vector<CellResult>& table);

ExperimentConfig parse_experiment_config(const std::string& json_text);

}  // namespace otsm
