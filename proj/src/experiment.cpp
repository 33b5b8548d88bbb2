#include "otsm/experiment.hpp"

#include "otsm/bounds.hpp"
#include "otsm/error.hpp"
#include "otsm/mat_io.hpp"
#include "otsm/rng.hpp"
#include "otsm/serialize.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string_view>
#include <thread>

namespace otsm {

using nlohmann::json;

void ExperimentConfig::validate() const {
  if (d < 1 || r < 1 || r > d) throw InvalidInput("config: need 1 <= r <= d");
  if (m_list.empty() || sigma_list.empty()) throw InvalidInput("config: m_list and sigma_list must be non-empty");
  if (replicates < 1) throw InvalidInput("config: replicates must be >= 1");
  if (workers < 1) throw InvalidInput("config: workers must be >= 1");
  for (int m : m_list) {
    if (m < 1) throw InvalidInput("config: every m must be >= 1");
  }
  for (double s : sigma_list) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidInput("config: every sigma must be finite and >= 0");
  }
  if (!(certificate_tol > 0.0)) throw InvalidInput("config: certificate_tol must be positive");
}

std::uint64_t replicate_seed(std::uint64_t base_seed, int m_index, int sigma_index, int rep) {
  return derive_seed(base_seed, {static_cast<std::uint64_t>(m_index),
                                 static_cast<std::uint64_t>(sigma_index),
                                 static_cast<std::uint64_t>(rep)});
}

namespace {

std::filesystem::path replicate_dir(const ExperimentConfig& config, int m, int sigma_index,
                                    int rep) {
  return *config.keep_instances /
         ("m" + std::to_string(m) + "_s" + std::to_string(sigma_index) + "_r" + std::to_string(rep));
}

ReplicateResult run_replicate_impl(const ExperimentConfig& config, int m, double sigma,
                                   std::uint64_t seed, const std::filesystem::path* keep) {
  const BlockSpec spec = BlockSpec::uniform(m, config.d, config.r);
  const Instance inst = generate_instance(spec, config.model, sigma, seed);
  const AscentResult solved = solve_block_ascent(inst.s, config.ascent);

  ReplicateResult out;
  out.seed = seed;
  out.converged = solved.trace.converged;
  out.sweeps = solved.trace.sweeps_used;
  out.objective = solved.trace.objective_per_sweep.back();

  const CertificateReport cert = certify_global(inst.s, solved.o, config.certificate_tol);
  out.qualified = cert.qualified;
  out.certificate = cert.globally_optimal;
  out.L_min_eig = cert.L_min_eig;
  out.assumption =
      cert.qualified && check_assumption(inst.s, solved.o, *inst.ground_truth, config.certificate_tol);
  out.cond_thm2 = check_deterministic_conditions(inst.effective_noise(), *inst.ground_truth).cond_thm2;
  out.estimation_error = estimation_error(solved.o, *inst.ground_truth);

  if (config.run_sdp) {
    const GramSolution sdp = solve_sdp(inst.s, config.sdp);
    out.sdp_objective_gap = tightness_report(sdp.u, solved.o, inst.s).objective_gap;
  }
  if (keep) {
    save_instance(*keep, inst);
    save_matrix(*keep / "O.mat", solved.o.stacked());
    json rec;
    rec["trace"] = to_json(solved.trace);
    rec["certificate"] = to_json(cert);
    rec["assumption"] = out.assumption;
    rec["estimation_error"] = json_number(out.estimation_error);
    std::ofstream(*keep / "replicate.json") << rec.dump(2) << '\n';
  }
  return out;
}

struct Task {
  int cell = 0;
  int m_index = 0;
  int sigma_index = 0;
  int rep = 0;
};

void aggregate(CellResult& cell) {
  double err_sum = 0.0;
  double gap_sum = 0.0;
  int gap_count = 0;
  for (const ReplicateResult& rr : cell.details) {
    cell.freq_assumption += rr.assumption;
    cell.freq_cond_thm2 += rr.cond_thm2;
    cell.freq_certificate += rr.certificate;
    cell.freq_qualified += rr.qualified;
    cell.freq_converged += rr.converged;
    err_sum += rr.estimation_error;
    cell.max_estimation_error = std::max(cell.max_estimation_error, rr.estimation_error);
    if (rr.sdp_objective_gap) {
      gap_sum += *rr.sdp_objective_gap;
      ++gap_count;
    }
  }
  cell.mean_estimation_error = err_sum / cell.replicates;
  if (gap_count > 0) cell.mean_sdp_objective_gap = gap_sum / gap_count;
}

std::vector<CellResult> run_tasks(const ExperimentConfig& config,
                                  const std::vector<std::pair<int, int>>& cells) {
  config.validate();
  std::vector<CellResult> table;
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto [mi, si] = cells[c];
    CellResult cell;
    cell.m = config.m_list[static_cast<std::size_t>(mi)];
    cell.sigma = config.sigma_list[static_cast<std::size_t>(si)];
    cell.replicates = config.replicates;
    cell.cond_discordant_threshold =
        cell.sigma <= sigma_thresholds(cell.m, config.d, config.r).at("local31").value;
    cell.details.resize(static_cast<std::size_t>(config.replicates));
    table.push_back(std::move(cell));
    for (int rep = 0; rep < config.replicates; ++rep) {
      tasks.push_back({static_cast<int>(c), mi, si, rep});
    }
  }

  std::vector<double> seconds(tasks.size(), 0.0);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      const Task& t = tasks[k];
      CellResult& cell = table[static_cast<std::size_t>(t.cell)];
      const auto start = std::chrono::steady_clock::now();
      try {
        const std::uint64_t seed = replicate_seed(config.base_seed, t.m_index, t.sigma_index, t.rep);
        std::filesystem::path keep;
        if (config.keep_instances) keep = replicate_dir(config, cell.m, t.sigma_index, t.rep);
        cell.details[static_cast<std::size_t>(t.rep)] =
            run_replicate_impl(config, cell.m, cell.sigma, seed, config.keep_instances ? &keep : nullptr);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!failure) failure = std::current_exception();
      }
      seconds[k] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const int n_threads = std::max(1, std::min<int>(config.workers, static_cast<int>(tasks.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t k = 0; k < tasks.size(); ++k) table[static_cast<std::size_t>(tasks[k].cell)].wall_time += seconds[k];
  for (CellResult& cell : table) aggregate(cell);
  return table;
}

template <typename T>
int index_of(const std::vector<T>& xs, T x, const char* what) {
  const auto it = std::find(xs.begin(), xs.end(), x);
  if (it == xs.end()) throw InvalidInput(std::string("run_cell: ") + what + " is not in the configured grid");
  return static_cast<int>(it - xs.begin());
}

}  // namespace

ReplicateResult run_replicate(const ExperimentConfig& config, int m, double sigma,
                              std::uint64_t seed) {
  return run_replicate_impl(config, m, sigma, seed, nullptr);
}

CellResult run_cell(const ExperimentConfig& config, int m_index, int sigma_index) {
  if (m_index < 0 || m_index >= static_cast<int>(config.m_list.size()) || sigma_index < 0 ||
      sigma_index >= static_cast<int>(config.sigma_list.size())) {
    throw InvalidInput("run_cell: grid index out of range");
  }
  return run_tasks(config, {{m_index, sigma_index}}).front();
}

CellResult run_cell_at(const ExperimentConfig& config, int m, double sigma) {
  return run_cell(config, index_of(config.m_list, m, "m"), index_of(config.sigma_list, sigma, "sigma"));
}

std::vector<CellResult> reproduce_table(const ExperimentConfig& config) {
  std::vector<std::pair<int, int>> cells;
  for (int mi = 0; mi < static_cast<int>(config.m_list.size()); ++mi) {
    for (int si = 0; si < static_cast<int>(config.sigma_list.size()); ++si) cells.emplace_back(mi, si);
  }
  return run_tasks(config, cells);
}

std::string results_csv_header() {
  return "m,sigma,replicates,freq_assumption,freq_cond_thm2,cond_discordant_threshold,"
         "freq_certificate,freq_qualified,freq_converged,mean_estimation_error,"
         "max_estimation_error,mean_sdp_objective_gap";
}

void write_results_csv(std::ostream& os, const std::vector<CellResult>& table) {
  os << results_csv_header() << '\n';
  for (const CellResult& c : table) {
    os << c.m << ',' << format_double(c.sigma) << ',' << c.replicates << ',' << c.freq_assumption
       << ',' << c.freq_cond_thm2 << ',' << (c.cond_discordant_threshold ? "TRUE" : "FALSE") << ','
       << c.freq_certificate << ',' << c.freq_qualified << ',' << c.freq_converged << ','
       << format_double(c.mean_estimation_error) << ',' << format_double(c.max_estimation_error)
       << ',' << (c.mean_sdp_objective_gap ? format_double(*c.mean_sdp_objective_gap) : "") << '\n';
  }
}

namespace {

json ascent_json(const AscentOptions& a) {
  return {{"max_sweeps", a.max_sweeps},
          {"tol_stationarity", a.tol_stationarity},
          {"tol_objective", a.tol_objective},
          {"proximal_margin", a.proximal_margin},
          {"init", "spectral"},
          {"randomize_order", a.randomize_order}};
}

json sdp_json(const SdpOptions& s) {
  return {{"rho", s.rho},
          {"max_iter", s.max_iter},
          {"tol_primal", s.tol_primal},
          {"tol_dual", s.tol_dual},
          {"over_relaxation", s.over_relaxation},
          {"adapt_interval", s.adapt_interval}};
}

}  // namespace

std::string results_json(const ExperimentConfig& config, const std::vector<CellResult>& table) {
  json meta;
  meta["version"] = kCodeVersion;
  meta["prng"] = kPrngName;
  meta["seed_derivation"] = "derive_seed(base_seed, {m_index, sigma_index, replicate})";
  meta["base_seed"] = config.base_seed;
  meta["d"] = config.d;
  meta["r"] = config.r;
  meta["model"] = to_string(config.model);
  meta["replicates"] = config.replicates;
  meta["m_list"] = config.m_list;
  meta["sigma_list"] = config.sigma_list;
  meta["log_base"] = "natural";
  meta["tolerances"] = {{"ascent", ascent_json(config.ascent)},
                        {"certificate_tol", config.certificate_tol},
                        {"sdp", sdp_json(config.sdp)},
                        {"tightness", {{"eig_gap", TightnessThresholds{}.eig_gap},
                                       {"objective_gap", TightnessThresholds{}.objective_gap}}}};
  meta["run_sdp"] = config.run_sdp;

  json rows = json::array();
  for (const CellResult& c : table) {
    json row;
    row["m"] = c.m;
    row["sigma"] = c.sigma;
    row["replicates"] = c.replicates;
    row["freq_assumption"] = c.freq_assumption;
    row["freq_cond_thm2"] = c.freq_cond_thm2;
    row["cond_discordant_threshold"] = c.cond_discordant_threshold;
    row["freq_certificate"] = c.freq_certificate;
    row["freq_qualified"] = c.freq_qualified;
    row["freq_converged"] = c.freq_converged;
    row["mean_estimation_error"] = json_number(c.mean_estimation_error);
    row["max_estimation_error"] = json_number(c.max_estimation_error);
    row["mean_sdp_objective_gap"] =
        c.mean_sdp_objective_gap ? json_number(*c.mean_sdp_objective_gap) : json(nullptr);
    row["wall_time_seconds"] = c.wall_time;
    rows.push_back(std::move(row));
  }
  return json{{"metadata", meta}, {"results", rows}}.dump(2);
}

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> known,
                         const std::string& where) {
  if (!j.is_object()) throw InvalidInput(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      throw InvalidInput(where + ": unknown key \"" + item.key() + "\"");
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  ExperimentConfig cfg;
  try {
    const json j = json::parse(json_text);
    if (!j.is_object()) throw InvalidInput("config: top level must be an object");
    reject_unknown_keys(j, {"d", "r", "m_list", "sigma_list", "replicates", "model", "base_seed",
                            "workers", "run_sdp", "certificate_tol", "ascent", "sdp"},
                        "config");
    cfg.d = j.value("d", cfg.d);
    cfg.r = j.value("r", cfg.r);
    if (j.contains("m_list")) cfg.m_list = j["m_list"].get<std::vector<int>>();
    if (j.contains("sigma_list")) cfg.sigma_list = j["sigma_list"].get<std::vector<double>>();
    cfg.replicates = j.value("replicates", cfg.replicates);
    if (j.contains("model")) cfg.model = parse_noise_model(j["model"].get<std::string>());
    cfg.base_seed = j.value("base_seed", cfg.base_seed);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.run_sdp = j.value("run_sdp", cfg.run_sdp);
    cfg.certificate_tol = j.value("certificate_tol", cfg.certificate_tol);
    if (j.contains("ascent")) {
      const json& a = j["ascent"];
      reject_unknown_keys(a, {"max_sweeps", "tol_stationarity", "tol_objective", "proximal_margin",
                              "randomize_order", "order_seed"},
                          "config.ascent");
      cfg.ascent.max_sweeps = a.value("max_sweeps", cfg.ascent.max_sweeps);
      cfg.ascent.tol_stationarity = a.value("tol_stationarity", cfg.ascent.tol_stationarity);
      cfg.ascent.tol_objective = a.value("tol_objective", cfg.ascent.tol_objective);
      cfg.ascent.proximal_margin = a.value("proximal_margin", cfg.ascent.proximal_margin);
      cfg.ascent.randomize_order = a.value("randomize_order", cfg.ascent.randomize_order);
      cfg.ascent.order_seed = a.value("order_seed", cfg.ascent.order_seed);
    }
    if (j.contains("sdp")) {
      const json& s = j["sdp"];
      reject_unknown_keys(s, {"rho", "max_iter", "tol_primal", "tol_dual", "over_relaxation",
                              "adapt_interval"},
                          "config.sdp");
      cfg.sdp.rho = s.value("rho", cfg.sdp.rho);
      cfg.sdp.max_iter = s.value("max_iter", cfg.sdp.max_iter);
      cfg.sdp.tol_primal = s.value("tol_primal", cfg.sdp.tol_primal);
      cfg.sdp.tol_dual = s.value("tol_dual", cfg.sdp.tol_dual);
      cfg.sdp.over_relaxation = s.value("over_relaxation", cfg.sdp.over_relaxation);
      cfg.sdp.adapt_interval = s.value("adapt_interval", cfg.sdp.adapt_interval);
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace otsm
