// otsm: generate, solve, certify and bound-check OTSM instances, and run
// seeded replicate grids.

#include "otsm/block_ascent.hpp"
#include "otsm/bounds.hpp"
#include "otsm/certificate.hpp"
#include "otsm/error.hpp"
#include "otsm/experiment.hpp"
#include "otsm/mat_io.hpp"
#include "otsm/problem.hpp"
#include "otsm/sdp.hpp"
#include "otsm/serialize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace otsm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitNotConverged = 3;

struct ConfigError : InvalidInput {
  using InvalidInput::InvalidInput;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

std::string read_text(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path output_dir(const std::string& out, const fs::path& fallback) {
  const fs::path dir = out.empty() ? fallback : fs::path(out);
  fs::create_directories(dir);
  return dir;
}

StiefelBlocks load_solution(const fs::path& path, const BlockSpec& spec) {
  return StiefelBlocks::from_stacked(spec, load_matrix(path), 1e-8);
}

struct GenArgs {
  std::string out;
  std::uint64_t seed = 0;
  std::string model = "maxbet";
  int m = 10;
  int d = 5;
  int r = 3;
  std::vector<int> dims;
  double sigma = 0.1;
};

int run_gen(const GenArgs& a) {
  const BlockSpec spec = a.dims.empty() ? BlockSpec::uniform(a.m, a.d, a.r) : BlockSpec(a.dims, a.r);
  const Instance inst = generate_instance(spec, parse_noise_model(a.model), a.sigma, a.seed);
  save_instance(a.out, inst);
  std::cout << "instance written to " << a.out << " (D=" << spec.D() << ")\n";
  return kExitOk;
}

struct SolveArgs {
  std::string instance;
  std::string out;
  std::string init = "spectral";
  std::uint64_t seed = 0;
  int max_sweeps = AscentOptions{}.max_sweeps;
  bool strict = false;
};

int run_solve(const SolveArgs& a) {
  const Instance inst = load_instance(a.instance);
  AscentOptions opts;
  opts.max_sweeps = a.max_sweeps;
  if (a.init == "random") {
    opts.init = InitKind::kRandom;
    opts.init_seed = a.seed;
  } else if (a.init != "spectral") {
    throw ConfigError("--init must be spectral or random");
  }
  const AscentResult res = solve_block_ascent(inst.s, opts);
  const fs::path dir = output_dir(a.out, a.instance);
  save_matrix(dir / "O.mat", res.o.stacked());

  json j;
  j["objective"] = json_number(res.trace.objective_per_sweep.back());
  j["trace"] = to_json(res.trace);
  if (inst.ground_truth) j["estimation_error"] = json_number(estimation_error(res.o, *inst.ground_truth));
  write_json(dir / "solve.json", j);
  std::cout << "objective " << format_double(res.trace.objective_per_sweep.back()) << " after "
            << res.trace.sweeps_used << " sweeps, converged=" << (res.trace.converged ? "true" : "false")
            << '\n';
  return (a.strict && !res.trace.converged) ? kExitNotConverged : kExitOk;
}

struct SdpArgs {
  std::string instance;
  std::string out;
  int max_iter = SdpOptions{}.max_iter;
  bool strict = false;
};

int run_sdp(const SdpArgs& a) {
  const Instance inst = load_instance(a.instance);
  SdpOptions opts;
  opts.max_iter = a.max_iter;
  const GramSolution sol = solve_sdp(inst.s, opts);
  const RoundingResult rounded = round_rank_r(sol.u, inst.spec);
  const AscentResult ascent = solve_block_ascent(inst.s);
  const TightnessReport tight = tightness_report(sol.u, ascent.o, inst.s);
  const DualCertificate dual = build_dual_certificate(inst.s, rounded.v);

  const fs::path dir = output_dir(a.out, a.instance);
  save_matrix(dir / "U.mat", sol.u);
  save_matrix(dir / "V.mat", rounded.v.stacked());
  json j;
  j["solution"] = to_json(sol);
  j["rounding"] = to_json(rounded);
  j["ascent_objective"] = json_number(ascent.trace.objective_per_sweep.back());
  j["tightness"] = to_json(tight);
  j["dual_certificate"] = to_json(dual);
  write_json(dir / "sdp.json", j);
  std::cout << "relaxation objective " << format_double(sol.objective) << ", tight="
            << (tight.tight ? "true" : "false") << ", dual certificate verified="
            << (dual.verified ? "true" : "false") << '\n';
  return (a.strict && !sol.converged) ? kExitNotConverged : kExitOk;
}

struct CertifyArgs {
  std::string instance;
  std::string solution;
  std::string out;
  double tol = kCertificateTol;
};

int run_certify(const CertifyArgs& a) {
  const Instance inst = load_instance(a.instance);
  const StiefelBlocks o =
      a.solution.empty() ? solve_block_ascent(inst.s).o : load_solution(a.solution, inst.spec);
  const CertificateReport cert = certify_global(inst.s, o, a.tol);
  json j = to_json(cert);
  j["objective"] = json_number(objective(inst.s, o));
  if (inst.ground_truth) j["assumption"] = cert.qualified && check_assumption(inst.s, o, *inst.ground_truth, a.tol);
  write_json(output_dir(a.out, a.instance) / "certificate.json", j);
  std::cout << "qualified=" << (cert.qualified ? "true" : "false")
            << " globally_optimal=" << (cert.globally_optimal ? "true" : "false")
            << " L_min_eig=" << format_double(cert.L_min_eig) << '\n';
  return kExitOk;
}

struct BoundsArgs {
  std::string instance;
  std::string solution;
  std::string out;
};

int run_bounds(const BoundsArgs& a) {
  const Instance inst = load_instance(a.instance);
  const BoundsReport report = bounds_for_instance(inst);
  json j = to_json(report);
  if (inst.sigma && *inst.sigma > 0)
    j["discordance"] = to_json(check_discordance(inst.effective_noise(), *inst.ground_truth, *inst.sigma));
  if (!a.solution.empty())
    j["estimation_error"] =
        json_number(estimation_error(load_solution(a.solution, inst.spec), *inst.ground_truth));
  write_json(output_dir(a.out, a.instance) / "bounds.json", j);
  std::cout << "cond_thm1=" << (report.cond_thm1 ? "true" : "false")
            << " cond_thm2=" << (report.cond_thm2 ? "true" : "false") << '\n';
  return kExitOk;
}

struct GridArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string model;
  bool keep_instances = false;
  bool strict = false;
};

int run_grid(const GridArgs& a, bool require_config) {
  if (require_config && a.config.empty()) throw ConfigError("grid needs --config");
  ExperimentConfig cfg = a.config.empty() ? ExperimentConfig{} : parse_experiment_config(read_text(a.config));
  if (a.seed) cfg.base_seed = *a.seed;
  if (a.workers) cfg.workers = *a.workers;
  if (!a.model.empty()) cfg.model = parse_noise_model(a.model);
  cfg.validate();

  const fs::path dir = output_dir(a.out, "results");
  if (a.keep_instances) cfg.keep_instances = dir / "instances";
  const std::vector<CellResult> table = reproduce_table(cfg);

  std::ofstream csv(dir / "results.csv");
  write_results_csv(csv, table);
  std::ofstream(dir / "results.json") << results_json(cfg, table) << '\n';

  bool all_converged = true;
  for (const CellResult& cell : table) {
    all_converged = all_converged && cell.freq_converged == cell.replicates;
    std::cout << "m=" << cell.m << " sigma=" << format_double(cell.sigma)
              << " assumption=" << cell.freq_assumption << " cond_thm2=" << cell.freq_cond_thm2
              << " certificate=" << cell.freq_certificate << "/" << cell.replicates << '\n';
  }
  return (a.strict && !all_converged) ? kExitNotConverged : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OTSM solver and verifier"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate an instance directory");
  gen_cmd->add_option("--out", gen.out, "Instance directory")->required();
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--model", gen.model)->check(CLI::IsMember({"maxbet", "maxdiff"}, CLI::ignore_case));
  gen_cmd->add_option("--m", gen.m, "Number of blocks");
  gen_cmd->add_option("--d", gen.d, "Common block dimension");
  gen_cmd->add_option("--dims", gen.dims, "Per-block dimensions (overrides --m/--d)");
  gen_cmd->add_option("--r", gen.r, "Rank");
  gen_cmd->add_option("--sigma", gen.sigma, "Noise level");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Proximal block ascent");
  solve_cmd->add_option("--instance", solve.instance)->required();
  solve_cmd->add_option("--out", solve.out, "Output directory (default: the instance directory)");
  solve_cmd->add_option("--init", solve.init)->check(CLI::IsMember({"spectral", "random"}));
  solve_cmd->add_option("--seed", solve.seed, "Seed of the random initialization");
  solve_cmd->add_option("--max-sweeps", solve.max_sweeps);
  solve_cmd->add_flag("--strict", solve.strict, "Exit 3 when the solver does not converge");

  SdpArgs sdp;
  auto* sdp_cmd = app.add_subcommand("sdp", "Solve the relaxation, round and build the dual certificate");
  sdp_cmd->add_option("--instance", sdp.instance)->required();
  sdp_cmd->add_option("--out", sdp.out);
  sdp_cmd->add_option("--max-iter", sdp.max_iter);
  sdp_cmd->add_flag("--strict", sdp.strict);

  CertifyArgs certify;
  auto* certify_cmd = app.add_subcommand("certify", "Global-optimality certificate of a solution");
  certify_cmd->add_option("--instance", certify.instance)->required();
  certify_cmd->add_option("--solution", certify.solution, "O.mat (default: solve first)");
  certify_cmd->add_option("--out", certify.out);
  certify_cmd->add_option("--tol", certify.tol);

  BoundsArgs bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "Deterministic conditions and consistency bounds");
  bounds_cmd->add_option("--instance", bounds.instance)->required();
  bounds_cmd->add_option("--solution", bounds.solution, "O.mat, adds its estimation error");
  bounds_cmd->add_option("--out", bounds.out);

  GridArgs table;
  GridArgs grid;
  auto* table_cmd = app.add_subcommand("table", "Default replicate grid (d=5, r=3, m in {10,20,30})");
  auto* grid_cmd = app.add_subcommand("grid", "Replicate grid from a config file");
  for (auto [cmd, args] : {std::pair{table_cmd, &table}, std::pair{grid_cmd, &grid}}) {
    cmd->add_option("--config", args->config, "ExperimentConfig JSON");
    cmd->add_option("--out", args->out, "Output directory (default: results)");
    cmd->add_option("--seed", args->seed, "Base seed override");
    cmd->add_option("--workers", args->workers)->check(CLI::PositiveNumber);
    cmd->add_option("--model", args->model)->check(CLI::IsMember({"maxbet", "maxdiff"}, CLI::ignore_case));
    cmd->add_flag("--keep-instances", args->keep_instances, "Write every replicate below <out>/instances");
    cmd->add_flag("--strict", args->strict, "Exit 3 when any replicate does not converge");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*solve_cmd) return run_solve(solve);
    if (*sdp_cmd) return run_sdp(sdp);
    if (*certify_cmd) return run_certify(certify);
    if (*bounds_cmd) return run_bounds(bounds);
    if (*table_cmd) return run_grid(table, false);
    if (*grid_cmd) return run_grid(grid, true);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
