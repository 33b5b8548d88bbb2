#include "otsm/problem.hpp"

#include "otsm/error.hpp"
#include "otsm/linalg.hpp"
#include "otsm/mat_io.hpp"
#include "otsm/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>

namespace otsm {

std::string to_string(NoiseModel model) {
  return model == NoiseModel::kMaxbet ? "maxbet" : "maxdiff";
}

NoiseModel parse_noise_model(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "maxbet") return NoiseModel::kMaxbet;
  if (lower == "maxdiff") return NoiseModel::kMaxdiff;
  throw InvalidInput("unknown noise model '" + std::string(text) + "'");
}

Matrix Instance::effective_noise() const {
  if (!noise) return Matrix::Zero(spec.D(), spec.D());
  Matrix w = noise->matrix();
  if (model == NoiseModel::kMaxdiff) {
    for (int i = 0; i < spec.m(); ++i) {
      w.block(spec.offset(i), spec.offset(i), spec.dim(i), spec.dim(i)).setZero();
    }
  }
  return w;
}

StiefelBlocks gen_theta(const BlockSpec& spec, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(spec.m()));
  for (int i = 0; i < spec.m(); ++i) {
    Matrix g(spec.dim(i), spec.r());
    for (Eigen::Index a = 0; a < g.rows(); ++a) {
      for (Eigen::Index b = 0; b < g.cols(); ++b) g(a, b) = rng.normal();
    }
    blocks.push_back(qr_orthonormalize(g));
  }
  return StiefelBlocks(spec, std::move(blocks));
}

BlockSymMatrix gen_noise(const BlockSpec& spec, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InvalidInput("gen_noise: sigma must be non-negative");
  const int n = spec.D();
  CounterRng rng(seed);
  Matrix w(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double x = sigma * rng.normal();
      w(i, j) = x;
      w(j, i) = x;
    }
  }
  return BlockSymMatrix(spec, w);
}

Instance assemble_instance(const StiefelBlocks& theta, const BlockSymMatrix& noise,
                           NoiseModel model, double sigma, std::uint64_t seed) {
  if (!(theta.spec() == noise.spec())) throw InvalidInput("assemble_instance: spec mismatch");
  const BlockSpec& spec = theta.spec();
  const Matrix stacked = theta.stacked();
  Matrix s = symmetrize(stacked * stacked.transpose()) + noise.matrix();
  if (model == NoiseModel::kMaxdiff) {
    for (int i = 0; i < spec.m(); ++i) {
      s.block(spec.offset(i), spec.offset(i), spec.dim(i), spec.dim(i)).setZero();
    }
  }
  Instance inst;
  inst.spec = spec;
  inst.model = model;
  inst.s = BlockSymMatrix(spec, s);
  inst.ground_truth = theta;
  inst.noise = noise;
  inst.sigma = sigma;
  inst.seed = seed;
  return inst;
}

Instance generate_instance(const BlockSpec& spec, NoiseModel model, double sigma,
                           std::uint64_t seed) {
  const StiefelBlocks theta = gen_theta(spec, derive_seed(seed, {0}));
  const BlockSymMatrix noise = gen_noise(spec, sigma, derive_seed(seed, {1}));
  return assemble_instance(theta, noise, model, sigma, seed);
}

double noiseless_optimum(NoiseModel model, int m, int r) {
  if (m < 1 || r < 1) throw InvalidInput("noiseless_optimum: m and r must be positive");
  const double mm = m;
  return model == NoiseModel::kMaxbet ? mm * mm * r : mm * (mm - 1.0) * r;
}

void save_instance(const std::filesystem::path& dir, const Instance& inst) {
  std::filesystem::create_directories(dir);
  nlohmann::json meta;
  meta["dims"] = inst.spec.dims();
  meta["r"] = inst.spec.r();
  meta["model"] = to_string(inst.model);
  meta["sigma"] = inst.sigma ? nlohmann::json(*inst.sigma) : nlohmann::json(nullptr);
  meta["seed"] = inst.seed;
  meta["prng"] = kPrngName;
  std::ofstream(dir / "spec.json") << meta.dump(2) << '\n';
  save_matrix(dir / "S.mat", inst.s.matrix());
  if (inst.ground_truth) save_matrix(dir / "theta.mat", inst.ground_truth->stacked());
  if (inst.noise) save_matrix(dir / "W.mat", inst.noise->matrix());
}

Instance load_instance(const std::filesystem::path& dir) {
  std::ifstream is(dir / "spec.json");
  if (!is) throw InvalidInput("load_instance: missing " + (dir / "spec.json").string());
  nlohmann::json meta;
  try {
    is >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("load_instance: bad spec.json: ") + e.what());
  }
  Instance inst;
  try {
    inst.spec = BlockSpec(meta.at("dims").get<std::vector<int>>(), meta.at("r").get<int>());
    inst.model = parse_noise_model(meta.at("model").get<std::string>());
    if (meta.contains("sigma") && !meta["sigma"].is_null()) inst.sigma = meta["sigma"].get<double>();
    inst.seed = meta.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("load_instance: bad spec.json: ") + e.what());
  }
  inst.s = BlockSymMatrix(inst.spec, load_matrix(dir / "S.mat"));
  if (std::filesystem::exists(dir / "theta.mat")) {
    inst.ground_truth = StiefelBlocks::from_stacked(inst.spec, load_matrix(dir / "theta.mat"));
  }
  if (std::filesystem::exists(dir / "W.mat")) {
    inst.noise = BlockSymMatrix(inst.spec, load_matrix(dir / "W.mat"));
  }
  return inst;
}

}  // namespace otsm
