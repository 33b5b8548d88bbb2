#pragma once

#include "otsm/block_types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace otsm {

/// MAXBET: S = Theta Theta^T + W.  MAXDIFF: the same with every diagonal
/// block S_ii set to zero.
enum class NoiseModel { kMaxbet, kMaxdiff };

std::string to_string(NoiseModel model);
/// Accepts "maxbet" / "maxdiff" in any case. Throws InvalidInput otherwise.
NoiseModel parse_noise_model(std::string_view text);

struct Instance {
  BlockSpec spec;
  NoiseModel model = NoiseModel::kMaxbet;
  BlockSymMatrix s;
  std::optional<StiefelBlocks> ground_truth;
  std::optional<BlockSymMatrix> noise;
  std::optional<double> sigma;
  std::uint64_t seed = 0;

  /// Noise as it enters S: W itself for MAXBET, W with its diagonal blocks
  /// zeroed for MAXDIFF.
  Matrix effective_noise() const;
};

/// Theta_i = qr_orthonormalize(G_i) with G_i a d_i x r standard normal draw.
StiefelBlocks gen_theta(const BlockSpec& spec, std::uint64_t seed);

/// Upper triangle (diagonal included) i.i.d. N(0, sigma^2), mirrored below.
BlockSymMatrix gen_noise(const BlockSpec& spec, double sigma, std::uint64_t seed);

Instance assemble_instance(const StiefelBlocks& theta, const BlockSymMatrix& noise,
                           NoiseModel model, double sigma, std::uint64_t seed);

/// Draws Theta and W from streams derived from `seed` and assembles S.
Instance generate_instance(const BlockSpec& spec, NoiseModel model, double sigma,
                           std::uint64_t seed);

/// Maximum of the noiseless problem: m^2 r (MAXBET) or m (m - 1) r (MAXDIFF).
double noiseless_optimum(NoiseModel model, int m, int r);

/// Writes spec.json, S.mat and, when present, theta.mat and W.mat.
void save_instance(const std::filesystem::path& dir, const Instance& inst);
Instance load_instance(const std::filesystem::path& dir);

}  // namespace otsm
