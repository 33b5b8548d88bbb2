#include "support.hpp"

#include "otsm/block_ascent.hpp"
#include "otsm/certificate.hpp"
#include "otsm/linalg.hpp"
#include "otsm/problem.hpp"
#include "otsm/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace otsm;
using namespace otsm::testing;

namespace {

BlockSymMatrix scalar_pair(double s11, double s12, double s22) {
  Matrix s(2, 2);
  s << s11, s12, s12, s22;
  return BlockSymMatrix(BlockSpec({1, 1}, 1), s);
}

StiefelBlocks scalar_point(double a, double b) {
  return StiefelBlocks(BlockSpec({1, 1}, 1), {Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b)});
}

}  // namespace

TEST(Objective, HandSums) {
  EXPECT_DOUBLE_EQ(objective(scalar_pair(1, 1, 1), scalar_point(1, 1)), 4.0);
  EXPECT_DOUBLE_EQ(objective(scalar_pair(0, 1, 0), scalar_point(1, -1)), -2.0);
}

TEST(Objective, NoiselessGroundTruth) {
  const Instance inst = generate_instance(BlockSpec::uniform(7, 4, 3), NoiseModel::kMaxbet, 0.0, 3);
  EXPECT_NEAR(objective(inst.s, *inst.ground_truth), 7.0 * 7.0 * 3.0, 1e-10);
}

TEST(InitSpectral, NoiselessIsAlreadyOptimal) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const BlockSpec spec = random_spec(seed, 2, 8, 3, 6);
    const Instance inst = generate_instance(spec, NoiseModel::kMaxbet, 0.0, seed);
    const double opt = noiseless_optimum(NoiseModel::kMaxbet, spec.m(), spec.r());
    EXPECT_NEAR(objective(inst.s, init_spectral(inst.s).o), opt, 1e-8 * opt);
  }
}

TEST(InitSpectral, Deterministic) {
  const Instance inst = generate_instance(BlockSpec::uniform(6, 5, 3), NoiseModel::kMaxbet, 0.5, 9);
  EXPECT_EQ(init_spectral(inst.s).o.stacked(), init_spectral(inst.s).o.stacked());
}

TEST(InitSpectral, CloseToOptimumAtModerateNoise) {
  // Regression floor for sigma = 0.1, d = 5, r = 3, m = 10 over 20 seeds.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = generate_instance(BlockSpec::uniform(10, 5, 3), NoiseModel::kMaxbet, 0.1, seed);
    EXPECT_GE(objective(inst.s, init_spectral(inst.s).o), 0.9 * 300.0);
  }
}

TEST(InitSpectral, FlagsTiedSpectrum) {
  // S = I has no gap between the r-th and (r+1)-th eigenvalue.
  const BlockSymMatrix s(BlockSpec::uniform(3, 2, 1), Matrix::Identity(6, 6));
  EXPECT_TRUE(init_spectral(s).gap_warning);
}

TEST(Sweep, GroundTruthIsAFixedPoint) {
  const Instance inst = generate_instance(BlockSpec({4, 5, 3, 6}, 3), NoiseModel::kMaxbet, 0.0, 2);
  const StiefelBlocks after = sweep(inst.s, *inst.ground_truth, AscentOptions{}).o;
  EXPECT_LE((after.stacked() - inst.ground_truth->stacked()).norm(), 1e-12);
}

TEST(Sweep, ScalarHandTrace) {
  const BlockSymMatrix s = scalar_pair(0, 1, 0);
  const StiefelBlocks after = sweep(s, scalar_point(1, -1), AscentOptions{}).o;
  EXPECT_EQ(after.block(0)(0, 0), -1.0);
  EXPECT_EQ(after.block(1)(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(objective(s, after), 2.0);
}

TEST(Sweep, NeverDecreasesTheObjective) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const BlockSpec spec = random_spec(seed + 50, 2, 7, 3, 6);
    const NoiseModel model = seed % 2 ? NoiseModel::kMaxdiff : NoiseModel::kMaxbet;
    const Instance inst = generate_instance(spec, model, 1.0, seed);
    StiefelBlocks o = random_stiefel(spec, seed);
    for (int t = 0; t < 10; ++t) {
      const double before = objective(inst.s, o);
      o = sweep(inst.s, o, AscentOptions{}).o;
      EXPECT_GE(objective(inst.s, o), before - 1e-10 * std::abs(before));
    }
  }
}

TEST(ProximalShifts, MatchDefinition) {
  const Instance inst = generate_instance(BlockSpec({3, 4}, 2), NoiseModel::kMaxbet, 2.0, 4);
  const std::vector<double> shifts = proximal_shifts(inst.s, 1e-3);
  for (int i = 0; i < 2; ++i) {
    const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(Matrix(inst.s.block(i, i))).eigenvalues().minCoeff();
    EXPECT_NEAR(shifts[i], std::max(0.0, -lmin) + 1e-3, 1e-12);
  }
}

TEST(SolveBlockAscent, NoiselessMaxbet) {
  const Instance inst = generate_instance(BlockSpec::uniform(6, 4, 2), NoiseModel::kMaxbet, 0.0, 1);
  const AscentResult res = solve_block_ascent(inst.s);
  EXPECT_TRUE(res.trace.converged);
  // m^2 r = 72.
  EXPECT_NEAR(objective(inst.s, res.o), 72.0, 1e-8 * 72.0);
}

TEST(SolveBlockAscent, NoiselessMaxdiff) {
  const Instance inst = generate_instance(BlockSpec::uniform(6, 4, 2), NoiseModel::kMaxdiff, 0.0, 1);
  const AscentResult res = solve_block_ascent(inst.s);
  EXPECT_TRUE(res.trace.converged);
  EXPECT_NEAR(objective(inst.s, res.o), 60.0, 1e-8 * 60.0);
}

TEST(SolveBlockAscent, NoiselessFromRandomStart) {
  for (NoiseModel model : {NoiseModel::kMaxbet, NoiseModel::kMaxdiff}) {
    const Instance inst = generate_instance(BlockSpec::uniform(5, 4, 2), model, 0.0, 6);
    AscentOptions opts;
    opts.init = InitKind::kRandom;
    opts.init_seed = 17;
    const AscentResult res = solve_block_ascent(inst.s, opts);
    const double opt = noiseless_optimum(model, 5, 2);
    EXPECT_NEAR(objective(inst.s, res.o), opt, 1e-8 * opt);
  }
}

TEST(SolveBlockAscent, CertifiedAtLowNoise) {
  int certified = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance inst = generate_instance(BlockSpec::uniform(10, 5, 3), NoiseModel::kMaxbet, 0.01, 1000 + seed);
    const AscentResult res = solve_block_ascent(inst.s);
    const CertificateReport cert = certify_global(inst.s, res.o);
    if (cert.L_min_eig >= -1e-6 * op_norm(inst.s.matrix()) && cert.globally_optimal) ++certified;
  }
  EXPECT_GE(certified, 99);
}

TEST(SolveBlockAscent, ConvergedPointIsACandidateCriticalPoint) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance inst = generate_instance(BlockSpec::uniform(8, 5, 3), NoiseModel::kMaxbet, 0.5, seed);
    const AscentResult res = solve_block_ascent(inst.s);
    ASSERT_TRUE(res.trace.converged);
    EXPECT_LE(res.trace.stationarity_residual, 1e-8);
    for (const Matrix& lam : multipliers(inst.s, res.o)) {
      const double scale = 1.0 + lam.norm();
      EXPECT_LE((lam - lam.transpose()).norm(), 1e-6 * scale);
      EXPECT_GE(min_eigenvalue(symmetrize(lam)), -1e-6 * scale);
    }
  }
}

TEST(SolveBlockAscent, StationarityResidualVanishesAtGroundTruth) {
  const Instance inst = generate_instance(BlockSpec::uniform(5, 3, 2), NoiseModel::kMaxdiff, 0.0, 4);
  EXPECT_LE(stationarity_residual(inst.s, *inst.ground_truth, op_norm(inst.s.matrix())), 1e-14);
}

TEST(SolveBlockAscent, RotatedWarmStartGivesTheSameObjectives) {
  const Instance inst = generate_instance(BlockSpec::uniform(6, 5, 3), NoiseModel::kMaxbet, 1.0, 8);
  const StiefelBlocks start = random_stiefel(inst.s.spec(), 3);
  AscentOptions a;
  a.init = InitKind::kWarm;
  a.warm_start = start;
  AscentOptions b = a;
  b.warm_start = start.rotated(random_orthogonal(3, 4));
  const SolveTrace ta = solve_block_ascent(inst.s, a).trace;
  const SolveTrace tb = solve_block_ascent(inst.s, b).trace;
  const std::size_t n = std::min(ta.objective_per_sweep.size(), tb.objective_per_sweep.size());
  ASSERT_GT(n, 1u);
  for (std::size_t t = 0; t < n; ++t)
    EXPECT_NEAR(ta.objective_per_sweep[t], tb.objective_per_sweep[t], 1e-9 * std::abs(ta.objective_per_sweep[t]));
}

TEST(SolveBlockAscent, SweepBudgetExhaustedIsReported) {
  const Instance inst = generate_instance(BlockSpec::uniform(10, 5, 3), NoiseModel::kMaxbet, 1.5, 2);
  AscentOptions opts;
  opts.max_sweeps = 2;
  const AscentResult res = solve_block_ascent(inst.s, opts);
  EXPECT_FALSE(res.trace.converged);
  EXPECT_EQ(res.trace.sweeps_used, 2);
  EXPECT_EQ(res.trace.objective_per_sweep.size(), 3u);
}

TEST(SolveBlockAscent, RandomizedOrderStillAscends) {
  const Instance inst = generate_instance(BlockSpec::uniform(6, 4, 2), NoiseModel::kMaxbet, 1.0, 12);
  AscentOptions opts;
  opts.randomize_order = true;
  opts.order_seed = 99;
  const SolveTrace trace = solve_block_ascent(inst.s, opts).trace;
  for (std::size_t t = 1; t < trace.objective_per_sweep.size(); ++t)
    EXPECT_GE(trace.objective_per_sweep[t], trace.objective_per_sweep[t - 1] * (1 - 1e-10));
}
