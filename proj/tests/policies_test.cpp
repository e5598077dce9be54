#include "specband/policies.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "specband/env.hpp"
#include "specband/graph.hpp"
#include "specband/spectral.hpp"

namespace specband {
namespace {

SpectralBasis identity_basis(int n) {
  return SpectralBasis(Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n));
}

Eigen::VectorXd random_unit_scaled(Rng& rng, int n, double max_norm = 1.0) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.normal();
  x *= max_norm * rng.uniform01() / x.norm();
  return x;
}

TEST(ConfidenceCoefficientTest, CollapsesWithoutNoiseAndBound) {
  EXPECT_EQ(confidence_coefficient(0.0, 3, 100, 0.5, 0.1, 0.0), 0.0);
}

TEST(ConfidenceCoefficientTest, MatchesIndependentEvaluator) {
  // long-double recomputation of 2R sqrt(d log(1+T/l) + 2 log(1/delta)) + C
  const long double expected =
      2.0L * std::sqrt(2.0L * std::log(101.0L) + 2.0L * std::log(10.0L));
  EXPECT_NEAR(confidence_coefficient(1.0, 2, 100, 1.0, 0.1, 0.0),
              static_cast<double>(expected), 1e-12);
  EXPECT_NEAR(confidence_coefficient(1.0, 2, 100, 1.0, 0.1, 0.0), 7.4392, 1e-4);

  // the experiments' configuration stays finite and positive
  const double c = confidence_coefficient(0.01, 10, 250, 0.01, 0.001, 1.5);
  const long double again =
      2.0L * 0.01L * std::sqrt(10.0L * std::log(1.0L + 250.0L / 0.01L) +
                               2.0L * std::log(1000.0L)) +
      1.5L;
  EXPECT_NEAR(c, static_cast<double>(again), 1e-12);
}

TEST(ConfidenceCoefficientTest, RejectsBadArguments) {
  EXPECT_THROW(confidence_coefficient(1.0, 2, 100, 1.0, 0.0, 0.0),
               std::invalid_argument);
  EXPECT_THROW(confidence_coefficient(1.0, 2, 100, 1.0, 1.0, 0.0),
               std::invalid_argument);
  EXPECT_THROW(confidence_coefficient(1.0, 0, 100, 1.0, 0.1, 0.0),
               std::invalid_argument);
}

TEST(UcbConfigTest, FactoryComputesCoefficientExactly) {
  const RegularizedSpectrum spec = RegularizedSpectrum::flat(20, 0.5);
  const UcbConfig cfg = make_ucb_config(spec, 0.3, 0.01, 1.2, 80);
  EXPECT_EQ(cfg.d, effective_dimension(spec, 80).d);
  EXPECT_EQ(cfg.c_coeff,
            confidence_coefficient(0.3, cfg.d, 80, 0.5, 0.01, 1.2));
  const UcbConfig ambient = make_ucb_config(spec, 0.3, 0.01, 1.2, 80, true,
                                            CBoundMode::kFixed,
                                            ConfidenceDim::kAmbient);
  EXPECT_EQ(ambient.d, 20);
}

TEST(RlsStateTest, ScalarRidgeExample) {
  RlsState state(RegularizedSpectrum::flat(2, 1.0));
  Eigen::VectorXd e1(2);
  e1 << 1.0, 0.0;
  state.update(e1, 1.0);
  EXPECT_NEAR(state.alpha_hat()[0], 0.5, 1e-15);
  EXPECT_EQ(state.alpha_hat()[1], 0.0);
}

TEST(RlsStateTest, TracksDenseInverseAndDeterminant) {
  Rng rng(17);
  const int dim = 20;
  Eigen::VectorXd diag(dim);
  double v = 0.05;
  for (int i = 0; i < dim; ++i) {
    diag[i] = v;
    v += rng.uniform01();
  }
  const RegularizedSpectrum spec{diag[0], diag};
  RlsState state(spec);
  Eigen::MatrixXd v_direct = diag.asDiagonal();
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(dim);
  for (int step = 0; step < 50; ++step) {
    const Eigen::VectorXd x = random_unit_scaled(rng, dim);
    const double r = rng.normal();
    state.update(x, r);
    v_direct += x * x.transpose();
    xty += r * x;
  }
  const Eigen::MatrixXd inv_direct = v_direct.inverse();
  EXPECT_LT((state.v_inv() - inv_direct).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_LT((state.v_mat() - v_direct).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((state.alpha_hat() - state.v_inv() * xty).cwiseAbs().maxCoeff(),
            1e-9);
  EXPECT_NEAR(state.log_det_ratio(),
              testing::log_det_ratio_direct(v_direct, diag), 1e-7);
  // V - Lambda is positive semi-definite
  const Eigen::MatrixXd gap = state.v_mat() - Eigen::MatrixXd(diag.asDiagonal());
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gap)
                .eigenvalues()
                .minCoeff(),
            -1e-9);
}

TEST(RlsStateTest, IdentityProductStaysTight) {
  Rng rng(23);
  const int dim = 15;
  RlsState state(RegularizedSpectrum::flat(dim, 0.3));
  for (int step = 0; step < 300; ++step)
    state.update(random_unit_scaled(rng, dim), rng.normal());
  EXPECT_LT((state.v_mat() * state.v_inv() -
             Eigen::MatrixXd::Identity(dim, dim))
                .cwiseAbs()
                .maxCoeff(),
            1e-7);
}

TEST(RlsStateTest, RejectsOversizedFeatures) {
  RlsState state(RegularizedSpectrum::flat(3, 1.0));
  Eigen::VectorXd big(3);
  big << 1.0, 1.0, 0.0;
  EXPECT_THROW(state.update(big, 0.0), std::invalid_argument);
  Eigen::VectorXd wrong(2);
  wrong << 0.5, 0.0;
  EXPECT_THROW(state.update(wrong, 0.0), std::invalid_argument);
}

TEST(UcbWidthTest, FreshStateAndZeroVector) {
  const double lambda_reg = 0.25;
  RlsState state(RegularizedSpectrum::flat(4, lambda_reg));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  EXPECT_EQ(state.width(x), 0.0);
  x[2] = 1.0;
  EXPECT_NEAR(state.width(x), 1.0 / std::sqrt(lambda_reg), 1e-12);
}

TEST(UcbWidthTest, NonIncreasingUnderUpdates) {
  Rng rng(29);
  const int dim = 12;
  RlsState state(RegularizedSpectrum::flat(dim, 0.1));
  std::vector<Eigen::VectorXd> probes;
  for (int i = 0; i < 5; ++i) probes.push_back(random_unit_scaled(rng, dim));
  std::vector<double> last;
  for (const auto& p : probes) last.push_back(state.width(p));
  for (int step = 0; step < 150; ++step) {
    state.update(random_unit_scaled(rng, dim), rng.normal());
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const double w = state.width(probes[i]);
      ASSERT_LE(w, last[i] + 1e-12) << "step " << step;
      last[i] = w;
    }
  }
}

TEST(SelectTest, TieBreaksToLowestIndex) {
  const SpectralBasis basis = identity_basis(4);
  const RegularizedSpectrum spec = RegularizedSpectrum::flat(4, 1.0);
  const UcbConfig cfg = make_ucb_config(spec, 0.1, 0.05, 1.0, 10);
  RlsState state(spec);
  EXPECT_EQ(spectral_ucb_select(state, cfg, basis), 0);
  for (const bool lazy : {false, true}) {
    UcbConfig mode = cfg;
    mode.lazy = lazy;
    UcbPolicy policy(basis, spec, mode);
    EXPECT_EQ(policy.select(), 0);
  }
}

TEST(SelectTest, LazyMatchesEagerWithFewerWidthEvaluations) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const SpectralBasis basis =
        eigendecompose(laplacian(gen_erdos_renyi(60, 0.1, 40 + seed)));
    const RegularizedSpectrum spec = regularize(basis, 0.01);
    const RewardModel model = gen_sparse_smooth_reward(basis, 5, seed);
    const NoiseModel noise(0.01);
    const double c_bound = lambda_norm(model.alpha_star(), spec);
    UcbConfig lazy_cfg = make_ucb_config(spec, 0.01, 0.001, c_bound, 250, true);
    UcbConfig eager_cfg = lazy_cfg;
    eager_cfg.lazy = false;
    UcbPolicy lazy(basis, spec, lazy_cfg);
    UcbPolicy eager(basis, spec, eager_cfg);
    Rng rng(derive_seed(999, seed));
    for (int t = 0; t < 250; ++t) {
      const int a = lazy.select();
      const int b = eager.select();
      ASSERT_EQ(a, b) << "seed " << seed << " t " << t;
      const double r = sample_reward(model, noise, a, rng);
      lazy.observe(a, r);
      eager.observe(b, r);
    }
    EXPECT_LT(lazy.width_evaluations(), eager.width_evaluations());
  }
}

TEST(SelectTest, NoiselessRecoveryAfterOnePassOnSmallGraph) {
  const SpectralBasis basis =
      eigendecompose(laplacian(gen_erdos_renyi(5, 0.9, 0)));
  const RegularizedSpectrum spec = regularize(basis, 1.0);
  const RewardModel model = gen_sparse_smooth_reward(basis, 2, 0);
  const UcbConfig cfg = make_ucb_config(
      spec, 0.0, 0.05, lambda_norm(model.alpha_star(), spec), 60);
  UcbPolicy policy(basis, spec, cfg);
  for (int v = 0; v < 5; ++v) policy.observe(v, model.mean_reward(v));
  for (int t = 0; t < 50; ++t) {
    const int chosen = policy.select();
    ASSERT_EQ(chosen, model.best_node()) << "t " << t;
    policy.observe(chosen, model.mean_reward(chosen));
  }
}

TEST(RunSpectralUcbTest, SingleStepAndDeterminism) {
  const SpectralBasis basis =
      eigendecompose(laplacian(gen_barabasi_albert(30, 3, 2)));
  const RegularizedSpectrum spec = regularize(basis, 0.01);
  const RewardModel model = gen_sparse_smooth_reward(basis, 3, 7);
  const NoiseModel noise(0.01);
  const UcbConfig one = make_ucb_config(spec, 0.01, 0.001, 1.0, 1);
  Rng rng1(5);
  EXPECT_EQ(run_spectral_ucb(basis, spec, model, noise, one, rng1).steps().size(),
            1u);

  const UcbConfig cfg = make_ucb_config(spec, 0.01, 0.001, 1.0, 100);
  Rng ra(5), rb(5);
  const RegretTrace a = run_spectral_ucb(basis, spec, model, noise, cfg, ra, 5);
  const RegretTrace b = run_spectral_ucb(basis, spec, model, noise, cfg, rb, 5);
  EXPECT_EQ(a, b);
  std::stringstream csv_a, csv_b;
  write_trace_csv(a, csv_a);
  write_trace_csv(b, csv_b);
  EXPECT_EQ(csv_a.str(), csv_b.str());
}

TEST(RunSpectralUcbTest, LogDetBoundHoldsAlongRun) {
  const SpectralBasis basis =
      eigendecompose(laplacian(gen_erdos_renyi(40, 0.15, 3)));
  const RegularizedSpectrum spec = regularize(basis, 0.01);
  const RewardModel model = gen_sparse_smooth_reward(basis, 4, 1);
  const NoiseModel noise(0.05);
  const long long horizon = 150;
  const UcbConfig cfg = make_ucb_config(
      spec, 0.05, 0.05, lambda_norm(model.alpha_star(), spec), horizon);
  UcbPolicy policy(basis, spec, cfg);
  Rng rng(8);
  const double budget =
      2.0 * cfg.d * std::log1p(static_cast<double>(horizon) / spec.lambda_reg);
  for (long long t = 1; t <= horizon; ++t) {
    const int arm = policy.select();
    policy.observe(arm, sample_reward(model, noise, arm, rng));
    ASSERT_GE(policy.state().log_det_ratio(), 0.0);
    ASSERT_LE(policy.state().log_det_ratio(), budget) << "t " << t;
  }
}

TEST(LinUcbTest, FlatSpectrumRunIsDefinitionallyIdentical) {
  const SpectralBasis basis =
      eigendecompose(laplacian(gen_barabasi_albert(40, 3, 6)));
  const RewardModel model = gen_sparse_smooth_reward(basis, 3, 2);
  const NoiseModel noise(0.01);
  const double c_bound = model.alpha_star().norm();  // ||alpha||_I
  const RegularizedSpectrum flat = RegularizedSpectrum::flat(basis.dim(), 1.0);
  const UcbConfig cfg = make_ucb_config(flat, 0.01, 0.001, c_bound, 80);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Rng ra(seed), rb(seed);
    const RegretTrace spectral_flat =
        run_spectral_ucb(basis, flat, model, noise, cfg, ra, seed);
    const RegretTrace lin = run_lin_ucb(basis, model, noise, 1.0, 0.01, 0.001,
                                        c_bound, 80, rb, seed);
    EXPECT_EQ(spectral_flat, lin);
  }
}

TEST(LinUcbTest, FlatSpectrumEffectiveDimensionClosedForm) {
  for (const auto& [n, lambda_reg, horizon] :
       {std::tuple{3000, 0.01, 250LL}, std::tuple{500, 0.01, 250LL},
        std::tuple{3000, 1.0, 100LL}}) {
    const RegularizedSpectrum flat = RegularizedSpectrum::flat(n, lambda_reg);
    const double t = static_cast<double>(horizon);
    const int formula = std::min(
        n, static_cast<int>(std::floor(t / (lambda_reg * std::log1p(t / lambda_reg)))) + 1);
    const int scanned = testing::effective_dimension_bruteforce(
        flat.diag, lambda_reg, horizon);
    EXPECT_EQ(effective_dimension(flat, horizon).d, scanned);
    EXPECT_EQ(scanned, formula);
  }
}

TEST(BetaCoefficientTest, ExamplesAndMonotonicity) {
  EXPECT_EQ(beta_coefficient(0.0, 10, 100, 0.1, 2.5), 2.5);
  const long double expected =
      2.0L * std::sqrt(14.0L * std::log(2.0L * 10.0L * 9.0L / 0.1L));
  EXPECT_NEAR(beta_coefficient(1.0, 10, 256, 0.1, 0.0),
              static_cast<double>(expected), 1e-12);
  EXPECT_NEAR(beta_coefficient(1.0, 10, 256, 0.1, 0.0), 20.487, 1e-3);
  EXPECT_LT(beta_coefficient(1.0, 10, 256, 0.1, 0.0),
            beta_coefficient(1.0, 20, 256, 0.1, 0.0));
  EXPECT_GT(beta_coefficient(1.0, 10, 256, 0.01, 0.0),
            beta_coefficient(1.0, 10, 256, 0.1, 0.0));
  EXPECT_THROW(beta_coefficient(1.0, 0, 256, 0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(beta_coefficient(1.0, 10, 1, 0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(beta_coefficient(1.0, 10, 256, 0.0, 0.0), std::invalid_argument);
}

TEST(EliminatorTest, PhaseStartsFollowPowersOfTwo) {
  const SpectralBasis basis =
      eigendecompose(laplacian(gen_erdos_renyi(20, 0.3, 5)));
  const RegularizedSpectrum spec = regularize(basis, 0.01);
  const RewardModel model = gen_sparse_smooth_reward(basis, 3, 3);
  const NoiseModel noise(0.01);
  const long long horizon = 250;
  const double beta = beta_coefficient(0.01, 20, horizon, 0.001,
                                       lambda_norm(model.alpha_star(), spec));
  EliminatorState state = make_eliminator_state(20, beta);
  RegretTrace trace(horizon, 0);
  Rng rng(2);
  for (int j = 1; j <= 8; ++j)
    eliminator_phase(state, model, noise, basis, spec, horizon, rng, trace);
  EXPECT_EQ(state.phase_starts,
            (std::vector<long long>{1, 2, 4, 8, 16, 32, 64, 128}));
  EXPECT_EQ(trace.steps().size(), 250u);

  Rng rng2(2);
  const RegretTrace full =
      run_spectral_eliminator(basis, spec, model, noise, beta, horizon, rng2, 0);
  EXPECT_EQ(full.steps().size(), 250u);
  for (std::size_t i = 0; i < full.steps().size(); ++i)
    ASSERT_EQ(full.steps()[i].arm, trace.steps()[i].arm);
}

TEST(EliminatorTest, ActiveSetsAreNestedAndNeverEmpty) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SpectralBasis basis =
        eigendecompose(laplacian(gen_erdos_renyi(25, 0.25, 60 + seed)));
    const RegularizedSpectrum spec = regularize(basis, 0.01);
    const RewardModel model = gen_sparse_smooth_reward(basis, 3, seed);
    const NoiseModel noise(0.05);
    const long long horizon = 120;
    const double beta = beta_coefficient(0.05, 25, horizon, 0.05,
                                         lambda_norm(model.alpha_star(), spec));
    EliminatorState state = make_eliminator_state(25, beta);
    RegretTrace trace(horizon, 0);
    Rng rng(seed);
    std::vector<int> previous = state.active;
    for (int j = 1; j <= 7; ++j) {
      eliminator_phase(state, model, noise, basis, spec, horizon, rng, trace);
      ASSERT_FALSE(state.active.empty());
      for (const int v : state.active)
        ASSERT_TRUE(std::find(previous.begin(), previous.end(), v) !=
                    previous.end());
      previous = state.active;
    }
  }
}

TEST(EliminatorTest, NoiselessWithExactBoundKeepsBestArm) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SpectralBasis basis =
        eigendecompose(laplacian(gen_barabasi_albert(20, 3, 80 + seed)));
    const RegularizedSpectrum spec = regularize(basis, 0.01);
    const RewardModel model = gen_sparse_smooth_reward(basis, 3, seed);
    const NoiseModel noiseless(0.0);
    const long long horizon = 128;
    const double beta = lambda_norm(model.alpha_star(), spec);  // R=0: beta=C
    EliminatorState state = make_eliminator_state(20, beta);
    RegretTrace trace(horizon, 0);
    Rng rng(seed);
    for (int j = 1; j <= 8; ++j) {
      eliminator_phase(state, model, noiseless, basis, spec, horizon, rng, trace);
      ASSERT_TRUE(std::find(state.active.begin(), state.active.end(),
                            model.best_node()) != state.active.end())
          << "seed " << seed << " phase " << j;
    }
  }
}

TEST(EliminatorTest, SingleArmNeverEliminates) {
  const SpectralBasis basis = identity_basis(1);
  const RegularizedSpectrum spec = RegularizedSpectrum::flat(1, 1.0);
  Eigen::VectorXd alpha(1);
  alpha << 0.4;
  const RewardModel model(basis, alpha);
  const NoiseModel noise(0.1);
  Rng rng(1);
  const RegretTrace trace =
      run_spectral_eliminator(basis, spec, model, noise, 1.0, 10, rng, 0);
  EXPECT_EQ(trace.steps().size(), 10u);
  for (const StepRecord& s : trace.steps()) ASSERT_EQ(s.arm, 0);
}

TEST(EliminatorTest, IdentitySpectrumIsLinearEliminator) {
  const SpectralBasis basis =
      eigendecompose(laplacian(gen_erdos_renyi(15, 0.3, 12)));
  const RewardModel model = gen_sparse_smooth_reward(basis, 2, 5);
  const NoiseModel noise(0.02);
  const RegularizedSpectrum flat = RegularizedSpectrum::flat(basis.dim(), 1.0);
  Rng ra(3), rb(3);
  const RegretTrace a =
      run_spectral_eliminator(basis, flat, model, noise, 2.0, 60, ra, 1);
  const RegretTrace b =
      run_linear_eliminator(basis, model, noise, 1.0, 2.0, 60, rb, 1);
  EXPECT_EQ(a, b);
}

TEST(EliminatorTest, RunsAtScaleWithBoundedRegret) {
  // 500-node graph, rewards mapped into [0,1]; the eliminator's widths-first
  // exploration keeps it behind SpectralUCB at short horizons but well below
  // the worst-arm line
  const SpectralBasis basis =
      eigendecompose(laplacian(gen_barabasi_albert(500, 3, 1)));
  const RegularizedSpectrum spec = regularize(basis, 0.01);
  const NoiseModel noise(0.01);
  int eliminator_not_better = 0;
  for (std::uint64_t rep = 0; rep < 2; ++rep) {
    const RewardModel model = rescale_to_unit_interval(
        gen_sparse_smooth_reward(basis, 5, derive_seed(500, rep)), basis);
    const double c_bound = lambda_norm(model.alpha_star(), spec);
    const double beta = beta_coefficient(0.01, 500, 250, 0.001, c_bound);
    const UcbConfig cfg = make_ucb_config(spec, 0.01, 0.001, c_bound, 250);
    Rng r1(derive_seed(900, rep)), r2(derive_seed(900, rep));
    const double eliminated =
        run_spectral_eliminator(basis, spec, model, noise, beta, 250, r1)
            .final_cum_regret();
    const double ucb =
        run_spectral_ucb(basis, spec, model, noise, cfg, r2).final_cum_regret();
    const double worst_line =
        250.0 * (model.best_value() - model.mean_rewards().minCoeff());
    EXPECT_LT(eliminated, 0.9 * worst_line);
    if (eliminated >= ucb) ++eliminator_not_better;
  }
  EXPECT_GE(eliminator_not_better, 1);
}

TEST(CoverageTest, ConfidenceIntervalsCoverTrueMeans) {
  // delta = 0.05: the deviation |<x, alpha_hat - alpha*>| <= c ||x||_{V^-1}
  // must hold for every arm at every step in at least 95% of seeded runs
  const int runs = 200;
  const long long horizon = 100;
  int covered = 0;
  for (int run = 0; run < runs; ++run) {
    const SpectralBasis basis = eigendecompose(
        laplacian(gen_erdos_renyi(25, 0.2, 1000 + static_cast<std::uint64_t>(run))));
    const RegularizedSpectrum spec = regularize(basis, 0.01);
    const RewardModel model =
        gen_sparse_smooth_reward(basis, 3, static_cast<std::uint64_t>(run));
    const NoiseModel noise(0.05);
    const UcbConfig cfg =
        make_ucb_config(spec, 0.05, 0.05,
                        lambda_norm(model.alpha_star(), spec), horizon);
    UcbPolicy policy(basis, spec, cfg);
    Rng rng(derive_seed(77, static_cast<std::uint64_t>(run)));
    bool ok = true;
    for (long long t = 1; t <= horizon && ok; ++t) {
      for (int v = 0; v < basis.num_nodes(); ++v) {
        const Eigen::VectorXd x = basis.arm_feature(v);
        const double deviation =
            std::abs(x.dot(policy.state().alpha_hat() - model.alpha_star()));
        if (deviation > cfg.c_coeff * policy.state().width(x) + 1e-12) {
          ok = false;
          break;
        }
      }
      const int arm = policy.select();
      policy.observe(arm, sample_reward(model, noise, arm, rng));
    }
    if (ok) ++covered;
  }
  EXPECT_GE(covered, static_cast<int>(0.95 * runs));
}

TEST(LogTModeTest, CoefficientGrowsWithTime) {
  const SpectralBasis basis = identity_basis(6);
  const RegularizedSpectrum spec = RegularizedSpectrum::flat(6, 1.0);
  const UcbConfig cfg = make_ucb_config(spec, 0.1, 0.05, 0.0, 50, true,
                                        CBoundMode::kLogT);
  UcbPolicy policy(basis, spec, cfg);
  const double c1 = policy.current_coefficient();
  Rng rng(4);
  for (int t = 0; t < 9; ++t) {
    const int arm = policy.select();
    policy.observe(arm, rng.normal());
  }
  const double c10 = policy.current_coefficient();
  EXPECT_NEAR(c10 - c1, std::log(10.0), 1e-12);
}

}  // namespace
}  // namespace specband
