#include <cmath>
#include <cstdlib>

#include <gtest/gtest.h>

#include "sedlqr/dist_response.h"
#include "sedlqr/error.h"
#include "sedlqr/lqr_core.h"
#include "sedlqr/simulation.h"
#include "sedlqr/system_zoo.h"

namespace sedlqr {
namespace {

Eigen::MatrixXd Scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

LqrProblem HalfScalar() {
  return LqrProblem(Topology::FromEdgeList(1, {}, {1}, {1}), Scalar(0.5), Scalar(1),
                    Scalar(1), Scalar(1), Scalar(0));
}

RolloutConfig Short(std::uint64_t seed) {
  RolloutConfig c;
  c.horizon = 20000;
  c.trials = 8;
  c.seed = seed;
  return c;
}

TEST(Rollout, OpenLoopScalarCost) {
  const RolloutResult r = RolloutStateFeedback(HalfScalar(), Scalar(0), Short(1));
  EXPECT_EQ(r.trial_means.size(), 8u);
  EXPECT_GT(r.stderr_, 0.0);
  EXPECT_LT(std::abs(r.mean - 4.0 / 3.0), 4 * r.stderr_);
  EXPECT_GT(r.burn_in, 0);
}

TEST(Rollout, OptimalGainMatchesTraceP) {
  const LqrProblem p = StableHeatEquationSystem(6, 0.1, 0.1);
  const RiccatiSolution sol = SolveDare(p);
  const RolloutResult r = RolloutStateFeedback(p, sol.K, Short(2));
  EXPECT_LT(std::abs(r.mean - sol.P.trace()), 4 * r.stderr_);
}

TEST(Rollout, DisturbanceFeedbackMatchesClosedForm) {
  const LqrProblem p = HalfScalar();
  const DisturbanceSystem ds =
      Assemble(p, SolveLyapunovG(p.A, p.Q), 3, FitStability(p.A));
  const DisturbanceController l = SolveDirect(ds);
  const RolloutResult r = RolloutDisturbanceFeedback(p, l, Short(3));
  EXPECT_LT(std::abs(r.mean - DisturbanceCost(ds, l)), 4 * r.stderr_);
}

TEST(Rollout, ZeroControllersAgree) {
  const LqrProblem p = HalfScalar();
  DisturbanceController zero;
  zero.blocks = {Scalar(0), Scalar(0)};
  const RolloutResult a = RolloutStateFeedback(p, Scalar(0), Short(4));
  const RolloutResult b = RolloutDisturbanceFeedback(p, zero, Short(4));
  EXPECT_NEAR(a.mean, b.mean, 1e-12 * a.mean);
}

TEST(Rollout, Deterministic) {
  const LqrProblem p = StableHeatEquationSystem(6, 0.1, 0.1);
  const Eigen::MatrixXd k = SolveDare(p).K;
  const RolloutResult a = RolloutStateFeedback(p, k, Short(5));
  setenv("SEDLQR_THREADS", "3", 1);
  EXPECT_EQ(ThreadBudget(), 3);
  const RolloutResult b = RolloutStateFeedback(p, k, Short(5));
  unsetenv("SEDLQR_THREADS");
  EXPECT_EQ(a.trial_means, b.trial_means);
  EXPECT_NE(a.mean, RolloutStateFeedback(p, k, Short(6)).mean);
}

TEST(Rollout, NoiseFreeDecays) {
  RolloutConfig c = Short(0);
  c.noise_free = true;
  c.burn_in = 0;
  c.horizon = 1000;
  const RolloutResult r = RolloutStateFeedback(HalfScalar(), Scalar(0), c);
  // sum_t 0.25^t / T with x0 = 1
  EXPECT_NEAR(r.mean, (4.0 / 3.0) / 1000, 1e-12);
}

TEST(Rollout, DivergenceDetected) {
  const LqrProblem p = CounterexampleSystem(3, 1.5);
  RolloutConfig c = Short(0);
  c.burn_in = 0;
  try {
    RolloutStateFeedback(p, Eigen::MatrixXd::Zero(3, 3), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDivergenceDetected);
  }
}

TEST(Covariance, ZeroControllerIsLyapunov) {
  const LqrProblem p = StableHeatEquationSystem(5, 0.1, 0.2);
  DisturbanceController zero;
  zero.blocks = {Eigen::MatrixXd::Zero(5, 5)};
  const Eigen::MatrixXd ref =
      SolveLyapunovG(p.A.transpose(), Eigen::MatrixXd::Identity(5, 5)).G;
  EXPECT_LE((AnalyticStateCovariance(p, zero) - ref).norm(), 1e-12 * ref.norm());
}

TEST(Covariance, ScalarWithFeedback) {
  const LqrProblem p = HalfScalar();
  DisturbanceController l;
  l.blocks = {Scalar(-0.2)};
  // x_t = w_{t-1} + 0.3 sum_{k>=2} 0.5^{k-2} w_{t-k}
  const double ref = 1 + 0.09 / (1 - 0.25);
  EXPECT_NEAR(AnalyticStateCovariance(p, l)(0, 0), ref, 1e-13);
  const SecondMomentReport m = SecondMomentCheck(p, l, Short(7));
  EXPECT_NEAR(m.analytic(0, 0), ref, 1e-13);
  EXPECT_LT(m.max_z, 4.0);
}

}  // namespace
}  // namespace sedlqr
