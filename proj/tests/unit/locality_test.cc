#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "sedlqr/block_matrix.h"
#include "sedlqr/error.h"
#include "sedlqr/locality.h"
#include "sedlqr/lqr_core.h"
#include "sedlqr/system_zoo.h"

namespace sedlqr {
namespace {

TEST(Truncate, Blocks) {
  const Topology t = Topology::Cycle(6, 1, 1);
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(6, 6);
  EXPECT_EQ(Truncate(ones, t, 1), Eigen::MatrixXd::Identity(6, 6));
  const Eigen::MatrixXd k2 = Truncate(ones, t, 2);
  EXPECT_EQ(k2(0, 1), 1.0);
  EXPECT_EQ(k2(0, 5), 1.0);
  EXPECT_EQ(k2(0, 2), 0.0);
  EXPECT_EQ(Truncate(ones, t, t.diameter() + 1), ones);
  try {
    Truncate(ones, t, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidInput);
  }
}

TEST(Truncate, InputByStateBlocks) {
  const Topology t = Topology::Cycle(3, 2, 1);
  const Eigen::MatrixXd k = Eigen::MatrixXd::Ones(3, 6);
  const Eigen::MatrixXd k1 = Truncate(k, t, 1);
  EXPECT_EQ(k1.sum(), 6.0);
  EXPECT_EQ(k1(1, 2), 1.0);
  EXPECT_EQ(k1(1, 3), 1.0);
  EXPECT_EQ(k1(1, 0), 0.0);
}

TEST(Truncate, DisconnectedPairsDropped) {
  const Topology t = Topology::FromEdgeList(4, {{0, 1}, {2, 3}}, {1, 1, 1, 1}, {1, 1, 1, 1});
  const Eigen::MatrixXd k = Truncate(Eigen::MatrixXd::Ones(4, 4), t, 100);
  EXPECT_EQ(k.sum(), 8.0);
  EXPECT_EQ(k(0, 2), 0.0);
}

TEST(Threshold, Formula) {
  StabilityCertificate c;
  c.tau = 2.0;
  c.rho = 0.1;
  const double ref = std::log(2 * 2.0 * 3.0 * std::sqrt(25.0) * 0.5 /
                              (1 - std::exp(-0.1))) / 0.4;
  EXPECT_NEAR(KappaThreshold(c, 3.0, 0.4, 0.5, 25), ref, 1e-12);
  try {
    KappaThreshold(c, 3.0, 0.0, 0.5, 25);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kThresholdUndefined);
  }
}

TEST(Threshold, StableAtThreshold) {
  const LqrProblem p = StableHeatEquationSystem(30, 0.1, 0.1);
  const RiccatiSolution sol = SolveDare(p);
  const SweepContext ctx = MakeSweepContext(p, sol);
  const ThresholdReport r = KappaThresholdCheck(p, sol.K, ctx.cert, ctx.k_cert);
  EXPECT_GE(r.kappa, 1);
  EXPECT_GE(r.kappa, r.threshold);
  EXPECT_TRUE(r.stable);
  EXPECT_TRUE(r.slower_rate_holds);
}

TEST(Sweep, GapsAndBounds) {
  const LqrProblem p = StableHeatEquationSystem(12, 0.1, 0.1);
  const RiccatiSolution sol = SolveDare(p);
  const int diam = p.topology.diameter();
  const auto rows = GapSweep(p, sol, 1, diam + 1);
  ASSERT_EQ(static_cast<int>(rows.size()), diam + 1);
  for (const TruncationReport& row : rows) {
    ASSERT_TRUE(row.stable) << row.kappa;
    EXPECT_GE(row.gap, -1e-12 * row.cost_opt);
    EXPECT_LE(row.gap, row.theorem4_bound);
    EXPECT_NEAR(row.cost_opt, sol.P.trace(), 1e-9 * row.cost_opt);
  }
  EXPECT_EQ(rows.back().gap, 0.0);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    EXPECT_LE(rows[k].gap, rows[k - 1].gap * (1 + 1e-9) + 1e-15);
  }

  std::ostringstream os;
  WriteSweepCsv(os, rows);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
            "kappa,stable,cost_trunc,cost_opt,gap,bound,threshold");
}

TEST(Sweep, UnstableRowsUseSentinel) {
  const LqrProblem p = CounterexampleSystem(8, 1.5);
  const RiccatiSolution sol = SolveDare(p);
  const auto rows = GapSweep(p, sol, 1, p.topology.diameter() + 1);
  for (const TruncationReport& row : rows) {
    if (!row.stable) {
      EXPECT_TRUE(std::isinf(row.cost_trunc));
      EXPECT_TRUE(std::isinf(row.gap));
    }
  }
  EXPECT_TRUE(rows.back().stable);
  EXPECT_EQ(rows.back().gap, 0.0);
}

TEST(TruncationError, NFactorBoundAlwaysHolds) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LqrProblem p = RandomStableSedSystem(seed);
    const RiccatiSolution sol = SolveDare(p);
    const Topology& t = p.topology;
    const SedCertificate kc = FitSed(BlockMatrix(sol.K, t, Space::kInput, Space::kState), t,
                                     FitMode::kEnvelope);
    for (int kappa = 1; kappa <= t.diameter() + 1; ++kappa) {
      const TruncationErrorReport r = TruncationErrorCheck(sol.K, t, kc, kappa);
      EXPECT_TRUE(r.spectral_n_ok) << seed << " " << kappa;
      EXPECT_TRUE(r.frobenius_ok) << seed << " " << kappa;
      EXPECT_NEAR(r.spectral_bound_n,
                  r.spectral_bound * std::sqrt(double(t.agent_count())), 1e-12 * r.spectral_bound_n);
    }
  }
}

}  // namespace
}  // namespace sedlqr
