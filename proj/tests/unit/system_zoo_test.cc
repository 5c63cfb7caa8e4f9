#include <cmath>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "sedlqr/block_matrix.h"
#include "sedlqr/error.h"
#include "sedlqr/system_zoo.h"

namespace sedlqr {
namespace {

TEST(Heat, Structure) {
  const LqrProblem p = HeatEquationSystem(10, 0.1);
  for (int i = 0; i < 10; ++i) {
    EXPECT_NEAR(p.A(i, i), 0.8, 1e-15);
    EXPECT_NEAR(p.A(i, (i + 1) % 10), 0.1, 1e-15);
    EXPECT_NEAR(p.A(i, (i + 9) % 10), 0.1, 1e-15);
    EXPECT_NEAR(p.B(i, i), 0.1, 1e-15);
  }
  EXPECT_NEAR(p.A.sum(), 10.0, 1e-12);
  EXPECT_EQ(p.S.norm(), 0.0);
  EXPECT_FALSE(p.parameter_out_of_range);
  EXPECT_TRUE(HeatEquationSystem(10, 0.3).parameter_out_of_range);
}

TEST(Heat, CoefficientBroadcast) {
  const LqrProblem p = HeatEquationSystem(4, 0.2, {2.0}, {1, 2, 3, 4}, {});
  EXPECT_NEAR(p.B(3, 3), 0.4, 1e-15);
  EXPECT_EQ(p.Q(2, 2), 3.0);
  EXPECT_EQ(p.R(1, 1), 1.0);
  EXPECT_THROW(HeatEquationSystem(4, 0.2, {1, 2}), Error);
}

TEST(Heat, StableVariantRadius) {
  const LqrProblem p = StableHeatEquationSystem(10, 0.1, 0.1);
  EXPECT_NEAR(SpectralRadius(p.A), std::exp(-0.1), 1e-12);
}

TEST(Counterexample, PathForTwoAgents) {
  const LqrProblem p = CounterexampleSystem(2, 1.1);
  EXPECT_EQ(p.topology.distance(0, 1), 1);
  EXPECT_EQ(p.B(0, 1), 1.0);
  EXPECT_EQ(p.B(1, 0), 0.0);
  const LqrProblem big = CounterexampleSystem(6, 1.1);
  EXPECT_EQ(big.B(5, 0), 0.0);  // no wraparound
  EXPECT_EQ(big.topology.distance(0, 5), 1);
}

TEST(Expm, AgainstEigenMatrixFunctions) {
  Eigen::MatrixXd a(3, 3);
  a << -1, 2, 0.5, 0.3, -4, 1, 0, 7, -2;
  for (double t : {0.01, 0.5, 2.0}) {
    const Eigen::MatrixXd ref = (a * t).exp();
    EXPECT_LE((MatrixExponential(a, t) - ref).norm(), 1e-12 * ref.norm()) << t;
  }
  Eigen::Matrix2d rot;
  rot << 0, -1, 1, 0;
  const Eigen::MatrixXd e = MatrixExponential(rot, M_PI);
  EXPECT_NEAR(e(0, 0), -1.0, 1e-12);
  EXPECT_NEAR(e(1, 0), 0.0, 1e-12);
}

TEST(Phi, BothBranchesAgreeWithQuadrature) {
  Eigen::MatrixXd a(2, 2);
  a << -0.3, 0.2, 0.1, -0.5;
  // Closed form for invertible A: A^-1 (e^{dt A} - I).
  for (double dt : {0.5, 10.0}) {
    const Eigen::MatrixXd ref =
        a.inverse() * ((a * dt).exp() - Eigen::MatrixXd::Identity(2, 2));
    EXPECT_LE((PhiIntegral(a, dt) - ref).norm(), 1e-12 * ref.norm()) << dt;
  }
  EXPECT_LE((PhiIntegral(Eigen::MatrixXd::Zero(2, 2), 0.25) -
             0.25 * Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-15);
}

TEST(Discretize, ZeroDrift) {
  const Topology t = Topology::Cycle(3, 1, 1);
  const ContinuousSystem sys{t, Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Identity(3, 3),
                             Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Identity(3, 3)};
  const LqrProblem p = Discretize(sys, 0.25);
  EXPECT_LE((p.A - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-15);
  EXPECT_LE((p.B - 0.25 * Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-15);
  EXPECT_NEAR(p.Q(0, 0), 0.25, 1e-15);
  EXPECT_EQ(p.preferred_dare, DareMethod::kDoubling);
  ASSERT_TRUE(p.discretization.has_value());
  EXPECT_EQ(p.discretization->dt, 0.25);
}

TEST(Thermal, TwoZones) {
  ThermalOptions opt;
  opt.capacitances = {200, 200};
  const ContinuousSystem c = ThermalGridContinuous(1, 2, opt);
  Eigen::Matrix2d ref;
  ref << -1, 1, 1, -1;
  EXPECT_LE((c.Ac - ref / 200.0).norm(), 1e-15);
  EXPECT_NEAR(c.Bc(1, 1), 1.0 / 200, 1e-15);
  EXPECT_EQ(c.Qc(0, 0), 3.0);

  const LqrProblem p = ThermalGridSystem(1, 2, opt);
  EXPECT_LE((p.A - (0.25 * c.Ac).exp()).norm(), 1e-14);
}

TEST(Thermal, ClampAndSeeding) {
  ThermalOptions opt;
  opt.capacitances = {50, 200, 300, 250};
  bool clamped = false;
  const ContinuousSystem c = ThermalGridContinuous(2, 2, opt, &clamped);
  EXPECT_TRUE(clamped);
  EXPECT_NEAR(c.Bc(0, 0), 1.0 / kMinCapacitance, 1e-15);
  EXPECT_TRUE(ThermalGridSystem(2, 2, opt).parameter_out_of_range);

  ThermalOptions seeded;
  seeded.seed = 4;
  EXPECT_EQ(ThermalGridSystem(3, 3, seeded).A, ThermalGridSystem(3, 3, seeded).A);
  seeded.zeta = 0;
  EXPECT_THROW(ThermalGridSystem(3, 3, seeded), Error);
}

TEST(Swing, TwoBusCoupling) {
  const Topology grid = Topology::FromEdgeList(2, {{0, 1, 1e-6}}, {1, 1}, {1, 1});
  const ContinuousSystem c = SwingContinuous(grid);
  const double k = 1e-6 * 132e3 * 132e3 / 1e5;
  EXPECT_NEAR(k, 0.17424, 1e-12);
  EXPECT_EQ(c.topology.n_x(), 4);
  EXPECT_EQ(c.topology.n_u(), 2);
  EXPECT_EQ(c.Ac(0, 1), 1.0);
  EXPECT_EQ(c.Ac(2, 3), 1.0);
  EXPECT_NEAR(c.Ac(1, 2), -k, 1e-12);
  EXPECT_NEAR(c.Ac(1, 0), k, 1e-12);
  EXPECT_NEAR(c.Bc(1, 0), 0.1, 1e-15);
  EXPECT_EQ(c.Bc(0, 0), 0.0);

  const Topology bad = Topology::FromEdgeList(2, {{0, 1, 0.0}}, {1, 1}, {1, 1});
  try {
    SwingContinuous(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidInput);
  }
}

TEST(BusNetwork, ConnectedAndDeterministic) {
  const Topology a = SyntheticBusNetwork(145, 0);
  const Topology b = SyntheticBusNetwork(145, 0);
  EXPECT_TRUE(a.connected());
  EXPECT_EQ(a.edges().size(), b.edges().size());
  EXPECT_EQ(a.diameter(), b.diameter());
  for (const Edge& e : a.edges()) {
    EXPECT_GE(e.weight, 0.5e-6);
    EXPECT_LE(e.weight, 1.5e-6);
  }
  EXPECT_TRUE(SyntheticBusNetwork(30, 99).connected());
}

TEST(RandomSed, WellFormed) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const LqrProblem p = RandomStableSedSystem(seed);
    EXPECT_NO_THROW(p.Validate());
    const double rad = SpectralRadius(p.A);
    EXPECT_GE(rad, 0.3 - 1e-9);
    EXPECT_LE(rad, 0.9 + 1e-9);
    EXPECT_GE(SchurMinEigenvalue(p), 0.1 - 1e-12);
    const int n = p.topology.agent_count();
    EXPECT_GE(n, 3);
    EXPECT_LE(n, 20);
    const Eigen::MatrixXd norms = p.BlockA().BlockNorms();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (p.topology.distance(i, j) > 1) EXPECT_EQ(norms(i, j), 0.0);
      }
    }
  }
  EXPECT_EQ(RandomStableSedSystem(7).A, RandomStableSedSystem(7).A);
}

TEST(Prop5, ThermalGrid) {
  ThermalOptions opt;
  const ContinuousSystem c = ThermalGridContinuous(3, 3, opt);
  const LqrProblem p = Discretize(c, opt.dt);
  const Prop5Report r = Prop5Check(c, opt.dt, p);
  ASSERT_TRUE(r.applicable);
  EXPECT_LT(r.ratio, 1.0);
  EXPECT_NEAR(r.rate, -std::log(r.ratio), 1e-12);
  EXPECT_TRUE(r.a_holds);
  EXPECT_TRUE(r.b_series_holds);
  // The stated B constant is too small for this instance.
  EXPECT_FALSE(r.b_stated_holds);
  EXPECT_FALSE(r.Passed());
}

TEST(Prop5, SkippedForLargeSteps) {
  ThermalOptions opt;
  const ContinuousSystem c = ThermalGridContinuous(2, 2, opt);
  const Prop5Report r = Prop5Check(c, 1e4, Discretize(c, 1e4));
  EXPECT_FALSE(r.applicable);
  EXPECT_TRUE(r.Passed());
}

TEST(Prop5, ZeroDrift) {
  const Topology t = Topology::Cycle(3, 1, 1);
  const ContinuousSystem zero_b{t, Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Zero(3, 3),
                                Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Identity(3, 3)};
  EXPECT_TRUE(Prop5Check(zero_b, 0.1, Discretize(zero_b, 0.1)).Passed());
}

}  // namespace
}  // namespace sedlqr
