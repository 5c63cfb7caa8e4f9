#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sedlqr/lqr_problem.h"
#include "sedlqr/topology.h"

namespace sedlqr {

/// A = I - eta L on the cycle Z_N (L the cycle Laplacian), B = eta diag(b),
/// Q = diag(q), R = diag(r), S = 0. Coefficient lists of length 1 are
/// broadcast, empty lists mean all ones. eta > 1/4 sets
/// parameter_out_of_range but still builds the problem.
LqrProblem HeatEquationSystem(int n, double eta, std::vector<double> b = {},
                              std::vector<double> q = {},
                              std::vector<double> r = {});

/// Heat system with A scaled by e^{-rho}, so that it is strictly stable.
LqrProblem StableHeatEquationSystem(int n, double eta, double rho,
                                    double alpha = 1.0);

/// A = a I, B upper bidiagonal of ones without wraparound, Q = R = I, S = 0.
/// Distances are on Z_N (a single edge when N = 2).
LqrProblem CounterexampleSystem(int n, double a);

struct ThermalOptions {
  /// Zone capacitances v_i; sampled as 200 + 20 N(0,1) from `seed` if empty.
  std::vector<double> capacitances;
  double zeta = 1.0;
  double alpha = 3.0;
  double dt = 0.25;
  std::uint64_t seed = 0;
};

/// Sampled capacitances below this are clamped up to it.
inline constexpr double kMinCapacitance = 100.0;

ContinuousSystem ThermalGridContinuous(int rows, int cols,
                                       const ThermalOptions& options,
                                       bool* clamped = nullptr);
LqrProblem ThermalGridSystem(int rows, int cols,
                             const ThermalOptions& options = {});

struct SwingOptions {
  double v_ref = 132e3;
  double inertia = 1e5;
  double b_gain = 0.1;
  double alpha1 = 0.5;
  double alpha2 = 0.5;
  double dt = 5e-6;
};

/// Per bus (theta_i, omega_i) with theta' = omega and
/// omega_i' = -sum_j k_ij (theta_j - theta_i) + b u_i, k_ij = l_ij V^2 / M.
/// Edge weights of `grid` are the line susceptances l_ij; block dims are
/// replaced by 2 states and 1 input per bus. Throws invalid-input on a
/// non-positive susceptance.
ContinuousSystem SwingContinuous(const Topology& grid,
                                 const SwingOptions& options = {});
LqrProblem SwingDynamicsSystem(const Topology& grid,
                               const SwingOptions& options = {});

/// Seeded random geometric graph on the unit square, patched to be connected,
/// with susceptances uniform in [0.5e-6, 1.5e-6].
Topology SyntheticBusNetwork(int n, std::uint64_t seed);

/// Random strictly stable system with neighbour-only A, B, S couplings,
/// 3 <= N <= 20 agents on a cycle, and mixed block sizes.
LqrProblem RandomStableSedSystem(std::uint64_t seed);

/// e^{tA} by scaling and squaring of a truncated Taylor series.
Eigen::MatrixXd MatrixExponential(const Eigen::MatrixXd& a, double t = 1.0);

/// int_0^dt e^{sA} ds. Series dt sum (dt A)^k/(k+1)! while dt||A|| <= 1,
/// otherwise read off the exponential of the augmented [[A, I], [0, 0]].
Eigen::MatrixXd PhiIntegral(const Eigen::MatrixXd& a, double dt);

/// A = e^{dt Ac}, B = PhiIntegral(Ac, dt) Bc, Q = dt Qc, R = dt Rc, S = 0.
/// Throws invalid-problem if the result breaks Q > 0 / R > 0.
LqrProblem Discretize(const ContinuousSystem& sys, double dt);

/// Blockwise check of the sampled-data decay bounds, with x = dt ||Ac||:
/// ||[A]_ij|| <= e^x x^d and ||[B]_ij|| <= c_B x^d. Two B constants are
/// checked: the commonly quoted dt^2 ||Ac|| ||Bc|| e^x, and
/// ||Bc|| e^x / ||Ac||, which is what the series expansion actually gives.
struct Prop5Report {
  bool applicable = false;  ///< false when x >= 1: check skipped.
  double ratio = 0.0;       ///< x
  double rate = 0.0;        ///< -ln x
  double c_a = 0.0, c_b_stated = 0.0, c_b_series = 0.0;
  double excess_a = 0.0, excess_b_stated = 0.0, excess_b_series = 0.0;
  bool a_holds = false, b_stated_holds = false, b_series_holds = false;

  /// The stated pair of bounds; vacuously true when skipped.
  bool Passed() const { return !applicable || (a_holds && b_stated_holds); }
};

Prop5Report Prop5Check(const ContinuousSystem& sys, double dt,
                       const LqrProblem& prob);

}  // namespace sedlqr
