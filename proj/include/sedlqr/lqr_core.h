#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sedlqr/lqr_problem.h"

namespace sedlqr {

struct RiccatiSolution {
  Eigen::MatrixXd P;
  Eigen::MatrixXd K;  ///< optimal law is u = -K x
  double residual = 0.0;
  int iterations = 0;
  DareMethod method = DareMethod::kValueIteration;
};

/// Riccati fixed point. Value iteration starts from P = Q and stops at a
/// relative change below 1e-12 (at most 100000 steps); doubling is the
/// structure-preserving alternative for slow (sampled-data) problems.
/// Without an explicit method the problem's preferred one is used.
/// Throws riccati-failure on divergence (||P|| > 1e12) or no convergence.
RiccatiSolution SolveDare(const LqrProblem& prob,
                          std::optional<DareMethod> method = std::nullopt);

/// ||P - F(P)||, F the Riccati map, in spectral norm.
double RiccatiResidual(const LqrProblem& prob, const Eigen::MatrixXd& P);

/// K = (R + B'PB)^-1 (B'PA + S).
Eigen::MatrixXd GainFromP(const LqrProblem& prob, const Eigen::MatrixXd& P);

/// ||A^k|| <= tau e^{-rho k} for 0 <= k <= horizon_checked.
struct StabilityCertificate {
  static constexpr double kRhoCap = 50.0;
  static constexpr double kMargin = 0.05;

  double tau = 1.0;
  double rho = 0.0;
  int horizon_checked = 0;
  bool capped = false;

  double Bound(int k) const;
};

/// rho = -ln(spectral radius) (1 - margin), tau the smallest constant that
/// covers every power up to k_max (at least 1). Throws
/// certificate-unavailable unless the spectral radius is below 1.
StabilityCertificate FitStability(const Eigen::MatrixXd& a, int k_max = 200);

/// One (tau, rho) covering all matrices: smallest rho, then the largest tau.
StabilityCertificate FitStabilityJoint(const std::vector<Eigen::MatrixXd>& as,
                                       int k_max = 200);

/// True iff ||A^k|| <= tau e^{-rho k} for every k <= k_max.
bool VerifyStability(const Eigen::MatrixXd& a, double tau, double rho,
                     int k_max);

struct LyapunovSum {
  Eigen::MatrixXd G;
  int iterations = 0;
  double residual = 0.0;  ///< ||A'GA - G + Q||
};

/// G = sum_t (A^t)' Q A^t by doubling. Throws unstable-input unless the
/// spectral radius of A is below 1.
LyapunovSum SolveLyapunovG(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);

/// Average cost of u = -Kp x under unit noise: trace of the closed-loop
/// Lyapunov sum. Throws unstable-controller when A - B Kp is not stable.
double ClosedLoopCost(const LqrProblem& prob, const Eigen::MatrixXd& kp);

/// Closed-loop state weight Q + Kp'R Kp - Kp'S - S'Kp.
Eigen::MatrixXd ClosedLoopWeight(const LqrProblem& prob,
                                 const Eigen::MatrixXd& kp);

/// ||G A^m|| <= tau^2 ||Q|| e^{-rho m} / (1 - e^{-2 rho}) for 0 <= m <= m_max.
/// `worst_ratio` receives the largest lhs / rhs.
bool GDecayCheck(const LyapunovSum& g, const Eigen::MatrixXd& a, double q_norm,
                 const StabilityCertificate& cert, int m_max,
                 double* worst_ratio = nullptr);

/// Problem seen by v in u = -K0 x + v: A - B K0, Q + K0'R K0 - K0'S - S'K0,
/// S - R K0, same B and R. Its optimal gain is K - K0.
LqrProblem Prestabilize(const LqrProblem& prob, const Eigen::MatrixXd& k0);

/// Gain of the original problem from the gain of the shifted one.
Eigen::MatrixXd MapBackGain(const Eigen::MatrixXd& k_shifted,
                            const Eigen::MatrixXd& k0);

/// The problem itself, or its shifted version when it carries a K0.
LqrProblem StableForm(const LqrProblem& prob);

}  // namespace sedlqr
