#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sedlqr/lqr_core.h"
#include "sedlqr/lqr_problem.h"

namespace sedlqr {

/// u_t = L_1 w_{t-1} + ... + L_H w_{t-H}, each L_k n_u x n_x.
struct DisturbanceController {
  std::vector<Eigen::MatrixXd> blocks;

  int horizon() const { return static_cast<int>(blocks.size()); }
  /// [L_1; ...; L_H]
  Eigen::MatrixXd Stacked() const;
  static DisturbanceController FromStacked(const Eigen::MatrixXd& stacked,
                                           int horizon);
};

/// Quadratic data of the horizon-H disturbance-feedback problem: the cost is
/// trace(G + J'L + L'J + L'ML) in the stacked L.
struct DisturbanceSystem {
  int horizon = 0;
  Eigen::MatrixXd M;  ///< H n_u square, blocks M_km
  Eigen::MatrixXd J;  ///< H n_u x n_x, blocks J_k
  LyapunovSum G;
  StabilityCertificate cert;
  double lambda_min_bound = 0.0;  ///< lmin(R - S Q^-1 S')
  double lambda_max_bound = 0.0;

  Eigen::MatrixXd MBlock(int k, int m) const;  ///< 1-based
  Eigen::MatrixXd JBlock(int k) const;         ///< 1-based
  int n_u() const { return static_cast<int>(J.rows()) / horizon; }
};

/// M_kk = B'GB + R; M_km = B'GA^{k-m}B + SA^{k-m-1}B for k > m, mirrored
/// for k < m; J_k = B'GA^k + SA^{k-1}. The eigenvalue bounds are evaluated
/// with `cert` as the stability envelope of A. Throws unstable-input
/// unless A is stable.
DisturbanceSystem Assemble(const LqrProblem& prob, const LyapunovSum& g,
                           int horizon, const StabilityCertificate& cert);

/// L = -M^-1 J by Cholesky; singular-M if M is not positive definite.
DisturbanceController SolveDirect(const DisturbanceSystem& ds);

/// ||ML + J||
double DirectResidual(const DisturbanceSystem& ds,
                      const DisturbanceController& l);

/// Partial sum -(1/lmax) sum_{s<t} (I - M/lmax)^s J. lmax is the closed-form
/// upper bound unless `exact_lambda`.
DisturbanceController SolveNeumann(const DisturbanceSystem& ds, int t,
                                   bool exact_lambda = false);

/// ||L* - L^t|| for t = 1..t_max in one pass, next to the guaranteed bound
/// (||J|| / lmin) e^{-(lmin/lmax) t}.
struct NeumannSweep {
  std::vector<double> error;
  std::vector<double> bound;
  double lambda_min = 0.0, lambda_max = 0.0;
  int violations = 0;
};
NeumannSweep NeumannErrorSweep(const DisturbanceSystem& ds,
                               const DisturbanceController& direct, int t_max,
                               bool exact_lambda = false);

/// trace(G + J'L + L'J + L'ML)
double DisturbanceCost(const DisturbanceSystem& ds,
                       const DisturbanceController& l);

struct Lemma3Result {
  double gap = 0.0;    ///< ||K + L_1||
  double bound = 0.0;
  double coefficient = 0.0;  ///< bound without the e^{-H rho} factor
  bool holds() const { return gap <= bound * (1.0 + 1e-12); }
};

/// `cert` must cover both A and A - BK.
Lemma3Result Lemma3Gap(const Eigen::MatrixXd& k,
                       const DisturbanceController& l, const LqrProblem& prob,
                       const StabilityCertificate& cert);

struct EigenBoundsReport {
  double lambda_min = 0.0, lambda_max = 0.0;
  double lower_bound = 0.0, upper_bound = 0.0;
  bool ok = false;
};
EigenBoundsReport EigenBoundsCheck(const DisturbanceSystem& ds);

/// Location of the worst block in a blockwise decay check. `k`, `m` are
/// 1-based horizon indices (m = 0 for J and gain blocks).
struct BlockOffender {
  std::string matrix;
  int k = 0, m = 0, i = 0, j = 0;
  double ratio = 0.0;  ///< block norm over its bound
};

struct MjSedReport {
  double c_m = 0.0, c_j = 0.0, gamma_m = 0.0;
  double worst_ratio_m = 0.0, worst_ratio_j = 0.0;
  std::optional<BlockOffender> offender;  ///< set when the check fails
  bool ok = false;
};

/// Each M_km against (c_M, gamma_M) and each J_k against (c_J, gamma_M),
/// where c_M = b^2 N^2 (tau^2||Q||/(1-e^{-2rho}) + 2q) + bN(s + tau||S||) + r,
/// c_J = bN(tau^2||Q||/(1-e^{-2rho}) + 2q) + s + tau||S||,
/// gamma_M = gamma_sys rho / (rho + ln(aN)).
MjSedReport MjSedCheck(const DisturbanceSystem& ds, const LqrProblem& prob,
                       const SystemConstants& consts);

/// Decay constants the theory gives for the L_k and for K.
struct FormalConstants {
  double c_l = 0.0, gamma_l = 0.0;
  double c_k = 0.0, gamma_k = 0.0;
};
FormalConstants FormalDecayConstants(const DisturbanceSystem& ds,
                                     const LqrProblem& prob,
                                     const SystemConstants& consts,
                                     const Eigen::MatrixXd& k);

struct FormalSedReport {
  FormalConstants constants;
  double worst_ratio_l = 0.0, worst_ratio_k = 0.0;
  std::optional<BlockOffender> offender;
  bool ok = false;
};
FormalSedReport FormalSedCheck(const DisturbanceSystem& ds,
                               const LqrProblem& prob,
                               const SystemConstants& consts,
                               const Eigen::MatrixXd& k,
                               const DisturbanceController& l);

}  // namespace sedlqr

namespace sedlqr {

/// Horizon sweep H = 1..ds.horizon reusing one Cholesky factor of the full M:
/// the leading principal blocks of M and J are exactly the smaller problems.
struct HorizonRow {
  int horizon = 0;
  Lemma3Result lemma3;
  double cost = 0.0;      ///< disturbance cost of the optimal L at this H
  double residual = 0.0;  ///< ||M L + J||
  double j_norm = 0.0;
};
std::vector<HorizonRow> HorizonSweep(const DisturbanceSystem& ds,
                                     const LqrProblem& prob,
                                     const Eigen::MatrixXd& k,
                                     const StabilityCertificate& joint_cert);

}  // namespace sedlqr
