#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sedlqr/dist_response.h"
#include "sedlqr/lqr_problem.h"

namespace sedlqr {

/// Trial r draws its noise from CounterRng(seed, r); noise is i.i.d. N(0, I).
struct RolloutConfig {
  long horizon = 200000;  ///< T
  int trials = 8;
  std::uint64_t seed = 0;
  /// Steps discarded before averaging; negative means ceil(10 / rho) from a
  /// fitted stability certificate, capped at T / 2.
  long burn_in = -1;
  bool noise_free = false;
  /// Initial state, zero if unset (all ones in the noise-free case).
  std::optional<Eigen::VectorXd> x0;
};

struct RolloutResult {
  double mean = 0.0;
  double stderr_ = 0.0;  ///< across trial means
  long burn_in = 0;
  std::vector<double> trial_means;
};

/// Time-averaged x'Qx + u'Ru + 2u'Sx under u = -Kp x.
/// Throws divergence-detected once ||x|| exceeds 1e9.
RolloutResult RolloutStateFeedback(const LqrProblem& prob,
                                   const Eigen::MatrixXd& kp,
                                   const RolloutConfig& cfg);

/// Same average under u_t = sum_k L_k w_{t-k}, with w_s = 0 for s < 0.
RolloutResult RolloutDisturbanceFeedback(const LqrProblem& prob,
                                         const DisturbanceController& l,
                                         const RolloutConfig& cfg);

/// Stationary covariance sum_k T_k T_k' of the disturbance-feedback loop,
/// T_k = A^{k-1} + sum_{j=1}^{min(H,k-1)} A^{k-1-j} B L_j; the geometric tail
/// past k = H + 1 comes from a Lyapunov solve.
Eigen::MatrixXd AnalyticStateCovariance(const LqrProblem& prob,
                                        const DisturbanceController& l);

struct SecondMomentReport {
  Eigen::MatrixXd analytic, empirical;
  double max_deviation = 0.0;  ///< max |analytic - empirical| entry
  double max_z = 0.0;          ///< largest deviation in units of its stderr
};
SecondMomentReport SecondMomentCheck(const LqrProblem& prob,
                                     const DisturbanceController& l,
                                     const RolloutConfig& cfg);

/// Worker count: SEDLQR_THREADS if set (>= 1), else hardware concurrency.
int ThreadBudget();

}  // namespace sedlqr
