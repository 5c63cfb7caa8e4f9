#pragma once

#include <limits>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "sedlqr/block_matrix.h"
#include "sedlqr/lqr_core.h"
#include "sedlqr/lqr_problem.h"

namespace sedlqr {

/// Zeroes every block [K]_ij with dist(i,j) >= kappa (and unreachable pairs).
Eigen::MatrixXd Truncate(const Eigen::MatrixXd& k, const Topology& topology,
                         int kappa);

/// ln(2 tau c_K sqrt(N) ||B|| / (1 - e^{-rho})) / gamma_K.
/// Throws threshold-undefined unless gamma_K > 0.
double KappaThreshold(const StabilityCertificate& cert, double c_k,
                      double gamma_k, double b_norm, int n);

/// Threshold evaluation plus the closed-loop claims at kappa = ceil(threshold)
/// (at least 1): spectral stability of A - B K_trunc, and the envelope
/// ||(A - B K_trunc)^k|| <= tau ((1 + e^{-rho}) / 2)^k up to k_max.
struct ThresholdReport {
  double threshold = 0.0;
  int kappa = 1;
  double spectral_radius = 0.0;
  bool stable = false;
  bool slower_rate_holds = false;
};
ThresholdReport KappaThresholdCheck(const LqrProblem& prob,
                                    const Eigen::MatrixXd& k,
                                    const StabilityCertificate& cert,
                                    const SedCertificate& k_cert,
                                    int k_max = 200);

/// (2 tau / (1 - e^{-rho})) ||R + B'PB|| sqrt(N min(n_x, n_u)) c_K e^{-gamma_K kappa}
double Theorem4Bound(const LqrProblem& prob, const Eigen::MatrixXd& p,
                     const StabilityCertificate& cert,
                     const SedCertificate& k_cert, int kappa);

struct TruncationReport {
  static constexpr double kUnstableCost = std::numeric_limits<double>::infinity();

  int kappa = 0;
  bool stable = false;
  double cost_trunc = kUnstableCost;
  double cost_opt = 0.0;
  double gap = kUnstableCost;
  double theorem4_bound = 0.0;
  double kappa_threshold = 0.0;
};

/// Inputs to a sweep that do not depend on kappa.
struct SweepContext {
  StabilityCertificate cert;  ///< of A - BK
  SedCertificate k_cert;      ///< envelope fit of K
  double cost_opt = 0.0;
  double threshold = 0.0;
};
SweepContext MakeSweepContext(const LqrProblem& prob,
                              const RiccatiSolution& sol);

/// One row per kappa in [kappa_min, kappa_max]; unstable truncations carry the
/// +inf cost sentinel.
std::vector<TruncationReport> GapSweep(const LqrProblem& prob,
                                       const RiccatiSolution& sol,
                                       int kappa_min, int kappa_max);
std::vector<TruncationReport> GapSweep(const LqrProblem& prob,
                                       const RiccatiSolution& sol,
                                       const SweepContext& ctx, int kappa_min,
                                       int kappa_max);

/// "kappa,stable,cost_trunc,cost_opt,gap,bound,threshold"
void WriteSweepCsv(std::ostream& out, const std::vector<TruncationReport>& rows);

/// ||K - K_trunc|| <= sqrt(N) c_K e^{-gamma_K kappa} and
/// ||K - K_trunc||_F <= sqrt(N min(n_x, n_u)) c_K e^{-gamma_K kappa}.
/// Blockwise bounds alone only give N c_K e^{-gamma_K kappa} for the spectral
/// norm (row sums times column sums); that version is checked as well.
struct TruncationErrorReport {
  double spectral = 0.0, spectral_bound = 0.0, spectral_bound_n = 0.0;
  double frobenius = 0.0, frobenius_bound = 0.0;
  bool spectral_ok = false, spectral_n_ok = false, frobenius_ok = false;
  bool ok = false;  ///< spectral_ok && frobenius_ok
};
TruncationErrorReport TruncationErrorCheck(const Eigen::MatrixXd& k,
                                           const Topology& topology,
                                           const SedCertificate& k_cert,
                                           int kappa);

}  // namespace sedlqr
