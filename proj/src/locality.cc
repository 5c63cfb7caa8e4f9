#include "sedlqr/locality.h"

#include <algorithm>
#include <cmath>

#include "sedlqr/csv.h"
#include "sedlqr/error.h"

namespace sedlqr {

Eigen::MatrixXd Truncate(const Eigen::MatrixXd& k, const Topology& topology,
                         int kappa) {
  if (kappa < 1) throw Error(ErrorKind::kInvalidInput, "kappa must be >= 1");
  BlockMatrix blocks(k, topology, Space::kInput, Space::kState);
  const int n = topology.agent_count();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int d = topology.distance(i, j);
      if (d == Topology::kUnreachable || d >= kappa) {
        blocks.set_block(i, j, Eigen::MatrixXd::Zero(topology.input_dims()[i],
                                                     topology.state_dims()[j]));
      }
    }
  }
  return blocks.data();
}

double KappaThreshold(const StabilityCertificate& cert, double c_k,
                      double gamma_k, double b_norm, int n) {
  if (!(gamma_k > 0.0)) {
    throw Error(ErrorKind::kThresholdUndefined, "gamma_K must be positive");
  }
  return std::log(2.0 * cert.tau * c_k * std::sqrt(double(n)) * b_norm /
                  (1.0 - std::exp(-cert.rho))) /
         gamma_k;
}

ThresholdReport KappaThresholdCheck(const LqrProblem& prob,
                                    const Eigen::MatrixXd& k,
                                    const StabilityCertificate& cert,
                                    const SedCertificate& k_cert, int k_max) {
  ThresholdReport out;
  out.threshold = KappaThreshold(cert, k_cert.c, k_cert.gamma,
                                 SpectralNorm(prob.B),
                                 prob.topology.agent_count());
  out.kappa = std::max(1, static_cast<int>(std::ceil(out.threshold)));
  const Eigen::MatrixXd acl = prob.A - prob.B * Truncate(k, prob.topology, out.kappa);
  out.spectral_radius = SpectralRadius(acl);
  out.stable = out.spectral_radius < 1.0;
  const double slower = -std::log((1.0 + std::exp(-cert.rho)) / 2.0);
  out.slower_rate_holds = out.stable && VerifyStability(acl, cert.tau * (1.0 + 1e-12),
                                                        slower, k_max);
  return out;
}

double Theorem4Bound(const LqrProblem& prob, const Eigen::MatrixXd& p,
                     const StabilityCertificate& cert,
                     const SedCertificate& k_cert, int kappa) {
  const double n = prob.topology.agent_count();
  const double rb = SpectralNorm(prob.R + prob.B.transpose() * p * prob.B);
  const double dims = std::min(prob.n_x(), prob.n_u());
  return 2.0 * cert.tau / (1.0 - std::exp(-cert.rho)) * rb *
         std::sqrt(n * dims) * k_cert.c * std::exp(-k_cert.gamma * kappa);
}

SweepContext MakeSweepContext(const LqrProblem& prob,
                              const RiccatiSolution& sol) {
  SweepContext ctx;
  ctx.cert = FitStability(prob.A - prob.B * sol.K);
  ctx.k_cert = FitSed(BlockMatrix(sol.K, prob.topology, Space::kInput, Space::kState),
                      prob.topology, FitMode::kEnvelope);
  ctx.cost_opt = ClosedLoopCost(prob, sol.K);
  ctx.threshold = ctx.k_cert.gamma > 0.0
                      ? KappaThreshold(ctx.cert, ctx.k_cert.c, ctx.k_cert.gamma,
                                       SpectralNorm(prob.B),
                                       prob.topology.agent_count())
                      : std::numeric_limits<double>::infinity();
  return ctx;
}

std::vector<TruncationReport> GapSweep(const LqrProblem& prob,
                                       const RiccatiSolution& sol,
                                       int kappa_min, int kappa_max) {
  return GapSweep(prob, sol, MakeSweepContext(prob, sol), kappa_min, kappa_max);
}

std::vector<TruncationReport> GapSweep(const LqrProblem& prob,
                                       const RiccatiSolution& sol,
                                       const SweepContext& ctx, int kappa_min,
                                       int kappa_max) {
  std::vector<TruncationReport> rows;
  for (int kappa = std::max(1, kappa_min); kappa <= kappa_max; ++kappa) {
    TruncationReport row;
    row.kappa = kappa;
    row.cost_opt = ctx.cost_opt;
    row.kappa_threshold = ctx.threshold;
    row.theorem4_bound = Theorem4Bound(prob, sol.P, ctx.cert, ctx.k_cert, kappa);
    const Eigen::MatrixXd kt = Truncate(sol.K, prob.topology, kappa);
    const Eigen::MatrixXd acl = prob.A - prob.B * kt;
    row.stable = SpectralRadius(acl) < 1.0 - 1e-12;
    if (row.stable) {
      row.cost_trunc = kt == sol.K ? ctx.cost_opt : ClosedLoopCost(prob, kt);
      row.gap = row.cost_trunc - row.cost_opt;
    }
    rows.push_back(row);
  }
  return rows;
}

void WriteSweepCsv(std::ostream& out, const std::vector<TruncationReport>& rows) {
  out << "kappa,stable,cost_trunc,cost_opt,gap,bound,threshold\n";
  for (const auto& r : rows) {
    out << r.kappa << ',' << (r.stable ? 1 : 0) << ',' << FormatDouble(r.cost_trunc)
        << ',' << FormatDouble(r.cost_opt) << ',' << FormatDouble(r.gap) << ','
        << FormatDouble(r.theorem4_bound) << ',' << FormatDouble(r.kappa_threshold)
        << '\n';
  }
}

TruncationErrorReport TruncationErrorCheck(const Eigen::MatrixXd& k,
                                           const Topology& topology,
                                           const SedCertificate& k_cert,
                                           int kappa) {
  TruncationErrorReport out;
  const Eigen::MatrixXd diff = k - Truncate(k, topology, kappa);
  const double n = topology.agent_count();
  const double tail = k_cert.c * std::exp(-k_cert.gamma * kappa);
  out.spectral = SpectralNorm(diff);
  out.frobenius = diff.norm();
  out.spectral_bound = std::sqrt(n) * tail;
  out.spectral_bound_n = n * tail;
  out.frobenius_bound =
      std::sqrt(n * std::min(topology.n_x(), topology.n_u())) * tail;
  const double slack = 1.0 + 1e-12;
  out.spectral_ok = out.spectral <= out.spectral_bound * slack;
  out.spectral_n_ok = out.spectral <= out.spectral_bound_n * slack;
  out.frobenius_ok = out.frobenius <= out.frobenius_bound * slack;
  out.ok = out.spectral_ok && out.frobenius_ok;
  return out;
}

}  // namespace sedlqr
