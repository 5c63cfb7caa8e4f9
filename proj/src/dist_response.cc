#include "sedlqr/dist_response.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "sedlqr/block_matrix.h"
#include "sedlqr/error.h"

namespace sedlqr {

Eigen::MatrixXd DisturbanceController::Stacked() const {
  if (blocks.empty()) return {};
  const auto rows = blocks.front().rows();
  Eigen::MatrixXd out(rows * horizon(), blocks.front().cols());
  for (int k = 0; k < horizon(); ++k) out.middleRows(k * rows, rows) = blocks[k];
  return out;
}

DisturbanceController DisturbanceController::FromStacked(
    const Eigen::MatrixXd& stacked, int horizon) {
  if (horizon < 1 || stacked.rows() % horizon != 0) {
    throw Error(ErrorKind::kShapeError, "stacked rows not divisible by H");
  }
  const auto rows = stacked.rows() / horizon;
  DisturbanceController out;
  for (int k = 0; k < horizon; ++k) {
    out.blocks.push_back(stacked.middleRows(k * rows, rows));
  }
  return out;
}

Eigen::MatrixXd DisturbanceSystem::MBlock(int k, int m) const {
  const int nu = n_u();
  return M.block((k - 1) * nu, (m - 1) * nu, nu, nu);
}

Eigen::MatrixXd DisturbanceSystem::JBlock(int k) const {
  return J.middleRows((k - 1) * n_u(), n_u());
}

DisturbanceSystem Assemble(const LqrProblem& prob, const LyapunovSum& g,
                           int horizon, const StabilityCertificate& cert) {
  if (horizon < 1) throw Error(ErrorKind::kInvalidInput, "H must be >= 1");
  if (!(SpectralRadius(prob.A) < 1.0 - 1e-12)) {
    throw Error(ErrorKind::kUnstableInput,
                "disturbance response needs a stable A");
  }
  const int nu = prob.n_u(), nx = prob.n_x();
  const auto& a = prob.A;
  const auto& b = prob.B;
  const Eigen::MatrixXd btg = b.transpose() * g.G;

  // A^k, k = 0..H
  std::vector<Eigen::MatrixXd> apow{Eigen::MatrixXd::Identity(nx, nx)};
  for (int k = 1; k <= horizon; ++k) apow.push_back(apow.back() * a);

  DisturbanceSystem ds;
  ds.horizon = horizon;
  ds.G = g;
  ds.cert = cert;
  ds.M.resize(horizon * nu, horizon * nu);
  ds.J.resize(horizon * nu, nx);
  const Eigen::MatrixXd diag = btg * b + prob.R;
  std::vector<Eigen::MatrixXd> lower(horizon);  // M_{m+d, m} by offset d
  lower[0] = 0.5 * (diag + diag.transpose());
  for (int d = 1; d < horizon; ++d) {
    lower[d] = btg * apow[d] * b + prob.S * apow[d - 1] * b;
  }
  for (int k = 0; k < horizon; ++k) {
    for (int m = 0; m <= k; ++m) {
      ds.M.block(k * nu, m * nu, nu, nu) = lower[k - m];
      ds.M.block(m * nu, k * nu, nu, nu) = lower[k - m].transpose();
    }
    ds.J.middleRows(k * nu, nu) = btg * apow[k + 1] + prob.S * apow[k];
  }

  const double bn = SpectralNorm(b);
  const double e2 = 1.0 - std::exp(-2.0 * cert.rho);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rs(prob.R,
                                                    Eigen::EigenvaluesOnly);
  ds.lambda_min_bound = SchurMinEigenvalue(prob);
  ds.lambda_max_bound =
      rs.eigenvalues()(nu - 1) +
      4.0 * cert.tau * cert.tau *
          (bn * bn * SpectralNorm(prob.Q) + bn * SpectralNorm(prob.S)) /
          (e2 * e2);
  return ds;
}

DisturbanceController SolveDirect(const DisturbanceSystem& ds) {
  const Eigen::LLT<Eigen::MatrixXd> llt(ds.M);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::kSingularM, "M is not positive definite");
  }
  return DisturbanceController::FromStacked(-llt.solve(ds.J), ds.horizon);
}

double DirectResidual(const DisturbanceSystem& ds,
                      const DisturbanceController& l) {
  return SpectralNorm(ds.M * l.Stacked() + ds.J);
}

namespace {

struct LambdaPair {
  double min, max;
};

LambdaPair NeumannLambdas(const DisturbanceSystem& ds, bool exact) {
  if (!exact) return {ds.lambda_min_bound, ds.lambda_max_bound};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ds.M,
                                                    Eigen::EigenvaluesOnly);
  return {es.eigenvalues()(0), es.eigenvalues()(es.eigenvalues().size() - 1)};
}

}  // namespace

DisturbanceController SolveNeumann(const DisturbanceSystem& ds, int t,
                                   bool exact_lambda) {
  if (t < 1) throw Error(ErrorKind::kInvalidInput, "t must be >= 1");
  const double lmax = NeumannLambdas(ds, exact_lambda).max;
  Eigen::MatrixXd term = ds.J;
  Eigen::MatrixXd sum = term;
  for (int s = 1; s < t; ++s) {
    term -= ds.M * term / lmax;
    sum += term;
  }
  return DisturbanceController::FromStacked(-sum / lmax, ds.horizon);
}

NeumannSweep NeumannErrorSweep(const DisturbanceSystem& ds,
                               const DisturbanceController& direct, int t_max,
                               bool exact_lambda) {
  const auto [lmin, lmax] = NeumannLambdas(ds, exact_lambda);
  NeumannSweep out;
  out.lambda_min = lmin;
  out.lambda_max = lmax;
  const double jn = SpectralNorm(ds.J);
  const Eigen::MatrixXd target = direct.Stacked();
  Eigen::MatrixXd term = ds.J;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(ds.J.rows(), ds.J.cols());
  for (int t = 1; t <= t_max; ++t) {
    if (t > 1) term -= ds.M * term / lmax;
    sum += term;
    const double err = SpectralNorm(target + sum / lmax);
    const double bound = jn / lmin * std::exp(-lmin / lmax * t);
    out.error.push_back(err);
    out.bound.push_back(bound);
    // The direct solve itself carries rounding of order eps ||L||.
    if (err > bound + 1e-12 * (1.0 + SpectralNorm(target))) ++out.violations;
  }
  return out;
}

double DisturbanceCost(const DisturbanceSystem& ds,
                       const DisturbanceController& l) {
  const Eigen::MatrixXd ls = l.Stacked();
  return ds.G.G.trace() + 2.0 * (ds.J.transpose() * ls).trace() +
         (ls.transpose() * ds.M * ls).trace();
}

Lemma3Result Lemma3Gap(const Eigen::MatrixXd& k,
                       const DisturbanceController& l, const LqrProblem& prob,
                       const StabilityCertificate& cert) {
  Lemma3Result out;
  out.gap = SpectralNorm(k + l.blocks.at(0));
  const double bn = SpectralNorm(prob.B), kn = SpectralNorm(k);
  const double tau = cert.tau;
  out.coefficient = 2.0 * tau * tau * tau *
                    (bn * bn * kn * SpectralNorm(prob.Q) +
                     bn * kn * SpectralNorm(prob.S)) /
                    (SchurMinEigenvalue(prob) *
                     std::pow(1.0 - std::exp(-2.0 * cert.rho), 2.5));
  out.bound = out.coefficient * std::exp(-l.horizon() * cert.rho);
  return out;
}

EigenBoundsReport EigenBoundsCheck(const DisturbanceSystem& ds) {
  EigenBoundsReport out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ds.M,
                                                    Eigen::EigenvaluesOnly);
  out.lambda_min = es.eigenvalues()(0);
  out.lambda_max = es.eigenvalues()(es.eigenvalues().size() - 1);
  out.lower_bound = ds.lambda_min_bound;
  out.upper_bound = ds.lambda_max_bound;
  out.ok = out.lambda_min >= out.lower_bound - 1e-8 &&
           out.lambda_max <= out.upper_bound + 1e-8;
  return out;
}

namespace {

// Scans ||[X]_ij|| / (c e^{-gamma dist(i,j)}) and keeps the worst block.
double ScanBlocks(const BlockMatrix& x, const Topology& topo, double c,
                  double gamma, const std::string& name, int k, int m,
                  std::optional<BlockOffender>* worst) {
  const Eigen::MatrixXd norms = x.BlockNorms();
  double top = 0.0;
  for (int i = 0; i < norms.rows(); ++i) {
    for (int j = 0; j < norms.cols(); ++j) {
      const double v = norms(i, j);
      if (v == 0.0) continue;
      const double bound = c * std::exp(-gamma * topo.distance(i, j));
      const double ratio = bound > 0.0 ? v / bound : INFINITY;
      top = std::max(top, ratio);
      if (!*worst || ratio > (*worst)->ratio) {
        *worst = BlockOffender{name, k, m, i, j, ratio};
      }
    }
  }
  return top;
}

constexpr double kRatioSlack = 1.0 + 1e-12;

}  // namespace

MjSedReport MjSedCheck(const DisturbanceSystem& ds, const LqrProblem& prob,
                       const SystemConstants& consts) {
  const Topology& topo = prob.topology;
  const double n = topo.agent_count();
  const double tau = ds.cert.tau, rho = ds.cert.rho;
  const double head =
      tau * tau * SpectralNorm(prob.Q) / (1.0 - std::exp(-2.0 * rho)) +
      2.0 * consts.q;
  const double s_term = consts.s + tau * SpectralNorm(prob.S);
  MjSedReport out;
  out.c_m = consts.b * consts.b * n * n * head + consts.b * n * s_term + consts.r;
  out.c_j = consts.b * n * head + s_term;
  out.gamma_m = consts.gamma_sys * rho / (rho + std::log(consts.a * n));

  std::optional<BlockOffender> worst;
  for (int k = 1; k <= ds.horizon; ++k) {
    for (int m = 1; m <= ds.horizon; ++m) {
      const BlockMatrix blk(ds.MBlock(k, m), topo, Space::kInput, Space::kInput);
      out.worst_ratio_m = std::max(
          out.worst_ratio_m,
          ScanBlocks(blk, topo, out.c_m, out.gamma_m, "M", k, m, &worst));
    }
  }
  std::optional<BlockOffender> worst_j;
  for (int k = 1; k <= ds.horizon; ++k) {
    const BlockMatrix blk(ds.JBlock(k), topo, Space::kInput, Space::kState);
    out.worst_ratio_j = std::max(
        out.worst_ratio_j,
        ScanBlocks(blk, topo, out.c_j, out.gamma_m, "J", k, 0, &worst_j));
  }
  if (worst_j && (!worst || worst_j->ratio > worst->ratio)) worst = worst_j;
  out.ok = out.worst_ratio_m <= kRatioSlack && out.worst_ratio_j <= kRatioSlack;
  if (!out.ok) out.offender = worst;
  return out;
}

FormalConstants FormalDecayConstants(const DisturbanceSystem& ds,
                                     const LqrProblem& prob,
                                     const SystemConstants& consts,
                                     const Eigen::MatrixXd& k) {
  const MjSedReport mj = MjSedCheck(ds, prob, consts);
  const double n = prob.topology.agent_count();
  const double tau = ds.cert.tau, rho = ds.cert.rho;
  const double e2 = 1.0 - std::exp(-2.0 * rho);
  const double lmin = ds.lambda_min_bound, lmax = ds.lambda_max_bound;
  const double bn = SpectralNorm(prob.B);
  const double qn = SpectralNorm(prob.Q), sn = SpectralNorm(prob.S);
  const double kn = SpectralNorm(k);
  const double base = consts.gamma_sys * rho * lmin / (rho + std::log(consts.a * n));

  FormalConstants out;
  out.c_l = 2.0 * tau * tau * (bn * qn + sn) / (e2 * e2 * lmin) + 2.0 * mj.c_j;
  out.gamma_l =
      base / (lmax * std::log(mj.c_m * n * ds.horizon + 1.0) + lmin);
  const double lemma3 = 2.0 * tau * tau * tau * (bn * bn * kn * qn + bn * kn * sn) /
                        (lmin * std::pow(e2, 2.5));
  out.c_k = lemma3 + out.c_l;
  out.gamma_k = base / (lmax * std::log(consts.gamma_sys * mj.c_m * n * n +
                                        mj.c_m * n + 1.0) +
                        lmin);
  return out;
}

FormalSedReport FormalSedCheck(const DisturbanceSystem& ds,
                               const LqrProblem& prob,
                               const SystemConstants& consts,
                               const Eigen::MatrixXd& k,
                               const DisturbanceController& l) {
  FormalSedReport out;
  out.constants = FormalDecayConstants(ds, prob, consts, k);
  const Topology& topo = prob.topology;
  std::optional<BlockOffender> worst_l, worst_k;
  for (int h = 1; h <= l.horizon(); ++h) {
    const BlockMatrix blk(l.blocks[h - 1], topo, Space::kInput, Space::kState);
    out.worst_ratio_l = std::max(
        out.worst_ratio_l, ScanBlocks(blk, topo, out.constants.c_l,
                                      out.constants.gamma_l, "L", h, 0, &worst_l));
  }
  out.worst_ratio_k = ScanBlocks(BlockMatrix(k, topo, Space::kInput, Space::kState),
                                 topo, out.constants.c_k, out.constants.gamma_k,
                                 "K", 0, 0, &worst_k);
  out.ok = out.worst_ratio_l <= kRatioSlack && out.worst_ratio_k <= kRatioSlack;
  if (!out.ok) {
    out.offender = (worst_l && (!worst_k || worst_l->ratio >= worst_k->ratio))
                       ? worst_l
                       : worst_k;
  }
  return out;
}

}  // namespace sedlqr

namespace sedlqr {

std::vector<HorizonRow> HorizonSweep(const DisturbanceSystem& ds,
                                     const LqrProblem& prob,
                                     const Eigen::MatrixXd& k,
                                     const StabilityCertificate& joint_cert) {
  const Eigen::LLT<Eigen::MatrixXd> llt(ds.M);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::kSingularM, "M is not positive definite");
  }
  const Eigen::MatrixXd factor = llt.matrixL();
  const int nu = ds.n_u();
  std::vector<HorizonRow> rows;
  for (int h = 1; h <= ds.horizon; ++h) {
    const int size = h * nu;
    const auto lf = factor.topLeftCorner(size, size).triangularView<Eigen::Lower>();
    const Eigen::MatrixXd jh = ds.J.topRows(size);
    Eigen::MatrixXd l = lf.solve(jh);
    lf.transpose().solveInPlace(l);
    l = -l;
    const auto ctrl = DisturbanceController::FromStacked(l, h);
    HorizonRow row;
    row.horizon = h;
    row.lemma3 = Lemma3Gap(k, ctrl, prob, joint_cert);
    const Eigen::MatrixXd mh = ds.M.topLeftCorner(size, size);
    row.cost = ds.G.G.trace() + 2.0 * (jh.transpose() * l).trace() +
               (l.transpose() * mh * l).trace();
    row.residual = SpectralNorm(mh * l + jh);
    row.j_norm = SpectralNorm(jh);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace sedlqr
