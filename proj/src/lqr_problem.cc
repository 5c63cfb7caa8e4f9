#include "sedlqr/lqr_problem.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "sedlqr/error.h"

namespace sedlqr {

std::string_view DareMethodName(DareMethod method) {
  return method == DareMethod::kDoubling ? "doubling" : "value-iteration";
}

LqrProblem::LqrProblem(Topology topo, Eigen::MatrixXd a, Eigen::MatrixXd b,
                       Eigen::MatrixXd q, Eigen::MatrixXd r, Eigen::MatrixXd s)
    : topology(std::move(topo)),
      A(std::move(a)),
      B(std::move(b)),
      Q(std::move(q)),
      R(std::move(r)),
      S(std::move(s)) {
  const int nx = topology.n_x(), nu = topology.n_u();
  const auto shape = [](const Eigen::MatrixXd& m, int r, int c) {
    return m.rows() == r && m.cols() == c;
  };
  if (!shape(A, nx, nx) || !shape(B, nx, nu) || !shape(Q, nx, nx) ||
      !shape(R, nu, nu) || !shape(S, nu, nx)) {
    throw Error(ErrorKind::kShapeError,
                "problem matrices do not match the topology's dimensions");
  }
  for (const auto* m : {&A, &B, &Q, &R, &S}) {
    if (!m->allFinite()) {
      throw Error(ErrorKind::kNumericError, "non-finite problem matrix");
    }
  }
}

BlockMatrix LqrProblem::BlockA() const {
  return {A, topology, Space::kState, Space::kState};
}
BlockMatrix LqrProblem::BlockB() const {
  return {B, topology, Space::kState, Space::kInput};
}
BlockMatrix LqrProblem::BlockQ() const {
  return {Q, topology, Space::kState, Space::kState};
}
BlockMatrix LqrProblem::BlockR() const {
  return {R, topology, Space::kInput, Space::kInput};
}
BlockMatrix LqrProblem::BlockS() const {
  return {S, topology, Space::kInput, Space::kState};
}

namespace {

double MinSymEigen(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym,
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

double SchurMinEigenvalue(const LqrProblem& prob) {
  const Eigen::MatrixXd qinv_st = prob.Q.llt().solve(prob.S.transpose());
  return MinSymEigen(prob.R - prob.S * qinv_st);
}

void LqrProblem::Validate() const {
  constexpr double kTol = 1e-10;
  if (!(MinSymEigen(Q) > kTol)) {
    throw Error(ErrorKind::kInvalidProblem, "Q is not positive definite");
  }
  if (!(SchurMinEigenvalue(*this) > kTol)) {
    throw Error(ErrorKind::kInvalidProblem,
                "R - S Q^-1 S' is not positive definite");
  }
}

SystemConstants FitSystemConstants(const LqrProblem& prob) {
  const Topology& topo = prob.topology;
  const BlockMatrix mats[] = {prob.BlockA(), prob.BlockB(), prob.BlockQ(),
                              prob.BlockR(), prob.BlockS()};
  double gamma = SedCertificate::kGammaCap;
  for (const auto& m : mats) {
    const auto cert = FitSed(m, topo, FitMode::kEnvelope);
    if (!cert.degenerate) gamma = std::min(gamma, cert.gamma);
  }
  SystemConstants out;
  if (gamma <= 0.0) {
    gamma = 1.0;
    out.fallback_rate = true;
  }
  out.gamma_sys = gamma;
  double c[5];
  for (int k = 0; k < 5; ++k) c[k] = CertificateAtRate(mats[k], topo, gamma).c;
  out.a = std::max(1.0, c[0]);
  out.b = std::max(1.0, c[1]);
  out.q = std::max(1.0, c[2]);
  out.r = std::max(1.0, c[3]);
  out.s = c[4];
  return out;
}

}  // namespace sedlqr
