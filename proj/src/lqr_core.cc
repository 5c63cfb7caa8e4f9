#include "sedlqr/lqr_core.h"

#include <algorithm>
#include <cmath>

#include "sedlqr/block_matrix.h"
#include "sedlqr/error.h"

namespace sedlqr {

namespace {

Eigen::MatrixXd Sym(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

Eigen::MatrixXd RiccatiMap(const LqrProblem& prob, const Eigen::MatrixXd& p) {
  const auto& a = prob.A;
  const auto& b = prob.B;
  const Eigen::MatrixXd pb = p * b;
  const Eigen::MatrixXd rb = prob.R + b.transpose() * pb;
  const Eigen::MatrixXd nb = pb.transpose() * a + prob.S;
  return Sym(a.transpose() * p * a - nb.transpose() * rb.ldlt().solve(nb) +
             prob.Q);
}

constexpr double kDivergence = 1e12;

void CheckFinite(const Eigen::MatrixXd& p, int iter) {
  if (!p.allFinite() || p.norm() > kDivergence) {
    throw Error(ErrorKind::kRiccatiFailure,
                "Riccati iterate diverged at step " + std::to_string(iter));
  }
}

RiccatiSolution ValueIteration(const LqrProblem& prob) {
  constexpr int kMaxIter = 100000;
  Eigen::MatrixXd p = prob.Q;
  for (int it = 1; it <= kMaxIter; ++it) {
    Eigen::MatrixXd next = RiccatiMap(prob, p);
    CheckFinite(next, it);
    const double change = (next - p).norm();
    p = std::move(next);
    if (change < 1e-12 * p.norm()) {
      return {p, GainFromP(prob, p), RiccatiResidual(prob, p), it,
              DareMethod::kValueIteration};
    }
  }
  throw Error(ErrorKind::kRiccatiFailure,
              "value iteration did not converge in 100000 steps");
}

// Structure-preserving doubling on the cross-term-free form.
RiccatiSolution Doubling(const LqrProblem& prob) {
  const int n = prob.n_x();
  const Eigen::LDLT<Eigen::MatrixXd> rinv(prob.R);
  Eigen::MatrixXd a = prob.A - prob.B * rinv.solve(prob.S);
  Eigen::MatrixXd g = Sym(prob.B * rinv.solve(prob.B.transpose()));
  Eigen::MatrixXd h = Sym(prob.Q - prob.S.transpose() * rinv.solve(prob.S));
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  for (int it = 1; it <= 200; ++it) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> w(id + g * h);
    const Eigen::MatrixXd v1 = w.solve(a);
    const Eigen::MatrixXd v2 = w.solve(g);
    const Eigen::MatrixXd h_next = Sym(h + a.transpose() * h * v1);
    g = Sym(g + a * v2 * a.transpose());
    a = a * v1;
    CheckFinite(h_next, it);
    const double change = (h_next - h).norm();
    h = h_next;
    if (change <= 1e-15 * h.norm()) {
      // A few plain steps wash out the rounding the doubling leaves behind.
      Eigen::MatrixXd p = h;
      double residual = RiccatiResidual(prob, p);
      for (int k = 0; k < 5 && residual > 1e-12 * SpectralNorm(p); ++k) {
        p = RiccatiMap(prob, p);
        residual = RiccatiResidual(prob, p);
      }
      return {p, GainFromP(prob, p), residual, it, DareMethod::kDoubling};
    }
  }
  throw Error(ErrorKind::kRiccatiFailure,
              "doubling did not converge in 200 steps");
}

}  // namespace

RiccatiSolution SolveDare(const LqrProblem& prob,
                          std::optional<DareMethod> method) {
  prob.Validate();
  return method.value_or(prob.preferred_dare) == DareMethod::kDoubling
             ? Doubling(prob)
             : ValueIteration(prob);
}

double RiccatiResidual(const LqrProblem& prob, const Eigen::MatrixXd& p) {
  return SpectralNorm(p - RiccatiMap(prob, p));
}

Eigen::MatrixXd GainFromP(const LqrProblem& prob, const Eigen::MatrixXd& p) {
  const Eigen::MatrixXd pb = p * prob.B;
  const Eigen::MatrixXd rb = prob.R + prob.B.transpose() * pb;
  return rb.ldlt().solve(pb.transpose() * prob.A + prob.S);
}

double StabilityCertificate::Bound(int k) const {
  return tau * std::exp(-rho * k);
}

namespace {

double CertRate(const Eigen::MatrixXd& a, bool* capped) {
  const double radius = SpectralRadius(a);
  if (!(radius < 1.0 - 1e-12)) {
    throw Error(ErrorKind::kCertificateUnavailable,
                "spectral radius " + std::to_string(radius) + " is not below 1");
  }
  const double rho =
      radius > 0.0 ? -std::log(radius) * (1.0 - StabilityCertificate::kMargin)
                   : StabilityCertificate::kRhoCap;
  *capped = rho >= StabilityCertificate::kRhoCap;
  return std::min(rho, StabilityCertificate::kRhoCap);
}

// log of max_k ||A^k|| e^{rho k}; powers that vanish exactly are skipped.
double LogTransient(const Eigen::MatrixXd& a, double rho, int k_max) {
  double best = 0.0;  // k = 0 term, ||I|| = 1
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  for (int k = 1; k <= k_max; ++k) {
    power = power * a;
    const double norm = SpectralNorm(power);
    if (norm == 0.0) break;
    best = std::max(best, std::log(norm) + rho * k);
  }
  return best;
}

}  // namespace

StabilityCertificate FitStability(const Eigen::MatrixXd& a, int k_max) {
  return FitStabilityJoint({a}, k_max);
}

StabilityCertificate FitStabilityJoint(const std::vector<Eigen::MatrixXd>& as,
                                       int k_max) {
  StabilityCertificate cert;
  cert.horizon_checked = k_max;
  cert.rho = StabilityCertificate::kRhoCap;
  for (const auto& a : as) {
    bool capped = false;
    const double rho = CertRate(a, &capped);
    if (rho < cert.rho) cert.rho = rho, cert.capped = capped;
    if (rho == cert.rho) cert.capped = cert.capped || capped;
  }
  double log_tau = 0.0;
  for (const auto& a : as) {
    log_tau = std::max(log_tau, LogTransient(a, cert.rho, k_max));
  }
  // exp(log) can round below the exact maximum.
  cert.tau = std::exp(log_tau) * (1.0 + 1e-13);
  return cert;
}

bool VerifyStability(const Eigen::MatrixXd& a, double tau, double rho,
                     int k_max) {
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) power = power * a;
    const double norm = SpectralNorm(power);
    if (norm == 0.0) return true;
    if (std::log(norm) > std::log(tau) - rho * k) return false;
  }
  return true;
}

LyapunovSum SolveLyapunovG(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  if (!(SpectralRadius(a) < 1.0 - 1e-12)) {
    throw Error(ErrorKind::kUnstableInput,
                "Lyapunov sum needs spectral radius below 1");
  }
  LyapunovSum out;
  Eigen::MatrixXd g = q;
  Eigen::MatrixXd m = a;
  for (int it = 1; it <= 100; ++it) {
    const Eigen::MatrixXd update = Sym(m.transpose() * g * m);
    g += update;
    m = m * m;
    out.iterations = it;
    if (!g.allFinite()) {
      throw Error(ErrorKind::kNumericError, "Lyapunov doubling overflowed");
    }
    if (update.norm() < 1e-14 * g.norm()) break;
  }
  out.G = g;
  out.residual = SpectralNorm(a.transpose() * g * a - g + q);
  return out;
}

Eigen::MatrixXd ClosedLoopWeight(const LqrProblem& prob,
                                 const Eigen::MatrixXd& kp) {
  const Eigen::MatrixXd cross = kp.transpose() * prob.S;
  return Sym(prob.Q + kp.transpose() * prob.R * kp - cross - cross.transpose());
}

double ClosedLoopCost(const LqrProblem& prob, const Eigen::MatrixXd& kp) {
  const Eigen::MatrixXd acl = prob.A - prob.B * kp;
  if (!(SpectralRadius(acl) < 1.0 - 1e-12)) {
    throw Error(ErrorKind::kUnstableController,
                "closed loop A - B K is not stable");
  }
  return SolveLyapunovG(acl, ClosedLoopWeight(prob, kp)).G.trace();
}

bool GDecayCheck(const LyapunovSum& g, const Eigen::MatrixXd& a, double q_norm,
                 const StabilityCertificate& cert, int m_max,
                 double* worst_ratio) {
  const double scale = cert.tau * cert.tau * q_norm /
                       (1.0 - std::exp(-2.0 * cert.rho));
  Eigen::MatrixXd ga = g.G;
  double worst = 0.0;
  for (int m = 0; m <= m_max; ++m) {
    if (m > 0) ga = ga * a;
    const double lhs = SpectralNorm(ga);
    const double rhs = scale * std::exp(-cert.rho * m);
    if (lhs > 0.0) worst = std::max(worst, rhs > 0.0 ? lhs / rhs : INFINITY);
  }
  if (worst_ratio) *worst_ratio = worst;
  return worst <= 1.0 + 1e-12;
}

LqrProblem Prestabilize(const LqrProblem& prob, const Eigen::MatrixXd& k0) {
  if (k0.rows() != prob.n_u() || k0.cols() != prob.n_x()) {
    throw Error(ErrorKind::kShapeError, "K0 must be n_u x n_x");
  }
  LqrProblem out(prob.topology, prob.A - prob.B * k0, prob.B,
                 ClosedLoopWeight(prob, k0), prob.R, prob.S - prob.R * k0);
  out.name = prob.name;
  out.params = prob.params;
  out.preferred_dare = prob.preferred_dare;
  out.parameter_out_of_range = prob.parameter_out_of_range;
  return out;
}

Eigen::MatrixXd MapBackGain(const Eigen::MatrixXd& k_shifted,
                            const Eigen::MatrixXd& k0) {
  return k_shifted + k0;
}

LqrProblem StableForm(const LqrProblem& prob) {
  return prob.prestabilizer ? Prestabilize(prob, *prob.prestabilizer) : prob;
}

}  // namespace sedlqr
