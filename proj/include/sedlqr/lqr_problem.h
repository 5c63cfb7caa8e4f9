#pragma once

#include <map>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "sedlqr/block_matrix.h"
#include "sedlqr/topology.h"

namespace sedlqr {

enum class DareMethod { kValueIteration, kDoubling };
std::string_view DareMethodName(DareMethod method);

/// Continuous-time network system; A_c and B_c should only couple neighbours.
struct ContinuousSystem {
  Topology topology;
  Eigen::MatrixXd Ac, Bc, Qc, Rc;
};

/// Sampled-data origin of a discrete problem.
struct Discretization {
  ContinuousSystem continuous;
  double dt = 0.0;
};

/// x_{t+1} = A x_t + B u_t + w_t with stage cost x'Qx + u'Ru + 2u'Sx.
struct LqrProblem {
  LqrProblem(Topology topology, Eigen::MatrixXd A, Eigen::MatrixXd B,
             Eigen::MatrixXd Q, Eigen::MatrixXd R, Eigen::MatrixXd S);

  Topology topology;
  Eigen::MatrixXd A, B, Q, R, S;

  std::string name = "custom";
  /// Generator parameters, written into archive manifests.
  std::map<std::string, std::string> params;
  DareMethod preferred_dare = DareMethod::kValueIteration;
  /// Gain K0 that makes A - B K0 stable when A itself is not.
  std::optional<Eigen::MatrixXd> prestabilizer;
  std::optional<Discretization> discretization;
  /// Set by generators whose parameters left the documented range.
  bool parameter_out_of_range = false;

  int n_x() const { return static_cast<int>(A.rows()); }
  int n_u() const { return static_cast<int>(B.cols()); }

  BlockMatrix BlockA() const;
  BlockMatrix BlockB() const;
  BlockMatrix BlockQ() const;
  BlockMatrix BlockR() const;
  BlockMatrix BlockS() const;

  /// Throws invalid-problem unless Q > 0 and R - S Q^-1 S' > 0, judged by a
  /// smallest eigenvalue above 1e-10.
  void Validate() const;
};

/// Smallest eigenvalue of the symmetric part of R - S Q^-1 S'.
double SchurMinEigenvalue(const LqrProblem& prob);

/// SED constants (a, b, q, r, s, gamma_sys) for A, B, Q, R, S at one common
/// rate. gamma_sys is the smallest envelope rate over the nonzero matrices;
/// when that is 0 the constants are taken at rate 1 instead (fallback flag).
/// a, b, q, r are clamped to at least 1.
struct SystemConstants {
  double a = 1, b = 1, q = 1, r = 1, s = 0;
  double gamma_sys = 0;
  bool fallback_rate = false;
};

SystemConstants FitSystemConstants(const LqrProblem& prob);

}  // namespace sedlqr
