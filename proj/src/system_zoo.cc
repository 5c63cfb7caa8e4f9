#include "sedlqr/system_zoo.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sedlqr/error.h"
#include "sedlqr/random.h"

namespace sedlqr {

namespace {

std::string Str(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Eigen::VectorXd Broadcast(const std::vector<double>& v, int n,
                          const char* what) {
  if (v.empty()) return Eigen::VectorXd::Ones(n);
  if (v.size() == 1) return Eigen::VectorXd::Constant(n, v[0]);
  if (static_cast<int>(v.size()) != n) {
    throw Error(ErrorKind::kInvalidInput,
                std::string(what) + " needs 1 or N coefficients");
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), n);
}

Eigen::MatrixXd CycleLaplacian(int n) {
  Eigen::MatrixXd l = 2.0 * Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    l(i, (i + 1) % n) -= 1.0;
    l(i, (i + n - 1) % n) -= 1.0;
  }
  return l;
}

// Taylor series of e^X, for ||X|| <= 1/2.
Eigen::MatrixXd TaylorExp(const Eigen::MatrixXd& x) {
  const int n = static_cast<int>(x.rows());
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = sum;
  for (int k = 1; k < 40; ++k) {
    term = term * x / k;
    sum += term;
    if (term.lpNorm<Eigen::Infinity>() <=
        1e-18 * sum.lpNorm<Eigen::Infinity>()) {
      break;
    }
  }
  return sum;
}

double InfNorm(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

LqrProblem HeatEquationSystem(int n, double eta, std::vector<double> b,
                              std::vector<double> q, std::vector<double> r) {
  Topology topo = Topology::Cycle(n, 1, 1);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  LqrProblem prob(topo, id - eta * CycleLaplacian(n),
                  (eta * Broadcast(b, n, "b")).asDiagonal().toDenseMatrix(),
                  Broadcast(q, n, "q").asDiagonal().toDenseMatrix(),
                  Broadcast(r, n, "r").asDiagonal().toDenseMatrix(),
                  Eigen::MatrixXd::Zero(n, n));
  prob.name = "heat-cycle";
  prob.params = {{"N", std::to_string(n)}, {"eta", Str(eta)}};
  prob.parameter_out_of_range = eta > 0.25 || eta < 0.0;
  prob.Validate();
  return prob;
}

LqrProblem StableHeatEquationSystem(int n, double eta, double rho,
                                    double alpha) {
  LqrProblem prob = HeatEquationSystem(n, eta, {}, {}, {alpha});
  prob.A *= std::exp(-rho);
  prob.name = "heat-cycle-stable";
  prob.params["rho"] = Str(rho);
  prob.params["alpha"] = Str(alpha);
  return prob;
}

LqrProblem CounterexampleSystem(int n, double a) {
  if (n < 2) {
    throw Error(ErrorKind::kInvalidTopology, "counterexample needs N >= 2");
  }
  Topology topo = n == 2 ? Topology::FromEdgeList(2, {{0, 1}}, {1, 1}, {1, 1})
                         : Topology::Cycle(n, 1, 1);
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i + 1 < n; ++i) b(i, i + 1) = 1.0;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  LqrProblem prob(topo, a * id, b, id, id, Eigen::MatrixXd::Zero(n, n));
  prob.name = "counterexample";
  prob.params = {{"N", std::to_string(n)}, {"a", Str(a)}};
  return prob;
}

ContinuousSystem ThermalGridContinuous(int rows, int cols,
                                       const ThermalOptions& options,
                                       bool* clamped) {
  Topology topo = Topology::Grid(rows, cols, 1, 1);
  const int n = topo.agent_count();
  std::vector<double> v = options.capacitances;
  bool any_clamped = false;
  if (v.empty()) {
    CounterRng rng(options.seed, 0);
    for (int i = 0; i < n; ++i) v.push_back(200.0 + 20.0 * rng.Normal());
  }
  if (static_cast<int>(v.size()) != n) {
    throw Error(ErrorKind::kInvalidInput, "need one capacitance per zone");
  }
  for (double& vi : v) {
    if (vi < kMinCapacitance) {
      vi = kMinCapacitance;
      any_clamped = true;
    }
  }
  if (!(options.zeta > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "zeta must be positive");
  }
  if (clamped) *clamped = any_clamped;

  Eigen::MatrixXd ac = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : topo.edges()) {
    for (auto [i, j] : {std::pair{e.i, e.j}, std::pair{e.j, e.i}}) {
      const double g = 1.0 / (v[i] * options.zeta);
      ac(i, j) += g;
      ac(i, i) -= g;
    }
  }
  Eigen::MatrixXd bc = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) bc(i, i) = 1.0 / v[i];
  return {topo, ac, bc, options.alpha * Eigen::MatrixXd::Identity(n, n),
          Eigen::MatrixXd::Identity(n, n)};
}

LqrProblem ThermalGridSystem(int rows, int cols,
                             const ThermalOptions& options) {
  bool clamped = false;
  LqrProblem prob =
      Discretize(ThermalGridContinuous(rows, cols, options, &clamped),
                 options.dt);
  prob.name = "thermal-grid";
  prob.params = {{"rows", std::to_string(rows)},
                 {"cols", std::to_string(cols)},
                 {"zeta", Str(options.zeta)},
                 {"alpha", Str(options.alpha)},
                 {"dt", Str(options.dt)},
                 {"seed", std::to_string(options.seed)}};
  if (clamped) prob.params["capacitance_clamped"] = "true";
  prob.parameter_out_of_range = clamped;
  return prob;
}

ContinuousSystem SwingContinuous(const Topology& grid,
                                 const SwingOptions& options) {
  const int n = grid.agent_count();
  Topology topo = grid.WithDims(std::vector<int>(n, 2), std::vector<int>(n, 1));
  const double scale = options.v_ref * options.v_ref / options.inertia;
  Eigen::MatrixXd ac = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) ac(2 * i, 2 * i + 1) = 1.0;
  for (const Edge& e : topo.edges()) {
    if (!(e.weight > 0.0)) {
      throw Error(ErrorKind::kInvalidInput,
                  "line susceptances must be positive");
    }
    const double k = e.weight * scale;
    for (auto [i, j] : {std::pair{e.i, e.j}, std::pair{e.j, e.i}}) {
      ac(2 * i + 1, 2 * j) -= k;
      ac(2 * i + 1, 2 * i) += k;
    }
  }
  Eigen::MatrixXd bc = Eigen::MatrixXd::Zero(2 * n, n);
  Eigen::MatrixXd qc = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    bc(2 * i + 1, i) = options.b_gain;
    qc(2 * i, 2 * i) = options.alpha1;
    qc(2 * i + 1, 2 * i + 1) = options.alpha2;
  }
  return {topo, ac, bc, qc, Eigen::MatrixXd::Identity(n, n)};
}

LqrProblem SwingDynamicsSystem(const Topology& grid,
                               const SwingOptions& options) {
  LqrProblem prob = Discretize(SwingContinuous(grid, options), options.dt);
  prob.name = "swing";
  prob.params = {{"N", std::to_string(grid.agent_count())},
                 {"v_ref", Str(options.v_ref)},
                 {"inertia", Str(options.inertia)},
                 {"b_gain", Str(options.b_gain)},
                 {"alpha1", Str(options.alpha1)},
                 {"alpha2", Str(options.alpha2)},
                 {"dt", Str(options.dt)}};
  return prob;
}

Topology SyntheticBusNetwork(int n, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorKind::kInvalidTopology, "need at least 2 buses");
  CounterRng pos_rng(seed, 1), line_rng(seed, 2);
  std::vector<Eigen::Vector2d> pts(n);
  for (auto& p : pts) p = {pos_rng.Uniform(), pos_rng.Uniform()};
  const double radius = std::sqrt(1.6 * std::log(n) / (M_PI * n));

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if ((pts[i] - pts[j]).norm() < radius) pairs.emplace_back(i, j);
    }
  }
  // Union-find, then link each stray component to its nearest outside bus.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [i, j] : pairs) parent[find(i)] = find(j);
  for (;;) {
    const int root0 = find(0);
    int best_i = -1, best_j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (find(i) == root0) continue;
      for (int j = 0; j < n; ++j) {
        if (find(j) != root0) continue;
        const double d = (pts[i] - pts[j]).norm();
        if (d < best) best = d, best_i = i, best_j = j;
      }
    }
    if (best_i < 0) break;
    pairs.emplace_back(std::min(best_i, best_j), std::max(best_i, best_j));
    parent[find(best_i)] = root0;
  }
  std::vector<Edge> edges;
  for (auto [i, j] : pairs) {
    edges.push_back({i, j, line_rng.Uniform(0.5e-6, 1.5e-6)});
  }
  return Topology::FromEdgeList(n, std::move(edges), std::vector<int>(n, 1),
                                std::vector<int>(n, 1));
}

LqrProblem RandomStableSedSystem(std::uint64_t seed) {
  CounterRng rng(seed, 3);
  const int n = 3 + static_cast<int>(rng.Uniform() * 18);
  std::vector<int> sd(n), id(n);
  for (int i = 0; i < n; ++i) {
    sd[i] = 1 + static_cast<int>(rng.Uniform() * 2);
    id[i] = static_cast<int>(rng.Uniform() * 3);
  }
  id[0] = std::max(id[0], 1);
  Topology topo = Topology::Cycle(n, 1, 1).WithDims(sd, id);
  const int nx = topo.n_x(), nu = topo.n_u();

  const auto banded = [&](Space rows, Space cols, double scale) {
    const auto& rd = topo.dims(rows);
    const auto& cd = topo.dims(cols);
    BlockMatrix m(Eigen::MatrixXd::Zero(std::accumulate(rd.begin(), rd.end(), 0),
                                        std::accumulate(cd.begin(), cd.end(), 0)),
                  rd, cd);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (topo.distance(i, j) > 1) continue;
        Eigen::MatrixXd blk(rd[i], cd[j]);
        for (int r = 0; r < blk.rows(); ++r) {
          for (int c = 0; c < blk.cols(); ++c) blk(r, c) = scale * rng.Normal();
        }
        m.set_block(i, j, blk);
      }
    }
    return m.data();
  };

  Eigen::MatrixXd a = banded(Space::kState, Space::kState, 1.0);
  const double target = rng.Uniform(0.3, 0.9);
  const double radius = SpectralRadius(a);
  if (radius > 0.0) a *= target / radius;
  const Eigen::MatrixXd b = banded(Space::kState, Space::kInput, 0.5);
  const Eigen::MatrixXd x = banded(Space::kState, Space::kState, 0.3);
  const Eigen::MatrixXd q =
      Eigen::MatrixXd::Identity(nx, nx) + x * x.transpose();
  const Eigen::MatrixXd r =
      rng.Uniform(0.5, 2.0) * Eigen::MatrixXd::Identity(nu, nu);
  Eigen::MatrixXd s = banded(Space::kInput, Space::kState, 0.1);

  LqrProblem prob(topo, a, b, q, r, s);
  while (SchurMinEigenvalue(prob) < 0.1) prob.S *= 0.5;
  prob.name = "random-sed";
  prob.params = {{"seed", std::to_string(seed)}};
  prob.Validate();
  return prob;
}

Eigen::MatrixXd MatrixExponential(const Eigen::MatrixXd& a, double t) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::kShapeError, "exponential of non-square matrix");
  }
  if (!a.allFinite() || !std::isfinite(t)) {
    throw Error(ErrorKind::kNumericError, "non-finite exponential input");
  }
  const Eigen::MatrixXd x = t * a;
  const double norm = InfNorm(x);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  Eigen::MatrixXd e = TaylorExp(x / std::ldexp(1.0, squarings));
  for (int k = 0; k < squarings; ++k) e = e * e;
  return e;
}

Eigen::MatrixXd PhiIntegral(const Eigen::MatrixXd& a, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::kInvalidInput, "dt must be positive");
  if (!a.allFinite()) {
    throw Error(ErrorKind::kNumericError, "non-finite exponential input");
  }
  const int n = static_cast<int>(a.rows());
  const Eigen::MatrixXd x = dt * a;
  if (InfNorm(x) <= 1.0) {
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd sum = term;
    for (int k = 1; k < 60; ++k) {
      term = term * x / (k + 1);
      sum += term;
      if (term.norm() < 1e-16 * sum.norm()) break;
    }
    return dt * sum;
  }
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  aug.topLeftCorner(n, n) = a;
  aug.topRightCorner(n, n).setIdentity();
  return MatrixExponential(aug, dt).topRightCorner(n, n);
}

LqrProblem Discretize(const ContinuousSystem& sys, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::kInvalidInput, "dt must be positive");
  LqrProblem prob(sys.topology, MatrixExponential(sys.Ac, dt),
                  PhiIntegral(sys.Ac, dt) * sys.Bc, dt * sys.Qc, dt * sys.Rc,
                  Eigen::MatrixXd::Zero(sys.Bc.cols(), sys.Ac.rows()));
  prob.name = "discretized";
  prob.preferred_dare = DareMethod::kDoubling;
  prob.discretization = Discretization{sys, dt};
  prob.params["dt"] = Str(dt);
  prob.Validate();
  return prob;
}

namespace {

// Largest relative excess of ||[X]_ij|| over c x^d.
double PowerExcess(const BlockMatrix& m, const Topology& topo, double c,
                   double x) {
  const Eigen::MatrixXd norms = m.BlockNorms();
  double worst = 0.0;
  for (int i = 0; i < norms.rows(); ++i) {
    for (int j = 0; j < norms.cols(); ++j) {
      const double bound = c * std::pow(x, topo.distance(i, j));
      const double v = norms(i, j);
      if (v <= bound) continue;
      worst = std::max(worst, bound > 0.0
                                  ? (v - bound) / bound
                                  : std::numeric_limits<double>::infinity());
    }
  }
  return worst;
}

}  // namespace

Prop5Report Prop5Check(const ContinuousSystem& sys, double dt,
                       const LqrProblem& prob) {
  Prop5Report rep;
  const double ac = SpectralNorm(sys.Ac);
  const double bc = SpectralNorm(sys.Bc);
  const double x = dt * ac;
  rep.ratio = x;
  rep.rate = -std::log(x);
  rep.applicable = x < 1.0;
  if (!rep.applicable) return rep;

  rep.c_a = std::exp(x);
  rep.c_b_stated = dt * dt * ac * bc * std::exp(x);
  rep.c_b_series = ac > 0.0 ? bc * std::exp(x) / ac : dt * bc;
  const Topology& topo = prob.topology;
  rep.excess_a = PowerExcess(prob.BlockA(), topo, rep.c_a, x);
  rep.excess_b_stated = PowerExcess(prob.BlockB(), topo, rep.c_b_stated, x);
  if (ac > 0.0) {
    rep.excess_b_series = PowerExcess(prob.BlockB(), topo, rep.c_b_series, x);
  } else {
    // B = dt Bc exactly: neighbour support with norm at most dt ||Bc||.
    rep.excess_b_series = PowerExcess(prob.BlockB(), topo, rep.c_b_series, 1.0);
    const Eigen::MatrixXd norms = prob.BlockB().BlockNorms();
    for (int i = 0; i < norms.rows(); ++i) {
      for (int j = 0; j < norms.cols(); ++j) {
        if (topo.distance(i, j) > 1 && norms(i, j) > 0.0) {
          rep.excess_b_series = std::numeric_limits<double>::infinity();
        }
      }
    }
  }
  // Rounding slack on bounds that are met with equality in exact arithmetic.
  constexpr double kSlack = 1e-12;
  rep.a_holds = rep.excess_a <= kSlack;
  rep.b_stated_holds = rep.excess_b_stated <= kSlack;
  rep.b_series_holds = rep.excess_b_series <= kSlack;
  return rep;
}

}  // namespace sedlqr
