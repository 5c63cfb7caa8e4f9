#include "sedlqr/simulation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <thread>

#include "sedlqr/error.h"
#include "sedlqr/lqr_core.h"
#include "sedlqr/random.h"

namespace sedlqr {

int ThreadBudget() {
  if (const char* env = std::getenv("SEDLQR_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

constexpr double kDivergence = 1e9;

// Runs body(trial) for every trial; results land in per-trial slots so the
// schedule never affects the output.
void ForEachTrial(int trials, const std::function<void(int)>& body) {
  const int workers = std::min(trials, ThreadBudget());
  if (workers <= 1) {
    for (int r = 0; r < trials; ++r) body(r);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(trials);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int r; (r = next++) < trials;) {
        try {
          body(r);
        } catch (...) {
          errors[r] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

long ResolveBurnIn(const RolloutConfig& cfg, const Eigen::MatrixXd& a) {
  if (cfg.horizon < 1 || cfg.trials < 1) {
    throw Error(ErrorKind::kInvalidInput, "need T >= 1 and trials >= 1");
  }
  long burn = cfg.burn_in;
  if (burn < 0) {
    const double rho = FitStability(a, 50).rho;
    burn = static_cast<long>(std::ceil(10.0 / rho));
    burn = std::min(burn, cfg.horizon / 2);
  }
  if (burn >= cfg.horizon) {
    throw Error(ErrorKind::kInvalidInput, "burn-in must be below T");
  }
  return burn;
}

Eigen::VectorXd InitialState(const RolloutConfig& cfg, int n) {
  if (cfg.x0) {
    if (cfg.x0->size() != n) throw Error(ErrorKind::kShapeError, "x0 size");
    return *cfg.x0;
  }
  return cfg.noise_free ? Eigen::VectorXd::Ones(n) : Eigen::VectorXd::Zero(n);
}

void Draw(CounterRng& rng, Eigen::VectorXd& w) {
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.Normal();
}

void CheckDivergence(const Eigen::VectorXd& x, long t) {
  if (!(x.norm() <= kDivergence)) {
    throw Error(ErrorKind::kDivergenceDetected,
                "state norm exceeded 1e9 at step " + std::to_string(t));
  }
}

RolloutResult Summarize(std::vector<double> means, long burn) {
  RolloutResult out;
  out.burn_in = burn;
  const double n = means.size();
  double sum = 0.0;
  for (double m : means) sum += m;
  out.mean = sum / n;
  if (means.size() > 1) {
    double ss = 0.0;
    for (double m : means) ss += (m - out.mean) * (m - out.mean);
    out.stderr_ = std::sqrt(ss / (n - 1) / n);
  }
  out.trial_means = std::move(means);
  return out;
}

}  // namespace

RolloutResult RolloutStateFeedback(const LqrProblem& prob,
                                   const Eigen::MatrixXd& kp,
                                   const RolloutConfig& cfg) {
  const Eigen::MatrixXd acl = prob.A - prob.B * kp;
  const Eigen::MatrixXd qcl = ClosedLoopWeight(prob, kp);
  const long burn = ResolveBurnIn(cfg, acl);
  const int n = prob.n_x();
  std::vector<double> means(cfg.trials);
  ForEachTrial(cfg.trials, [&](int r) {
    CounterRng rng(cfg.seed, r);
    Eigen::VectorXd x = InitialState(cfg, n);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n), next(n);
    double acc = 0.0;
    for (long t = 0; t < cfg.horizon; ++t) {
      if (t >= burn) acc += x.dot(qcl * x);
      if (!cfg.noise_free) Draw(rng, w);
      next.noalias() = acl * x;
      x = next + w;
      CheckDivergence(x, t);
    }
    means[r] = acc / double(cfg.horizon - burn);
  });
  return Summarize(std::move(means), burn);
}

namespace {

// Steps the disturbance-feedback loop, calling visit(t, x, u) before each
// update. hist[k] holds w_{t-1-k}.
template <typename Visit>
void RunDisturbanceTrial(const LqrProblem& prob, const DisturbanceController& l,
                         const RolloutConfig& cfg, int trial, Visit&& visit) {
  const int n = prob.n_x(), h = l.horizon();
  CounterRng rng(cfg.seed, trial);
  Eigen::VectorXd x = InitialState(cfg, n);
  std::vector<Eigen::VectorXd> hist(h, Eigen::VectorXd::Zero(n));
  Eigen::VectorXd u(prob.n_u()), w = Eigen::VectorXd::Zero(n), next(n);
  int head = 0;  // hist index of w_{t-1}
  for (long t = 0; t < cfg.horizon; ++t) {
    u.setZero();
    for (int k = 0; k < h; ++k) u.noalias() += l.blocks[k] * hist[(head + k) % h];
    visit(t, x, u);
    if (!cfg.noise_free) Draw(rng, w);
    next.noalias() = prob.A * x;
    next.noalias() += prob.B * u;
    x = next + w;
    CheckDivergence(x, t);
    head = (head + h - 1) % h;
    hist[head] = w;
  }
}

}  // namespace

RolloutResult RolloutDisturbanceFeedback(const LqrProblem& prob,
                                         const DisturbanceController& l,
                                         const RolloutConfig& cfg) {
  const long burn = ResolveBurnIn(cfg, prob.A);
  std::vector<double> means(cfg.trials);
  ForEachTrial(cfg.trials, [&](int r) {
    double acc = 0.0;
    RunDisturbanceTrial(prob, l, cfg, r,
                        [&](long t, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& u) {
                          if (t < burn) return;
                          acc += x.dot(prob.Q * x) + u.dot(prob.R * u) +
                                 2.0 * u.dot(prob.S * x);
                        });
    means[r] = acc / double(cfg.horizon - burn);
  });
  return Summarize(std::move(means), burn);
}

Eigen::MatrixXd AnalyticStateCovariance(const LqrProblem& prob,
                                        const DisturbanceController& l) {
  const int n = prob.n_x(), h = l.horizon();
  // T_k for k = 1..H+1 via T_k = A^{k-1} + sum_{j<k} A^{k-1-j} B L_j.
  std::vector<Eigen::MatrixXd> apow{Eigen::MatrixXd::Identity(n, n)};
  for (int k = 1; k <= h; ++k) apow.push_back(apow.back() * prob.A);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd last;
  for (int k = 1; k <= h + 1; ++k) {
    Eigen::MatrixXd tk = apow[k - 1];
    for (int j = 1; j <= std::min(h, k - 1); ++j) {
      tk += apow[k - 1 - j] * prob.B * l.blocks[j - 1];
    }
    if (k <= h) cov += tk * tk.transpose();
    else last = tk;
  }
  // k >= H+1: T_k = A^{k-1-H} T_{H+1}.
  cov += SolveLyapunovG(prob.A.transpose(), last * last.transpose()).G;
  return 0.5 * (cov + cov.transpose());
}

SecondMomentReport SecondMomentCheck(const LqrProblem& prob,
                                     const DisturbanceController& l,
                                     const RolloutConfig& cfg) {
  const long burn = ResolveBurnIn(cfg, prob.A);
  const int n = prob.n_x();
  std::vector<Eigen::MatrixXd> per_trial(cfg.trials);
  ForEachTrial(cfg.trials, [&](int r) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    RunDisturbanceTrial(prob, l, cfg, r,
                        [&](long t, const Eigen::VectorXd& x,
                            const Eigen::VectorXd&) {
                          if (t >= burn) acc.noalias() += x * x.transpose();
                        });
    per_trial[r] = acc / double(cfg.horizon - burn);
  });
  SecondMomentReport out;
  out.analytic = AnalyticStateCovariance(prob, l);
  out.empirical = Eigen::MatrixXd::Zero(n, n);
  for (const auto& m : per_trial) out.empirical += m;
  out.empirical /= cfg.trials;
  const Eigen::MatrixXd dev = (out.empirical - out.analytic).cwiseAbs();
  out.max_deviation = dev.maxCoeff();
  if (cfg.trials > 1) {
    Eigen::MatrixXd var = Eigen::MatrixXd::Zero(n, n);
    for (const auto& m : per_trial) {
      var += (m - out.empirical).cwiseAbs2();
    }
    const Eigen::MatrixXd se =
        (var / double(cfg.trials - 1) / double(cfg.trials)).cwiseSqrt();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (se(i, j) > 0.0) out.max_z = std::max(out.max_z, dev(i, j) / se(i, j));
      }
    }
  }
  return out;
}

}  // namespace sedlqr
