#include "sedlqr/pipelines.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "sedlqr/archive.h"
#include "sedlqr/block_matrix.h"
#include "sedlqr/csv.h"
#include "sedlqr/dist_response.h"
#include "sedlqr/error.h"
#include "sedlqr/locality.h"
#include "sedlqr/lqr_core.h"
#include "sedlqr/simulation.h"
#include "sedlqr/system_zoo.h"

namespace sedlqr {

namespace fs = std::filesystem;

const std::vector<std::string>& BuiltinSystems() {
  static const std::vector<std::string> names = {
      "heat-cycle",  "heat-cycle-stable", "counterexample",
      "toy-rho",     "thermal-grid",      "swing-synthetic"};
  return names;
}

const std::vector<std::string>& PipelineNames() {
  static const std::vector<std::string> names = {
      "riccati", "decay", "disturbance", "truncation-sweep", "lemma-suite",
      "simulate"};
  return names;
}

LqrProblem BuildSystem(const ExperimentSpec& spec) {
  const std::string& name = spec.system;
  const auto identity_k0 = [](LqrProblem& p) {
    p.prestabilizer = Eigen::MatrixXd::Identity(p.n_u(), p.n_x());
  };
  if (name == "heat-cycle") {
    LqrProblem p = HeatEquationSystem(spec.size.value_or(10), spec.eta.value_or(0.1),
                                      {}, {}, {spec.alpha.value_or(1.0)});
    identity_k0(p);
    return p;
  }
  if (name == "heat-cycle-stable") {
    return StableHeatEquationSystem(spec.size.value_or(10), spec.eta.value_or(0.1),
                                    spec.rho.value_or(0.1), spec.alpha.value_or(1.0));
  }
  if (name == "counterexample") {
    return CounterexampleSystem(spec.size.value_or(100), 1.1);
  }
  if (name == "toy-rho") {
    const double rho = spec.rho.value_or(0.1);
    LqrProblem p = CounterexampleSystem(spec.size.value_or(100), std::exp(-rho));
    p.name = "toy-rho";
    p.params["rho"] = FormatDouble(rho);
    return p;
  }
  if (name == "thermal-grid") {
    ThermalOptions opt;
    opt.dt = spec.dt.value_or(opt.dt);
    opt.alpha = spec.alpha.value_or(opt.alpha);
    opt.seed = spec.seed;
    const int side = spec.size.value_or(3);
    LqrProblem p = ThermalGridSystem(side, side, opt);
    identity_k0(p);
    return p;
  }
  if (name == "swing-synthetic") {
    SwingOptions opt;
    opt.dt = spec.dt.value_or(opt.dt);
    LqrProblem p = SwingDynamicsSystem(
        SyntheticBusNetwork(spec.size.value_or(145), spec.seed), opt);
    p.name = "swing-synthetic";
    p.params["seed"] = std::to_string(spec.seed);
    return p;
  }
  if (!name.empty() && fs::is_directory(name)) return ReadSystemArchive(name);
  throw Error(ErrorKind::kUsageError, "unknown system '" + name + "'");
}

namespace {

class Output {
 public:
  explicit Output(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::kIoError, "cannot create " + dir_);
  }

  std::ofstream Open(const std::string& file) {
    files_.push_back(file);
    std::ofstream out(Path(file));
    if (!out) throw Error(ErrorKind::kIoError, "cannot write " + Path(file));
    return out;
  }
  std::string Path(const std::string& file) const {
    return (fs::path(dir_) / file).string();
  }
  void Note(const std::string& file) { files_.push_back(file); }
  std::vector<std::string>& files() { return files_; }

 private:
  std::string dir_;
  std::vector<std::string> files_;
};

std::string D(double v) { return FormatDouble(v); }

bool ARStable(const Eigen::MatrixXd& a) {
  return SpectralRadius(a) < 1.0 - 1e-12;
}

// Problem used by every check that needs a stable open loop.
std::optional<LqrProblem> StableVersion(const LqrProblem& prob) {
  LqrProblem s = StableForm(prob);
  if (!ARStable(s.A)) return std::nullopt;
  return s;
}

void GuardSize(int horizon, int n_u, std::ostream& log) {
  const double dim = double(horizon) * n_u;
  log << "M is " << dim << " x " << dim << " (" << dim * dim * 8 / 1e6
      << " MB)\n";
  if (dim > 5000) {
    throw Error(ErrorKind::kInvalidInput,
                "H * n_u = " + std::to_string(int(dim)) + " exceeds 5000");
  }
}

int DefaultHorizon(const ExperimentSpec& spec, const LqrProblem& prob, int cap) {
  if (spec.H) {
    if (*spec.H < 1) throw Error(ErrorKind::kUsageError, "--H must be >= 1");
    return *spec.H;
  }
  const SystemConstants c = FitSystemConstants(prob);
  const double h = std::floor(c.gamma_sys * prob.topology.agent_count()) + 1.0;
  return static_cast<int>(std::min<double>(h, cap));
}

void WriteReadme(Output& out, const std::string& text) {
  out.Open("README.txt") << text;
}

// ---------------------------------------------------------------- riccati

PipelineResult RunRiccati(const ExperimentSpec& spec, const LqrProblem& prob,
                          Output& out, std::ostream& log) {
  const RiccatiSolution sol = SolveDare(prob);
  WriteRiccatiArchive(out.Path("riccati"), sol);
  out.Note("riccati");
  const double pn = SpectralNorm(sol.P);
  const double radius = SpectralRadius(prob.A - prob.B * sol.K);
  auto csv = out.Open("riccati_summary.csv");
  csv << "quantity,value\n"
      << "residual," << D(sol.residual) << "\n"
      << "relative_residual," << D(sol.residual / pn) << "\n"
      << "iterations," << sol.iterations << "\n"
      << "trace_P," << D(sol.P.trace()) << "\n"
      << "closed_loop_spectral_radius," << D(radius) << "\n";
  log << "riccati: " << DareMethodName(sol.method) << ", " << sol.iterations
      << " iterations, relative residual " << sol.residual / pn << "\n";
  (void)spec;
  WriteReadme(out, "riccati/P.csv, riccati/K.csv: cost-to-go and gain (u = -Kx).\n"
                   "riccati_summary.csv: quantity,value.\n");
  return {sol.residual <= 1e-9 * pn && radius < 1.0, {}};
}

// ---------------------------------------------------------------- decay

void WriteProfile(std::ostream& csv, const std::string& name,
                  const BlockMatrix& m, const Topology& topo) {
  for (const auto& e : BlockNormProfile(m, topo)) {
    csv << name << ',' << e.distance << ',' << D(e.norm) << '\n';
  }
}

PipelineResult RunDecay(const ExperimentSpec& spec, const LqrProblem& prob,
                        Output& out, std::ostream& log) {
  (void)spec;
  const Topology& topo = prob.topology;
  const RiccatiSolution sol = SolveDare(prob);
  const BlockMatrix k(sol.K, topo, Space::kInput, Space::kState);
  const BlockMatrix p(sol.P, topo, Space::kState, Space::kState);
  {
    auto csv = out.Open("profile.csv");
    csv << "matrix,distance,norm\n";
    WriteProfile(csv, "A", prob.BlockA(), topo);
    WriteProfile(csv, "B", prob.BlockB(), topo);
    WriteProfile(csv, "K", k, topo);
    WriteProfile(csv, "P", p, topo);
  }
  // Block row N/2 - 1 (the 50th row when N = 100).
  const int row = std::max(0, topo.agent_count() / 2 - 1);
  {
    auto csv = out.Open("row_profile.csv");
    csv << "row,column,distance,norm\n";
    const Eigen::MatrixXd norms = k.BlockNorms();
    for (int j = 0; j < topo.agent_count(); ++j) {
      csv << row << ',' << j << ',' << topo.distance(row, j) << ','
          << D(norms(row, j)) << '\n';
    }
  }
  {
    auto csv = out.Open("certificates.csv");
    WriteCertificateCsvHeader(csv);
    const std::pair<std::string, BlockMatrix> mats[] = {
        {"A", prob.BlockA()}, {"B", prob.BlockB()}, {"K", k}, {"P", p}};
    for (const auto& [name, m] : mats) {
      for (FitMode mode : {FitMode::kEnvelope, FitMode::kRegression}) {
        const SedCertificate c = FitSed(m, topo, mode);
        WriteCertificateCsvRow(csv, name, c);
        if (name == "K") {
          log << "K " << FitModeName(mode) << ": c=" << c.c
              << " gamma=" << c.gamma << "\n";
        }
      }
    }
  }
  WriteReadme(out,
              "profile.csv: x = distance, y = max block norm at that distance, "
              "one series per matrix.\n"
              "row_profile.csv: x = column (or distance), y = block norm of one "
              "block row of K.\n"
              "certificates.csv: fitted (c, gamma) per matrix and fit mode.\n");
  return {true, {}};
}

// ---------------------------------------------------------------- disturbance

PipelineResult RunDisturbance(const ExperimentSpec& spec,
                              const LqrProblem& prob, Output& out,
                              std::ostream& log) {
  const auto stable = StableVersion(prob);
  if (!stable) {
    throw Error(ErrorKind::kUnstableInput,
                "disturbance response needs a stable A or a pre-stabilizer");
  }
  const LqrProblem& sp = *stable;
  const int h = DefaultHorizon(spec, sp, 30);
  GuardSize(h, sp.n_u(), log);
  const RiccatiSolution sol = SolveDare(sp);
  const StabilityCertificate cert_a = FitStability(sp.A);
  const StabilityCertificate joint =
      FitStabilityJoint({sp.A, sp.A - sp.B * sol.K});
  const LyapunovSum g = SolveLyapunovG(sp.A, sp.Q);
  const DisturbanceSystem ds = Assemble(sp, g, h, joint);
  const DisturbanceController l = SolveDirect(ds);
  const double cost = DisturbanceCost(ds, l);
  WriteControllerArchive(out.Path("controller"), l, cost);
  out.Note("controller");

  bool passed = true;
  auto csv = out.Open("lemma3.csv");
  csv << "H,gap,bound,cost,relative_residual\n";
  for (const HorizonRow& r : HorizonSweep(ds, sp, sol.K, joint)) {
    const double rel = r.j_norm > 0 ? r.residual / r.j_norm : r.residual;
    csv << r.horizon << ',' << D(r.lemma3.gap) << ',' << D(r.lemma3.bound)
        << ',' << D(r.cost) << ',' << D(rel) << '\n';
    passed = passed && r.lemma3.holds() &&
             (r.j_norm > 0 ? rel <= 1e-9 : r.residual <= 1e-12);
  }
  auto sum = out.Open("disturbance_summary.csv");
  sum << "quantity,value\n"
      << "H," << h << "\n"
      << "cost," << D(cost) << "\n"
      << "riccati_cost," << D(sol.P.trace()) << "\n"
      << "tau," << D(joint.tau) << "\n"
      << "rho," << D(joint.rho) << "\n"
      << "tau_A," << D(cert_a.tau) << "\n"
      << "rho_A," << D(cert_a.rho) << "\n";
  log << "disturbance: H=" << h << " cost " << cost << " vs Riccati "
      << sol.P.trace() << "\n";
  WriteReadme(out,
              "lemma3.csv: x = H, y = ||K + L_1|| (gap) against its bound; cost is "
              "the optimal disturbance-feedback cost at that H.\n"
              "controller/L_k.csv: blocks of the horizon-H controller.\n");
  return {passed, {}};
}

// ---------------------------------------------------------------- truncation

PipelineResult RunTruncation(const ExperimentSpec& spec, const LqrProblem& prob,
                             Output& out, std::ostream& log) {
  const RiccatiSolution sol = SolveDare(prob);
  const int kmin = spec.kappa_min.value_or(1);
  const int kmax = spec.kappa_max.value_or(prob.topology.diameter() + 1);
  if (kmin < 1 || kmax < kmin) {
    throw Error(ErrorKind::kUsageError, "need 1 <= kappa-min <= kappa-max");
  }
  const SweepContext ctx = MakeSweepContext(prob, sol);
  const auto rows = GapSweep(prob, sol, ctx, kmin, kmax);
  {
    auto csv = out.Open("sweep.csv");
    WriteSweepCsv(csv, rows);
  }
  bool passed = true;
  for (const auto& r : rows) {
    if (r.stable && r.gap < -1e-9 * std::max(1.0, r.cost_opt)) passed = false;
    if (r.kappa >= ctx.threshold && (!r.stable || r.gap > r.theorem4_bound)) {
      passed = false;
    }
  }
  log << "truncation: threshold " << ctx.threshold << ", K envelope c="
      << ctx.k_cert.c << " gamma=" << ctx.k_cert.gamma << "\n";
  WriteReadme(out,
              "sweep.csv: x = kappa, y = gap / cost_opt (performance difference "
              "ratio) or gap against the bound; cost_trunc = inf marks an unstable "
              "truncation.\n");
  return {passed, {}};
}

// ---------------------------------------------------------------- lemma suite

struct CheckTable {
  struct Row {
    std::string name, status;
    double value, bound;
    std::string detail;
  };
  std::vector<Row> rows;

  void Add(const std::string& name, bool ok, double value, double bound,
           const std::string& detail = "") {
    rows.push_back({name, ok ? "pass" : "fail", value, bound, detail});
  }
  void Skip(const std::string& name, const std::string& why) {
    rows.push_back({name, "n/a", NAN, NAN, why});
  }
  bool AllPassed() const {
    return std::none_of(rows.begin(), rows.end(),
                        [](const Row& r) { return r.status == "fail"; });
  }
  void Write(std::ostream& out) const {
    out << "check,status,value,bound,detail\n";
    for (const auto& r : rows) {
      out << r.name << ',' << r.status << ',' << D(r.value) << ',' << D(r.bound)
          << ',' << r.detail << '\n';
    }
  }
};

std::string OffenderText(const std::optional<BlockOffender>& o) {
  if (!o) return "";
  std::ostringstream s;
  s << o->matrix << " k=" << o->k << " m=" << o->m << " i=" << o->i
    << " j=" << o->j;
  return s.str();
}

void ProductChecks(const LqrProblem& prob, const Eigen::MatrixXd& k,
                   CheckTable& t) {
  const Topology& topo = prob.topology;
  const BlockMatrix a = prob.BlockA(), b = prob.BlockB();
  const BlockMatrix kb(k, topo, Space::kInput, Space::kState);
  const auto pair_check = [&](const std::string& name, const BlockMatrix& x,
                              const BlockMatrix& y) {
    const SedCertificate cx = FitSed(x, topo, FitMode::kEnvelope);
    const SedCertificate cy = FitSed(y, topo, FitMode::kEnvelope);
    if (cx.degenerate || cy.degenerate) {
      t.Add(name, true, 0, 0, "zero factor");
      return;
    }
    const double gamma = std::min(cx.gamma, cy.gamma);
    const bool ok = SedProductCheck(x, y, CertificateAtRate(x, topo, gamma),
                                    CertificateAtRate(y, topo, gamma), topo);
    t.Add(name, ok, gamma, gamma, "common rate");
  };
  pair_check("lemma7-product-AA", a, a);
  pair_check("lemma7-product-AB", a, b);
  pair_check("lemma7-product-BK", b, kb);
}

PipelineResult RunLemmaSuite(const ExperimentSpec& spec, const LqrProblem& prob,
                             Output& out, std::ostream& log) {
  CheckTable t;
  const Topology& topo = prob.topology;
  const RiccatiSolution sol = SolveDare(prob);
  const double pn = SpectralNorm(sol.P);
  t.Add("riccati-residual", sol.residual <= 1e-9 * pn, sol.residual, 1e-9 * pn);
  const Eigen::MatrixXd acl = prob.A - prob.B * sol.K;
  const double radius = SpectralRadius(acl);
  t.Add("closed-loop-stable", radius < 1.0, radius, 1.0);
  ProductChecks(prob, sol.K, t);

  if (prob.discretization) {
    const auto& d = *prob.discretization;
    const Prop5Report p5 = Prop5Check(d.continuous, d.dt, prob);
    if (!p5.applicable) {
      t.Skip("prop5-A", "dt||Ac|| >= 1");
      t.Skip("prop5-B", "dt||Ac|| >= 1");
    } else {
      t.Add("prop5-A", p5.a_holds, p5.excess_a, 0, "largest relative excess");
      t.Add("prop5-B", p5.b_stated_holds, p5.excess_b_stated, 0,
            "constant dt^2||Ac||||Bc||e^x");
      t.Add("prop5-B-series", p5.b_series_holds, p5.excess_b_series, 0,
            "constant ||Bc||e^x/||Ac||");
    }
  }

  const auto stable = StableVersion(prob);
  static const char* kStableChecks[] = {
      "g-decay",  "eigen-bounds-min", "eigen-bounds-max", "direct-residual",
      "neumann",  "lemma3",          "lemma6-M",         "lemma6-J",
      "formal-L", "formal-K"};
  if (!stable) {
    for (const char* c : kStableChecks) {
      t.Skip(c, "open loop unstable and no pre-stabilizer");
    }
  } else {
    const LqrProblem& sp = *stable;
    const int h = DefaultHorizon(spec, sp, 10);
    GuardSize(h, sp.n_u(), log);
    const RiccatiSolution ssol = prob.prestabilizer ? SolveDare(sp) : sol;
    const StabilityCertificate cert_a = FitStability(sp.A);
    const StabilityCertificate joint =
        FitStabilityJoint({sp.A, sp.A - sp.B * ssol.K});
    const LyapunovSum g = SolveLyapunovG(sp.A, sp.Q);
    double ratio = 0.0;
    const bool gd = GDecayCheck(g, sp.A, SpectralNorm(sp.Q), cert_a, 50, &ratio);
    t.Add("g-decay", gd, ratio, 1.0, "max ||GA^m|| / bound; m <= 50");

    const DisturbanceSystem ds = Assemble(sp, g, h, joint);
    const EigenBoundsReport eb = EigenBoundsCheck(ds);
    t.Add("eigen-bounds-min", eb.lambda_min >= eb.lower_bound - 1e-8,
          eb.lambda_min, eb.lower_bound);
    t.Add("eigen-bounds-max", eb.lambda_max <= eb.upper_bound + 1e-8,
          eb.lambda_max, eb.upper_bound);

    const DisturbanceController l = SolveDirect(ds);
    const double jn = SpectralNorm(ds.J);
    const double res = DirectResidual(ds, l);
    t.Add("direct-residual", jn > 0 ? res <= 1e-9 * jn : res <= 1e-12, res,
          jn > 0 ? 1e-9 * jn : 1e-12);
    const NeumannSweep ns = NeumannErrorSweep(ds, l, 200);
    t.Add("neumann", ns.violations == 0, ns.violations, 0,
          "violations over t = 1..200");

    const Lemma3Result l3 = Lemma3Gap(ssol.K, l, sp, joint);
    t.Add("lemma3", l3.holds(), l3.gap, l3.bound);

    const SystemConstants consts = FitSystemConstants(sp);
    const MjSedReport mj = MjSedCheck(ds, sp, consts);
    t.Add("lemma6-M", mj.worst_ratio_m <= 1.0 + 1e-12, mj.worst_ratio_m, 1.0,
          OffenderText(mj.offender));
    t.Add("lemma6-J", mj.worst_ratio_j <= 1.0 + 1e-12, mj.worst_ratio_j, 1.0,
          OffenderText(mj.offender));
    const FormalSedReport fs = FormalSedCheck(ds, sp, consts, ssol.K, l);
    t.Add("formal-L", fs.worst_ratio_l <= 1.0 + 1e-12, fs.worst_ratio_l, 1.0,
          OffenderText(fs.offender));
    t.Add("formal-K", fs.worst_ratio_k <= 1.0 + 1e-12, fs.worst_ratio_k, 1.0,
          OffenderText(fs.offender));
  }

  // Truncation claims on the original problem.
  const SweepContext ctx = MakeSweepContext(prob, sol);
  if (!std::isfinite(ctx.threshold)) {
    t.Skip("kappa-threshold", "K envelope rate is 0");
  } else {
    const ThresholdReport tr = KappaThresholdCheck(prob, sol.K, ctx.cert, ctx.k_cert);
    t.Add("kappa-threshold-stable", tr.stable, tr.spectral_radius, 1.0,
          "kappa=" + std::to_string(tr.kappa));
    t.Add("kappa-threshold-rate", tr.slower_rate_holds, tr.threshold, tr.threshold,
          "envelope tau((1+e^-rho)/2)^k");
  }
  const int diam = topo.diameter();
  bool spec_ok = true, spec_n_ok = true, frob_ok = true, thm4_ok = true;
  double worst_spec = 0.0, worst_spec_n = 0.0, worst_frob = 0.0, worst_thm4 = 0.0;
  int worst_kappa = 0;
  const auto ratio = [](double v, double b) { return b > 0 ? v / b : (v > 0 ? INFINITY : 0.0); };
  for (int kappa = 1; kappa <= diam + 1; ++kappa) {
    const TruncationErrorReport te = TruncationErrorCheck(sol.K, topo, ctx.k_cert, kappa);
    spec_ok = spec_ok && te.spectral_ok;
    spec_n_ok = spec_n_ok && te.spectral_n_ok;
    frob_ok = frob_ok && te.frobenius_ok;
    if (ratio(te.spectral, te.spectral_bound) > worst_spec) {
      worst_spec = ratio(te.spectral, te.spectral_bound);
      worst_kappa = kappa;
    }
    worst_spec_n = std::max(worst_spec_n, ratio(te.spectral, te.spectral_bound_n));
    worst_frob = std::max(worst_frob, ratio(te.frobenius, te.frobenius_bound));
  }
  t.Add("trunc-error-spectral", spec_ok, worst_spec, 1.0,
        "max ||K-K_trunc|| / sqrt(N) c_K e^-gk; worst kappa=" + std::to_string(worst_kappa));
  t.Add("trunc-error-spectral-N", spec_n_ok, worst_spec_n, 1.0,
        "max ||K-K_trunc|| / N c_K e^-gk");
  t.Add("trunc-error-frobenius", frob_ok, worst_frob, 1.0,
        "max ||K-K_trunc||_F / bound");
  if (std::isfinite(ctx.threshold)) {
    const int from = std::max(1, static_cast<int>(std::ceil(ctx.threshold)));
    if (from <= diam + 1) {
      for (const auto& r : GapSweep(prob, sol, ctx, from, diam + 1)) {
        const bool ok = r.stable && r.gap <= r.theorem4_bound;
        thm4_ok = thm4_ok && ok;
        if (r.theorem4_bound > 0) worst_thm4 = std::max(worst_thm4, r.gap / r.theorem4_bound);
      }
      t.Add("theorem4", thm4_ok, worst_thm4, 1.0, "max gap / bound; kappa >= threshold");
    } else {
      t.Skip("theorem4", "threshold beyond diameter");
    }
  }

  auto csv = out.Open("checks.csv");
  t.Write(csv);
  for (const auto& r : t.rows) log << r.status << "  " << r.name << "\n";
  WriteReadme(out, "checks.csv: one row per bound check, status pass/fail/n/a.\n");
  return {t.AllPassed(), {}};
}

// ---------------------------------------------------------------- simulate

PipelineResult RunSimulate(const ExperimentSpec& spec, const LqrProblem& prob,
                           Output& out, std::ostream& log) {
  RolloutConfig cfg;
  cfg.horizon = spec.horizon.value_or(cfg.horizon);
  cfg.trials = spec.trials.value_or(cfg.trials);
  cfg.seed = spec.seed;

  bool passed = true;
  auto csv = out.Open("simulate.csv");
  csv << "quantity,closed_form,empirical,stderr,z,within_3se\n";
  const auto row = [&](const std::string& name, double exact,
                       const RolloutResult& r) {
    const double z = r.stderr_ > 0 ? (r.mean - exact) / r.stderr_ : 0.0;
    const bool ok = std::abs(z) <= 3.0;
    passed = passed && ok;
    csv << name << ',' << D(exact) << ',' << D(r.mean) << ',' << D(r.stderr_)
        << ',' << D(z) << ',' << (ok ? 1 : 0) << '\n';
    log << name << ": closed form " << exact << ", empirical " << r.mean
        << " +- " << r.stderr_ << "\n";
  };

  const RiccatiSolution sol = SolveDare(prob);
  row("state-feedback-optimal", ClosedLoopCost(prob, sol.K),
      RolloutStateFeedback(prob, sol.K, cfg));

  if (const auto stable = StableVersion(prob)) {
    const LqrProblem& sp = *stable;
    const int h = DefaultHorizon(spec, sp, 30);
    GuardSize(h, sp.n_u(), log);
    const StabilityCertificate cert = FitStability(sp.A);
    const LyapunovSum g = SolveLyapunovG(sp.A, sp.Q);
    const DisturbanceSystem ds = Assemble(sp, g, h, cert);
    DisturbanceController zero;
    zero.blocks.assign(h, Eigen::MatrixXd::Zero(sp.n_u(), sp.n_x()));
    row("disturbance-zero", g.G.trace(), RolloutDisturbanceFeedback(sp, zero, cfg));
    const DisturbanceController l = SolveDirect(ds);
    row("disturbance-optimal", DisturbanceCost(ds, l),
        RolloutDisturbanceFeedback(sp, l, cfg));
  }
  WriteReadme(out,
              "simulate.csv: closed-form average cost vs Monte-Carlo estimate with "
              "its standard error.\n");
  return {passed, {}};
}

}  // namespace

PipelineResult RunPipeline(const ExperimentSpec& spec, std::ostream& log) {
  using Runner = std::function<PipelineResult(const ExperimentSpec&,
                                              const LqrProblem&, Output&,
                                              std::ostream&)>;
  static const std::map<std::string, Runner> runners = {
      {"riccati", RunRiccati},
      {"decay", RunDecay},
      {"disturbance", RunDisturbance},
      {"truncation-sweep", RunTruncation},
      {"lemma-suite", RunLemmaSuite},
      {"simulate", RunSimulate}};
  const auto it = runners.find(spec.pipeline);
  if (it == runners.end()) {
    throw Error(ErrorKind::kUsageError, "unknown pipeline '" + spec.pipeline + "'");
  }
  if (spec.out_dir.empty()) throw Error(ErrorKind::kUsageError, "--out is required");
  const LqrProblem prob = BuildSystem(spec);
  Output out(spec.out_dir);
  PipelineResult result = it->second(spec, prob, out, log);
  result.files = out.files();
  return result;
}

}  // namespace sedlqr
