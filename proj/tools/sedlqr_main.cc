// sedlqr <pipeline> --system <name|path> [options] --out <dir>

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sedlqr/error.h"
#include "sedlqr/pipelines.h"

namespace {

constexpr int kUsageExit = 2;
constexpr int kFailureExit = 1;

template <typename T>
void AddOptional(CLI::App& app, const std::string& flag, std::optional<T>& slot,
                 const std::string& help) {
  app.add_option_function<T>(flag, [&slot](const T& v) { slot = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  sedlqr::ExperimentSpec spec;
  CLI::App app{"Networked LQR analysis: Riccati, decay, disturbance response, "
               "truncation and Monte-Carlo pipelines"};
  app.add_option("pipeline", spec.pipeline, "riccati | decay | disturbance | "
                 "truncation-sweep | lemma-suite | simulate")
      ->required();
  app.add_option("--system", spec.system,
                 "builtin name (heat-cycle, heat-cycle-stable, counterexample, "
                 "toy-rho, thermal-grid, swing-synthetic) or archive directory")
      ->required();
  app.add_option("--out", spec.out_dir, "output directory")->required();
  AddOptional(app, "--H", spec.H, "disturbance-response horizon");
  AddOptional(app, "--kappa-min", spec.kappa_min, "smallest truncation radius");
  AddOptional(app, "--kappa-max", spec.kappa_max, "largest truncation radius");
  AddOptional(app, "--size", spec.size, "agents (cycles, bus network) or grid side");
  AddOptional(app, "--rho", spec.rho, "stability margin of stable builtins");
  AddOptional(app, "--eta", spec.eta, "heat-equation step");
  AddOptional(app, "--alpha", spec.alpha, "input/state weight ratio");
  AddOptional(app, "--dt", spec.dt, "sampling interval of continuous builtins");
  AddOptional(app, "--trials", spec.trials, "Monte-Carlo trials");
  AddOptional(app, "--horizon", spec.horizon, "Monte-Carlo rollout length T");
  app.add_option("--seed", spec.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }

  try {
    const sedlqr::PipelineResult result = sedlqr::RunPipeline(spec, std::cerr);
    for (const auto& f : result.files) std::cout << f << "\n";
    if (!result.passed) {
      std::cerr << spec.pipeline << ": invariant checks failed\n";
      return kFailureExit;
    }
    return 0;
  } catch (const sedlqr::Error& e) {
    std::cerr << "sedlqr: " << e.what() << "\n";
    return e.kind() == sedlqr::ErrorKind::kUsageError ? kUsageExit : kFailureExit;
  } catch (const std::exception& e) {
    std::cerr << "sedlqr: " << e.what() << "\n";
    return kFailureExit;
  }
}
