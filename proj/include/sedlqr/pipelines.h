#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sedlqr/lqr_problem.h"

namespace sedlqr {

/// One batch run: which system, which pipeline, optional knobs, output dir.
struct ExperimentSpec {
  std::string pipeline;
  std::string system;
  std::string out_dir;
  std::optional<int> H;
  std::optional<int> kappa_min, kappa_max;
  std::optional<int> size;  ///< N for cycles and bus networks, side for grids
  std::optional<int> trials;
  std::optional<long> horizon;  ///< rollout length T
  std::optional<double> rho, eta, alpha, dt;
  std::uint64_t seed = 0;
};

const std::vector<std::string>& BuiltinSystems();
const std::vector<std::string>& PipelineNames();

/// Builtin registry name, or a system archive directory. Unknown names throw
/// usage-error.
LqrProblem BuildSystem(const ExperimentSpec& spec);

struct PipelineResult {
  bool passed = true;  ///< every invariant check of the pipeline held
  std::vector<std::string> files;  ///< written, relative to out_dir
};

/// Runs spec.pipeline and writes its CSV/archive outputs under spec.out_dir.
/// Library errors propagate as sedlqr::Error.
PipelineResult RunPipeline(const ExperimentSpec& spec, std::ostream& log);

}  // namespace sedlqr
