#pragma once

#include <string>

#include "sedlqr/dist_response.h"
#include "sedlqr/lqr_core.h"
#include "sedlqr/lqr_problem.h"

namespace sedlqr {

/// Directory layout: manifest.json (name, parameters, block dims, solver
/// hint), topology.txt (edge list), A.csv B.csv Q.csv R.csv S.csv, and
/// optionally K0.csv plus Ac.csv Bc.csv Qc.csv Rc.csv for sampled systems.
void WriteSystemArchive(const std::string& dir, const LqrProblem& prob);
LqrProblem ReadSystemArchive(const std::string& dir);

/// P.csv, K.csv and a manifest with residual, iterations and method.
void WriteRiccatiArchive(const std::string& dir, const RiccatiSolution& sol);

/// L_1.csv ... L_H.csv and a manifest with H and the optional cost.
void WriteControllerArchive(const std::string& dir,
                            const DisturbanceController& l, double cost);
DisturbanceController ReadControllerArchive(const std::string& dir);

}  // namespace sedlqr
