#include "sedlqr/archive.h"

#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "sedlqr/csv.h"
#include "sedlqr/error.h"

namespace sedlqr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void MakeDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIoError, "cannot create " + dir);
}

std::string Join(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

void WriteJson(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIoError, "cannot write " + path);
  out << j.dump(2) << '\n';
}

json ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kIoError, path + ": " + e.what());
  }
}

}  // namespace

void WriteSystemArchive(const std::string& dir, const LqrProblem& prob) {
  MakeDir(dir);
  json m;
  m["name"] = prob.name;
  m["params"] = prob.params;
  m["agents"] = prob.topology.agent_count();
  m["state_dims"] = prob.topology.state_dims();
  m["input_dims"] = prob.topology.input_dims();
  m["preferred_dare"] = std::string(DareMethodName(prob.preferred_dare));
  m["parameter_out_of_range"] = prob.parameter_out_of_range;
  m["prestabilizer"] = prob.prestabilizer.has_value();
  if (prob.discretization) m["dt"] = prob.discretization->dt;
  WriteJson(Join(dir, "manifest.json"), m);
  {
    std::ofstream out(Join(dir, "topology.txt"));
    if (!out) throw Error(ErrorKind::kIoError, "cannot write topology.txt");
    WriteEdgeList(out, prob.topology);
  }
  WriteMatrixCsvFile(Join(dir, "A.csv"), prob.A);
  WriteMatrixCsvFile(Join(dir, "B.csv"), prob.B);
  WriteMatrixCsvFile(Join(dir, "Q.csv"), prob.Q);
  WriteMatrixCsvFile(Join(dir, "R.csv"), prob.R);
  WriteMatrixCsvFile(Join(dir, "S.csv"), prob.S);
  if (prob.prestabilizer) WriteMatrixCsvFile(Join(dir, "K0.csv"), *prob.prestabilizer);
  if (prob.discretization) {
    const auto& c = prob.discretization->continuous;
    WriteMatrixCsvFile(Join(dir, "Ac.csv"), c.Ac);
    WriteMatrixCsvFile(Join(dir, "Bc.csv"), c.Bc);
    WriteMatrixCsvFile(Join(dir, "Qc.csv"), c.Qc);
    WriteMatrixCsvFile(Join(dir, "Rc.csv"), c.Rc);
  }
}

LqrProblem ReadSystemArchive(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::kIoError, dir + " is not an archive directory");
  }
  const json m = ReadJson(Join(dir, "manifest.json"));
  const EdgeList el = ReadEdgeList(Join(dir, "topology.txt"));
  std::vector<int> sd, id;
  try {
    sd = m.at("state_dims").get<std::vector<int>>();
    id = m.at("input_dims").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kIoError, std::string("manifest: ") + e.what());
  }
  Topology topo = Topology::FromEdgeList(el.n, el.edges, sd, id);
  LqrProblem prob(topo, ReadMatrixCsvFile(Join(dir, "A.csv")),
                  ReadMatrixCsvFile(Join(dir, "B.csv")),
                  ReadMatrixCsvFile(Join(dir, "Q.csv")),
                  ReadMatrixCsvFile(Join(dir, "R.csv")),
                  ReadMatrixCsvFile(Join(dir, "S.csv")));
  prob.name = m.value("name", "archive");
  if (m.contains("params")) {
    prob.params = m["params"].get<std::map<std::string, std::string>>();
  }
  prob.preferred_dare = m.value("preferred_dare", "") == "doubling"
                            ? DareMethod::kDoubling
                            : DareMethod::kValueIteration;
  prob.parameter_out_of_range = m.value("parameter_out_of_range", false);
  if (m.value("prestabilizer", false)) {
    prob.prestabilizer = ReadMatrixCsvFile(Join(dir, "K0.csv"));
  }
  if (m.contains("dt") && fs::exists(Join(dir, "Ac.csv"))) {
    ContinuousSystem c{topo, ReadMatrixCsvFile(Join(dir, "Ac.csv")),
                       ReadMatrixCsvFile(Join(dir, "Bc.csv")),
                       ReadMatrixCsvFile(Join(dir, "Qc.csv")),
                       ReadMatrixCsvFile(Join(dir, "Rc.csv"))};
    prob.discretization = Discretization{std::move(c), m["dt"].get<double>()};
  }
  prob.Validate();
  return prob;
}

void WriteRiccatiArchive(const std::string& dir, const RiccatiSolution& sol) {
  MakeDir(dir);
  WriteMatrixCsvFile(Join(dir, "P.csv"), sol.P);
  WriteMatrixCsvFile(Join(dir, "K.csv"), sol.K);
  json m;
  m["residual"] = sol.residual;
  m["iterations"] = sol.iterations;
  m["method"] = std::string(DareMethodName(sol.method));
  WriteJson(Join(dir, "manifest.json"), m);
}

void WriteControllerArchive(const std::string& dir,
                            const DisturbanceController& l, double cost) {
  MakeDir(dir);
  for (int k = 0; k < l.horizon(); ++k) {
    WriteMatrixCsvFile(Join(dir, "L_" + std::to_string(k + 1) + ".csv"),
                       l.blocks[k]);
  }
  json m;
  m["H"] = l.horizon();
  m["cost"] = cost;
  WriteJson(Join(dir, "manifest.json"), m);
}

DisturbanceController ReadControllerArchive(const std::string& dir) {
  const json m = ReadJson(Join(dir, "manifest.json"));
  const int h = m.value("H", 0);
  if (h < 1) throw Error(ErrorKind::kIoError, "controller manifest needs H >= 1");
  DisturbanceController l;
  for (int k = 1; k <= h; ++k) {
    l.blocks.push_back(ReadMatrixCsvFile(Join(dir, "L_" + std::to_string(k) + ".csv")));
  }
  return l;
}

}  // namespace sedlqr
