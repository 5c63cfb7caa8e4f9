#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "sedlqr/archive.h"
#include "sedlqr/error.h"
#include "sedlqr/pipelines.h"

namespace fs = std::filesystem;

namespace sedlqr {
namespace {

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sedlqr_pipeline_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string FirstLine(const fs::path& p) {
  const std::string s = Slurp(p);
  return s.substr(0, s.find('\n'));
}

PipelineResult RunOn(const std::string& pipeline, const std::string& system,
                   const fs::path& out) {
  ExperimentSpec spec;
  spec.pipeline = pipeline;
  spec.system = system;
  spec.out_dir = out.string();
  spec.horizon = 20000;
  std::ostringstream log;
  return RunPipeline(spec, log);
}

TEST(Registry, Names) {
  const auto& systems = BuiltinSystems();
  EXPECT_NE(std::find(systems.begin(), systems.end(), "heat-cycle"), systems.end());
  const auto& pipes = PipelineNames();
  EXPECT_NE(std::find(pipes.begin(), pipes.end(), "lemma-suite"), pipes.end());
  ExperimentSpec spec;
  spec.system = "no-such-system";
  try {
    BuildSystem(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUsageError);
  }
}

TEST(Pipelines, OutputsOnStableHeat) {
  const fs::path out = Scratch("outputs");
  struct Case {
    std::string pipeline, file, header;
  };
  const Case cases[] = {
      {"riccati", "riccati/P.csv", ""},
      {"decay", "profile.csv", "matrix,distance,norm"},
      {"disturbance", "lemma3.csv", "H,gap,bound,cost,relative_residual"},
      {"truncation-sweep", "sweep.csv", "kappa,stable,cost_trunc,cost_opt,gap,bound,threshold"},
      {"lemma-suite", "checks.csv", "check,status,value,bound,detail"},
      {"simulate", "simulate.csv", "quantity,closed_form,empirical,stderr,z,within_3se"},
  };
  for (const Case& c : cases) {
    const fs::path dir = out / c.pipeline;
    const PipelineResult r = RunOn(c.pipeline, "heat-cycle-stable", dir);
    EXPECT_TRUE(r.passed) << c.pipeline;
    EXPECT_TRUE(fs::exists(dir / c.file)) << c.pipeline;
    EXPECT_TRUE(fs::exists(dir / "README.txt")) << c.pipeline;
    if (!c.header.empty()) EXPECT_EQ(FirstLine(dir / c.file), c.header);
    for (const std::string& f : r.files) EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  fs::remove_all(out);
}

TEST(Pipelines, ArchiveDirectoryAsSystem) {
  const fs::path out = Scratch("archive");
  ASSERT_TRUE(RunOn("riccati", "heat-cycle-stable", out / "a").passed);
  ExperimentSpec spec;
  spec.system = "heat-cycle-stable";
  WriteSystemArchive((out / "a" / "system").string(), BuildSystem(spec));
  const PipelineResult r = RunOn("riccati", (out / "a" / "system").string(), out / "b");
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(Slurp(out / "a" / "riccati" / "P.csv"), Slurp(out / "b" / "riccati" / "P.csv"));
  fs::remove_all(out);
}

#ifdef SEDLQR_CLI_PATH
int Cli(const std::string& args) {
  const std::string cmd = std::string(SEDLQR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

TEST(Cli, ExitCodes) {
  if (std::string(SEDLQR_CLI_PATH).empty()) GTEST_SKIP();
  const fs::path out = Scratch("cli");
  EXPECT_EQ(Cli("riccati --system heat-cycle-stable --out " + out.string()), 0);
  EXPECT_EQ(Cli("riccati --system nope --out " + out.string()), 2);
  EXPECT_EQ(Cli("bogus-pipeline --out " + out.string()), 2);
  EXPECT_EQ(Cli("riccati --system heat-cycle-stable --H notanumber"), 2);
  // Failed invariant checks exit 1.
  EXPECT_EQ(Cli("lemma-suite --system thermal-grid --H 3 --out " + out.string()), 1);
  fs::remove_all(out);
}

TEST(Cli, ByteIdenticalReruns) {
  if (std::string(SEDLQR_CLI_PATH).empty()) GTEST_SKIP();
  const fs::path out = Scratch("rerun");
  const std::string args = "simulate --system heat-cycle-stable --horizon 5000 --seed 3 --out ";
  ASSERT_EQ(Cli(args + (out / "1").string()), 0);
  ASSERT_EQ(Cli(args + (out / "2").string()), 0);
  for (const auto& e : fs::recursive_directory_iterator(out / "1")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), out / "1");
    EXPECT_EQ(Slurp(e.path()), Slurp(out / "2" / rel)) << rel;
  }
  fs::remove_all(out);
}
#endif

}  // namespace
}  // namespace sedlqr
