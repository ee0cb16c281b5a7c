#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <yaml-cpp/yaml.h>

#include "qdgate/cli/commands.hpp"
#include "qdgate/cli/config.hpp"
#include "qdgate/cli/csv.hpp"
#include "qdgate/error.hpp"

namespace fs = std::filesystem;
using namespace qdgate::cli;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qdsim_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

fs::path write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream(path) << text;
  return path;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_qdsim(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(QDSIM_EXE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

std::string config_path(const std::string& name) { return std::string(QDGATE_CONFIG_DIR) + "/" + name; }

const char* small_sweep =
    "bath:\n  l_nm: 20\n  temperature_K: 4\n  calibration: 7.5\n"
    "gate:\n  omega0_meV: 0.3\n"
    "sweep:\n  bath.d_nm: [5, 50]\n  bath.temperature_K: [0.1, 4]\n";

}  // namespace

TEST(Config, ResolvesDefaultsAndOverrides) {
  const YAML::Node root = YAML::Load("model:\n  epsilon: 0.05\npulse:\n  scheme: rabi\n");
  const ResolvedConfig c = resolve(root, "gate", command_schema("gate"), false, std::nullopt);
  EXPECT_DOUBLE_EQ(c.number("model.epsilon"), 0.05);
  EXPECT_DOUBLE_EQ(c.number("model.delta_e_ab_meV"), 2.0);
  EXPECT_EQ(c.text("pulse.scheme"), "rabi");
  EXPECT_EQ(c.seed, 1u);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  const auto schema = command_schema("gate");
  auto expect_config_error = [&](const std::string& doc) {
    try {
      resolve(YAML::Load(doc), "gate", schema, false, std::nullopt);
      ADD_FAILURE() << doc;
    } catch (const qdgate::Error& e) {
      EXPECT_EQ(e.code(), qdgate::ErrorCode::config_error);
    }
  };
  expect_config_error("model:\n  epsilonn: 0.1\n");
  expect_config_error("model:\n  epsilon: abc\n");
  expect_config_error("pulse:\n  scheme: sideways\n");
  expect_config_error("sweep:\n  model.epsilon: [0.0, 0.1]\n");
}

TEST(Config, SweepExpansionOrderAndValidation) {
  const auto schema = command_schema("fidelity-sweep");
  const ResolvedConfig c = resolve(YAML::Load(small_sweep), "fidelity-sweep", schema, true, 7u);
  EXPECT_EQ(c.seed, 7u);
  const auto points = c.expand();
  ASSERT_EQ(points.size(), 4u);
  EXPECT_DOUBLE_EQ(points[0].number("bath.d_nm"), 5.0);
  EXPECT_DOUBLE_EQ(points[0].number("bath.temperature_K"), 0.1);
  EXPECT_DOUBLE_EQ(points[1].number("bath.temperature_K"), 4.0);
  EXPECT_DOUBLE_EQ(points[2].number("bath.d_nm"), 50.0);
  EXPECT_THROW(resolve(YAML::Load("sweep:\n  bath.topology: [1, 2]\n"), "fidelity-sweep", schema,
                       true, std::nullopt),
               qdgate::Error);
  EXPECT_THROW(resolve(YAML::Load("sweep:\n  bath.d_nm: []\n"), "fidelity-sweep", schema, true,
                       std::nullopt),
               qdgate::Error);
  EXPECT_THROW(resolve(YAML::Load("sweep:\n  bath.nothing: [1]\n"), "fidelity-sweep", schema,
                       true, std::nullopt),
               qdgate::Error);
}

TEST(Config, HashTracksResolvedValues) {
  const auto schema = command_schema("readout");
  const auto a = resolve(YAML::Load("readout:\n  eta: 0.9\n"), "readout", schema, false, std::nullopt);
  const auto b = resolve(YAML::Load("readout:\n  eta: 0.90\n  epsilon: 0.1\n"), "readout", schema,
                         false, std::nullopt);
  const auto c = resolve(YAML::Load("readout:\n  eta: 0.9\n"), "readout", schema, false, 2u);
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(hex64(a.hash()).size(), 16u);
}

TEST(Config, NumberFormatRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02e23, -0.0, 2.0}) {
    EXPECT_EQ(std::stod(format_number(x)), x);
  }
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
}

TEST(Csv, RenderHasHashCommentAndHeader) {
  CsvTable t{"x.csv", {"a", "b", "c"}, {{1.5, 2LL, std::string("s")}}};
  const auto l = lines(t.render(0x1234));
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], "# config_hash=0000000000001234");
  EXPECT_EQ(l[1], "a,b,c");
  EXPECT_EQ(l[2], "1.5,2,s");
}

TEST(Csv, WriteAtomicallyLeavesNoStaging) {
  const fs::path out = scratch("atomic");
  write_atomically(out, {CsvTable{"a.csv", {"x"}, {{1.0}}}, CsvTable{"b.csv", {"y"}, {{2.0}}}}, 1);
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(out)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  EXPECT_EQ(names, (std::vector<std::string>{"a.csv", "b.csv"}));
}

TEST(Cli, MalformedConfigExitsTwoWithoutFiles) {
  const fs::path dir = scratch("malformed");
  const fs::path cfg = write_file(dir / "bad.yaml", "model:\n  epsilon: [oops\n");
  const fs::path out = dir / "out";
  EXPECT_EQ(run_qdsim("gate --config " + cfg.string() + " --out " + out.string()), exit_config_error);
  EXPECT_TRUE(!fs::exists(out) || fs::is_empty(out));

  const fs::path unknown = write_file(dir / "unknown.yaml", "readout:\n  colour: blue\n");
  EXPECT_EQ(run_qdsim("readout --config " + unknown.string() + " --out " + out.string()),
            exit_config_error);
  EXPECT_TRUE(!fs::exists(out) || fs::is_empty(out));
}

TEST(Cli, BadArgumentsExitTwo) {
  EXPECT_EQ(run_qdsim("gate --out /tmp/x"), exit_config_error);
  EXPECT_EQ(run_qdsim("teleport --config " + config_path("gate_adiabatic.yaml") + " --out /tmp/x"),
            exit_config_error);
  EXPECT_EQ(run_qdsim("gate --config " + config_path("gate_adiabatic.yaml") + " --out /tmp/x --jobs 0"),
            exit_config_error);
}

TEST(Cli, InvalidPhysicsIsAConfigError) {
  const fs::path dir = scratch("physics");
  const fs::path cfg = write_file(dir / "rabi.yaml", "model:\n  epsilon: 0.1\npulse:\n  scheme: rabi\n");
  EXPECT_EQ(run_qdsim("gate --config " + cfg.string() + " --out " + (dir / "out").string()),
            exit_config_error);
  EXPECT_FALSE(fs::exists(dir / "out" / "summary.csv"));
}

TEST(Cli, GateOutputs) {
  const fs::path out = scratch("gate");
  ASSERT_EQ(run_qdsim("gate --config " + config_path("gate_adiabatic.yaml") + " --out " + out.string()),
            exit_ok);
  for (const char* name : {"pulse_shapes.csv", "phase_population.csv", "summary.csv"}) {
    const auto l = lines(read_file(out / name));
    ASSERT_GE(l.size(), 3u) << name;
    EXPECT_EQ(l[0].rfind("# config_hash=", 0), 0u);
  }
  const auto summary = lines(read_file(out / "summary.csv"));
  EXPECT_EQ(summary[1].rfind("scheme,gate_phase_rad", 0), 0u);
  const double theta = std::stod(summary[2].substr(summary[2].find(',') + 1));
  EXPECT_NEAR(std::abs(theta), 3.14159, 0.05);
}

TEST(Cli, GateWithoutDriveHasNoPhase) {
  const fs::path dir = scratch("nodrive");
  const fs::path cfg = write_file(dir / "c.yaml", "pulse:\n  omega0_meV: 0\n");
  ASSERT_EQ(run_qdsim("gate --config " + cfg.string() + " --out " + (dir / "out").string()), exit_ok);
  const auto summary = lines(read_file(dir / "out" / "summary.csv"));
  const double theta = std::stod(summary[2].substr(summary[2].find(',') + 1));
  EXPECT_LT(std::abs(theta), 1e-9);
}

TEST(Cli, FidelitySweepIdenticalAcrossJobs) {
  const fs::path dir = scratch("sweep");
  const fs::path cfg = write_file(dir / "c.yaml", small_sweep);
  ASSERT_EQ(run_qdsim("fidelity-sweep --config " + cfg.string() + " --out " + (dir / "a").string() +
                      " --jobs 1"),
            exit_ok);
  ASSERT_EQ(run_qdsim("fidelity-sweep --config " + cfg.string() + " --out " + (dir / "b").string() +
                      " --jobs 3"),
            exit_ok);
  ASSERT_EQ(run_qdsim("fidelity-sweep --config " + cfg.string() + " --out " + (dir / "c").string(),
                      "SIM_JOBS=2"),
            exit_ok);
  const std::string a = read_file(dir / "a" / "fidelity.csv");
  EXPECT_EQ(a, read_file(dir / "b" / "fidelity.csv"));
  EXPECT_EQ(a, read_file(dir / "c" / "fidelity.csv"));
  const auto l = lines(a);
  ASSERT_EQ(l.size(), 6u);
  EXPECT_EQ(l[1], "l_nm,d_nm,T_K,omega_meV,delta_e_ab_meV,gamma,infidelity");
}

TEST(Cli, SinglePointSweepHasOneRow) {
  const fs::path dir = scratch("single");
  const fs::path cfg = write_file(dir / "c.yaml", "gate:\n  omega0_meV: 0.3\n");
  ASSERT_EQ(run_qdsim("fidelity-sweep --config " + cfg.string() + " --out " + (dir / "o").string()),
            exit_ok);
  EXPECT_EQ(lines(read_file(dir / "o" / "fidelity.csv")).size(), 3u);
}

TEST(Cli, ReadoutDeterministicUnderSeedAndJobs) {
  const fs::path dir = scratch("readout");
  const std::string cfg = config_path("readout.yaml");
  ASSERT_EQ(run_qdsim("readout --config " + cfg + " --out " + (dir / "a").string() + " --jobs 1"), exit_ok);
  ASSERT_EQ(run_qdsim("readout --config " + cfg + " --out " + (dir / "b").string() + " --jobs 4"), exit_ok);
  ASSERT_EQ(run_qdsim("readout --config " + cfg + " --out " + (dir / "c").string() + " --seed 5"), exit_ok);
  for (const char* name : {"survival.csv", "trajectories.csv", "error_budget.csv"}) {
    EXPECT_EQ(read_file(dir / "a" / name), read_file(dir / "b" / name)) << name;
  }
  EXPECT_NE(read_file(dir / "a" / "trajectories.csv"), read_file(dir / "c" / "trajectories.csv"));
  const auto header = lines(read_file(dir / "a" / "trajectories.csv"))[1];
  EXPECT_EQ(header, "trajectory_id,emission_time_ns,collapsed_to,detected");
  EXPECT_EQ(lines(read_file(dir / "a" / "error_budget.csv"))[1], "t_ns,err1,err0,total,t_opt");
}

TEST(Cli, ReadoutWithoutMixingKeepsGround) {
  const fs::path dir = scratch("clean");
  const fs::path cfg = write_file(dir / "c.yaml", "readout:\n  epsilon: 0\n  trajectories: 5\n");
  ASSERT_EQ(run_qdsim("readout --config " + cfg.string() + " --out " + (dir / "o").string()), exit_ok);
  const auto l = lines(read_file(dir / "o" / "survival.csv"));
  ASSERT_GT(l.size(), 3u);
  for (std::size_t i = 2; i < l.size(); ++i) {
    const auto first = l[i].find(',');
    const auto second = l[i].find(',', first + 1);
    EXPECT_EQ(std::stod(l[i].substr(first + 1, second - first - 1)), 1.0) << l[i];
  }
}

TEST(Cli, SpectralGridAndSlopes) {
  const fs::path out = scratch("spectral");
  ASSERT_EQ(run_qdsim("spectral --config " + config_path("spectral.yaml") + " --out " + out.string()),
            exit_ok);
  const auto l = lines(read_file(out / "j_omega.csv"));
  EXPECT_EQ(l[1], "omega_meV,J_deformation,J_piezo");
  const double first = std::stod(l[2].substr(0, l[2].find(',')));
  const double last = std::stod(l.back().substr(0, l.back().find(',')));
  EXPECT_NEAR(last / first, 1e5, 1e-6 * 1e5);
}

TEST(Cli, RerunIsByteIdentical) {
  const fs::path dir = scratch("rerun");
  const std::string cfg = config_path("gate_rabi.yaml");
  ASSERT_EQ(run_qdsim("gate --config " + cfg + " --out " + (dir / "a").string()), exit_ok);
  ASSERT_EQ(run_qdsim("gate --config " + cfg + " --out " + (dir / "a2").string()), exit_ok);
  for (const char* name : {"pulse_shapes.csv", "phase_population.csv", "summary.csv"}) {
    EXPECT_EQ(read_file(dir / "a" / name), read_file(dir / "a2" / name)) << name;
  }
}
