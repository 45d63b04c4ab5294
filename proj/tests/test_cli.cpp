#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "snm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = snm::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::map<std::string, std::string> quantities(const std::string& csv) {
  std::map<std::string, std::string> m;
  const auto rows = parse_csv(csv);
  for (std::size_t i = 1; i < rows.size(); ++i) m[rows[i].at(0)] = rows[i].at(1);
  return m;
}

std::string temp_dir(const std::string& name) {
  const auto dir = fs::path(::testing::TempDir()) / ("snm_cli_" + name);
  fs::remove_all(dir);
  return dir.string();
}

std::string slurp(const fs::path& p) { return snm::io::read_file(p.string()); }

const std::string kPaw = R"({"kind":"stars","params":{"n":4,"edges":[[0,1],[1,2],[0,2],[2,3]]}})";

}  // namespace

TEST(CliFamily, Summaries) {
  auto r = run({"family", "--family", "ksets:d=4,k=1"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = parse_csv(r.out);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"kind", "M", "d", "mu", "transitive"}));
  EXPECT_EQ(rows[1][1], "4");
  EXPECT_EQ(rows[1][2], "4");

  rows = parse_csv(run({"family", "--family", "biclusters:d=3,k=1"}).out);
  EXPECT_EQ(rows[1][1], "9");
  EXPECT_EQ(rows[1][2], "9");

  rows = parse_csv(run({"family", "--family", R"({"kind":"cbm","params":{"n":8,"m":4},"mu":0.5})"}).out);
  EXPECT_EQ(rows[1][1], "35");
  EXPECT_EQ(rows[1][3], "0.5");
}

TEST(CliFamily, JsonAndFiles) {
  const auto dir = temp_dir("family");
  const auto r = run({"family", "--family", "ksets:d=5,k=2,mu=2", "--format", "json", "--out", dir});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = snm::io::parse_json(r.out);
  EXPECT_EQ(j.at("M"), 10);
  EXPECT_EQ(j.at("mu"), 2.0);
  EXPECT_TRUE(fs::exists(fs::path(dir) / "spectrum.csv"));
  const auto family_file = (fs::path(dir) / "family.json").string();
  ASSERT_TRUE(fs::exists(family_file));
  // The written spec loads back through --family FILE.
  const auto again = run({"family", "--family", family_file});
  EXPECT_EQ(parse_csv(again.out)[1][1], "10");
}

TEST(CliBounds, UpperBoundAtFourSigma) {
  const double sep = 4.0 * std::sqrt(2.0 * std::log(10.0));
  const auto spec = "{\"vectors\":[[0],[" + snm::io::format_number(sep) + "]]}";
  const auto r = run({"bounds", "--family", spec, "--delta", "0.001"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto q = quantities(r.out);
  EXPECT_NEAR(std::stod(q.at("upper_bound")), 1e-4, 1e-12);
  EXPECT_EQ(q.at("upper_verdict"), "HOLDS");
  EXPECT_EQ(q.at("upper_bound_vacuous"), "0");
}

TEST(CliBounds, LowerBoundRegime) {
  const auto q = quantities(run({"bounds", "--family", "ksets:d=20,k=2,mu=0.1"}).out);
  EXPECT_EQ(q.at("lower_verdict"), "HOLDS");
  EXPECT_EQ(q.at("lower_alpha"), "1");
  EXPECT_EQ(q.at("lower_threshold"), "3");
  EXPECT_TRUE(q.count("rate_isotropic"));
}

TEST(CliBounds, SingleHypothesisIsZero) {
  const auto r = run({"bounds", "--family", R"({"vectors":[[1,2]]})"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto q = quantities(r.out);
  EXPECT_EQ(q.at("W(alpha=8)"), "0");
  EXPECT_EQ(q.at("upper_bound"), "0");
  EXPECT_EQ(q.at("min_distance_bound"), "0");
  EXPECT_EQ(q.at("lower_verdict"), "FAILS");
}

TEST(CliBounds, UniformDesignAndJson) {
  const auto r = run({"bounds", "--family", "ksets:d=6,k=2", "--design", "uniform", "--tau", "12", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = snm::io::parse_json(r.out);
  const auto twice = snm::edf(snm::make_ksets(6, 2, 1.0), 4.0).value;
  EXPECT_EQ(j.at("W(alpha=8)").get<double>(), twice);
  EXPECT_TRUE(j.at("upper_verdict").is_string());
  EXPECT_TRUE(j.at("lower_W").is_number());
  EXPECT_EQ(run({"bounds", "--family", "ksets:d=6,k=2", "--design", "opt"}).code, snm::cli::kValidation);
}

TEST(CliDesign, SingleCoordinate) {
  const auto r = run({"design", "--family", R"({"vectors":[[0],[1]]})", "--tau", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"i", "B", "g"}));
  EXPECT_EQ(rows[1][1], "3");
}

TEST(CliDesign, WritesArtifacts) {
  const auto dir = temp_dir("design");
  const auto r = run({"design", "--family", kPaw, "--tau", "4", "--out", dir});
  ASSERT_NE(r.code, snm::cli::kValidation) << r.err;
  const auto design = snm::io::parse_json(slurp(fs::path(dir) / "design.json"));
  EXPECT_LT(design.at("objective").get<double>(), design.at("uniform_objective").get<double>());
  EXPECT_NEAR(design.at("tau").get<double>(), 4.0, 1e-9);
  EXPECT_EQ(parse_csv(slurp(fs::path(dir) / "trace.csv"))[0],
            (std::vector<std::string>{"iter", "objective", "best_objective"}));
  // A saved design is accepted by simulate.
  const auto sim = run({"simulate", "--family", kPaw, "--design", (fs::path(dir) / "design.json").string(), "--trials",
                        "50", "--mu", "1"});
  ASSERT_EQ(sim.code, 0) << sim.err;
  EXPECT_EQ(parse_csv(sim.out)[1][1], "design");
}

TEST(CliDesign, PathGraphIsNonUniform) {
  const auto r = run({"design", "--family", "{\"kind\":\"stars\",\"params\":{\"n\":4,\"edges\":[[0,1],[1,2],[2,3]]}}",
                      "--format", "json"});
  ASSERT_NE(r.code, snm::cli::kValidation) << r.err;
  const auto j = snm::io::parse_json(r.out);
  EXPECT_LT(j.at("objective").get<double>(), j.at("uniform_objective").get<double>());
  const auto b = j.at("B").get<std::vector<double>>();
  ASSERT_EQ(b.size(), 3u);
  EXPECT_GT(b[1], b[0] + 0.1);
}

TEST(CliDesign, KSetsUniformCertified) {
  const auto r = run({"design", "--family", "ksets:d=6,k=2", "--alpha", "1", "--tau", "6", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = snm::io::parse_json(r.out);
  EXPECT_EQ(j.at("status"), "CERTIFIED");
  EXPECT_EQ(j.at("certificate").at("verdict"), "PASS");
  for (double x : j.at("B").get<std::vector<double>>()) EXPECT_NEAR(x, 1.0, 0.01);
}

TEST(CliDesign, IterationCapIsInconclusive) {
  const auto r = run({"design", "--family", kPaw, "--tau", "4", "--max-iter", "1"});
  EXPECT_EQ(r.code, snm::cli::kInconclusive);
  EXPECT_FALSE(r.out.empty());
}

TEST(CliSimulate, TwoPointRisk) {
  const auto r = run({"simulate", "--family", R"({"vectors":[[0],[2]]})", "--trials", "20000", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"mu", "design_mode", "max_risk", "ci_lo", "ci_hi", "argmax", "N", "W8"}));
  EXPECT_EQ(rows[1][1], "isotropic");
  EXPECT_NEAR(std::stod(rows[1][2]), 0.1587, 0.012);
  EXPECT_LE(std::stod(rows[1][3]), std::stod(rows[1][2]));
}

TEST(CliSimulate, GridAndModes) {
  const auto dir = temp_dir("simulate");
  const auto r = run({"simulate", "--family", "ksets:d=5,k=2", "--mu", "0.5,2", "--design", "isotropic,uniform",
                      "--tau", "5", "--trials", "100", "--out", dir});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 5u);
  // Uniform with tau = d is the isotropic experiment, draw for draw.
  EXPECT_EQ(rows[1][2], rows[3][2]);
  EXPECT_EQ(rows[2][2], rows[4][2]);
  EXPECT_TRUE(fs::exists(fs::path(dir) / "simulate.csv"));
  EXPECT_TRUE(fs::exists(fs::path(dir) / "risk_uniform_1.csv"));
}

TEST(CliErrors, ExitCodes) {
  EXPECT_EQ(run({"simulate", "--family", "ksets:d=4,k=1", "--trials", "0"}).code, snm::cli::kValidation);
  EXPECT_EQ(run({"simulate", "--family", "ksets:d=4,k=1", "--mu", "0"}).code, snm::cli::kValidation);
  EXPECT_EQ(run({"simulate", "--family", "ksets:d=40,k=20", "--trials", "10"}).code, snm::cli::kCapability);
  EXPECT_EQ(run({"design", "--family", "ksets:d=30,k=10"}).code, snm::cli::kCapability);
  EXPECT_EQ(run({"family", "--family", "{\"kind\":"}).code, snm::cli::kValidation);
  EXPECT_EQ(run({"family", "--family", "spheres:d=3"}).code, snm::cli::kValidation);
  EXPECT_EQ(run({"family", "--family", "ksets:d=3,k=x"}).code, snm::cli::kValidation);
  EXPECT_EQ(run({"family", "--family", "no-such-file.json"}).code, snm::cli::kValidation);
  EXPECT_EQ(run({"bounds", "--family", "ksets:d=4,k=1", "--delta", "1.5"}).code, snm::cli::kValidation);
  EXPECT_EQ(run({"adaptive", "--d", "4", "--k", "4"}).code, snm::cli::kValidation);
  EXPECT_EQ(run({"frobnicate"}).code, snm::cli::kValidation);
  EXPECT_EQ(run({}).code, snm::cli::kValidation);
  const auto err = run({"simulate", "--family", "ksets:d=40,k=20"});
  EXPECT_NE(err.err.find("refused"), std::string::npos);
}

TEST(CliConfig, JsonFileSuppliesFlags) {
  const auto dir = temp_dir("config");
  fs::create_directories(dir);
  const auto path = (fs::path(dir) / "sim.json").string();
  snm::io::write_file(path, R"({"command":"simulate","family":{"vectors":[[0],[2]]},"mu":[1,2],"trials":500,"seed":3})");
  const auto from_file = run({"--config", path});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  const auto from_flags = run({"simulate", "--family", R"({"vectors":[[0],[2]]})", "--mu", "1,2", "--trials", "500",
                               "--seed", "3"});
  EXPECT_EQ(from_file.out, from_flags.out);
  // Command-line flags override the file.
  const auto overridden = run({"simulate", "--config", path, "--seed", "4"});
  EXPECT_EQ(overridden.code, 0);
  EXPECT_NE(overridden.out, from_flags.out);
  EXPECT_EQ(run({"--config", (fs::path(dir) / "missing.json").string()}).code, snm::cli::kValidation);
  snm::io::write_file(path, R"({"trials":5})");
  EXPECT_EQ(run({"--config", path}).code, snm::cli::kValidation);
}

TEST(CliHelp, DocumentsColumns) {
  const auto r = run({"simulate", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("mu,design_mode,max_risk,ci_lo,ci_hi"), std::string::npos);
}

TEST(CliAdaptive, SummaryAndCsv) {
  const auto dir = temp_dir("adaptive");
  const auto r = run({"adaptive", "--runs", "50", "--seed", "2", "--format", "json", "--out", dir});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = snm::io::parse_json(r.out);
  EXPECT_EQ(j.at("probe_cap"), 48);
  EXPECT_NEAR(j.at("required_signal").get<double>(), 0.76187, 1e-5);
  EXPECT_EQ(j.at("mu"), j.at("required_signal"));
  EXPECT_EQ(j.at("noninteractive_lower_bound").at("verdict"), "FAILS");
  const auto rows = parse_csv(slurp(fs::path(dir) / "adaptive.csv"));
  EXPECT_EQ(rows.size(), 51u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"run", "seed", "mu", "tau", "success", "probes", "energy_spent"}));
  const auto doubled = snm::io::parse_json(run({"adaptive", "--runs", "5", "--mu-factor", "2", "--format", "json"}).out);
  EXPECT_NEAR(doubled.at("mu").get<double>(), 2 * 0.76187, 2e-5);
}

TEST(CliStars, SmallExperiment) {
  const auto dir = temp_dir("stars");
  const auto r = run({"stars", "--n", "8", "--attach", "2", "--seed-vertices", "0", "--mu", "1,6", "--trials", "200",
                      "--seed", "4", "--out", dir});
  // An optimizer run that hits the iteration cap still reports its best design.
  ASSERT_TRUE(r.code == snm::cli::kOk || r.code == snm::cli::kInconclusive) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"mu", "design_mode", "max_risk", "ci_lo", "ci_hi", "min_success", "sedf"}));
  EXPECT_EQ(rows[1][1], "uniform");
  EXPECT_EQ(rows[3][1], "optimized");
  // Rows run over modes, then mu: optimized SEDF never exceeds uniform at the same mu.
  EXPECT_LE(std::stod(rows[3][6]), std::stod(rows[1][6]) + 1e-12);
  EXPECT_LE(std::stod(rows[4][6]), std::stod(rows[2][6]) + 1e-12);
  EXPECT_LT(std::stod(rows[2][2]), 0.05);
  EXPECT_LT(std::stod(rows[4][2]), 0.05);
  const auto graph = snm::io::parse_json(slurp(fs::path(dir) / "graph.json"));
  EXPECT_EQ(graph.at("n"), 8);
  const auto vertices = parse_csv(slurp(fs::path(dir) / "stars_vertices.csv"));
  EXPECT_EQ(vertices[0], (std::vector<std::string>{"mu", "design_mode", "vertex", "degree", "success_prob"}));
  EXPECT_EQ(vertices.size(), 1u + 4u * 8u);
  const auto allocation = parse_csv(slurp(fs::path(dir) / "stars_allocation.csv"));
  EXPECT_EQ(allocation[0], (std::vector<std::string>{"mu", "design_mode", "edge", "u", "v", "energy"}));
  EXPECT_EQ(allocation.size(), 1u + 4u * graph.at("edges").size());
}

TEST(CliDeterminism, ByteIdenticalReruns) {
  const std::vector<std::vector<std::string>> commands = {
      {"family", "--family", "cbm:n=8,m=4,mu=0.5"},
      {"bounds", "--family", "ksets:d=6,k=2", "--alpha", "8,1,0.5"},
      {"design", "--family", kPaw, "--tau", "4"},
      {"simulate", "--family", "ksets:d=6,k=2", "--mu", "1,2", "--design", "isotropic,uniform,opt", "--trials", "100",
       "--seed", "9"},
      {"adaptive", "--runs", "100", "--seed", "5"},
      {"stars", "--n", "7", "--attach", "2", "--seed-vertices", "0", "--mu", "1", "--trials", "100", "--seed", "1"}};
  for (const auto& c : commands) {
    const auto a = run(c), b = run(c);
    EXPECT_EQ(a.code, b.code);
    EXPECT_FALSE(a.out.empty()) << c[0];
    EXPECT_EQ(a.out, b.out) << c[0];
  }
  // Seeds matter.
  EXPECT_NE(run({"adaptive", "--runs", "100", "--seed", "5"}).out, run({"adaptive", "--runs", "100", "--seed", "6"}).out);
}

TEST(CliDeterminism, ThreadCountDoesNotChangeOutput) {
  const std::vector<std::string> cmd = {"simulate", "--family", "ksets:d=6,k=2", "--trials", "200", "--seed", "4"};
  ::setenv("SNM_THREADS", "1", 1);
  const auto one = run(cmd);
  ::setenv("SNM_THREADS", "3", 1);
  const auto three = run(cmd);
  ::unsetenv("SNM_THREADS");
  EXPECT_EQ(one.out, three.out);
}

TEST(CliProcess, ExecutableRuns) {
  const std::string cmd = std::string(SNM_CLI_PATH) + " family --family ksets:d=4,k=1 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string output;
  std::array<char, 256> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) output += buf.data();
  const int status = ::pclose(pipe);
  EXPECT_EQ(WEXITSTATUS(status), 0);
  EXPECT_EQ(output, run({"family", "--family", "ksets:d=4,k=1"}).out);
  const int refused = std::system((std::string(SNM_CLI_PATH) + " simulate --family ksets:d=40,k=20 2>/dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(refused), snm::cli::kCapability);
}
