#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "tlsdd_cli/commands.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tlsdd::cli;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("tlsdd_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_text(const std::string& name, const std::string& text) {
    auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }
  fs::path write(const std::string& name, const json& j) { return write_text(name, j.dump(2)); }

  int call(std::vector<std::string> args) {
    args.insert(args.begin(), "tlsdd");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    out_.str("");
    err_.str("");
    return main_entry(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

json small_echo() {
  return json{{"name", "small_echo"},
              {"protocol",
               {{"type", "echo"}, {"dphi", -72}, {"tau1", 30}, {"tau2", {{"start", 10}, {"stop", 50}, {"step", 10}}}}},
              {"evolution", {{"mode", "monte_carlo"}, {"n_traj", 8}, {"sampling", "synthesized"}, {"dt", 0.05}}},
              {"seed", 5}};
}

}  // namespace

TEST(GitBlobSha1, MatchesGit) {
  EXPECT_EQ(git_blob_sha1(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(git_blob_sha1("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_F(CliTest, RunIsBitwiseReproducible) {
  auto cfg = write("echo.json", small_echo());
  ASSERT_EQ(call({"run", "--config", cfg.string(), "--out", (dir_ / "a").string()}), kExitOk) << err_.str();
  ASSERT_EQ(call({"run", "--config", cfg.string(), "--out", (dir_ / "b").string(), "--threads", "2"}), kExitOk)
      << err_.str();
  const auto a = slurp(dir_ / "a" / "echo.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "b" / "echo.csv"));
  ASSERT_EQ(call({"run", "--config", cfg.string(), "--out", (dir_ / "c").string(), "--seed", "6"}), kExitOk);
  EXPECT_NE(a, slurp(dir_ / "c" / "echo.csv"));
}

TEST_F(CliTest, RunWritesMetadataAndPlotScript) {
  auto cfg = write("echo.json", small_echo());
  ASSERT_EQ(call({"run", "--config", cfg.string(), "--out", (dir_ / "o").string()}), kExitOk) << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "o" / "plot_echo.py"));
  auto meta = json::parse(slurp(dir_ / "o" / "metadata.json"));
  EXPECT_EQ(meta.at("seed").get<std::uint64_t>(), 5u);
  EXPECT_EQ(meta.at("protocol"), "echo");
  EXPECT_EQ(meta.at("config_sha1"), git_blob_sha1(slurp(cfg)));
  EXPECT_EQ(meta.at("config").at("name"), "small_echo");
  EXPECT_TRUE(meta.contains("version"));
  const auto csv = slurp(dir_ / "o" / "echo.csv");
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  EXPECT_EQ(csv.substr(0, csv.find('\n')).find("n_refocus,tau2_ns,"), 0u);
}

TEST_F(CliTest, NegativeT1IsConfigError) {
  auto j = small_echo();
  j["device"] = {{"t1_qb", -1e-6}};
  auto cfg = write("bad.json", j);
  EXPECT_EQ(call({"run", "--config", cfg.string(), "--out", (dir_ / "x").string()}), kExitConfig);
  EXPECT_NE(err_.str().find("device.t1_qb"), std::string::npos) << err_.str();
  EXPECT_FALSE(fs::exists(dir_ / "x" / "echo.csv"));
}

TEST_F(CliTest, UnknownFieldIsConfigError) {
  auto j = small_echo();
  j["evolution"]["typo"] = 1;
  EXPECT_EQ(call({"validate", "--config", write("bad.json", j).string()}), kExitConfig);
  EXPECT_NE(err_.str().find("evolution.typo"), std::string::npos) << err_.str();
}

TEST_F(CliTest, CommentsAreRejected) {
  auto cfg = write_text("c.json", "{\n  // comment\n  \"name\": \"x\"\n}\n");
  EXPECT_EQ(call({"validate", "--config", cfg.string()}), kExitConfig);
}

TEST_F(CliTest, MissingFileAndBadFlags) {
  EXPECT_EQ(call({"validate", "--config", (dir_ / "nope.json").string()}), kExitConfig);
  EXPECT_EQ(call({"frobnicate"}), kExitConfig);
  EXPECT_EQ(call({"--help"}), kExitOk);
}

TEST_F(CliTest, InfeasibleScheduleIsRuntimeError) {
  json j{{"protocol", {{"type", "cp_sequence"}, {"dphi", {-84}}, {"n_pulses", {4}}, {"t", {1.0, 2.0}}}},
         {"evolution", {{"mode", "unitary"}}}};
  EXPECT_EQ(call({"run", "--config", write("cp.json", j).string(), "--out", (dir_ / "o").string()}), kExitRuntime);
  EXPECT_NE(err_.str().find("spacing"), std::string::npos) << err_.str();
}

TEST_F(CliTest, PredictTable) {
  json j{{"protocol", {{"type", "cp_sequence"}, {"dphi", {-84}}, {"t", {100.0, 200.0}}}},
         {"predict", {{"dphi", {-60, 0, 60}}, {"n_pulses", {0, 1}}}}};
  ASSERT_EQ(call({"predict", "--config", write("p.json", j).string(), "--out", (dir_ / "p").string()}), kExitOk)
      << err_.str();
  std::istringstream csv(slurp(dir_ / "p" / "predict.csv"));
  std::string header, line;
  std::getline(csv, header);
  EXPECT_EQ(header, "dphi_uPhi0,N,f_osc_GHz,t1_tilde_ns,t_phi_ns,t_e_ns");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(csv, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) {
    EXPECT_NEAR(std::stod(r[3]), 800.0, 1e-6);
    if (std::stod(r[0]) == 0.0) {
      EXPECT_EQ(r[4], "inf");
      EXPECT_NEAR(std::stod(r[5]), 800.0, 1e-6);
    } else {
      EXPECT_LT(std::stod(r[5]), 800.0);
    }
  }
}

TEST_F(CliTest, PredictWithoutNoiseGivesInfiniteDephasing) {
  json j{{"noise", {{"a_phi", 0.0}}},
         {"protocol", {{"type", "cp_sequence"}, {"dphi", {-84}}, {"t", {100.0, 200.0}}}},
         {"predict", {{"dphi", {-84, 30}}, {"n_pulses", {0, 2}}}}};
  ASSERT_EQ(call({"predict", "--config", write("p.json", j).string(), "--out", (dir_ / "p").string()}), kExitOk)
      << err_.str();
  std::istringstream csv(slurp(dir_ / "p" / "predict.csv"));
  std::string line;
  std::getline(csv, line);
  int n = 0;
  while (std::getline(csv, line)) {
    EXPECT_NE(line.find(",inf,"), std::string::npos) << line;
    ++n;
  }
  EXPECT_EQ(n, 4);
}

TEST_F(CliTest, BundledConfigsValidateAndList) {
  for (const auto& f : figures()) {
    auto path = bundled_config_dir() / (f.name + ".json");
    EXPECT_EQ(call({"validate", "--config", path.string()}), kExitOk) << f.name << ": " << err_.str();
  }
  EXPECT_EQ(call({"list-figures"}), kExitOk);
  for (const auto& f : figures()) EXPECT_NE(out_.str().find(f.name), std::string::npos);
}
