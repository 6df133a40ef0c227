#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "passivity/passivity.hpp"

using namespace passivity;
using passivity::io::Json;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
  Json report() const { return Json::parse(out); }
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("passivity_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write_fixture(const std::string& name) {
    const std::string p = path(name + ".json");
    EXPECT_EQ(run({"--deterministic", "fixtures", "--name", name, "-o", p}).code, cli::kPass);
    return p;
  }

  std::string write(const std::string& name, const Realization& r) {
    const std::string p = path(name);
    io::save(p, r);
    return p;
  }

  std::filesystem::path dir_;
};

}  // namespace

TEST_F(Cli, CheckPositiveRealOnF) {
  const CliRun r = run({"--deterministic", "check", "--family", "p", "--solve", write_fixture("f")});
  ASSERT_EQ(r.code, cli::kPass) << r.out << r.err;
  const Json rep = r.report();
  EXPECT_EQ(rep["verdict"], "pass");
  EXPECT_EQ(rep["exit_code"], 0);
  const double p = rep["certificate"]["P"][0][0][0].get<double>();
  EXPECT_NEAR(p, 1.0, 0.5);
  EXPECT_GT(p, 0.0);
  EXPECT_EQ(rep["certificate"]["P"][0][0][1].get<double>(), 0.0);
  EXPECT_FALSE(rep.contains("timestamp"));
}

TEST_F(Cli, CheckDiscreteBoundedOnGGivesWitness) {
  const CliRun r = run({"--deterministic", "check", "--family", "db", "--solve", write_fixture("g")});
  ASSERT_EQ(r.code, cli::kRefuted) << r.out << r.err;
  const Json rep = r.report();
  EXPECT_EQ(rep["verdict"], "refuted");
  EXPECT_GT(rep["witness"]["norm_F"].get<double>(), 1.0);
  const Complex z(rep["witness"]["z"][0].get<double>(), rep["witness"]["z"][1].get<double>());
  EXPECT_GE(std::abs(z), 1.0);
  EXPECT_NEAR(std::abs(evaluate(fixture({FixtureName::g}), z).value(0, 0)), rep["witness"]["norm_F"].get<double>(),
              1e-12);
}

TEST_F(Cli, CombineLosslessFixtures) {
  const std::string in = write_fixture("F1") + "," + write_fixture("F2") + "," + write_fixture("F3");
  const CliRun r = run({"--deterministic", "combine", "--family", "p", "--inputs", in, "--random", "3", "--seed", "5",
                     "-o", path("out.json")});
  ASSERT_EQ(r.code, cli::kPass) << r.out << r.err;
  const Json rep = r.report();
  EXPECT_LE(rep["margins"]["q_norm"].get<double>(), 1e-8);
  EXPECT_EQ(rep["k"], 3);
  const Realization out = io::load(path("out.json")).realization;
  EXPECT_EQ(out.n(), 2);
  EXPECT_EQ(out.m(), 2);
}

TEST_F(Cli, ReportsAreDeterministic) {
  const std::string f = write_fixture("f");
  const std::vector<std::string> args = {"--deterministic", "--seed", "9", "check", "--family", "dp", f};
  const CliRun a = run(args), b = run(args);
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(a.out, b.out);
  const Json rep = a.report();
  EXPECT_EQ(rep["seed"], 9);
  EXPECT_EQ(rep["command"].size(), args.size());
  EXPECT_EQ(rep["inputs_digest"], io::digest(io::read_file(f)));
  const std::string in = write_fixture("F1") + "," + write_fixture("F3");
  const std::vector<std::string> comb = {"--deterministic", "combine", "--family", "b", "--inputs", in,
                                         "--random",        "2",       "--seed",   "3", "-o",       path("c.json")};
  EXPECT_EQ(run(comb).out, run(comb).out);
  EXPECT_TRUE(run({"check", "--family", "p", f}).report().contains("timestamp"));
}

TEST_F(Cli, ExitCodesMatchLibraryVerdictsProperty) {
  std::mt19937_64 rng(83);
  const std::pair<std::string, Family> families[] = {
      {"p", Family::alpha}, {"b", Family::beta}, {"dp", Family::gamma}, {"db", Family::delta}};
  for (int trial = 0; trial < 24; ++trial) {
    const auto& [flag, fam] = families[trial % 4];
    const Eigen::Index n = 1 + trial % 2;
    // Small random arrays land on both sides of each family boundary.
    Matrix arr = linalg::complex_gaussian(n + 1, n + 1, rng) * (0.3 + 0.15 * (trial % 12));
    if (fam == Family::alpha || fam == Family::beta) arr.topLeftCorner(n, n) -= 1.5 * Matrix::Identity(n, n);
    if (fam == Family::alpha || fam == Family::gamma) arr.bottomRightCorner(1, 1)(0, 0) += 1.0;
    const Realization r = Realization::from_array(arr, n);
    const std::string file = write("r" + std::to_string(trial) + ".json", r);
    const CliRun out = run({"--deterministic", "check", "--family", flag, "--grid", "32", file});
    ASSERT_NE(out.code, cli::kUsage) << out.err;

    const SolveResult solved = solve_P(r, fam);
    const MembershipReport oracle = membership_oracle(r, fam, make_grid(domain_of(fam), 32, 32, 0));
    int expected;
    if (!oracle.passed())
      expected = solved.found() ? cli::kDisagreement : cli::kRefuted;
    else
      expected = solved.found() ? cli::kPass : cli::kInconclusive;
    EXPECT_EQ(out.code, expected) << flag << " trial " << trial;
    EXPECT_EQ(out.report()["oracle"]["verdict"], std::string(to_string(oracle.verdict)));
  }
}

TEST_F(Cli, CheckWithGivenP) {
  const std::string f = write_fixture("f");
  const std::string p = path("p.json");
  io::write_file(p, "[[1]]");
  EXPECT_EQ(run({"check", "--family", "p", "--p-matrix", p, f}).code, cli::kPass);
  io::write_file(p, "[[-1]]");
  EXPECT_EQ(run({"check", "--family", "p", "--p-matrix", p, f}).code, cli::kInconclusive);
  EXPECT_EQ(run({"check", "--family", "p", "--p-matrix", p, "--solve", f}).code, cli::kUsage);
}

TEST_F(Cli, CheckLossless) {
  const CliRun r = run({"--deterministic", "check", "--family", "p", "--lossless", write_fixture("F2")});
  EXPECT_EQ(r.code, cli::kPass) << r.out << r.err;
  EXPECT_EQ(r.report()["oracle"]["oracle"], "LP");
  EXPECT_EQ(run({"check", "--family", "p", "--lossless", write_fixture("f")}).code, cli::kRefuted);
  EXPECT_EQ(run({"check", "--family", "db", "--lossless", write_fixture("F1")}).code, cli::kUsage);
}

TEST_F(Cli, UsageErrors) {
  const std::string f = write_fixture("f");
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"check", f}).code, cli::kUsage);
  EXPECT_EQ(run({"check", "--family", "q", f}).code, cli::kUsage);
  EXPECT_EQ(run({"check", "--family", "p", path("missing.json")}).code, cli::kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run({"fixtures", "--name", "F1", "--a", "0", "-o", path("x.json")}).code, cli::kUsage);
  EXPECT_EQ(run({"transform", "--op", "balance", f, "-o", path("x.json")}).code, cli::kUsage);
  EXPECT_EQ(run({"eval", "--at", "x,y", f}).code, cli::kUsage);
  io::write_file(path("bad.json"), "{\"n\": 1,");
  const CliRun bad = run({"eval", "--at", "1,0", path("bad.json")});
  EXPECT_EQ(bad.code, cli::kUsage);
  EXPECT_NE(bad.err.find("bad.json"), std::string::npos);
  EXPECT_EQ(run({"--help"}).code, cli::kPass);
}

TEST_F(Cli, Eval) {
  const CliRun r = run({"eval", "--at", "1,0", write_fixture("f")});
  ASSERT_EQ(r.code, cli::kPass);
  EXPECT_NEAR(r.report()["value"][0][0][0].get<double>(), 1.0 / 6.0, 1e-15);
  const CliRun pole = run({"eval", "--at", "0", write_fixture("g")});
  EXPECT_EQ(pole.code, cli::kUsage);
  EXPECT_NE(pole.err.find("PoleAt"), std::string::npos) << pole.err;
}

TEST_F(Cli, Wmat) {
  const CliRun r = run({"wmat", "--family", "db", "--balanced", "--n", "1", "--m", "1"});
  ASSERT_EQ(r.code, cli::kPass) << r.err;
  const Matrix w = io::matrix_from_json(r.report()["W"], "W");
  Matrix want = Matrix::Zero(4, 4);
  want.diagonal() << -1.0, -1.0, 1.0, 1.0;
  EXPECT_EQ(w, want);
  const std::string p = path("p.json");
  io::write_file(p, "[[2, 0], [0, 3]]");
  const CliRun withp = run({"wmat", "--family", "p", "--n", "2", "--m", "1", "--p-matrix", p});
  ASSERT_EQ(withp.code, cli::kPass) << withp.err;
  EXPECT_EQ(io::matrix_from_json(withp.report()["W"], "W")(0, 3), Complex(-2.0, 0.0));
  EXPECT_EQ(run({"wmat", "--family", "b", "--eta", "0.5", "--n", "1", "--m", "1"}).code, cli::kUsage);
}

TEST_F(Cli, Transforms) {
  const std::string f = write_fixture("f");
  const std::string out = path("t.json");
  ASSERT_EQ(run({"transform", "--op", "invert-array", f, "-o", out}).code, cli::kPass);
  EXPECT_EQ(io::load(out).realization.array(), fixture({FixtureName::g}).array());

  ASSERT_EQ(run({"transform", "--op", "cayley-fn", f, "-o", out}).code, cli::kPass);
  EXPECT_EQ(run({"check", "--family", "b", out}).code, cli::kPass);

  ASSERT_EQ(run({"transform", "--op", "bilinear", f, "-o", out}).code, cli::kPass);
  EXPECT_EQ(run({"check", "--family", "dp", out}).code, cli::kPass);

  EXPECT_EQ(run({"transform", "--op", "invert-fn", f, "-o", out}).code, cli::kUsage);

  const std::string t = path("t_matrix.json");
  io::write_file(t, "[[2]]");
  ASSERT_EQ(run({"transform", "--op", "coords", "--t-matrix", t, f, "-o", out}).code, cli::kPass);
  const Realization moved = io::load(out).realization;
  EXPECT_LT(std::abs(evaluate(moved, 1.0).value(0, 0) - 1.0 / 6.0), 1e-15);

  const Realization scaled = change_coordinates(fixture({FixtureName::F1}), Matrix::Identity(2, 2) * 3.0);
  const std::string sf = write("scaled.json", scaled);
  const CliRun bal = run({"transform", "--op", "balance", "--family", "p", sf, "-o", out});
  ASSERT_EQ(bal.code, cli::kPass) << bal.err;
  EXPECT_TRUE(verify_kyp(io::load(out).realization, Matrix::Identity(2, 2), Family::alpha).verified());
  EXPECT_EQ(run({"transform", "--op", "nope", f, "-o", out}).code, cli::kUsage);
}

TEST_F(Cli, CombineWithIsometryFile) {
  const std::string iso = path("iso.json");
  io::write_file(iso, R"({"state_blocks": [[[0.6]], [[0.8]]], "io_blocks": [[[0.8]], [[0.6]]]})");
  const std::string in = write_fixture("f") + "," + write_fixture("f");
  const CliRun r = run({"combine", "--family", "db", "--inputs", in, "--isometries", iso, "-o", path("o.json")});
  EXPECT_EQ(r.code, cli::kPass) << r.err;
  io::write_file(iso, R"({"state_blocks": [[[1]], [[1]]], "io_blocks": [[[1]], [[1]]]})");
  EXPECT_EQ(run({"combine", "--family", "db", "--inputs", in, "--isometries", iso, "-o", path("o.json")}).code,
            cli::kUsage);
  const std::string bad = write_fixture("f") + "," + write_fixture("g");
  const CliRun nc = run({"combine", "--family", "db", "--inputs", bad, "--random", "2", "-o", path("o.json")});
  EXPECT_EQ(nc.code, cli::kUsage);
  EXPECT_NE(nc.err.find("input 1"), std::string::npos) << nc.err;
}

TEST_F(Cli, SeedFromEnvironment) {
  const std::string f = write_fixture("f");
  ::setenv("PASSIVITY_SEED", "42", 1);
  const Json rep = run({"--deterministic", "check", "--family", "p", f}).report();
  ::unsetenv("PASSIVITY_SEED");
  EXPECT_EQ(rep["seed"], 42);
  EXPECT_EQ(rep["grid"]["seed"], 42);
}

TEST_F(Cli, BinaryExitCodes) {
  const std::string tool = PASSIVITY_TOOL;
  const std::string g = write_fixture("g");
  const auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status(tool + " check --family db " + g), cli::kRefuted);
  EXPECT_EQ(status(tool + " check --family p " + g), cli::kPass);
  EXPECT_EQ(status(tool + " check"), cli::kUsage);
}
