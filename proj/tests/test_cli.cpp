#include "bergman/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "bergman/errors.hpp"
#include "bergman/symprod.hpp"
#include "doctest.h"

using namespace bergman;
using namespace bergman::cli;
namespace fsys = std::filesystem;

namespace {

fsys::path temp_dir(const std::string& leaf) {
  const auto dir = fsys::temp_directory_path() / "bergman_cli_tests" / leaf;
  fsys::create_directories(dir);
  return dir;
}

RunConfig base_config(const std::string& command, const std::string& leaf) {
  RunConfig c;
  c.command = command;
  c.k_values = {3, 6};
  c.points = {{0.0, 1.0}, {0.25, 1.2}};
  c.max_word_length = 8;
  c.output = temp_dir(leaf).string();
  c.threads = 2;
  return c;
}

}  // namespace

TEST_CASE("flag parsing") {
  const RunConfig c = parse_args(
      {"verify", "--group", "bolza", "--k", "3,5..7", "--points",
       "0,1;0.5,2", "--word-length", "9", "--out", "outdir", "--threads", "4",
       "--element-cap", "1e5", "--tail-target", "1e-6", "--no-prune"});
  CHECK(c.command == "verify");
  CHECK(c.k_values == std::vector<int>{3, 5, 6, 7});
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[1][1] == 2.0);
  CHECK(c.max_word_length == 9);
  CHECK(c.output == "outdir");
  CHECK(c.threads == 4);
  CHECK(c.element_cap == 100000);
  CHECK(c.tol.tail_target == 1e-6);
  CHECK_FALSE(c.prune);

  CHECK_THROWS_AS(parse_args({}), ValidationError);
  CHECK_THROWS_AS(parse_args({"frobnicate"}), ValidationError);
  CHECK_THROWS_AS(parse_args({"verify", "--bogus"}), ValidationError);
  CHECK_THROWS_AS(parse_args({"verify", "--k"}), ValidationError);
  CHECK_THROWS_AS(parse_args({"verify", "--points", "1;2"}), ValidationError);
  CHECK_THROWS_AS(parse_args({"verify", "--k", "9..3"}), ValidationError);
}

TEST_CASE("grid specs expand in canonical order") {
  const RunConfig c =
      parse_args({"kernel", "--points", "grid:-1:1:3,0.5:1.5:2"});
  REQUIRE(c.grid.has_value());
  const auto pts = resolve_points(c);
  REQUIRE(pts.size() == 6);
  CHECK(pts[0].x() == -1.0);
  CHECK(pts[0].y() == 0.5);
  CHECK(pts[1].x() == 0.0);
  CHECK(pts[2].x() == 1.0);
  CHECK(pts[3].y() == 1.5);

  CHECK_THROWS_AS(resolve_points(parse_args({"kernel", "--points", "grid:0:1:0,1:2:2"})),
                  ValidationError);
}

TEST_CASE("config file with flag precedence") {
  const auto dir = temp_dir("config");
  const auto path = dir / "run.json";
  nlohmann::json j;
  j["group"] = "bolza";
  j["k"] = {4, 5};
  j["points"] = {{0.0, 1.0}};
  j["word_length"] = 6;
  j["output"] = (dir / "from_config").string();
  j["tolerances"] = {{"tail_target", 1e-5}};
  std::ofstream(path) << j.dump();

  const RunConfig c = parse_args(
      {"kernel", "--config", path.string(), "--k", "3"});
  CHECK(c.command == "kernel");
  CHECK(c.k_values == std::vector<int>{3});  // flag wins
  CHECK(c.max_word_length == 6);             // file value survives
  CHECK(c.tol.tail_target == 1e-5);
  REQUIRE(c.points.size() == 1);

  CHECK_THROWS_AS(parse_args({"kernel", "--config", (dir / "nope.json").string()}),
                  ValidationError);
}

TEST_CASE("kernel command emits rows near the identity value") {
  RunConfig c = base_config("kernel", "kernel_basic");
  c.points = {{0.0, 1.0}};
  c.k_values = {3};
  c.max_word_length = 12;
  const RunOutput out = run_kernel(c);
  CHECK(out.exit_code == kExitOk);
  REQUIRE(out.report["rows"].size() == 1);
  const auto& row = out.report["rows"][0];
  // Dominated by the identity term 5/(4 pi) ~ 0.39789.
  CHECK(std::abs(row["bkx"].get<double>() - 0.3978873577297383) < 0.05);
  // Convergence column: the word-length-12 value against word length 10.
  CHECK(row["rel_change"].get<double>() <= 1e-10);
  CHECK(row["asym_deviation"].get<double>() > 0.0);
  CHECK(fsys::exists(fsys::path(c.output) / "kernel_report.json"));
  CHECK(fsys::exists(fsys::path(c.output) / "kernel.csv"));
}

TEST_CASE("kernel command validates its inputs") {
  RunConfig empty = base_config("kernel", "kernel_empty");
  empty.points.clear();
  CHECK_THROWS_AS(run_kernel(empty), ValidationError);

  RunConfig badk = base_config("kernel", "kernel_badk");
  badk.k_values = {2};
  CHECK_THROWS_AS(run_kernel(badk), ValidationError);
}

TEST_CASE("verify command passes on the Bolza surface") {
  RunConfig c = base_config("verify", "verify_basic");
  const RunOutput out = run_verify(c);
  CHECK(out.exit_code == kExitOk);
  const auto& summary = out.report["summary"];
  CHECK(summary["all_passed"].get<bool>());
  CHECK(summary["checks_total"].get<int>() == 12);  // 2 points x 2 k x 3
  for (const auto& row : out.report["rows"]) {
    CHECK(row["theorem1"]["passed"].get<bool>());
    CHECK(row["chain"]["link1"]["passed"].get<bool>());
    CHECK(row["chain"]["link2"]["passed"].get<bool>());
    CHECK(row["cor1_below"].get<bool>());
    // Sensitivity value: C_X at half the enumerated bound dominates C_X.
    CHECK(row["c_x_at_half_r"].get<double>() >=
          row["chain"]["c_x"].get<double>());
  }
  CHECK(out.report["enumeration"]["r_upper"].get<double>() ==
        doctest::Approx(3.0571418389619963).epsilon(1e-8));
}

TEST_CASE("verify with the identity-only truncation passes trivially") {
  RunConfig c = base_config("verify", "verify_l0");
  c.max_word_length = 0;
  const RunOutput out = run_verify(c);
  CHECK(out.exit_code == kExitOk);
  for (const auto& row : out.report["rows"])
    CHECK(row["theorem1"]["lhs"].get<double>() <= 1e-12);
}

TEST_CASE("a negative bound tolerance demands slack and can fail") {
  RunConfig c = base_config("verify", "verify_strict");
  c.tol.bound_check_rel = -0.999;  // require lhs <= 0.001 rhs
  const RunOutput out = run_verify(c);
  CHECK(out.exit_code == kExitBoundFailure);
  CHECK_FALSE(out.report["summary"]["all_passed"].get<bool>());
}

TEST_CASE("corrupted group files are rejected with the generator named") {
  const auto dir = temp_dir("badgroup");
  const auto path = dir / "group.json";
  nlohmann::json j;
  j["label"] = "broken";
  j["genus"] = 2;
  j["generators"] = {{1.0, 0.0, 0.0, 1.0},
                     {1.0, 0.0, 0.0, 1.0},
                     {2.0, 0.0, 0.0, 1.0},  // det = 2
                     {1.0, 0.0, 0.0, 1.0}};
  std::ofstream(path) << j.dump();
  RunConfig c = base_config("verify", "badgroup_run");
  c.group = path.string();
  try {
    run_verify(c);
    FAIL("expected validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("generator 2") != std::string::npos);
  }
}

TEST_CASE("symd reduces to verify at d = 1 and reports densities at d = 2") {
  RunConfig v = base_config("verify", "symd_vs_verify");
  const RunOutput vout = run_verify(v);

  RunConfig s = base_config("symd", "symd_d1");
  s.command = "symd";
  s.d = 1;
  const RunOutput sout = run_symd(s);
  CHECK(sout.exit_code == kExitOk);
  REQUIRE(sout.report["rows"].size() == vout.report["rows"].size());
  for (std::size_t i = 0; i < sout.report["rows"].size(); ++i) {
    const auto& srow = sout.report["rows"][i];
    const auto& vrow = vout.report["rows"][i];
    // Same r_upper, same sets, same path: identical payload numbers.
    CHECK(srow["theorem2_rhs"].get<double>() ==
          vrow["theorem1"]["rhs"].get<double>());
    CHECK(srow["caveat"].get<std::string>() == std::string(kSymdCaveat));
  }

  RunConfig s2 = base_config("symd", "symd_d2");
  s2.command = "symd";
  s2.d = 2;
  s2.points = {{0.0, 1.0}, {0.0, 2.0}};
  s2.k_values = {8, 12};
  const RunOutput out2 = run_symd(s2);
  REQUIRE(out2.report["rows"].size() == 2);
  CHECK(out2.report["rows"][0]["hyp_density"].get<double>() ==
        doctest::Approx(0.25).epsilon(1e-14));
  CHECK(out2.report["caveat"].get<std::string>() == std::string(kSymdCaveat));
}

TEST_CASE("symd validates degree and dimension condition") {
  RunConfig c = base_config("symd", "symd_bad");
  CHECK_THROWS_AS(run_symd(c), ValidationError);  // no d

  c.d = 2;
  c.points = {{0.0, 1.0}};  // not a multiple of d
  CHECK_THROWS_AS(run_symd(c), ValidationError);

  c.points = {{0.0, 1.0}, {0.0, 2.0}};
  c.d = 2;
  c.k_values = {3};  // 2(k-1)(g-1) = 4 <= ... fails only for d >= 4
  c.d = 4;
  c.points = {{0.0, 1.0}, {0.0, 2.0}, {0.3, 1.0}, {-0.3, 1.0}};
  try {
    run_symd(c);
    FAIL("expected dims violation");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("k = 3") != std::string::npos);
  }
}

TEST_CASE("injectivity command stabilizes") {
  RunConfig c = base_config("injectivity", "inj");
  c.command = "injectivity";
  c.max_word_length = 10;
  const RunOutput out = run_injectivity(c);
  CHECK(out.exit_code == kExitOk);
  const auto& rows = out.report["rows"];
  REQUIRE(rows.size() == 10);
  const double r6 = rows[5]["r_upper"].get<double>();
  const double r8 = rows[7]["r_upper"].get<double>();
  const double r10 = rows[9]["r_upper"].get<double>();
  CHECK(r6 == doctest::Approx(3.0571418389619963).epsilon(1e-6));
  CHECK(r8 == doctest::Approx(r10).epsilon(1e-12));
  // Any single letter realizes the systole; the strict-minimum winner is
  // roundoff-determined but deterministic.
  CHECK(out.report["estimate"]["argmin_word"].get<std::string>().substr(0, 1) ==
        "g");
}

TEST_CASE("reports are byte-identical across worker counts") {
  RunConfig c1 = base_config("verify", "det1");
  c1.threads = 1;
  RunConfig c8 = base_config("verify", "det8");
  c8.threads = 8;
  c8.output = c1.output;  // same resolved config
  const std::string payload1 = run_verify(c1).report.dump(2);
  const std::string payload8 = run_verify(c8).report.dump(2);
  CHECK(payload1 == payload8);
}

TEST_CASE("exit codes map errors as documented") {
  const auto dir = temp_dir("main_entry");
  const std::string out = (dir / "out").string();

  {
    const char* argv[] = {"bergman", "kernel", "--points", "0,1", "--k", "3",
                          "--word-length", "4", "--out", out.c_str()};
    CHECK(main_entry(10, argv) == kExitOk);
  }
  {
    const char* argv[] = {"bergman", "kernel", "--points", "", "--k", "3"};
    CHECK(main_entry(6, argv) == kExitValidation);
  }
  {
    const char* argv[] = {"bergman", "kernel", "--points", "0,1",
                          "--k", "3", "--word-length", "6",
                          "--no-prune", "--element-cap", "50",
                          "--out", out.c_str()};
    CHECK(main_entry(13, argv) == kExitBudget);
  }
  {
    const char* argv[] = {"bergman", "verify", "--points", "0,1", "--k", "3",
                          "--word-length", "6", "--bound-tol", "-0.999",
                          "--out", out.c_str()};
    CHECK(main_entry(12, argv) == kExitBoundFailure);
  }
  {
    const char* argv[] = {"bergman", "--help"};
    CHECK(main_entry(2, argv) == kExitOk);
  }
}
