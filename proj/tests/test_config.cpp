#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fdstokes/config.hpp"

using namespace fdstokes;

namespace {

RunConfig from_args(std::vector<std::string> args) {
  args.insert(args.begin(), "fdstokes");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_config(static_cast<int>(argv.size()), argv.data());
}

std::string key_of(const Assignments& a) {
  try {
    make_run_config(a);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig rc = make_run_config({});
  CHECK(rc.method.variant == Variant::NoStab);
  CHECK(rc.method.fe == FeTriple{2, 1, 1});
  CHECK(rc.method.gamma0 == 0.05);
  CHECK(rc.method.theta == 0.05);
  CHECK(rc.method.gamma == 0.05);
  CHECK(rc.method.theta_min == 0.01);
  CHECK(rc.method.viscous_factor == 2);
  CHECK(rc.geometry.radius == 0.21);
  CHECK(rc.geometry.center == Point(0.5, 0.5));
  CHECK(rc.n_list == std::vector<int>{10, 20, 40, 80});
  CHECK(rc.subsegments == 8);
  CHECK(rc.out == "convergence.csv");
  CHECK_FALSE(rc.emit_matrix);
  CHECK_FALSE(rc.probe_infsup);
  CHECK(rc.least_squares_fallback);
}

TEST_CASE("variant sets hat flags") {
  const RunConfig th = make_run_config({{"variant", "HR_TH"}, {"fe", "2,1,1"}});
  CHECK(th.method.hat_u);
  CHECK(th.method.hat_p);
  const RunConfig bp = make_run_config({{"variant", "HR_BP"}, {"fe", "1,1,0"}});
  CHECK(bp.method.hat_u);
  CHECK_FALSE(bp.method.hat_p);
  const RunConfig bh = make_run_config({{"variant", "BarbosaHughes"}, {"fe", "1,1,1"}});
  CHECK_FALSE(bh.method.hat_u);
}

TEST_CASE("inadmissible and malformed values name their key") {
  CHECK(key_of({{"variant", "HR_IP"}, {"fe", "2,1,1"}}) == "fe");
  CHECK(key_of({{"variant", "BH_0_IP"}}) == "variant");  // default fe 2,1,1 is not admissible
  CHECK(key_of({{"variant", "Foo"}}) == "variant");
  CHECK(key_of({{"fe", "2,1"}}) == "fe");
  CHECK(key_of({{"gamma0", "abc"}}) == "gamma0");
  CHECK(key_of({{"gamma0", "-1"}}) == "method");
  CHECK(key_of({{"viscous_factor", "3"}}) == "method");
  CHECK(key_of({{"radius", "0.6"}}) == "radius");
  CHECK(key_of({{"n", "10,,20"}}) == "n");
  CHECK(key_of({{"n", "0"}}) == "n");
  CHECK(key_of({{"subsegments", "0"}}) == "subsegments");
  CHECK(key_of({{"error_degree", "9"}}) == "error_degree");
  CHECK(key_of({{"emit_matrix", "maybe"}}) == "emit_matrix");
  CHECK(key_of({{"singular", "pivot"}}) == "singular");
  CHECK(key_of({{"bogus", "1"}}) == "bogus");
  CHECK(key_of({{"config", "x"}}) == "config");
}

TEST_CASE("HR_TH with the default FE triple is accepted") {
  CHECK_NOTHROW(make_run_config({{"variant", "HR_TH"}}));
}

TEST_CASE("unknown key message names the key") {
  try {
    make_run_config({{"thetta", "0.1"}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("thetta") != std::string::npos);
  }
}

TEST_CASE("config text parsing") {
  const Assignments a = parse_config_text(
      "# comment\n\n  variant = HR_BP  # trailing\nfe=1,1,1\r\nn = 4, 8\n");
  REQUIRE(a.size() == 3);
  CHECK(a[0] == std::pair<std::string, std::string>{"variant", "HR_BP"});
  CHECK(a[1].second == "1,1,1");
  CHECK(a[2].second == "4, 8");
  const RunConfig rc = make_run_config(a);
  CHECK(rc.n_list == std::vector<int>{4, 8});
  CHECK_THROWS_AS(parse_config_text("variant HR_BP\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("= 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_file("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("later assignments override earlier ones") {
  const RunConfig rc = make_run_config({{"theta", "0.1"}, {"theta", "0.2"}});
  CHECK(rc.method.theta == 0.2);
}

TEST_CASE("singular key") {
  CHECK(make_run_config({{"singular", "fail"}}).least_squares_fallback == false);
  CHECK(make_run_config({{"singular", "least-squares"}}).least_squares_fallback == true);
}

TEST_CASE("flags override the config file") {
  const auto path = std::filesystem::temp_directory_path() / "fdstokes_test_config.cfg";
  {
    std::ofstream out(path);
    out << "variant = HR_BP\nfe = 1,1,1\ntheta = 0.3\nn = 4,8\ncenter = 0.5, 0.5\n";
  }
  const RunConfig rc = from_args({"--config", path.string(), "--theta", "0.07", "--probe-infsup"});
  CHECK(rc.method.variant == Variant::HR_BP);
  CHECK(rc.method.theta == 0.07);
  CHECK(rc.n_list == std::vector<int>{4, 8});
  CHECK(rc.geometry.center.x() == 0.5);
  CHECK(rc.probe_infsup);
  CHECK_FALSE(rc.emit_matrix);
  std::filesystem::remove(path);
}

TEST_CASE("command line errors") {
  CHECK_THROWS_AS(from_args({"--no-such-flag"}), ConfigError);
  CHECK_THROWS_AS(from_args({"--variant", "HR_IP"}), ConfigError);
  CHECK_THROWS_AS(from_args({"--help"}), HelpRequested);
  const RunConfig rc = from_args({"--variant", "HR_IP", "--fe", "1,0,1", "--n", "6", "--emit-matrix"});
  CHECK(rc.method.fe == FeTriple{1, 0, 1});
  CHECK(rc.n_list == std::vector<int>{6});
  CHECK(rc.emit_matrix);
}

TEST_CASE("runs key") {
  const RunConfig one = make_run_config({{"variant", "HR_BP"}, {"fe", "1,1,0"}});
  REQUIRE(one.runs.size() == 1);
  CHECK(one.runs[0].variant == Variant::HR_BP);
  CHECK(run_output_path(one, 0) == "convergence.csv");

  const RunConfig rc = make_run_config(
      {{"runs", "BH_1_BP:1,1,1; BH_0_IP:1,0,0 ;HR_TH:2,1,0"}, {"gamma", "0.2"}, {"out", "out/fig.csv"}});
  REQUIRE(rc.runs.size() == 3);
  CHECK(rc.runs[1].variant == Variant::BH_0_IP);
  CHECK(rc.runs[1].fe == FeTriple{1, 0, 0});
  CHECK(rc.runs[2].hat_p);
  for (const auto& m : rc.runs) CHECK(m.gamma == 0.2);
  CHECK(rc.method.variant == Variant::BH_1_BP);
  CHECK(run_output_path(rc, 0) == "out/fig_BH_1_BP_111.csv");
  CHECK(run_output_path(rc, 2) == "out/fig_HR_TH_210.csv");

  CHECK(key_of({{"runs", "HR_IP:2,1,1"}}) == "runs");
  CHECK(key_of({{"runs", "HR_IP"}}) == "runs");
  CHECK(key_of({{"runs", "Nope:1,1,1"}}) == "runs");
  CHECK(key_of({{"runs", "HR_IP:1,0"}}) == "runs");
}

TEST_CASE("shipped configs parse") {
  int files = 0;
  std::size_t runs = 0;
  for (const auto& entry : std::filesystem::directory_iterator(FDSTOKES_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    CAPTURE(entry.path().string());
    const RunConfig rc = make_run_config(parse_config_file(entry.path().string()));
    ++files;
    runs += rc.runs.size();
  }
  CHECK(files == 7);
  CHECK(runs == 18);
}
