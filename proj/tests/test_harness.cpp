#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lwire/commands.hpp"
#include "lwire/config.hpp"
#include "lwire/errors.hpp"
#include "lwire/record.hpp"

using namespace lwire;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("lwire_test_" + std::to_string(std::rand()) + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

int run_cli(const std::string& args, const fs::path& dir) {
  const std::string cmd = "cd '" + dir.string() + "' && '" LWIRE_CLI_PATH "' " + args + " >out.txt 2>err.txt";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.params = {1.0, 0.5};
  c.curve = CurveSpec::wedge(0.6);
  c.ladder = {{0.2, 6.0}, {0.1, 6.0}};
  return c;
}

const char* kCriticalIni = R"([physics]
alpha = 1
v0 = 1

[curve]
kind = wedge
beta = 0.7853981633974483

[operator]
orientation = interior

[ladder]
rungs = 0.2:4, 0.1:4
)";

}  // namespace

TEST_CASE("config grammar") {
  std::istringstream in(R"(; comment
[physics]
alpha = 2
v0 = 0.25
[curve]
kind = filleted
beta = 0.5
fillet_radius = 1.5
[operator]
orientation = exterior
delta_mode = gaussian
width_factor = 0.75
origin_x = 0.1
[ladder]
rungs = 0.05:6, 0.025:6
[solver]
margin = 0.002
seed = 42
[sweep]
axis = v0
values = 0, 0.1, 0.2
)");
  const ExperimentConfig c = parse_config(in);
  CHECK(c.params == PhysicsParams{2.0, 0.25});
  CHECK(c.curve == CurveSpec::filleted(0.5, 1.5));
  CHECK(c.orientation == BiasOrientation::ExteriorBias);
  CHECK(c.delta == DeltaMode::gaussian(0.75));
  CHECK(c.origin_offset == Point{0.1, 0.0});
  CHECK(c.ladder == std::vector<GridRung>{{0.05, 6.0}, {0.025, 6.0}});
  CHECK(*c.margin == 0.002);
  CHECK(c.seed == 42u);
  CHECK(*c.sweep_axis == SweepAxis::V0);
  CHECK(c.sweep_values == std::vector<double>{0.0, 0.1, 0.2});
}

TEST_CASE("config errors") {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return parse_config(in);
  };
  CHECK_THROWS_AS(parse("[physics]\nalpha = one\n"), ConfigError);
  CHECK_THROWS_AS(parse("[physics]\ngamma = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[nonsense]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[physics]\nv0 = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[curve]\nbeta = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("[ladder]\nrungs = 0.1-12\n"), ConfigError);
  CHECK_THROWS_AS(parse("[operator]\norientation = sideways\n"), Error);
  CHECK_THROWS_AS(load_config("/nonexistent/file.ini"), ConfigError);
}

TEST_CASE("default ladder scales with alpha") {
  ExperimentConfig c;
  c.params.alpha = 2.0;
  const auto l = c.effective_ladder();
  REQUIRE(l.size() == 3);
  CHECK(l[0] == GridRung{0.05, 6.0});
  CHECK(l[2] == GridRung{0.025, 12.0});
}

TEST_CASE("CSV schema") {
  CHECK(csv_header() ==
        "schema_version,alpha,v0,beta,fillet_r,orientation,h,R,delta_mode,mu,lambda1,count,verdict,cert,seed");
  const ResultRecord r = run_solve(small_config());
  const auto rows = csv_rows(r);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].rfind("1,1,0.5,0.6,0,interior,0.2,6,lumping,-0.0625,", 0) == 0);
  CHECK(std::count(rows[0].begin(), rows[0].end(), ',') == 14);
}

TEST_CASE("solve reports a verdict and no certificate off the critical line") {
  const ResultRecord r = run_solve(small_config());
  CHECK(r.ok);
  CHECK(r.certificate_status == "n/a");
  CHECK(r.timings.count("scan") == 1);
  CHECK(verdict_consistent(r));
}

TEST_CASE("pure box converges at second order") {
  ExperimentConfig c;
  c.params = {0.0, 0.0};
  c.ladder = {{0.2, 2.0}, {0.1, 2.0}, {0.05, 2.0}, {0.05, 3.0}};
  const ConvergenceReport r = run_converge(c);
  REQUIRE(r.target);
  CHECK(r.observed_order == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::abs(r.extrapolated - *r.target) < std::abs(r.lambda1_h.back() - *r.target));
  CHECK_FALSE(r.inconclusive);
  CHECK(r.R_gap > 0.0);
}

TEST_CASE("sweep axis substitution") {
  const ExperimentConfig c = small_config();
  CHECK(with_axis_value(c, SweepAxis::Beta, 0.3).curve.beta == 0.3);
  CHECK(with_axis_value(c, SweepAxis::V0, 0.1).params.v0 == 0.1);
  CHECK(with_axis_value(c, SweepAxis::Alpha, 2.0).params.alpha == 2.0);
}

TEST_CASE("command line exit codes") {
  TempDir d;
  CHECK(run_cli("transverse --alpha 1 --v0 0.5", d.path) == 0);
  CHECK(slurp(d.path / "out.txt").find("Subcritical") != std::string::npos);
  CHECK(slurp(d.path / "out.txt").find("-0.0625") != std::string::npos);
  CHECK(run_cli("transverse --alpha 1 --v0 1", d.path) == 0);
  CHECK(slurp(d.path / "out.txt").find("bound      none") != std::string::npos);
  CHECK(run_cli("transverse --alpha 2 --v0 0", d.path) == 0);
  CHECK(slurp(d.path / "out.txt").find("mu         -1\n") != std::string::npos);
  CHECK(run_cli("transverse --alpha 0 --v0 1", d.path) == 2);
  CHECK(run_cli("transverse --alpha 1", d.path) == 2);
  CHECK(run_cli("", d.path) == 2);

  d.write("bad.ini", "[physics]\nalpha = x\n");
  CHECK(run_cli("solve --config bad.ini", d.path) == 2);
  CHECK(run_cli("solve --config missing.ini", d.path) == 2);

  d.write("crit.ini", kCriticalIni);
  CHECK(run_cli("solve --config crit.ini --out rec.json", d.path) == 0);
  CHECK(fs::exists(d.path / "rec.json"));
  CHECK(slurp(d.path / "rec.csv").rfind(csv_header(), 0) == 0);
  CHECK(run_cli("certify --config crit.ini", d.path) == 0);
  CHECK(slurp(d.path / "out.txt").find("theorem4 FOUND") != std::string::npos);
  CHECK(run_cli("certify --config crit.ini --family prop2", d.path) == 2);
  CHECK(run_cli("certify --config crit.ini --family bogus", d.path) == 2);

  CHECK(run_cli("sweep --config crit.ini --axis beta --values ''", d.path) == 2);
  CHECK(run_cli("sweep --config crit.ini --axis gamma --values 1", d.path) == 2);
  CHECK(run_cli("sweep --config crit.ini --axis beta --values 2.0", d.path) == 2);

  d.write("one.ini", "[ladder]\nrungs = 0.1:6\n");
  CHECK(run_cli("converge --config one.ini", d.path) == 2);
}

TEST_CASE("sweep rows come out in input order for any worker count") {
  TempDir d;
  d.write("sub.ini", "[physics]\nv0 = 0.5\n[ladder]\nrungs = 0.2:5, 0.1:5\n");
  REQUIRE(run_cli("sweep --config sub.ini --axis beta --values 0.6,0.3,0.9 --jobs 1 --out a.csv", d.path) == 0);
  REQUIRE(run_cli("sweep --config sub.ini --axis beta --values 0.6,0.3,0.9 --jobs 3 --out b.csv", d.path) == 0);
  const std::string a = slurp(d.path / "a.csv");
  CHECK(a == slurp(d.path / "b.csv"));
  std::istringstream rows(a);
  std::string line;
  std::getline(rows, line);
  CHECK(line == "beta,mu,lambda1,count,margin,verdict,cert,error");
  for (const char* v : {"0.6,", "0.3,", "0.9,"}) {
    std::getline(rows, line);
    CHECK(line.rfind(v, 0) == 0);
  }
}

TEST_CASE("a failing sweep point is recorded in its row") {
  TempDir d;
  // h = 0.2 violates the resolution bound once alpha = 2.
  d.write("a.ini", "[physics]\nv0 = 0.5\n[ladder]\nrungs = 0.2:5, 0.1:5\n");
  REQUIRE(run_cli("sweep --config a.ini --axis alpha --values 1,2", d.path) == 0);
  const std::string out = slurp(d.path / "out.txt");
  CHECK(out.find("\n2,,,,,failed,n/a,h = 0.2") != std::string::npos);
  CHECK(out.find("\n1,-0.0625,") != std::string::npos);
}

// Properties.

TEST_SUITE_BEGIN("invariants");

TEST_CASE("records round-trip") {
  ResultRecord ok = run_solve(small_config());
  CHECK(read_record(write_record(ok)) == ok);

  ExperimentConfig crit;
  crit.ladder = {{0.2, 4.0}, {0.1, 4.0}};
  const ResultRecord with_cert = run_solve(crit);
  REQUIRE(with_cert.certificate);
  CHECK(read_record(write_record(with_cert)) == with_cert);

  ResultRecord failed = ok;
  failed.ok = false;
  failed.error = "solver gave up";
  failed.rungs.pop_back();
  failed.verdict = {};
  CHECK(read_record(write_record(failed)) == failed);

  ExperimentConfig odd = small_config();
  odd.params.v0 = 0.1 + 0.2;
  odd.margin = 1.0 / 3.0;
  odd.tol_R = std::nextafter(0.01, 1.0);
  odd.origin_offset = {1e-17, -0.3};
  odd.sweep_axis = SweepAxis::Alpha;
  odd.sweep_values = {1.0 / 7.0, 2.0};
  odd.output = "x/y.json";
  std::ostringstream os;
  write_config(odd, os);
  std::istringstream is(os.str());
  CHECK(parse_config(is) == odd);
}

TEST_CASE("identical config and seed give identical CSV rows") {
  const ExperimentConfig c = small_config();
  CHECK(csv_rows(run_solve(c)) == csv_rows(run_solve(c)));
  CHECK(csv_rows(run_solve(c, Exec::Serial)) == csv_rows(run_solve(c, Exec::Parallel)));
}

TEST_CASE("a found certificate is never contradicted by an Absent verdict") {
  // The interior critical wedge binds visibly once R >= 24.
  ExperimentConfig c;
  c.ladder = {{0.1, 24.0}, {0.1, 32.0}};
  const ResultRecord r = run_solve(c);
  REQUIRE(r.certificate);
  CHECK(r.verdict.kind != VerdictKind::Absent);
  CHECK(verdict_consistent(r));
}

TEST_SUITE_END();
