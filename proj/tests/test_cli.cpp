#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int code{-1};
  std::string out;
  std::string err;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() /
                 ("qwell_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args) {
  static int counter = 0;
  const fs::path out = work_dir() / ("out_" + std::to_string(counter) + ".txt");
  const fs::path err = work_dir() / ("err_" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = std::string("'") + QWELL_CLI_PATH + "' " + args + " > '" +
                          out.string() + "' 2> '" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

const std::vector<double> kRootsP1 = {0.407915537665355, 0.289723239067469, 0.221507173995405,
                                      0.182839189265715};

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("solve --class 3 --depth 1").code == 2);
  CHECK(run("solve --depth 1").code == 2);
  CHECK(run("solve --class 1 --depth 1 --bogus").code == 2);
  CHECK(run("solve --class 1 --depth 0").code == 2);
  CHECK(run("wavefunction --class 1 --depth 1 --state 0 --samples 4000").code == 2);
  CHECK(run("solve --class 1 --depth 1 --mass 9.1e-31").code == 2);
  CHECK(run("sweep --class 1 --depth-min 2 --depth-max 1 --steps 4").code == 2);
  CHECK(run("sweep --class 1 --depth-min 1 --depth-max 1 --steps 3").code == 2);
  CHECK(run("").code == 2);
}

TEST_CASE("solve reports the analytic spectrum as json") {
  const RunResult r = run("solve --class 1 --depth 1");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["schema_version"] == "1");
  CHECK(j["command"] == "solve");
  CHECK(j["spec"]["class"] == 1);
  CHECK(j["spec"]["depth"].get<double>() == 1.0);
  CHECK(j["spec"]["states"] == 4);
  CHECK_FALSE(j.contains("stamp"));
  CHECK_FALSE(j.contains("reference"));

  const auto& states = j["results"]["states"];
  REQUIRE(states.size() == 4);
  for (int i = 0; i < 4; ++i) {
    const auto& s = states[i];
    CHECK(s["index"] == i);
    CHECK(s["node_count"] == i);
    CHECK(s["parity"] == (i % 2 == 0 ? "even" : "odd"));
    const double kd = s["kappa_d"].get<double>();
    CHECK_THAT(kd, Catch::Matchers::WithinRel(kRootsP1[i], 1e-9));
    CHECK_THAT(s["energy_dimless"].get<double>(),
               Catch::Matchers::WithinRel(-kd * kd, 1e-10));
    CHECK_FALSE(s.contains("energy_joule"));
  }
  CHECK(j["diagnostics"]["possibly_incomplete"] == false);
}

TEST_CASE("shallow well json flags possible incompleteness") {
  const RunResult r = run("solve --class 0 --depth 0.1 --states 4");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  const auto& states = j["results"]["states"];
  REQUIRE(states.size() == 1);
  CHECK(states[0]["parity"] == "even");
  CHECK_THAT(states[0]["kappa_d"].get<double>(),
             Catch::Matchers::WithinRel(0.077301373006512, 1e-9));
  CHECK(j["diagnostics"]["possibly_incomplete"] == true);
  CHECK(j["diagnostics"]["warnings"].size() >= 1);
}

TEST_CASE("solve output is deterministic and stamping is opt-in") {
  const RunResult a = run("solve --class 2 --depth 1.7 --states 3");
  const RunResult b = run("solve --class 2 --depth 1.7 --states 3");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);

  const RunResult stamped = run("solve --class 2 --depth 1.7 --states 3 --stamp");
  REQUIRE(stamped.code == 0);
  CHECK(json::parse(stamped.out).contains("stamp"));
}

TEST_CASE("csv and json agree state by state") {
  const RunResult jr = run("solve --class 1 --depth 1");
  const RunResult cr = run("solve --class 1 --depth 1 --format csv");
  REQUIRE(jr.code == 0);
  REQUIRE(cr.code == 0);

  const json j = json::parse(jr.out);
  const auto lines = split_lines(cr.out);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "index,parity,kappa_d,energy_dimless,node_count");
  for (int i = 0; i < 4; ++i) {
    const auto cells = split_csv(lines[i + 1]);
    REQUIRE(cells.size() == 5);
    const auto& s = j["results"]["states"][i];
    CHECK(std::stoi(cells[0]) == i);
    CHECK(cells[1] == s["parity"]);
    CHECK(std::stod(cells[2]) == s["kappa_d"].get<double>());
    CHECK(std::stod(cells[3]) == s["energy_dimless"].get<double>());
    CHECK(std::stoi(cells[4]) == s["node_count"].get<int>());
  }
}

TEST_CASE("shifted reference is marked for the flat-top class") {
  const json j2 = json::parse(run("solve --class 2 --depth 1").out);
  CHECK(j2["reference"] == "shifted");
  const json j0 = json::parse(run("solve --class 0 --depth 1").out);
  CHECK_FALSE(j0.contains("reference"));
}

TEST_CASE("physical energies scale by hbar^2 over 2 m d^2") {
  const double mass = 9.1093837015e-31;
  const double width = 1e-9;
  const double hbar = 1.054571817e-34;
  const double factor = hbar * hbar / (2.0 * mass * width * width);

  const RunResult r = run("solve --class 1 --depth 1 --mass 9.1093837015e-31 --width 1e-9");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  for (const auto& s : j["results"]["states"]) {
    REQUIRE(s.contains("energy_joule"));
    CHECK_THAT(s["energy_joule"].get<double>(),
               Catch::Matchers::WithinRel(s["energy_dimless"].get<double>() * factor, 1e-9));
  }

  const RunResult csv =
      run("solve --class 1 --depth 1 --format csv --mass 9.1093837015e-31 --width 1e-9");
  REQUIRE(csv.code == 0);
  CHECK(split_lines(csv.out)[0] == "index,parity,kappa_d,energy_dimless,node_count,energy_joule");
}

TEST_CASE("sweep emits one monotone column per state") {
  const RunResult r = run("sweep --class 1 --depth-min 0.5 --depth-max 5 --steps 8");
  REQUIRE(r.code == 0);
  const auto lines = split_lines(r.out);
  REQUIRE(lines.size() == 9);
  CHECK(lines[0] == "u,kappa_d_0,kappa_d_1,kappa_d_2,kappa_d_3");

  std::vector<std::vector<double>> table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv(lines[i]);
    REQUIRE(cells.size() == 5);
    std::vector<double> row;
    for (const auto& c : cells) {
      REQUIRE_FALSE(c.empty());
      row.push_back(std::stod(c));
    }
    table.push_back(row);
  }
  for (std::size_t i = 1; i < table.size(); ++i) {
    CHECK(table[i][0] > table[i - 1][0]);
    for (int k = 1; k <= 4; ++k) CHECK(table[i][k] > table[i - 1][k]);
  }
}

TEST_CASE("single-step sweep matches solve") {
  const RunResult sw = run("sweep --class 1 --depth-min 1 --depth-max 1 --steps 1");
  const RunResult so = run("solve --class 1 --depth 1 --format csv");
  REQUIRE(sw.code == 0);
  REQUIRE(so.code == 0);

  const auto srow = split_csv(split_lines(sw.out)[1]);
  const auto solve_lines = split_lines(so.out);
  REQUIRE(srow.size() == 5);
  for (int k = 0; k < 4; ++k) {
    const auto cells = split_csv(solve_lines[k + 1]);
    CHECK(srow[k + 1] == cells[2]);  // identical formatting, identical digits
  }
}

TEST_CASE("wavefunction grid is symmetric and normalized") {
  const RunResult r = run("wavefunction --class 1 --depth 1 --state 1 --samples 801");
  REQUIRE(r.code == 0);
  const auto lines = split_lines(r.out);
  REQUIRE(lines.size() == 1602);
  CHECK(lines[0] == "x_over_d,psi");

  std::vector<double> x, psi;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv(lines[i]);
    REQUIRE(cells.size() == 2);
    x.push_back(std::stod(cells[0]));
    psi.push_back(std::stod(cells[1]));
  }
  double peak = 0.0;
  for (double p : psi) peak = std::max(peak, std::fabs(p));
  const std::size_t mid = x.size() / 2;
  CHECK(x[mid] == 0.0);
  CHECK(std::fabs(psi[mid]) <= 1e-8 * peak);
  CHECK(x.front() == -x.back());
  for (std::size_t i = 0; i < mid; ++i)
    CHECK(psi[i] == -psi[x.size() - 1 - i]);  // odd state, exact mirror

  const RunResult rd =
      run("wavefunction --class 1 --depth 1 --state 1 --samples 801 --density");
  const auto dlines = split_lines(rd.out);
  REQUIRE(dlines.size() == 1602);
  CHECK(dlines[0] == "x_over_d,psi,density");
  for (std::size_t i = 1; i < dlines.size(); ++i) {
    const auto cells = split_csv(dlines[i]);
    REQUIRE(cells.size() == 3);
    const double p = std::stod(cells[1]);
    const double d = std::stod(cells[2]);
    // both columns round-trip through 12 printed digits: half an ulp each on
    // psi (doubled by squaring) and on density
    CHECK(std::fabs(d - p * p) <= 2e-11 * std::max(d, 1e-300));
  }
}

TEST_CASE("node structure survives the trip through csv") {
  const RunResult r = run("wavefunction --class 1 --depth 1 --state 2");
  REQUIRE(r.code == 0);
  const auto lines = split_lines(r.out);
  int changes = 0;
  int last = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const double p = std::stod(split_csv(lines[i])[1]);
    const int sgn = p > 0.0 ? 1 : (p < 0.0 ? -1 : 0);
    if (sgn == 0) continue;
    if (last != 0 && sgn != last) ++changes;
    last = sgn;
  }
  CHECK(changes == 2);
}

TEST_CASE("missing state exits with the solver code") {
  const RunResult r = run("wavefunction --class 0 --depth 0.1 --state 99");
  CHECK(r.code == 3);
  CHECK(r.err.find("not found") != std::string::npos);
  CHECK(r.err.find("possibly incomplete") != std::string::npos);
}

TEST_CASE("verify certifies the deep class-1 well") {
  const RunResult r = run("verify --class 1 --depth 1");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("certified 4/4 via oracle, 0 domain-limited") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("verify with an impossible tolerance fails") {
  const RunResult r = run("verify --class 1 --depth 1 --tol 1e-12");
  CHECK(r.code == 4);
  CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("verify falls back to the matching residual for clipped states") {
  const RunResult r = run("verify --class 0 --depth 1");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("domain-limited") != std::string::npos);
  CHECK(r.out.find("certified 1/1 via oracle, 3 domain-limited") != std::string::npos);
}

TEST_CASE("output lands atomically at --out") {
  const fs::path target = work_dir() / "solve_out.json";
  const RunResult direct = run("solve --class 1 --depth 2.5");
  const RunResult filed = run("solve --class 1 --depth 2.5 --out '" + target.string() + "'");
  REQUIRE(direct.code == 0);
  REQUIRE(filed.code == 0);
  CHECK(filed.out.empty());
  REQUIRE(fs::exists(target));
  CHECK(slurp(target) == direct.out);
  for (const auto& entry : fs::directory_iterator(work_dir()))
    CHECK(entry.path().extension() != ".tmp");
}
