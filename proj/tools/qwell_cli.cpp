// qwell: bound states of the family V(x) = -(U0 (|x|/d)^p)/(1+|x|/d)^2,
// p in {0,1,2}, computed from the closed-form matching conditions, with a
// finite-difference cross-check. Everything is dimensionless (lengths x/d,
// energies hbar^2/(2 m d^2)) unless --mass/--width are given.

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qwell/qwell.hpp"

namespace {

constexpr double hbar_si = 1.054571817e-34;  // J s

std::string num(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.11e", v);
  return b;
}

std::string json_escape(const std::string& s) {
  std::string r;
  r.reserve(s.size() + 8);
  for (char c : s) {
    switch (c) {
      case '"': r += "\\\""; break;
      case '\\': r += "\\\\"; break;
      case '\n': r += "\\n"; break;
      case '\t': r += "\\t"; break;
      case '\r': r += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char b[8];
          std::snprintf(b, sizeof b, "\\u%04x", c);
          r += b;
        } else {
          r += c;
        }
    }
  }
  return r;
}

std::string utc_stamp() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char b[32];
  std::strftime(b, sizeof b, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return b;
}

// atomic publish: write a sibling temp file, then rename over the target
int emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::fputs(content.c_str(), stdout);
    return 0;
  }
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    f << content;
    f.flush();
    if (!f) {
      std::fprintf(stderr, "error: cannot write %s\n", tmp.string().c_str());
      return 3;
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::fprintf(stderr, "error: cannot rename %s to %s: %s\n", tmp.string().c_str(),
                 target.string().c_str(), ec.message().c_str());
    return 3;
  }
  return 0;
}

struct SolveFlags {
  int cls{0};
  double depth{1.0};
  int states{4};
  double kappa_min{1e-6};
  std::string format{"json"};
  std::string out;
  bool stamp{false};
  double mass{0.0};
  double width{0.0};

  bool physical() const { return mass > 0.0 && width > 0.0; }
  double joule_per_dimless() const { return hbar_si * hbar_si / (2.0 * mass * width * width); }
};

int cmd_solve(const SolveFlags& fl) {
  const qwell::WellSpec spec(fl.cls, fl.depth);
  const qwell::SpectrumResult res = qwell::find_spectrum(spec, fl.states, fl.kappa_min);
  std::ostringstream os;
  if (fl.format == "json") {
    os << "{\n";
    os << "  \"schema_version\": \"1\",\n";
    os << "  \"command\": \"solve\",\n";
    os << "  \"spec\": {\"class\": " << fl.cls << ", \"depth\": " << num(fl.depth)
       << ", \"states\": " << fl.states << ", \"kappa_min\": " << num(fl.kappa_min) << "},\n";
    if (fl.cls == 2) os << "  \"reference\": \"shifted\",\n";
    if (fl.stamp) os << "  \"stamp\": \"" << utc_stamp() << "\",\n";
    os << "  \"results\": {\"states\": [\n";
    for (std::size_t i = 0; i < res.states.size(); ++i) {
      const qwell::BoundState& s = res.states[i];
      os << "    {\"index\": " << s.index << ", \"parity\": \"" << qwell::parity_name(s.parity)
         << "\", \"kappa_d\": " << num(s.kappa_d) << ", \"energy_dimless\": "
         << num(s.energy_dimless);
      if (fl.physical())
        os << ", \"energy_joule\": " << num(s.energy_dimless * fl.joule_per_dimless());
      os << ", \"node_count\": " << s.node_count << "}"
         << (i + 1 < res.states.size() ? "," : "") << "\n";
    }
    os << "  ]},\n";
    os << "  \"diagnostics\": {\"possibly_incomplete\": "
       << (res.possibly_incomplete ? "true" : "false") << ", \"warnings\": [";
    for (std::size_t i = 0; i < res.warnings.size(); ++i)
      os << (i ? ", " : "") << "\"" << json_escape(res.warnings[i]) << "\"";
    os << "]}\n";
    os << "}\n";
  } else {
    if (fl.stamp) os << "# stamp: " << utc_stamp() << "\n";
    os << "index,parity,kappa_d,energy_dimless,node_count";
    if (fl.physical()) os << ",energy_joule";
    os << "\n";
    for (const qwell::BoundState& s : res.states) {
      os << s.index << "," << qwell::parity_name(s.parity) << "," << num(s.kappa_d) << ","
         << num(s.energy_dimless) << "," << s.node_count;
      if (fl.physical()) os << "," << num(s.energy_dimless * fl.joule_per_dimless());
      os << "\n";
    }
    for (const std::string& w : res.warnings) std::fprintf(stderr, "note: %s\n", w.c_str());
  }
  return emit(fl.out, os.str());
}

struct SweepFlags {
  int cls{0};
  double depth_min{0.0};
  double depth_max{0.0};
  int steps{0};
  int states{4};
  bool log_grid{false};
  std::string out;
  bool stamp{false};
};

int cmd_sweep(const SweepFlags& fl) {
  std::vector<double> u_grid;
  if (fl.steps == 1) {
    u_grid.push_back(fl.depth_min);
  } else {
    for (int i = 0; i < fl.steps; ++i) {
      const double f = static_cast<double>(i) / (fl.steps - 1);
      u_grid.push_back(fl.log_grid
                           ? fl.depth_min * std::pow(fl.depth_max / fl.depth_min, f)
                           : fl.depth_min + (fl.depth_max - fl.depth_min) * f);
    }
  }
  const std::vector<qwell::SweepRow> rows = qwell::sweep(fl.cls, u_grid, fl.states);
  std::ostringstream os;
  if (fl.stamp) os << "# stamp: " << utc_stamp() << "\n";
  os << "u";
  for (int k = 0; k < fl.states; ++k) os << ",kappa_d_" << k;
  os << "\n";
  int succeeded = 0;
  for (const qwell::SweepRow& row : rows) {
    os << num(row.u);
    for (int k = 0; k < fl.states; ++k) {
      os << ",";
      for (const auto& [idx, kd] : row.states)
        if (idx == k) os << num(kd);
    }
    os << "\n";
    if (row.error)
      std::fprintf(stderr, "note: u=%s: %s\n", num(row.u).c_str(), row.error->c_str());
    else
      ++succeeded;
  }
  if (succeeded == 0) {
    std::fprintf(stderr, "error: every sweep row failed\n");
    return 3;
  }
  const int rc = emit(fl.out, os.str());
  return rc != 0 ? rc : 0;
}

struct WavefunctionFlags {
  int cls{0};
  double depth{1.0};
  int state{0};
  double xmax{0.0};  // 0 = default 40/kappa_d
  int samples{4001};
  bool density{false};
  std::string out;
  bool stamp{false};
};

int cmd_wavefunction(const WavefunctionFlags& fl) {
  const qwell::WellSpec spec(fl.cls, fl.depth);
  const qwell::SpectrumResult res = qwell::find_spectrum(spec, fl.state + 1);
  if (static_cast<int>(res.states.size()) <= fl.state) {
    std::fprintf(stderr, "error: state %d not found; spectrum has %zu states%s\n", fl.state,
                 res.states.size(), res.possibly_incomplete ? " (possibly incomplete)" : "");
    return 3;
  }
  const qwell::BoundState& st = res.states[fl.state];
  const double xmax = fl.xmax > 0.0 ? fl.xmax : 40.0 / st.kappa_d;
  const qwell::WavefunctionGrid grid = qwell::normalize(spec, st, xmax, fl.samples);
  std::ostringstream os;
  if (fl.stamp) os << "# stamp: " << utc_stamp() << "\n";
  os << "x_over_d,psi" << (fl.density ? ",density" : "") << "\n";
  for (std::size_t i = 0; i < grid.x_over_d.size(); ++i) {
    os << num(grid.x_over_d[i]) << "," << num(grid.psi[i]);
    if (fl.density) os << "," << num(grid.psi[i] * grid.psi[i]);
    os << "\n";
  }
  return emit(fl.out, os.str());
}

struct VerifyFlags {
  int cls{0};
  double depth{1.0};
  int grid{24001};
  double halfwidth{0.0};  // 0 = auto: 200 for class 0, 60 otherwise
  double tol{1e-3};
  std::string out;
};

// A state is certified by the box oracle only when the box can hold it
// (kappa_d * L >= 10); shallower states fall back to the transcendental
// residual of their matching condition.
int cmd_verify(const VerifyFlags& fl) {
  const qwell::WellSpec spec(fl.cls, fl.depth);
  const qwell::SpectrumResult sp = qwell::find_spectrum(spec, 4);
  const double L = fl.halfwidth > 0.0 ? fl.halfwidth : (fl.cls == 0 ? 200.0 : 60.0);
  qwell::OracleConfig oc;
  oc.half_width_over_d = L;
  oc.points = fl.grid;
  oc.want_eigenvectors = true;
  const qwell::OracleResult fd = qwell::solve_fd(spec, oc, 4);
  const qwell::OracleResult rich = qwell::solve_fd_richardson(spec, oc, 4);

  std::ostringstream os;
  os << "verify: class " << fl.cls << "  depth " << num(fl.depth) << "  L " << num(L)
     << "  points " << fl.grid << "  tol " << num(fl.tol) << "\n";
  os << "state parity  analytic_kappa_d    oracle_kappa_d      rel_delta   overlap     "
        "residual    status\n";
  bool all_ok = true;
  int certified = 0, passed = 0;
  for (std::size_t k = 0; k < sp.states.size(); ++k) {
    const qwell::BoundState& st = sp.states[k];
    const bool resolvable = st.kappa_d * L >= 10.0;
    char line[240];
    if (resolvable) {
      ++certified;
      bool ok = false;
      double rel = 0.0, ov = 0.0;
      if (k < rich.eigen_kappa_d.size() && k < fd.eigenvectors.size()) {
        rel = std::fabs(rich.eigen_kappa_d[k] - st.kappa_d) / st.kappa_d;
        const qwell::WavefunctionGrid g = qwell::normalize(spec, st, L, 4001);
        ov = qwell::overlap(fd.eigenvectors[k], g);
        ok = rel <= fl.tol && ov >= 0.999;
      }
      passed += ok;
      all_ok = all_ok && ok;
      std::snprintf(line, sizeof line, "%-5zu %-7s %-19s %-19s %-11.2e %-11.6f %-11s %s\n", k,
                    qwell::parity_name(st.parity), num(st.kappa_d).c_str(),
                    k < rich.eigen_kappa_d.size() ? num(rich.eigen_kappa_d[k]).c_str() : "-",
                    rel, ov, "-", ok ? "certified" : "FAIL");
    } else {
      // normalized residual: condition at the root over its size one part in
      // 1e6 away, where it is locally linear
      const auto f = [&](double x) {
        return st.parity == qwell::Parity::Even ? qwell::even_condition(spec, x)
                                                : qwell::odd_condition(spec, x);
      };
      const double scale = std::max(std::fabs(f(st.kappa_d * (1.0 - 1e-6))),
                                    std::fabs(f(st.kappa_d * (1.0 + 1e-6))));
      const double resid = scale > 0.0 ? std::fabs(f(st.kappa_d)) / scale : 0.0;
      const bool ok = resid <= 1e-8;
      all_ok = all_ok && ok;
      std::snprintf(line, sizeof line, "%-5zu %-7s %-19s %-19s %-11s %-11s %-11.2e %s\n", k,
                    qwell::parity_name(st.parity), num(st.kappa_d).c_str(), "-", "-", "-", resid,
                    ok ? "domain-limited" : "FAIL");
    }
    os << line;
  }
  os << "certified " << passed << "/" << certified << " via oracle, "
     << sp.states.size() - certified << " domain-limited\n";
  if (fd.domain_too_small) os << "note: oracle box too small for its shallowest state\n";
  const int rc = emit(fl.out, os.str());
  if (rc != 0) return rc;
  return all_ok ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bound states of V(x) = -U0 (|x|/d)^p / (1+|x|/d)^2, p in {0,1,2}"};
  app.require_subcommand(1);

  const CLI::Validator odd_count(
      [](std::string& s) -> std::string {
        const int v = std::atoi(s.c_str());
        if (v < 3 || v % 2 == 0) return std::string("must be odd and >= 3");
        return {};
      },
      "ODD");

  SolveFlags so;
  CLI::App* solve = app.add_subcommand("solve", "lowest bound states of one well");
  solve->add_option("--class", so.cls, "potential class p")
      ->required()
      ->check(CLI::IsMember({0, 1, 2}));
  solve->add_option("--depth", so.depth, "dimensionless depth u = 2 m U0 d^2 / hbar^2")
      ->required()
      ->check(CLI::PositiveNumber);
  solve->add_option("--states", so.states, "states to report")->check(CLI::PositiveNumber);
  solve->add_option("--kappa-min", so.kappa_min, "smallest kappa_d hunted")
      ->check(CLI::PositiveNumber);
  solve->add_option("--format", so.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  solve->add_option("--out", so.out, "write atomically to this path instead of stdout");
  solve->add_flag("--stamp", so.stamp, "include a UTC timestamp");
  CLI::Option* mass =
      solve->add_option("--mass", so.mass, "particle mass in kg")->check(CLI::PositiveNumber);
  CLI::Option* width = solve->add_option("--width", so.width, "well width d in m")
                           ->check(CLI::PositiveNumber);
  mass->needs(width);
  width->needs(mass);

  SweepFlags sw;
  CLI::App* sweep = app.add_subcommand("sweep", "spectra across a depth range, CSV");
  sweep->add_option("--class", sw.cls, "potential class p")
      ->required()
      ->check(CLI::IsMember({0, 1, 2}));
  sweep->add_option("--depth-min", sw.depth_min, "first depth")
      ->required()
      ->check(CLI::PositiveNumber);
  sweep->add_option("--depth-max", sw.depth_max, "last depth")
      ->required()
      ->check(CLI::PositiveNumber);
  sweep->add_option("--steps", sw.steps, "number of rows")
      ->required()
      ->check(CLI::PositiveNumber);
  sweep->add_option("--states", sw.states, "columns to report")->check(CLI::PositiveNumber);
  sweep->add_flag("--log", sw.log_grid, "log-spaced depths");
  sweep->add_option("--out", sw.out, "write atomically to this path instead of stdout");
  sweep->add_flag("--stamp", sw.stamp, "include a UTC timestamp");

  WavefunctionFlags wf;
  CLI::App* wave = app.add_subcommand("wavefunction", "normalized eigenfunction, CSV");
  wave->add_option("--class", wf.cls, "potential class p")
      ->required()
      ->check(CLI::IsMember({0, 1, 2}));
  wave->add_option("--depth", wf.depth, "dimensionless depth")
      ->required()
      ->check(CLI::PositiveNumber);
  wave->add_option("--state", wf.state, "state index, 0 = ground")
      ->required()
      ->check(CLI::NonNegativeNumber);
  wave->add_option("--xmax", wf.xmax, "half-range in units of d (default 40/kappa_d)")
      ->check(CLI::PositiveNumber);
  wave->add_option("--samples", wf.samples, "samples per half-axis")->check(odd_count);
  wave->add_flag("--density", wf.density, "emit a psi^2 column");
  wave->add_option("--out", wf.out, "write atomically to this path instead of stdout");
  wave->add_flag("--stamp", wf.stamp, "include a UTC timestamp");

  VerifyFlags vf;
  CLI::App* verify = app.add_subcommand("verify", "analytic vs finite-difference cross-check");
  verify->add_option("--class", vf.cls, "potential class p")
      ->required()
      ->check(CLI::IsMember({0, 1, 2}));
  verify->add_option("--depth", vf.depth, "dimensionless depth")
      ->required()
      ->check(CLI::PositiveNumber);
  verify->add_option("--grid", vf.grid, "interior grid points")->check(odd_count);
  verify->add_option("--halfwidth", vf.halfwidth, "box half-width in units of d")
      ->check(CLI::PositiveNumber);
  verify->add_option("--tol", vf.tol, "relative eigenvalue tolerance")
      ->check(CLI::PositiveNumber);
  verify->add_option("--out", vf.out, "write atomically to this path instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*sweep) {
    if (sw.depth_max < sw.depth_min || (sw.steps > 1 && sw.depth_max <= sw.depth_min)) {
      std::fprintf(stderr, "error: --depth-max must exceed --depth-min when --steps > 1\n");
      return 2;
    }
  }

  try {
    if (*solve) return cmd_solve(so);
    if (*sweep) return cmd_sweep(sw);
    if (*wave) return cmd_wavefunction(wf);
    if (*verify) return cmd_verify(vf);
  } catch (const qwell::error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
