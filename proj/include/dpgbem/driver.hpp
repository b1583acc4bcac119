#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "adaptivity.hpp"
#include "problems.hpp"

namespace dpgbem {

struct RunConfig {
  Example example = Example::Smooth;
  double eps = 1e-2;
  std::optional<double> theta;  // defaults to 0.75 for the singular example, 0.5 otherwise
  double beta = 1.0;
  int max_triangles = 20000;
  std::filesystem::path out = ".";
  SolverKind solver = SolverKind::Direct;
  bool timing = true;
  bool uniform = false;
  int grid = 0;  // samples per direction of the final u_hp dump, 0 disables it
  bool mesh_dump = false;

  double effective_theta() const { return theta.value_or(example == Example::Singular ? 0.75 : 0.5); }

  void validate() const {
    if (!(eps > 0.0 && eps <= 1.0)) throw ConfigurationError("--epsilon must lie in (0, 1]");
    const double t = effective_theta();
    if (!(t > 0.0 && t < 1.0)) throw ConfigurationError("--theta must lie in (0, 1)");
    if (!(beta > 0.0)) throw ConfigurationError("--beta must be positive");
    if (max_triangles < 0) throw ConfigurationError("--max-elements must be nonnegative");
    if (grid < 0) throw ConfigurationError("--grid must be nonnegative");
  }

  /// File stem shared by all outputs of a run, e.g. "smooth_eps1e-02".
  std::string stem() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_eps%.0e%s", to_string(example).c_str(), eps, uniform ? "_uniform" : "");
    return buf;
  }
};

// ---------------------------------------------------------------------------------------------
// CSV

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {"level",      "nT",         "nDof",         "est_Omega",
                                                "est_Gamma",  "err_Omega",  "err_Gamma",    "err_uhat_a",
                                                "err_uhat_b", "err_sighat_a", "err_sighat_b", "wall_seconds"};
  return cols;
}

inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", x);
  return buf;
}

inline void write_csv_header(std::ostream& os) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

/// One row; error cells are empty when no exact solution exists, the time cell when timing is off.
inline void write_csv_row(std::ostream& os, const LevelRecord& r, bool timing) {
  os << r.level << ',' << r.num_triangles << ',' << r.num_dofs << ',' << format_number(r.est_omega) << ','
     << format_number(r.est_gamma);
  if (r.errors) {
    const ErrorRecord& e = *r.errors;
    for (double v : {e.omega, e.gamma, e.uhat_a, e.uhat_b, e.sighat_a, e.sighat_b}) os << ',' << format_number(v);
  } else {
    os << ",,,,,,";
  }
  os << ',';
  if (timing) os << format_number(r.wall_seconds);
  os << '\n';
}

/// Parsed CSV: header plus rows of optional numbers (empty cells are nullopt).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> rows;

  int column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw ArgumentError("parse_csv: empty input");
  t.header = split_csv_line(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    std::vector<std::optional<double>> row(t.header.size());
    for (std::size_t i = 0; i < cells.size() && i < row.size(); ++i)
      if (!cells[i].empty()) row[i] = std::stod(cells[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------------------------------------
// SVG log-log plot of estimator and error quantities against #T

inline std::string render_convergence_svg(const std::string& csv_text, const std::string& title) {
  const CsvTable table = parse_csv(csv_text);
  const int ix = table.column("nT");
  if (ix < 0) throw ArgumentError("render_convergence_svg: missing nT column");
  struct Series {
    std::string name;
    std::string color;
    std::string dash;
    std::vector<std::pair<double, double>> pts;
  };
  std::vector<Series> series = {{"est_Omega", "#1f77b4", "", {}},
                                {"est_Gamma", "#ff7f0e", "", {}},
                                {"err_Omega", "#1f77b4", "6,4", {}},
                                {"err_Gamma", "#ff7f0e", "6,4", {}}};
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (auto& s : series) {
    const int iy = table.column(s.name);
    if (iy < 0) continue;
    for (const auto& row : table.rows) {
      if (!row[ix] || !row[iy] || !(*row[iy] > 0.0)) continue;
      const double x = std::log10(*row[ix]), y = std::log10(*row[iy]);
      s.pts.emplace_back(x, y);
      xmin = std::min(xmin, x), xmax = std::max(xmax, x), ymin = std::min(ymin, y), ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  xmin = std::floor(xmin), xmax = std::max(std::ceil(xmax), xmin + 1);
  ymin = std::floor(ymin), ymax = std::max(std::ceil(ymax), ymin + 1);

  constexpr double W = 640, H = 480, L = 70, R = 150, T = 40, B = 50;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  for (double d = xmin; d <= xmax + 1e-9; d += 1.0) {
    os << "<line x1=\"" << px(d) << "\" y1=\"" << py(ymin) << "\" x2=\"" << px(d) << "\" y2=\"" << py(ymax)
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << px(d) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">1e" << static_cast<int>(d)
       << "</text>\n";
  }
  for (double d = ymin; d <= ymax + 1e-9; d += 1.0) {
    os << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(d) << "\" x2=\"" << px(xmax) << "\" y2=\"" << py(d)
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(d) + 4 << "\" text-anchor=\"end\">1e" << static_cast<int>(d)
       << "</text>\n";
  }
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">number of elements</text>\n";
  int legend = 0;
  for (const auto& s : series) {
    if (s.pts.empty()) continue;
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
    if (!s.dash.empty()) os << " stroke-dasharray=\"" << s.dash << "\"";
    os << " points=\"";
    for (const auto& [x, y] : s.pts) os << px(x) << ',' << py(y) << ' ';
    os << "\"/>\n";
    for (const auto& [x, y] : s.pts)
      os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"2\" fill=\"" << s.color << "\"/>\n";
    const double ly = T + 15 + 18 * legend++;
    os << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 40 << "\" y2=\"" << ly
       << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
    if (!s.dash.empty()) os << " stroke-dasharray=\"" << s.dash << "\"";
    os << "/>\n<text x=\"" << W - R + 45 << "\" y=\"" << ly + 4 << "\">" << s.name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------------------------
// Grid dump of the P0 field u_hp

/// Triangle containing x, or -1. Uses per-triangle bounding boxes.
inline int locate(const Mesh& mesh, const Vec2& x) {
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto p = mesh.corners(t);
    const double tol = 1e-12;
    bool inside = true;
    for (int k = 0; k < 3 && inside; ++k) {
      const Vec2& a = p[k];
      const Vec2& b = p[(k + 1) % 3];
      inside = (b.x() - a.x()) * (x.y() - a.y()) - (b.y() - a.y()) * (x.x() - a.x()) >= -tol;
    }
    if (inside) return t;
  }
  return -1;
}

/// Writes "x,y,u" on an n x n grid over the bounding box; points outside the domain get "nan".
inline void write_grid(std::ostream& os, const Mesh& mesh, const FieldVector& uh, int n) {
  Vec2 lo = mesh.vertex(0), hi = mesh.vertex(0);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    lo = lo.cwiseMin(mesh.vertex(v));
    hi = hi.cwiseMax(mesh.vertex(v));
  }
  os << "x,y,u\n";
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Vec2 x(lo.x() + (i + 0.5) / n * (hi.x() - lo.x()), lo.y() + (j + 0.5) / n * (hi.y() - lo.y()));
      const int t = locate(mesh, x);
      os << format_number(x.x()) << ',' << format_number(x.y()) << ',' << (t < 0 ? std::string("nan") : format_number(uh.u(t)))
         << '\n';
    }
}

// ---------------------------------------------------------------------------------------------
// Full run

struct RunResult {
  std::vector<LevelRecord> levels;
  std::filesystem::path csv_path;
  std::filesystem::path svg_path;
};

/// Runs the adaptive loop and writes <stem>.csv (row by row), <stem>.svg and optional dumps.
/// A solver failure propagates after the completed rows have been written.
inline RunResult run(const RunConfig& cfg, std::ostream* log = nullptr) {
  cfg.validate();
  const ProblemData problem = make_problem(cfg.example, cfg.eps);
  std::filesystem::create_directories(cfg.out);
  RunResult result;
  result.csv_path = cfg.out / (cfg.stem() + ".csv");
  result.svg_path = cfg.out / (cfg.stem() + ".svg");
  std::ofstream csv(result.csv_path);
  if (!csv) throw ConfigurationError("cannot write " + result.csv_path.string());
  write_csv_header(csv);

  AdaptiveOptions opt;
  opt.theta = cfg.effective_theta();
  opt.beta = cfg.beta;
  opt.max_triangles = cfg.max_triangles;
  opt.uniform = cfg.uniform;
  opt.solver = cfg.solver;

  Mesh last_mesh;
  std::optional<FieldVector> last_solution;
  auto observer = [&](const LevelRecord& r, const Mesh& mesh, const GlobalSystem&, const FieldVector& uh) {
    write_csv_row(csv, r, cfg.timing);
    csv.flush();
    if (log) {
      *log << "level " << r.level << "  nT " << r.num_triangles << "  est_Omega " << r.est_omega << "  est_Gamma "
           << r.est_gamma;
      if (r.errors) *log << "  err_Omega " << r.errors->omega;
      *log << std::endl;
    }
    if (cfg.grid > 0 || cfg.mesh_dump) {
      last_mesh = mesh;
      last_solution = uh;
    }
  };
  result.levels = adaptive_loop(problem, opt, observer);
  csv.close();

  std::ifstream in(result.csv_path);
  std::stringstream text;
  text << in.rdbuf();
  std::ofstream(result.svg_path) << render_convergence_svg(text.str(), cfg.stem());
  if (cfg.grid > 0 && last_solution) {
    std::ofstream g(cfg.out / (cfg.stem() + "_grid.csv"));
    write_grid(g, last_mesh, *last_solution, cfg.grid);
  }
  if (cfg.mesh_dump && last_solution) {
    std::ofstream m(cfg.out / (cfg.stem() + "_mesh.txt"));
    write_mesh(m, last_mesh);
  }
  return result;
}

}  // namespace dpgbem
