#include "homog/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>

#include "homog/errors.hpp"

namespace homog {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// two-sided 95% Student t quantiles, 1..30 degrees of freedom
double t95(int dof) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                 2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                 2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof < 1) return 0.0;
  return dof <= 30 ? table[dof - 1] : 1.96;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

bool is_builtin(const std::string& name) {
  const auto names = builtin_problems();
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::map<std::string, ColumnFit> fit_columns(const std::vector<SweepRow>& rows, double floor) {
  std::map<std::string, ColumnFit> out;
  for (const auto& col : error_columns()) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows)
      if (r.ok) pts.emplace_back(r.errors.eps, column_value(r.errors, col));
    ColumnFit cf;
    try {
      cf.fit = fit_slope(pts, floor);
      cf.ok = true;
    } catch (const DegenerateFitError& e) {
      cf.note = e.what();
    }
    out[col] = cf;
  }
  return out;
}

json rows_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json j;
    j["k"] = r.k;
    j["eps"] = r.errors.eps;
    j["cutoff"] = r.cutoff;
    j["status"] = r.status;
    if (r.ok) {
      for (const auto& col : error_columns()) j[col] = column_value(r.errors, col);
      j["ratio_l2_u"] = r.errors.ratio_l2_u;
      j["ratio_hm_vhat"] = r.errors.ratio_hm_vhat;
      j["ratio_hm_steklov"] = r.errors.ratio_hm_steklov;
      j["iterations"] = r.iterations;
      j["residual"] = r.residual;
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

json slopes_json(const std::map<std::string, ColumnFit>& slopes) {
  json j = json::object();
  for (const auto& col : error_columns()) {
    const auto& cf = slopes.at(col);
    json s;
    if (cf.ok) {
      s["slope"] = cf.fit.slope;
      s["intercept"] = cf.fit.intercept;
      s["rms_residual"] = cf.fit.rms_residual;
      s["ci95"] = cf.fit.ci95;
      s["points"] = cf.fit.points;
    } else {
      s["slope"] = nullptr;
      s["note"] = cf.note;
    }
    j[col] = std::move(s);
  }
  return j;
}

}  // namespace

PeriodicField make_rhs(const json& spec, int d, const fs::path& base) {
  if (spec.is_string()) {
    const auto s = spec.get<std::string>();
    if (s.rfind("seed:", 0) == 0) return random_field(d, 4, std::stoull(s.substr(5)));
    return field_from_json(read_json(resolve(base, s)), d);
  }
  if (spec.is_object() && spec.contains("seed") && !spec.contains("coeffs"))
    return random_field(d, spec.value("degree", 4), spec.at("seed").get<std::uint64_t>(), spec.value("mean", true));
  if (spec.is_object() && spec.contains("file")) return field_from_json(read_json(resolve(base, spec.at("file").get<std::string>())), d);
  return field_from_json(spec, d);
}

void SweepConfig::validate() const {
  if (ks.empty()) throw PreconditionError("sweep needs at least one k");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 2) throw PreconditionError("every k must be >= 2");
    if (i > 0 && ks[i] <= ks[i - 1]) throw PreconditionError("k list must be strictly increasing");
  }
  if (lambda && !(*lambda > 0.0)) throw PreconditionError("lambda must be positive");
  if (width < 1) throw PreconditionError("width must be >= 1");
  for (const auto& c : required)
    if (std::find(error_columns().begin(), error_columns().end(), c) == error_columns().end())
      throw PreconditionError("unknown error column \"" + c + "\"");
}

SweepConfig sweep_config_from_json(const json& j, const fs::path& base_dir) {
  SweepConfig c;
  c.base_dir = base_dir;
  c.problem = j.value("problem", c.problem);
  if (j.contains("ks")) c.ks = j.at("ks").get<std::vector<int>>();
  if (j.contains("lambda")) {
    const auto& l = j.at("lambda");
    if (l.is_number())
      c.lambda = l.get<double>();
    else if (!(l.is_string() && l.get<std::string>() == "auto"))
      throw PreconditionError("lambda must be \"auto\" or a number");
  }
  if (j.contains("f")) c.f = j.at("f");
  c.cell_cutoff = j.value("cell_cutoff", c.cell_cutoff);
  c.cell_tol = j.value("cell_tol", c.cell_tol);
  c.solve_tol = j.value("solve_tol", c.solve_tol);
  if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j.at("output_dir").get<std::string>());
  c.seed = j.value("seed", c.seed);
  c.width = j.value("width", c.width);
  if (j.contains("required")) c.required = j.at("required").get<std::vector<std::string>>();
  c.slope_threshold = j.value("slope_threshold", c.slope_threshold);
  c.negative_control = j.value("negative_control", c.negative_control);
  c.plot = j.value("plot", c.plot);
  c.use_cache = j.value("cache", c.use_cache);
  c.validate();
  return c;
}

json sweep_config_to_json(const SweepConfig& c) {
  json j;
  j["problem"] = c.problem;
  j["ks"] = c.ks;
  j["lambda"] = c.lambda ? json(*c.lambda) : json("auto");
  j["f"] = c.f;
  j["cell_cutoff"] = c.cell_cutoff;
  j["cell_tol"] = c.cell_tol;
  j["solve_tol"] = c.solve_tol;
  j["seed"] = c.seed;
  j["width"] = c.width;
  j["required"] = c.required;
  j["slope_threshold"] = c.slope_threshold;
  j["negative_control"] = c.negative_control;
  return j;
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points, double floor) {
  if (points.size() < 3) throw DegenerateFitError("fewer than 3 usable points");
  for (const auto& [eps, err] : points) {
    if (!(eps > 0.0)) throw DegenerateFitError("non-positive eps");
    if (!(err > floor)) throw DegenerateFitError("degenerate: errors at solver floor (reduce the solver tol)");
  }
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [eps, err] : points) {
    sx += std::log(eps);
    sy += std::log(err);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [eps, err] : points) {
    const double dx = std::log(eps) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(err) - my);
  }
  if (sxx == 0.0) throw DegenerateFitError("all eps coincide");
  SlopeFit f;
  f.points = static_cast<int>(points.size());
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (const auto& [eps, err] : points) {
    const double r = std::log(err) - (f.intercept + f.slope * std::log(eps));
    ss += r * r;
  }
  f.rms_residual = std::sqrt(ss / n);
  f.ci95 = t95(f.points - 2) * std::sqrt(ss / (n - 2.0) / sxx);
  return f;
}

double column_value(const ErrorReport& e, const std::string& column) {
  if (column == "l2_u") return e.l2_u;
  if (column == "hm_vhat") return e.hm_vhat;
  if (column == "hm_steklov") return e.hm_steklov;
  if (column == "hm_v") return e.hm_v;
  throw PreconditionError("unknown error column \"" + column + "\"");
}

fs::path cache_root() {
  if (const char* env = std::getenv("HOMOG_CACHE_DIR"); env && *env) return env;
  return ".homog-cache";
}

std::string cell_cache_key(const CoefficientMatrix& a, int cutoff, double tol) {
  auto j = problem_to_json(a);
  j.erase("name");
  return hex(fnv1a(j.dump() + "|" + std::to_string(cutoff) + "|" + fmt("%.17g", tol)));
}

json homogenized_to_json(const HomogenizedMatrix& ahat) {
  json entries = json::array();
  for (const auto& [key, v] : ahat.entries) entries.push_back({{"alpha", key.first.to_string()}, {"beta", key.second.to_string()}, {"value", v}});
  return {{"d", ahat.d}, {"m", ahat.m}, {"symbol_min", ahat.symbol_min}, {"lambda0_check", ahat.lambda0_check}, {"entries", entries}};
}

json cell_manifest(const CoefficientMatrix& a, const CellSolutionSet& cells, const HomogenizedMatrix& ahat) {
  json j;
  j["version"] = kVersion;
  j["problem"] = a.name();
  j["key"] = cell_cache_key(a, cells.cutoff, cells.tol);
  j["fingerprint"] = hex(cells.matrix_fingerprint);
  j["cutoff"] = cells.cutoff;
  j["tol"] = cells.tol;
  json list = json::array();
  for (const auto& gamma : cells.gamma_index) {
    const auto& N = cells.at(gamma);
    // largest |c_n| on each shell max_j |n_j| = s
    std::vector<double> decay(static_cast<std::size_t>(N.cutoff()) + 1, 0.0);
    N.box().for_each([&](std::size_t i, std::span<const int> n) {
      int s = 0;
      for (int v : n) s = std::max(s, std::abs(v));
      decay[static_cast<std::size_t>(s)] = std::max(decay[static_cast<std::size_t>(s)], std::abs(N.coeffs()[i]));
    });
    std::string file = "N";
    for (int v : gamma.orders()) file += "_" + std::to_string(v);
    list.push_back({{"gamma", gamma.to_string()},
                    {"file", file + ".json"},
                    {"residual", cells.residuals.at(gamma)},
                    {"iterations", cells.iterations.at(gamma)},
                    {"decay", decay}});
  }
  j["cells"] = std::move(list);
  j["ahat"] = homogenized_to_json(ahat);
  return j;
}

CellSolutionSet load_or_solve_cells(const CoefficientMatrix& a, int cutoff, double tol, const fs::path& root, bool* hit) {
  if (cutoff < 0) cutoff = default_cell_cutoff(a);
  const fs::path dir = root / cell_cache_key(a, cutoff, tol);
  const fs::path manifest = dir / "manifest.json";
  if (hit) *hit = false;
  if (fs::exists(manifest)) {
    try {
      const auto j = read_json(manifest);
      if (j.at("fingerprint").get<std::string>() == hex(a.fingerprint()) && j.at("cutoff").get<int>() == cutoff) {
        CellSolutionSet cells{enumerate(a.dim(), a.order(), IndexMode::UpToM), {}, {}, {}, cutoff, tol, a.fingerprint()};
        for (const auto& c : j.at("cells")) {
          const auto gamma = MultiIndex::parse(c.at("gamma").get<std::string>());
          cells.solutions.emplace(gamma, field_from_json(read_json(dir / c.at("file").get<std::string>()), a.dim()).with_cutoff(cutoff));
          cells.residuals.emplace(gamma, c.at("residual").get<double>());
          cells.iterations.emplace(gamma, c.at("iterations").get<int>());
        }
        if (cells.solutions.size() == cells.gamma_index.size()) {
          if (hit) *hit = true;
          return cells;
        }
      }
    } catch (const std::exception&) {
      // unreadable entry: fall through and rebuild it
    }
  }
  auto cells = solve_all_cells(a, cutoff, tol);
  const auto ahat = homogenize(a, cells);
  const auto j = cell_manifest(a, cells, ahat);
  for (const auto& c : j.at("cells"))
    write_json(dir / c.at("file").get<std::string>(), field_to_json(cells.at(MultiIndex::parse(c.at("gamma").get<std::string>()))));
  write_json(manifest, j);
  return cells;
}

ConvergenceReport run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const auto a = is_builtin(cfg.problem) ? builtin_problem(cfg.problem) : load_problem(resolve(cfg.base_dir, cfg.problem).string());
  return run_sweep(a, cfg);
}

ConvergenceReport run_sweep(const CoefficientMatrix& a, const SweepConfig& cfg) {
  cfg.validate();
  ConvergenceReport rep;
  rep.problem = a.name();
  auto pj = problem_to_json(a);
  pj.erase("name");
  rep.problem_hash = hex(fnv1a(pj.dump()));
  rep.d = a.dim();
  rep.m = a.order();
  rep.cell_tol = cfg.cell_tol;
  rep.solve_tol = cfg.solve_tol;
  rep.seed = cfg.seed;
  rep.slope_threshold = cfg.slope_threshold;

  const int cutoff = cfg.cell_cutoff > 0 ? cfg.cell_cutoff : default_cell_cutoff(a);
  CellSolutionSet cells = cfg.use_cache ? load_or_solve_cells(a, cutoff, cfg.cell_tol, cache_root()) : solve_all_cells(a, cutoff, cfg.cell_tol);
  rep.cell_cutoff = cells.cutoff;
  HomogenizedMatrix ahat = homogenize(a, cells);
  if (cfg.naive_mean) {
    for (auto& [key, v] : ahat.entries) v = a.entry(key.first, key.second).mean();
    for (auto& [gamma, N] : cells.solutions) N = PeriodicField(a.dim(), cells.cutoff);
  }

  const double lambda2 = estimate_garding(a);
  rep.lambda_floor = 1.0 + lambda2;
  rep.lambda_override = cfg.lambda.has_value() && *cfg.lambda < rep.lambda_floor;
  rep.lambda = cfg.lambda ? *cfg.lambda : default_lambda(lambda2);
  const auto f = make_rhs(cfg.f, a.dim(), cfg.base_dir);
  rep.f_norm = f.l2_norm();

  auto run_row = [&](int k) {
    SweepRow row;
    row.k = k;
    row.cutoff = k * cells.cutoff;
    row.errors.eps = 1.0 / k;
    try {
      TorusProblem p{a, k, rep.lambda, f, row.cutoff, cfg.solve_tol, rep.lambda_floor, rep.lambda_override, {}};
      const auto bundle = build_bundle(p, cells, ahat);
      row.errors = error_report(bundle, a.order());
      row.iterations = bundle.iterations;
      row.residual = bundle.residual;
      row.ok = true;
      row.status = "ok";
      const double floor = 10.0 * cfg.solve_tol;
      for (const auto& col : cfg.required)
        if (column_value(row.errors, col) <= floor) row.status = "floor";
    } catch (const std::exception& e) {
      row.status = std::string("failed: ") + e.what();
    }
    return row;
  };

  rep.rows.resize(cfg.ks.size());
  for (std::size_t start = 0; start < cfg.ks.size(); start += static_cast<std::size_t>(cfg.width)) {
    const std::size_t stop = std::min(cfg.ks.size(), start + static_cast<std::size_t>(cfg.width));
    if (stop - start == 1) {
      rep.rows[start] = run_row(cfg.ks[start]);
      continue;
    }
    std::vector<std::future<SweepRow>> jobs;
    for (std::size_t i = start; i < stop; ++i) jobs.push_back(std::async(std::launch::async, run_row, cfg.ks[i]));
    for (std::size_t i = start; i < stop; ++i) rep.rows[i] = jobs[i - start].get();
  }

  rep.slopes = fit_columns(rep.rows, 10.0 * cfg.solve_tol);
  for (const auto& col : cfg.required) {
    const auto& cf = rep.slopes.at(col);
    rep.pass_flags[col] = cf.ok && cf.fit.slope >= cfg.slope_threshold;
  }
  if (cfg.negative_control && !cfg.naive_mean) {
    rep.control = negative_control(a, cfg, rep);
    rep.pass_flags["negative_control"] = rep.control->passed;
  }
  return rep;
}

ControlSummary negative_control(const CoefficientMatrix& a, const SweepConfig& cfg, const ConvergenceReport& real) {
  SweepConfig c = cfg;
  c.naive_mean = true;
  c.negative_control = false;
  c.output_dir.clear();
  const auto ctl = run_sweep(a, c);
  ControlSummary s;
  s.rows = ctl.rows;
  s.slopes = ctl.slopes;
  const auto& r = real.slopes.at("l2_u");
  const auto& n = ctl.slopes.at("l2_u");
  s.real_slope = r.ok ? r.fit.slope : 0.0;
  s.control_slope = n.ok ? n.fit.slope : 0.0;
  s.passed = r.ok && n.ok && s.real_slope - s.control_slope >= 0.5;
  return s;
}

bool ConvergenceReport::passed() const {
  if (pass_flags.empty()) return false;
  return std::all_of(pass_flags.begin(), pass_flags.end(), [](const auto& kv) { return kv.second; });
}

json ConvergenceReport::to_json() const {
  json j;
  j["version"] = version;
  j["problem"] = problem;
  j["problem_hash"] = problem_hash;
  j["d"] = d;
  j["m"] = m;
  j["lambda"] = lambda;
  j["lambda_floor"] = lambda_floor;
  j["lambda_override"] = lambda_override;
  j["cell_cutoff"] = cell_cutoff;
  j["cell_tol"] = cell_tol;
  j["solve_tol"] = solve_tol;
  j["seed"] = seed;
  j["f_norm"] = f_norm;
  j["slope_threshold"] = slope_threshold;
  j["rows"] = rows_json(rows);
  j["slopes"] = slopes_json(slopes);
  if (control) {
    json c;
    c["real_slope"] = control->real_slope;
    c["control_slope"] = control->control_slope;
    c["status"] = control->passed ? "PASSED" : "FAILED";
    c["rows"] = rows_json(control->rows);
    c["slopes"] = slopes_json(control->slopes);
    j["negative_control"] = std::move(c);
  }
  j["pass_flags"] = pass_flags;
  j["passed"] = passed();
  return j;
}

std::string ConvergenceReport::to_csv() const {
  std::ostringstream os;
  os << "k,eps,cutoff,l2_u,hm_vhat,hm_steklov,hm_v,ratio_l2_u,ratio_hm_vhat,ratio_hm_steklov,iterations,residual,status\n";
  for (const auto& r : rows) {
    os << r.k << ',' << fmt("%.12e", r.errors.eps) << ',' << r.cutoff;
    for (double v : {r.errors.l2_u, r.errors.hm_vhat, r.errors.hm_steklov, r.errors.hm_v, r.errors.ratio_l2_u, r.errors.ratio_hm_vhat,
                     r.errors.ratio_hm_steklov})
      os << ',' << fmt("%.12e", v);
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    os << ',' << r.iterations << ',' << fmt("%.12e", r.residual) << ",\"" << status << "\"\n";
  }
  return os.str();
}

std::string ConvergenceReport::to_svg() const {
  constexpr double W = 640, H = 440, L = 70, R = 150, T = 30, B = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& r : rows) {
    if (!r.ok) continue;
    xmin = std::min(xmin, std::log10(r.errors.eps));
    xmax = std::max(xmax, std::log10(r.errors.eps));
    for (const auto& col : error_columns()) {
      const double v = column_value(r.errors, col);
      if (v <= 0.0) continue;
      ymin = std::min(ymin, std::log10(v));
      ymax = std::max(ymax, std::log10(v));
    }
  }
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << L << "\" y=\"20\">" << problem << ": error vs eps (log-log)</text>\n";
  if (xmin > xmax || ymin > ymax) {
    os << "<text x=\"" << L << "\" y=\"" << H / 2 << "\">no data</text>\n</svg>\n";
    return os.str();
  }
  xmin = std::floor(xmin);
  xmax = std::ceil(xmax);
  if (xmax == xmin) xmax += 1.0;
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (ymax == ymin) ymax += 1.0;
  auto X = [&](double lx) { return L + (lx - xmin) / (xmax - xmin) * (W - L - R); };
  auto Y = [&](double ly) { return H - B - (ly - ymin) / (ymax - ymin) * (H - T - B); };
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double e = xmin; e <= xmax; e += 1.0)
    os << "<text x=\"" << fmt("%.1f", X(e) - 12) << "\" y=\"" << H - B + 18 << "\">1e" << static_cast<int>(e) << "</text>\n";
  for (double e = ymin; e <= ymax; e += 1.0)
    os << "<text x=\"" << 20 << "\" y=\"" << fmt("%.1f", Y(e) + 4) << "\">1e" << static_cast<int>(e) << "</text>\n";
  os << "<text x=\"" << (W - R + L) / 2 << "\" y=\"" << H - 10 << "\">eps</text>\n";
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  int c = 0;
  for (const auto& col : error_columns()) {
    std::string pts;
    for (const auto& r : rows) {
      const double v = r.ok ? column_value(r.errors, col) : 0.0;
      if (v <= 0.0) continue;
      pts += fmt("%.2f", X(std::log10(r.errors.eps))) + "," + fmt("%.2f", Y(std::log10(v))) + " ";
    }
    const auto& fit = slopes.at(col);
    os << "<polyline fill=\"none\" stroke=\"" << colors[c] << "\" stroke-width=\"2\" points=\"" << pts << "\"/>\n";
    std::string label = col + (fit.ok ? " (" + fmt("%.2f", fit.fit.slope) + ")" : " (n/a)");
    os << "<text x=\"" << W - R + 8 << "\" y=\"" << T + 16 + 18 * c << "\" fill=\"" << colors[c] << "\">" << label << "</text>\n";
    ++c;
  }
  // slope-1 reference through the first l2_u point
  for (const auto& r : rows) {
    if (!r.ok || r.errors.l2_u <= 0.0) continue;
    const double x0 = std::log10(r.errors.eps), y0 = std::log10(r.errors.l2_u);
    const double x1 = xmin, y1 = y0 + (x1 - x0);
    os << "<line x1=\"" << fmt("%.2f", X(x0)) << "\" y1=\"" << fmt("%.2f", Y(y0)) << "\" x2=\"" << fmt("%.2f", X(x1)) << "\" y2=\""
       << fmt("%.2f", Y(std::max(y1, ymin))) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    os << "<text x=\"" << W - R + 8 << "\" y=\"" << T + 16 + 18 * c << "\" fill=\"gray\">slope 1</text>\n";
    break;
  }
  os << "</svg>\n";
  return os.str();
}

void write_report(const ConvergenceReport& report, const fs::path& dir, bool plot) {
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "report.csv");
    csv << report.to_csv();
  }
  write_json(dir / "report.json", report.to_json());
  if (plot) {
    std::ofstream svg(dir / "report.svg");
    svg << report.to_svg();
  }
}

}  // namespace homog
