// Command-line front end: check, cell, solve, converge, potential.
#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "homog/errors.hpp"
#include "homog/harness.hpp"

using namespace homog;
namespace fs = std::filesystem;

namespace {

void print_ahat(const HomogenizedMatrix& ahat) {
  std::printf("%-12s %-12s %22s\n", "alpha", "beta", "ahat");
  for (const auto& [key, v] : ahat.entries) {
    if (v == 0.0) continue;
    std::printf("%-12s %-12s %22.15e\n", key.first.to_string().c_str(), key.second.to_string().c_str(), v);
  }
  std::printf("symbol min %.6e (lambda0 check %s)\n", ahat.symbol_min, ahat.lambda0_check ? "ok" : "FAILED");
}

int cmd_check(const std::string& problem, const std::string& out) {
  const auto a = load_problem(problem);
  const auto rep = check_operator(a);
  json j;
  j["problem"] = a.name();
  j["d"] = a.dim();
  j["m"] = a.order();
  j["sup_max"] = rep.sup_max;
  j["sup_bound_ok"] = rep.sup_bound_ok;
  j["symbol_min"] = rep.symbol_min;
  j["lambda2_estimate"] = rep.lambda2_estimate;
  j["default_lambda"] = default_lambda(rep.lambda2_estimate);
  j["ok"] = rep.ok;
  j["verdict"] = rep.verdict;
  std::cout << j.dump(2) << '\n';
  if (!out.empty()) write_json(out, j);
  return rep.ok ? 0 : 1;
}

int cmd_cell(const std::string& problem, int cutoff, double tol, bool use_cache) {
  const auto a = load_problem(problem);
  if (cutoff < 0) cutoff = default_cell_cutoff(a);
  bool hit = false;
  const auto cells = use_cache ? load_or_solve_cells(a, cutoff, tol, cache_root(), &hit) : solve_all_cells(a, cutoff, tol);
  const auto ahat = homogenize(a, cells);
  std::printf("%s: d=%d m=%d cutoff=%d tol=%.1e%s\n", a.name().c_str(), a.dim(), a.order(), cutoff, tol,
              use_cache ? (hit ? " (cached)" : " (solved, cached)") : "");
  if (use_cache) std::printf("cache %s\n", (cache_root() / cell_cache_key(a, cutoff, tol)).string().c_str());
  bool ok = ahat.lambda0_check;
  for (const auto& [gamma, r] : cells.residuals) {
    std::printf("N%-10s residual %.3e  iterations %d\n", gamma.to_string().c_str(), r, cells.iterations.at(gamma));
    ok = ok && r <= tol;
  }
  print_ahat(ahat);
  return ok ? 0 : 1;
}

int cmd_solve(const std::string& problem, int k, const std::string& lambda, const std::string& fspec, int cutoff, double tol,
              const std::string& out) {
  const auto a = load_problem(problem);
  if (cutoff < 0) cutoff = default_cell_cutoff(a);
  const auto cells = load_or_solve_cells(a, cutoff, 1e-10, cache_root());
  const auto ahat = homogenize(a, cells);
  const auto f = make_rhs(json(fspec), a.dim());
  auto p = make_problem(a, k, f, cells.cutoff, lambda == "auto" ? -1.0 : std::stod(lambda), tol);
  p.lambda_override = p.lambda < p.lambda_floor;
  const auto b = build_bundle(p, cells, ahat);
  const auto r = error_report(b, a.order());
  json j;
  j["version"] = kVersion;
  j["problem"] = a.name();
  j["k"] = k;
  j["eps"] = r.eps;
  j["lambda"] = p.lambda;
  j["lambda_floor"] = p.lambda_floor;
  j["lambda_override"] = p.lambda_override;
  j["cutoff"] = p.cutoff;
  j["iterations"] = b.iterations;
  j["residual"] = b.residual;
  j["f_norm"] = r.f_norm;
  j["l2_u"] = r.l2_u;
  j["hm_vhat"] = r.hm_vhat;
  j["hm_steklov"] = r.hm_steklov;
  j["hm_v"] = r.hm_v;
  j["ratio_l2_u"] = r.ratio_l2_u;
  j["ratio_hm_vhat"] = r.ratio_hm_vhat;
  j["ratio_hm_steklov"] = r.ratio_hm_steklov;
  std::cout << j.dump(2) << '\n';
  if (!out.empty()) {
    write_json(fs::path(out) / "report.json", j);
    write_json(fs::path(out) / "u_eps.json", field_to_json(b.u_eps));
    write_json(fs::path(out) / "u.json", field_to_json(b.u));
    write_json(fs::path(out) / "v_hat.json", field_to_json(b.v_hat));
  }
  return 0;
}

int cmd_converge(const std::string& config, const std::string& out) {
  const fs::path path(config);
  auto cfg = sweep_config_from_json(read_json(path), path.parent_path());
  if (!out.empty()) cfg.output_dir = out;
  const auto rep = run_sweep(cfg);
  std::printf("%s  lambda=%g  cell cutoff=%d  hash=%s\n", rep.problem.c_str(), rep.lambda, rep.cell_cutoff, rep.problem_hash.c_str());
  std::printf("%5s %12s %12s %12s %12s  %s\n", "k", "l2_u", "hm_vhat", "hm_steklov", "hm_v", "status");
  for (const auto& r : rep.rows)
    std::printf("%5d %12.4e %12.4e %12.4e %12.4e  %s\n", r.k, r.errors.l2_u, r.errors.hm_vhat, r.errors.hm_steklov, r.errors.hm_v,
                r.status.c_str());
  for (const auto& [col, fit] : rep.slopes) {
    if (fit.ok)
      std::printf("slope %-10s %.3f +- %.3f\n", col.c_str(), fit.fit.slope, fit.fit.ci95);
    else
      std::printf("slope %-10s n/a (%s)\n", col.c_str(), fit.note.c_str());
  }
  if (rep.control)
    std::printf("negative control: real %.3f, naive mean %.3f -> %s\n", rep.control->real_slope, rep.control->control_slope,
                rep.control->passed ? "PASSED" : "FAILED");
  for (const auto& [flag, ok] : rep.pass_flags) std::printf("%-18s %s\n", flag.c_str(), ok ? "pass" : "FAIL");
  if (!cfg.output_dir.empty()) {
    write_report(rep, cfg.output_dir, cfg.plot);
    std::printf("wrote %s\n", cfg.output_dir.string().c_str());
  }
  return rep.passed() ? 0 : 1;
}

int cmd_potential(const std::string& input, int d, int m, int modes, std::uint64_t seed, const std::string& out) {
  SolenoidalVector g;
  if (input == "random")
    g = random_solenoidal(d, m, modes, seed);
  else
    g = solenoidal_from_json(read_json(input));
  const auto G = skew_potential(g);
  json rep;
  rep["d"] = g.d;
  rep["m"] = g.m;
  rep["input_solenoidal_residual"] = solenoidal_residual(g);
  rep["input_mean_residual"] = mean_residual(g);
  rep["skew_defect"] = G.skew_defect();
  rep["divergence_residual"] = G.divergence_residual(g);
  rep["measured_constant"] = G.measured_constant;
  const bool ok = G.skew_defect() == 0.0 && G.divergence_residual(g) <= 1e-10;
  rep["ok"] = ok;
  std::cout << rep.dump(2) << '\n';
  if (!out.empty()) {
    write_json(fs::path(out) / "potential.json", potential_to_json(G));
    write_json(fs::path(out) / "residuals.json", rep);
    if (input == "random") write_json(fs::path(out) / "input.json", solenoidal_to_json(g));
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic homogenization of 2m-order operators on the torus"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string problem, out, config, input, lambda = "auto", fspec = "seed:1";
  int cutoff = -1, k = 8, d = 2, m = 1, modes = 6;
  double tol = 1e-10;
  bool no_cache = false;
  std::uint64_t seed = 1;

  auto* check = app.add_subcommand("check", "ellipticity and Garding report");
  check->add_option("problem", problem, "built-in name or problem file")->required();
  check->add_option("--json", out, "also write the report here");

  auto* cell = app.add_subcommand("cell", "solve the cell problems and print the homogenized matrix");
  cell->add_option("problem", problem)->required();
  cell->add_option("--cutoff", cutoff, "cell cutoff (default 4 deg + 8)");
  cell->add_option("--tol", tol);
  cell->add_flag("--no-cache", no_cache);

  auto* solve = app.add_subcommand("solve", "one epsilon row: u_eps, u, v_hat and the error report");
  solve->add_option("problem", problem)->required();
  solve->add_option("--k", k, "eps = 1/k")->check(CLI::PositiveNumber);
  solve->add_option("--lambda", lambda, "shift or \"auto\"");
  solve->add_option("--f", fspec, "seed:<n> or a field-dump file");
  solve->add_option("--cutoff", cutoff, "cell cutoff");
  solve->add_option("--tol", tol);
  solve->add_option("--output", out, "directory for dumps");

  auto* converge = app.add_subcommand("converge", "full eps sweep from a config file");
  converge->add_option("config", config)->required()->check(CLI::ExistingFile);
  converge->add_option("--output", out, "overrides output_dir");

  auto* potential = app.add_subcommand("potential", "skew potential of a solenoidal family");
  potential->add_option("input", input, "field file or \"random\"")->required();
  potential->add_option("--d", d);
  potential->add_option("--m", m);
  potential->add_option("--modes", modes);
  potential->add_option("--seed", seed);
  potential->add_option("--output", out);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*check) return cmd_check(problem, out);
    if (*cell) return cmd_cell(problem, cutoff, tol, !no_cache);
    if (*solve) return cmd_solve(problem, k, lambda, fspec, cutoff, tol, out);
    if (*converge) return cmd_converge(config, out);
    if (*potential) return cmd_potential(input, d, m, modes, seed, out);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
