// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "homog/harness.hpp"
#include "oracles.hpp"

using namespace homog;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void report(int id, const std::string& title, bool ok, const std::string& detail, double secs, double budget) {
  const bool in_time = secs <= budget;
  if (!ok || !in_time) ++failures;
  std::printf("[%s] %2d %s: %s (%.2f s, budget %.0f s)\n", ok && in_time ? "PASS" : "FAIL", id, title.c_str(), detail.c_str(), secs, budget);
  std::fflush(stdout);
}

std::string f3(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3f", v);
  return b;
}
std::string e2(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2e", v);
  return b;
}

double slope_or_nan(const ConvergenceReport& r, const std::string& col) {
  const auto& s = r.slopes.at(col);
  return s.ok ? s.fit.slope : std::nan("");
}

SweepConfig sweep(const std::string& problem, std::vector<int> ks) {
  SweepConfig c;
  c.problem = problem;
  c.ks = std::move(ks);
  c.use_cache = false;
  c.required = {"l2_u", "hm_vhat", "hm_steklov"};
  return c;
}

}  // namespace

int main() {
  constexpr double pi = std::numbers::pi;

  {  // 1
    const auto t0 = Clock::now();
    const double q = oracle::harmonic_mean([&](double y) { return 2.0 + std::sin(2 * pi * y); });
    double worst = 0.0;
    for (const char* name : {"1d-m1-harmonic", "1d-m2-harmonic"}) {
      const auto a = builtin_problem(name);
      const auto hat = homogenize(a, solve_all_cells(a));
      const MultiIndex top{a.order()};
      worst = std::max(worst, std::abs(hat.value(top, top) - q));
    }
    report(1, "homogenized coefficient = <1/a>^-1 = sqrt 3 (m = 1, 2)", worst <= 1e-8 && std::abs(q - std::sqrt(3.0)) < 1e-14,
           "max error " + e2(worst), seconds_since(t0), 5);
  }

  auto t1 = Clock::now();
  auto c1 = sweep("1d-m1-harmonic", {4, 8, 16, 32, 64});
  c1.negative_control = true;
  const auto r1 = run_sweep(c1);
  const double sweep1 = seconds_since(t1);
  t1 = Clock::now();
  const auto r2 = run_sweep(sweep("1d-m2-harmonic", {4, 8, 16, 32, 64}));
  const double sweep2 = seconds_since(t1);

  {  // 2
    const double s1 = slope_or_nan(r1, "l2_u"), s2 = slope_or_nan(r2, "l2_u");
    report(2, "O(eps) L2 resolvent rate, 1d harmonic, k = 4..64", s1 >= 0.9 && s2 >= 0.9,
           "slope m=1 " + f3(s1) + ", m=2 " + f3(s2), sweep1 + sweep2, 120);
  }
  {  // 3
    const double s1 = slope_or_nan(r1, "hm_vhat"), s2 = slope_or_nan(r2, "hm_vhat");
    report(3, "O(eps) H^m corrector rate ||u_eps - v_hat||", s1 >= 0.9 && s2 >= 0.9, "slope m=1 " + f3(s1) + ", m=2 " + f3(s2),
           sweep1 + sweep2, 300);
  }
  {  // 4
    const double s1 = slope_or_nan(r1, "hm_steklov");
    report(4, "corrector-free Steklov rate ||S u_eps - u||_H1", s1 >= 0.9, "slope " + f3(s1), sweep1, 120);
  }
  {  // 5
    const auto t0 = Clock::now();
    auto c = sweep("2d-m1-general", {2, 4, 8, 16});
    c.required = {"l2_u"};
    const auto a = run_sweep(c);
    c.problem = "bilaplacian";
    const auto b = run_sweep(c);
    const double sa = slope_or_nan(a, "l2_u"), sb = slope_or_nan(b, "l2_u");
    report(5, "2d second-order and bilaplacian L2 rates, k = 2..16", sa >= 0.9 && sb >= 0.9,
           "slope 2d-m1 " + f3(sa) + ", bilaplacian " + f3(sb), seconds_since(t0), 1200);
  }

  std::vector<std::pair<SolenoidalVector, SkewPotential>> potentials;
  {  // 6
    const auto t0 = Clock::now();
    bool ok = true;
    double worst = 0.0, skew = 0.0;
    for (int i = 0; i < 20; ++i) {
      const int m = 1 + i % 2, modes = 2 + i % 5;
      auto g = random_solenoidal(2, m, modes, 1000 + static_cast<std::uint64_t>(i));
      auto G = skew_potential(g);
      skew = std::max(skew, G.skew_defect());
      worst = std::max(worst, G.divergence_residual(g));
      ok = ok && G.skew_defect() == 0.0 && G.divergence_residual(g) <= 1e-10;
      potentials.emplace_back(std::move(g), std::move(G));
    }
    report(6, "skew potential identities on 20 solenoidal inputs", ok, "skew defect " + e2(skew) + ", divergence residual " + e2(worst),
           seconds_since(t0), 10);
  }
  {  // 7
    const auto t0 = Clock::now();
    double worst = 0.0, control = 0.0;
    for (std::size_t i = 0; i < potentials.size(); ++i) {
      for (std::uint64_t s = 0; s < 10; ++s) {
        const auto u = random_field(2, 3, 2000 + 10 * i + s), phi = random_field(2, 3, 3000 + 10 * i + s);
        const int k = 1 + static_cast<int>(s % 3);
        const auto z = zero_functional_check(potentials[i].second, u, phi, k);
        worst = std::max(worst, std::abs(z.value) / z.scale);
        control = std::max(control, std::abs(symmetric_control_check(potentials[i].second, u, phi, k).value));
      }
    }
    report(7, "zero functional of skew potentials, symmetric control nonzero", worst <= 1e-10 && control > 1e-6,
           "max |value|/scale " + e2(worst) + ", control " + e2(control), seconds_since(t0), 10);
  }
  {  // 8
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(seed);
      const int d = seed <= 2 ? 1 : 2, m = seed % 2 == 0 ? 2 : 1, k = rng.integer(1, 3);
      CoefficientMatrix a(d, m, 0.5, 10.0, "random");
      std::uint64_t s = 100 * seed;
      for (const auto& al : enumerate(d, m, IndexMode::UpToM))
        for (const auto& be : enumerate(d, m, IndexMode::UpToM)) {
          auto f = random_field(d, 1, ++s);
          if (al.order() == m && be.order() == m) {
            f *= 0.15;
            if (al == be) f += PeriodicField::constant(d, 2.0);
          } else {
            f *= 0.3;
          }
          a.set(al, be, f);
        }
      const int N = 8 / k * k;  // <= 17 modes per axis
      const auto f = random_field(d, 4, seed);
      auto p = make_problem(a, k, f, N / k, -1.0, 1e-12);
      const auto u = solve_epsilon(p);
      const auto ref = oracle::dense_solve(a, k, N, p.lambda, f);
      double e = 0.0, n = 0.0;
      for (std::size_t i = 0; i < ref.size(); ++i) {
        e += std::norm(u.coeffs()[i] - ref[i]);
        n += std::norm(ref[i]);
      }
      worst = std::max(worst, std::sqrt(e / n));
    }
    report(8, "iterative solve equals dense Galerkin solve on 5 random problems", worst <= 1e-8, "max relative difference " + e2(worst),
           seconds_since(t0), 60);
  }
  {  // 9
    const bool ok = r1.control && r1.control->control_slope < 0.3 && r1.control->real_slope >= 0.9;
    report(9, "naive-mean control plateaus while the real pipeline converges", ok,
           "control slope " + f3(r1.control ? r1.control->control_slope : std::nan("")) + ", real slope " +
               f3(r1.control ? r1.control->real_slope : std::nan("")),
           sweep1, 120);
  }
  {  // 10
    const auto t0 = Clock::now();
    bool ok = true;
    std::string why;
    auto require = [&](bool cond, const std::string& what) {
      if (!cond && why.empty()) why = what;
      ok = ok && cond;
    };
    for (const auto& name : builtin_problems()) {
      const auto a = builtin_problem(name);
      const auto cells = solve_all_cells(a);
      for (const auto& [gamma, N] : cells.solutions) require(N.mean() == 0.0, name + ": nonzero cell mean");
      const auto hat = homogenize(a, cells);
      require(hat.lambda0_check && hat.symbol_min >= a.lambda0() - 1e-10, name + ": homogenized symbol");
      const double l2 = estimate_garding(a);
      const int deg = a.dim() == 1 ? 8 : 4;
      for (std::uint64_t s = 0; s < 5; ++s) {
        const auto u = random_field(a.dim(), deg, 4000 + s);
        const double lhs = weak_form(a, u, u) + (l2 + 1e-8) * std::pow(u.l2_norm(), 2);
        require(lhs >= 0.5 * a.lambda0() * u.seminorm_squared(a.order()), name + ": Garding");
        const auto phi = random_field(a.dim(), deg, 5000 + s);
        const double w = weak_form(a, u, phi, 2);
        const double dual = inner(apply(a, u, 2), phi);
        require(std::abs(dual - w) <= 1e-10 * std::max(1.0, std::abs(w)), name + ": duality");
        const auto v = u.samples(2 * deg + 2);
        double q = 0.0;
        for (double x : v) q += x * x;
        require(std::abs(std::sqrt(q / static_cast<double>(v.size())) - u.l2_norm()) <= 1e-12, name + ": Parseval");
      }
    }
    report(10, "structural invariants (cell means, symbol positivity, Garding, duality, Parseval)", ok, ok ? "all hold" : why,
           seconds_since(t0), 60);
  }

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
