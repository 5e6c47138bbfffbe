#include <doctest.h>

#include <cmath>
#include <numbers>

#include "homog/errors.hpp"
#include "homog/io.hpp"
#include "homog/resolvent.hpp"
#include "oracles.hpp"

using namespace homog;
using T = PeriodicField::Term;

namespace {
constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

PeriodicField cos1(int d = 1) {
  std::vector<int> n(static_cast<std::size_t>(d), 0);
  n[0] = 1;
  return PeriodicField::from_terms(d, std::vector<T>{{n, 0.5}});
}
PeriodicField sin1() { return PeriodicField::from_terms(1, std::vector<T>{{{1}, -0.5 * I}}); }

double rel_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double e = 0.0, n = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    e += std::norm(a[i] - b[i]);
    n += std::norm(b[i]);
  }
  return std::sqrt(e / n);
}

CoefficientMatrix constant_general() {
  CoefficientMatrix a(2, 1, 0.8, 3.0);
  a.set({1, 0}, {1, 0}, PeriodicField::constant(2, 2.0));
  a.set({0, 1}, {0, 1}, PeriodicField::constant(2, 1.0));
  a.set({1, 0}, {0, 1}, PeriodicField::constant(2, 0.3));
  a.set({1, 0}, {0, 0}, PeriodicField::constant(2, 0.5));
  a.set({0, 0}, {0, 0}, PeriodicField::constant(2, 0.25));
  return a;
}

struct Harmonic {
  CoefficientMatrix a = builtin_problem("1d-m1-harmonic");
  CellSolutionSet cells = solve_all_cells(a);
  HomogenizedMatrix hat = homogenize(a, cells);
};
}  // namespace

TEST_CASE("constant coefficients diagonalize") {
  auto a = constant_general();
  auto f = random_field(2, 4, 5);
  auto p = make_problem(a, 2, f, 4);
  auto u = solve_epsilon(p);
  f.box().for_each([&](std::size_t, std::span<const int> n) {
    const cplx expect = f.coeff(n) / (constant_symbol(a, n) + p.lambda);
    CHECK(std::abs(u.coeff(n) - expect) <= 1e-9 * std::abs(f.coeff(n)) + 1e-15);
  });
  p.f = PeriodicField(2, 2);
  CHECK(solve_epsilon(p).l2_norm() == 0.0);
}

TEST_CASE("harmonic 1d problem against a dense solve") {
  auto a = builtin_problem("1d-m1-harmonic");
  TorusProblem p{a, 8, 1.0, cos1(), 16, 1e-12, 1.0, false, {}};
  auto sol = solve_epsilon_detailed(p);
  const auto ref = oracle::dense_solve(a, 8, 16, 1.0, cos1());
  CHECK(rel_diff(sol.u.coeffs(), ref) < 1e-8);
  CHECK(sol.residual <= 1e-12);
  CHECK(sol.energy_ratio > 0.0);
}

TEST_CASE("iterative solve matches dense solve on random problems") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const int d = seed == 3 ? 2 : 1, m = seed == 2 ? 2 : 1, k = 2;
    CoefficientMatrix a(d, m, 0.5, 10.0);
    for (const auto& al : enumerate(d, m, IndexMode::UpToM))
      for (const auto& be : enumerate(d, m, IndexMode::UpToM)) {
        auto f = random_field(d, 1, seed * 100 + static_cast<std::uint64_t>(a.entries().size()));
        if (al.order() == m && be.order() == m) {
          f *= 0.1;
          if (al == be) f += PeriodicField::constant(d, 2.0);
        } else {
          f *= 0.3;
        }
        a.set(al, be, f);
      }
    const int N = d == 1 ? 8 : 4;
    auto f = random_field(d, 3, seed);
    auto p = make_problem(a, k, f, N / k);
    auto u = solve_epsilon(p);
    CHECK(rel_diff(u.coeffs(), oracle::dense_solve(a, k, N, p.lambda, f)) < 1e-8);
  }
}

TEST_CASE("solution invariants") {
  auto a = builtin_problem("2d-m1-general");
  auto f = random_field(2, 4, 9);
  auto p = make_problem(a, 4, f, 6, -1.0, 1e-12);
  auto u = solve_epsilon(p);
  // residual in L2 for m = 1
  auto r = apply(a, u, 4);
  r += p.lambda * u;
  r -= f.with_cutoff(p.cutoff);
  CHECK(r.l2_norm() <= 1e-9 * f.l2_norm());
  const double l2 = estimate_garding(a);
  CHECK(p.lambda > l2 + 1.0 - 1e-12);
  CHECK(u.l2_norm() <= f.l2_norm() / (p.lambda - l2));
}

TEST_CASE("homogenized solve") {
  HomogenizedMatrix hat{1, 1, 1.0, 3.0, {}, true, 0.0};
  hat.entries[{MultiIndex{1}, MultiIndex{1}}] = std::sqrt(3.0);
  auto u = solve_homogenized(hat, 1.0, cos1());
  CHECK((u - (1.0 / (std::sqrt(3.0) * 4 * pi * pi + 1.0)) * cos1()).l2_norm() < 1e-16);
  CHECK(solve_homogenized(hat, 1.0, PeriodicField(1, 3)).l2_norm() == 0.0);

  HomogenizedMatrix lap{2, 1, 1.0, 1.0, {}, true, 0.0};
  lap.entries[{MultiIndex{1, 0}, MultiIndex{1, 0}}] = 1.0;
  lap.entries[{MultiIndex{0, 1}, MultiIndex{0, 1}}] = 1.0;
  auto s11 = PeriodicField::from_terms(2, std::vector<T>{{{1, 1}, -0.5 * I}});
  auto v = solve_homogenized(lap, 2.0, s11);
  CHECK((v - (1.0 / (8 * pi * pi + 2.0)) * s11).l2_norm() < 1e-16);

  // exact right inverse for a homogenized matrix with lower-order terms
  auto a = builtin_problem("2d-m1-general");
  auto ahat = homogenize(a, solve_all_cells(a));
  auto f = random_field(2, 4, 3);
  auto w = solve_homogenized(ahat, 1.0, f);
  auto back = apply(ahat.as_coefficients(), w);
  back += w;
  CHECK((back - f).l2_norm() <= 1e-11 * f.l2_norm());
  CHECK(homogenized_regularity_ratio(ahat, 1.0, f) > 0.0);

  HomogenizedMatrix neg{1, 1, 1.0, 1.0, {}, false, 0.0};
  neg.entries[{MultiIndex{1}, MultiIndex{1}}] = -1.0 / (4 * pi * pi);
  CHECK_THROWS_AS(solve_homogenized(neg, 1.0, cos1()), PreconditionError);
}

TEST_CASE("first approximation against direct evaluation") {
  Harmonic h;
  auto u = sin1();
  const int k = 4;
  CHECK(first_approximation(u, h.cells, k).cutoff() == k * h.cells.cutoff);
  // wide enough to hold the full product N(kx) u'(x)
  const int wide = k * h.cells.cutoff + k;
  auto v = first_approximation(u, h.cells, k, wide);
  const auto& N1 = h.cells.at(MultiIndex{1});
  CHECK(h.cells.at(MultiIndex{0}).l2_norm() == 0.0);
  for (double x : {0.03, 0.31, 0.62, 0.97}) {
    const double xs[] = {x}, kx[] = {k * x};
    const double expect = std::sin(2 * pi * x) + 0.25 * N1.evaluate(kx) * 2 * pi * std::cos(2 * pi * x);
    CHECK(std::abs(v.evaluate(xs) - expect) < 1e-10);
  }
  CHECK(first_approximation(PeriodicField(1, 2), h.cells, k).l2_norm() == 0.0);
  CHECK_THROWS_AS(first_approximation(u, h.cells, k, 30), AlignmentError);

  // smoothing multiplies D u by sinc(pi n / k)
  auto vh = smoothed_first_approximation(u, h.cells, k, wide);
  for (double x : {0.2, 0.7}) {
    const double xs[] = {x}, kx[] = {k * x};
    const double expect = std::sin(2 * pi * x) + 0.25 * N1.evaluate(kx) * sinc(pi / k) * 2 * pi * std::cos(2 * pi * x);
    CHECK(std::abs(vh.evaluate(xs) - expect) < 1e-10);
  }
  // the corrector vanishes like eps in L2; its gradient stays O(1), so in H^1 the distance settles
  std::vector<double> l2, h1;
  for (int kk : {4, 8, 16}) {
    const auto diff = smoothed_first_approximation(u, h.cells, kk) - u.with_cutoff(kk * h.cells.cutoff);
    l2.push_back(diff.l2_norm());
    h1.push_back(diff.norms(1).hm);
  }
  CHECK(l2[1] < l2[0]);
  CHECK(l2[2] < l2[1]);
  CHECK(l2[2] / l2[1] == doctest::Approx(0.5).epsilon(0.05));
  CHECK(h1[2] / h1[1] == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("constant coefficients need no corrector") {
  auto a = constant_general();
  auto cells = solve_all_cells(a, 4);
  auto hat = homogenize(a, cells);
  auto f = random_field(2, 3, 4);
  auto u = solve_homogenized(hat, 2.0, f);
  CHECK((first_approximation(u, cells, 2) - u.with_cutoff(8)).l2_norm() == 0.0);
  CHECK((smoothed_first_approximation(u, cells, 2) - u.with_cutoff(8)).l2_norm() == 0.0);
  CHECK(corrector_apply(f, hat, cells, 2, 2.0).l2_norm() == 0.0);
  TorusProblem p{a, 2, 2.0, f, 8, 1e-12, 1.0, false, {}};
  auto rep = error_report(build_bundle(p, cells, hat), 1);
  CHECK(rep.l2_u < 1e-11);
  CHECK(rep.hm_vhat < 1e-10);
}

TEST_CASE("corrector operator") {
  Harmonic h;
  CHECK(corrector_apply(PeriodicField(1, 4), h.hat, h.cells, 4, 1.0).l2_norm() == 0.0);
  auto f1 = random_field(1, 4, 1), f2 = random_field(1, 4, 2);
  auto lhs = corrector_apply(f1 + f2, h.hat, h.cells, 4, 1.0);
  auto rhs = corrector_apply(f1, h.hat, h.cells, 4, 1.0) + corrector_apply(f2, h.hat, h.cells, 4, 1.0);
  CHECK((lhs - rhs).l2_norm() <= 1e-12 * lhs.l2_norm());
  CHECK(lhs.l2_norm() > 0.0);
}

TEST_CASE("error report on the harmonic family") {
  Harmonic h;
  auto f = random_field(1, 4, 1);
  std::vector<double> l2;
  for (int k : {8, 16}) {
    auto p = make_problem(h.a, k, f, h.cells.cutoff);
    auto b = build_bundle(p, h.cells, h.hat);
    CHECK(b.u.cutoff() == b.u_eps.cutoff());
    CHECK(b.v_hat.cutoff() == b.u_eps.cutoff());
    auto r = error_report(b, 1);
    CHECK(r.eps == doctest::Approx(1.0 / k));
    CHECK(r.f_norm == doctest::Approx(1.0));
    for (double x : {r.ratio_l2_u, r.ratio_hm_vhat, r.ratio_hm_steklov}) {
      CHECK(std::isfinite(x));
      CHECK(x > 0.0);
    }
    l2.push_back(r.l2_u);
  }
  CHECK(l2[1] / l2[0] == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("problem preconditions") {
  auto a = builtin_problem("1d-m1-harmonic");
  auto f = cos1();
  TorusProblem p{a, 4, 1.0, f, 10, 1e-10, 1.0, false, {}};
  CHECK_THROWS_AS(solve_epsilon(p), AlignmentError);
  p.cutoff = 12;
  p.lambda = 0.5;
  CHECK_THROWS_AS(solve_epsilon(p), PreconditionError);
  p.lambda_override = true;
  CHECK_NOTHROW(solve_epsilon(p));
  p.policy.max_iterations = 1;
  p.lambda = 1.0;
  CHECK_THROWS_AS(solve_epsilon(p), SolverError);
  p.policy = {};
  p.f = cos1(2);
  CHECK_THROWS_AS(solve_epsilon(p), ShapeError);
}
