#include <doctest.h>

#include <cmath>
#include <numbers>

#include "homog/errors.hpp"
#include "homog/io.hpp"
#include "homog/operators.hpp"
#include "oracles.hpp"

using namespace homog;
using T = PeriodicField::Term;

namespace {
constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

CoefficientMatrix laplacian(int d) {
  CoefficientMatrix a(d, 1, 1.0, 1.0, "laplacian");
  for (const auto& e : enumerate(d, 1, IndexMode::ExactlyM)) a.set(e, e, PeriodicField::constant(d, 1.0));
  return a;
}

CoefficientMatrix one_d(int m, std::vector<T> terms, double l0 = 1.0, double l1 = 3.0) {
  CoefficientMatrix a(1, m, l0, l1);
  a.set(MultiIndex{m}, MultiIndex{m}, PeriodicField::from_terms(1, terms));
  return a;
}

// random matrix with every |a|,|b| <= m entry, principal part diagonal-dominant
CoefficientMatrix random_matrix(int d, int m, std::uint64_t seed, double lower = 0.3) {
  CoefficientMatrix a(d, m, 0.5, 10.0);
  const auto set = enumerate(d, m, IndexMode::UpToM);
  std::uint64_t s = seed;
  for (const auto& al : set)
    for (const auto& be : set) {
      auto f = random_field(d, 2, ++s);
      if (al.order() == m && be.order() == m) {
        f *= 0.15;
        if (al == be) f += PeriodicField::constant(d, 2.0);
      } else {
        f *= lower;
      }
      a.set(al, be, f);
    }
  return a;
}
}  // namespace

TEST_CASE("ellipticity validation") {
  auto id = laplacian(2);
  auto rep = validate_ellipticity(id);
  CHECK(rep.ok);
  CHECK(rep.symbol_min == doctest::Approx(1.0));

  auto h = builtin_problem("1d-m1-harmonic");
  auto r2 = validate_ellipticity(h);
  CHECK(r2.ok);
  CHECK(r2.sup_max == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(r2.symbol_min == doctest::Approx(1.0).epsilon(1e-6));

  auto bad = one_d(1, {{{1}, -0.5 * I}});
  auto r3 = validate_ellipticity(bad);
  CHECK_FALSE(r3.ok);
  CHECK(r3.symbol_min < 0.0);

  auto loose = one_d(1, {{{0}, 2.0}, {{1}, -0.5 * I}}, 1.0, 2.0);
  CHECK_FALSE(validate_ellipticity(loose).sup_bound_ok);

  for (const auto& name : builtin_problems()) CHECK_MESSAGE(validate_ellipticity(builtin_problem(name)).ok, name);
}

TEST_CASE("Garding shift") {
  CHECK(estimate_garding(builtin_problem("bilaplacian")) == 0.0);

  CoefficientMatrix a(1, 1, 2.0, 1.0);
  a.set(MultiIndex{1}, MultiIndex{1}, PeriodicField::constant(1, 1.0));
  a.set(MultiIndex{0}, MultiIndex{0}, PeriodicField::constant(1, -1.0));
  // ||u'||^2 - ||u||^2 + lambda2 ||u||^2 >= (lambda0/2) ||u'||^2 needs lambda2 = 1 at lambda0 = 2
  CHECK(estimate_garding(a) == doctest::Approx(1.0).epsilon(1e-9));
  CoefficientMatrix b(1, 1, 1.0, 1.0);
  b.set(MultiIndex{1}, MultiIndex{1}, PeriodicField::constant(1, 1.0));
  b.set(MultiIndex{0}, MultiIndex{0}, PeriodicField::constant(1, -1.0));
  b.set(MultiIndex{0}, MultiIndex{0}, PeriodicField::constant(1, -3.0));
  CHECK(estimate_garding(b) == doctest::Approx(3.0).epsilon(1e-9));

  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto r = random_matrix(seed == 3 ? 1 : 2, seed == 2 ? 2 : 1, 10 * seed, 1.5);
    const int N = r.dim() == 1 ? 12 : 5;
    const double l2 = estimate_garding(r, N);
    CHECK(l2 == doctest::Approx(oracle::dense_garding(r, N)).epsilon(1e-8));
    double prev = l2;
    for (double s : {0.5, 0.25, 0.0}) {
      const double cur = estimate_garding(r.scaled_lower_order(s), N);
      CHECK(cur <= prev + 1e-9);
      prev = cur;
    }
  }
}

TEST_CASE("Garding inequality holds for random fields") {
  auto a = random_matrix(2, 1, 77, 1.0);
  const double l2 = estimate_garding(a);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto u = random_field(2, 5, seed);
    const double lhs = weak_form(a, u, u) + (l2 + 1e-8) * u.l2_norm() * u.l2_norm();
    CHECK(lhs >= 0.5 * a.lambda0() * u.seminorm_squared(1));
  }
}

TEST_CASE("apply on simple inputs") {
  auto s = PeriodicField::from_terms(1, std::vector<T>{{{1}, -0.5 * I}});
  auto out = apply(laplacian(1), s);
  CHECK((out - 4 * pi * pi * s).l2_norm() < 1e-12);
  CHECK(apply(laplacian(2), PeriodicField(2, 4)).l2_norm() == 0.0);

  // constant matrix: per-mode symbol
  auto c = random_matrix(2, 2, 5);
  CoefficientMatrix cc(2, 2, 0.5, 10.0);
  for (const auto& [key, f] : c.entries()) cc.set(key.first, key.second, PeriodicField::constant(2, f.mean()));
  auto u = random_field(2, 4, 3);
  auto au = apply(cc, u);
  u.box().for_each([&](std::size_t i, std::span<const int> n) {
    const cplx expect = constant_symbol(cc, n) * u.coeffs()[i];
    CHECK(std::abs(au.coeffs()[i] - expect) <= 1e-12 * (1.0 + std::abs(expect)));
  });
  // grid evaluation: -(a u')' with a = 2 + sin, u = cos
  auto h = builtin_problem("1d-m1-harmonic");
  auto cu = PeriodicField::from_terms(1, std::vector<T>{{{1}, 0.5}});
  auto hu = apply(h, cu.with_cutoff(3));
  for (double y : {0.1, 0.37, 0.8}) {
    const double a = 2 + std::sin(2 * pi * y), da = 2 * pi * std::cos(2 * pi * y);
    const double up = -2 * pi * std::sin(2 * pi * y), upp = -4 * pi * pi * std::cos(2 * pi * y);
    const double y1[] = {y};
    CHECK(hu.evaluate(y1) == doctest::Approx(-(da * up + a * upp)).epsilon(1e-12));
  }
}

TEST_CASE("apply matches the dense Galerkin matrix") {
  for (std::uint64_t seed : {1u, 2u}) {
    auto a = random_matrix(seed == 1 ? 1 : 2, seed == 1 ? 2 : 1, 30 * seed);
    const int k = 2, N = seed == 1 ? 10 : 5;
    auto u = random_field(a.dim(), N, seed);
    const auto B = oracle::dense_galerkin(a, k, N, 0.0);
    const auto au = apply(a, u, k);
    Eigen::VectorXcd x(static_cast<Eigen::Index>(u.coeffs().size()));
    for (std::size_t i = 0; i < u.coeffs().size(); ++i) x(static_cast<Eigen::Index>(i)) = u.coeffs()[i];
    const Eigen::VectorXcd y = B * x;
    double err = 0.0, nrm = 0.0;
    for (std::size_t i = 0; i < u.coeffs().size(); ++i) {
      err = std::max(err, std::abs(y(static_cast<Eigen::Index>(i)) - au.coeffs()[i]));
      nrm = std::max(nrm, std::abs(y(static_cast<Eigen::Index>(i))));
    }
    CHECK(err <= 1e-11 * nrm);
  }
}

TEST_CASE("weak form") {
  auto s = PeriodicField::from_terms(1, std::vector<T>{{{1}, -0.5 * I}});
  CHECK(weak_form(laplacian(1), s, s) == doctest::Approx(2 * pi * pi));
  CHECK(weak_form(laplacian(1), s, PeriodicField(1, 1)) == 0.0);
  auto a = random_matrix(2, 2, 9);
  auto u = random_field(2, 3, 1), phi = random_field(2, 3, 2);
  CHECK(weak_form(a, 2.0 * u, phi, 2) == doctest::Approx(2.0 * weak_form(a, u, phi, 2)).epsilon(1e-13));
  // duality with apply
  for (int k : {1, 3}) {
    const double w = weak_form(a, u, phi, k);
    const double d = inner(apply(a, u.with_cutoff(3), k), phi);
    CHECK(d == doctest::Approx(w).epsilon(1e-10));
  }
}

TEST_CASE("principal coercivity with the validated constant") {
  for (const auto& name : {"bilaplacian", "plate-tensor", "2d-m1-general"}) {
    auto a = builtin_problem(name);
    auto p = a.principal();
    const auto top = enumerate(a.dim(), a.order(), IndexMode::ExactlyM);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      auto u = random_field(2, 4, seed, false);
      double rhs = 0.0;
      for (const auto& al : top) rhs += std::pow(u.derivative(al).l2_norm(), 2);
      CHECK(weak_form(p, u, u) >= a.lambda0() * rhs);
    }
  }
}

TEST_CASE("coefficient matrix bookkeeping") {
  CoefficientMatrix a(2, 2, 1.0, 3.0);
  CHECK_THROWS_AS(a.set(MultiIndex{3, 0}, MultiIndex{2, 0}, PeriodicField::constant(2, 1.0)), PreconditionError);
  CHECK_THROWS_AS(a.set(MultiIndex{1}, MultiIndex{1}, PeriodicField::constant(1, 1.0)), ShapeError);
  a.set(MultiIndex{2, 0}, MultiIndex{2, 0}, PeriodicField::constant(2, 1.0));
  CHECK(a.entry(MultiIndex{0, 2}, MultiIndex{0, 2}).l2_norm() == 0.0);
  CHECK_FALSE(a.has_lower_order());
  CHECK(a.is_constant());
  const auto before = a.fingerprint();
  a.add(MultiIndex{2, 0}, MultiIndex{2, 0}, PeriodicField::constant(2, 1.0));
  CHECK(a.fingerprint() != before);
  CHECK(sphere_samples(3).size() == 256);
  for (const auto& xi : sphere_samples(4)) {
    double s = 0.0;
    for (double v : xi) s += v * v;
    CHECK(s == doctest::Approx(1.0));
  }
}
