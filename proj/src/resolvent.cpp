#include "homog/resolvent.hpp"

#include <cmath>
#include <numbers>

#include "homog/errors.hpp"

namespace homog {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

PeriodicField corrector_sum(const PeriodicField& u, const CellSolutionSet& cells, int k, int cutoff, bool smooth) {
  if (cutoff < 0) cutoff = k * cells.cutoff;
  if (cutoff % k != 0) throw AlignmentError("fine cutoff is not a multiple of k");
  if (u.dim() != cells.gamma_index.d) throw ShapeError("field dimension does not match the cell solutions");
  const int m = cells.gamma_index.m;
  PeriodicField v = u.with_cutoff(cutoff);
  const double eps_m = std::pow(static_cast<double>(k), -m);
  for (const auto& gamma : cells.gamma_index) {
    const auto& N = cells.at(gamma);
    if (N.l2_norm() == 0.0) continue;
    auto du = u.derivative(gamma);
    if (smooth) du = du.steklov(k);
    const int cell_part = std::min(cutoff, k * N.cutoff());
    const auto fast = N.rescale(k, cell_part - cell_part % k);
    v += eps_m * product(fast, du, cutoff);
  }
  return v;
}

}  // namespace

TorusProblem make_problem(const CoefficientMatrix& a, int k, const PeriodicField& f, int cell_cutoff, double lambda, double tol) {
  const double lambda2 = estimate_garding(a);
  TorusProblem p{a, k, lambda, f, k * cell_cutoff, tol, 1.0 + lambda2, false, {}};
  if (lambda < 0.0) p.lambda = default_lambda(lambda2);
  return p;
}

EpsilonSolution solve_epsilon_detailed(const TorusProblem& p) {
  const auto& a = p.a;
  if (p.k < 1) throw PreconditionError("eps = 1/k needs k >= 1");
  if (p.cutoff % p.k != 0) throw AlignmentError("fine cutoff is not a multiple of k");
  if (p.f.dim() != a.dim()) throw ShapeError("right-hand side dimension does not match the operator");
  if (!p.lambda_override && p.lambda < p.lambda_floor) throw PreconditionError("lambda is below the recorded floor 1 + lambda2");
  if (const auto rep = validate_ellipticity(a.principal()); rep.symbol_min < a.lambda0() - 1e-12)
    throw PreconditionError("principal part is not elliptic: " + rep.verdict);

  const DiscreteOperator op(a, p.k, p.cutoff);
  const ModeBox& box = op.box();
  const std::size_t S = box.size();
  const int m = a.order();
  const double w0 = std::pow(kTwoPi, 2 * m);

  std::vector<double> weight(S), inv_sqrt(S);
  box.for_each([&](std::size_t i, std::span<const int> n) {
    weight[i] = w0 * lambda_m(n, m) + 1.0;
    inv_sqrt[i] = 1.0 / std::sqrt(w0 * a.lambda0() * lambda_m(n, m) + p.lambda);
  });
  const auto f = p.f.with_cutoff(p.cutoff);
  std::vector<cplx> b(S);
  for (std::size_t i = 0; i < S; ++i) b[i] = f.coeffs()[i] * inv_sqrt[i];

  std::vector<cplx> tmp(S);
  LinearMap scaled = [&](std::span<const cplx> z, std::span<cplx> out) {
    for (std::size_t i = 0; i < S; ++i) tmp[i] = z[i] * inv_sqrt[i];
    op.apply(tmp, out);
    for (std::size_t i = 0; i < S; ++i) out[i] = (out[i] + p.lambda * tmp[i]) * inv_sqrt[i];
  };
  KrylovOptions opts = p.policy;
  opts.tol = p.tol;
  auto kr = gmres(scaled, b, std::vector<cplx>(S), opts);
  if (!kr.converged) throw SolverError("epsilon problem hit the iteration cap (k = " + std::to_string(p.k) + ")", kr.history);

  std::vector<cplx> coeffs(S);
  for (std::size_t i = 0; i < S; ++i) coeffs[i] = kr.x[i] * inv_sqrt[i];
  EpsilonSolution sol{PeriodicField(a.dim(), p.cutoff, std::move(coeffs)), 0.0, kr.iterations, 0.0};

  std::vector<cplx> applied(S);
  op.apply(sol.u.coeffs(), applied);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < S; ++i) {
    const cplx r = applied[i] + p.lambda * sol.u.coeffs()[i] - f.coeffs()[i];
    num += std::norm(r) / weight[i];
    den += std::norm(f.coeffs()[i]) / weight[i];
  }
  sol.residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  const double fn = p.f.l2_norm();
  sol.energy_ratio = fn > 0.0 ? sol.u.norms(m).hm / fn : 0.0;
  return sol;
}

PeriodicField solve_epsilon(const TorusProblem& p) { return solve_epsilon_detailed(p).u; }

PeriodicField solve_homogenized(const HomogenizedMatrix& ahat, double lambda, const PeriodicField& f) {
  if (f.dim() != ahat.d) throw ShapeError("right-hand side dimension does not match the homogenized operator");
  std::vector<cplx> c(f.box().size());
  f.box().for_each([&](std::size_t i, std::span<const int> n) {
    const cplx fn = f.coeffs()[i];
    if (fn == cplx{}) return;
    const cplx denom = ahat.symbol(n) + lambda;
    if (std::abs(denom) <= 1e-14 * (1.0 + std::abs(lambda))) throw PreconditionError("homogenized symbol plus lambda vanishes at some mode");
    c[i] = fn / denom;
  });
  return PeriodicField(f.dim(), f.cutoff(), std::move(c));
}

double homogenized_regularity_ratio(const HomogenizedMatrix& ahat, double lambda, const PeriodicField& f) {
  const double fn = f.l2_norm();
  return fn > 0.0 ? solve_homogenized(ahat, lambda, f).norms(2 * ahat.m).hm / fn : 0.0;
}

PeriodicField first_approximation(const PeriodicField& u, const CellSolutionSet& cells, int k, int cutoff) {
  return corrector_sum(u, cells, k, cutoff, false);
}

PeriodicField smoothed_first_approximation(const PeriodicField& u, const CellSolutionSet& cells, int k, int cutoff) {
  return corrector_sum(u, cells, k, cutoff, true);
}

PeriodicField corrector_apply(const PeriodicField& f, const HomogenizedMatrix& ahat, const CellSolutionSet& cells, int k, double lambda,
                              int cutoff) {
  const auto u = solve_homogenized(ahat, lambda, f);
  auto v = smoothed_first_approximation(u, cells, k, cutoff);
  v -= u;
  return v;
}

ApproximationBundle build_bundle(const TorusProblem& p, const CellSolutionSet& cells, const HomogenizedMatrix& ahat) {
  ApproximationBundle b;
  b.k = p.k;
  b.lambda = p.lambda;
  b.f = p.f.with_cutoff(p.cutoff);
  auto eps = solve_epsilon_detailed(p);
  b.iterations = eps.iterations;
  b.residual = eps.residual;
  b.u_eps = std::move(eps.u);
  const auto u = solve_homogenized(ahat, p.lambda, p.f);
  b.u = u.with_cutoff(p.cutoff);
  b.v_eps = first_approximation(u, cells, p.k, p.cutoff);
  b.v_hat = smoothed_first_approximation(u, cells, p.k, p.cutoff);
  b.s_u_eps = b.u_eps.steklov(p.k);
  return b;
}

ErrorReport error_report(const ApproximationBundle& bundle, int m) {
  ErrorReport r;
  r.eps = 1.0 / bundle.k;
  r.f_norm = bundle.f.l2_norm();
  r.l2_u = (bundle.u_eps - bundle.u).l2_norm();
  r.hm_vhat = (bundle.u_eps - bundle.v_hat).norms(m).hm;
  r.hm_steklov = (bundle.s_u_eps - bundle.u).norms(m).hm;
  r.hm_v = (bundle.u_eps - bundle.v_eps).norms(m).hm;
  const double scale = r.eps * r.f_norm;
  if (scale > 0.0) {
    r.ratio_l2_u = r.l2_u / scale;
    r.ratio_hm_vhat = r.hm_vhat / scale;
    r.ratio_hm_steklov = r.hm_steklov / scale;
  }
  return r;
}

}  // namespace homog
