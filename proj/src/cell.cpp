#include "homog/cell.hpp"

#include <cmath>
#include <future>
#include <numbers>
#include <thread>

#include "homog/errors.hpp"

namespace homog {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_consistent(const CoefficientMatrix& a, const CellSolutionSet& cells) {
  if (cells.matrix_fingerprint != a.fingerprint()) throw ConsistencyError("cell solutions were computed for a different coefficient matrix");
  if (cells.gamma_index.d != a.dim() || cells.gamma_index.m != a.order()) throw ConsistencyError("cell solutions have the wrong shape");
}

}  // namespace

int default_cell_cutoff(const CoefficientMatrix& a) { return 4 * a.degree() + 8; }

CellSolveResult solve_cell_detailed(const CoefficientMatrix& a, const MultiIndex& gamma, int cutoff, double tol,
                                    const KrylovOptions& policy) {
  if (gamma.dim() != a.dim() || gamma.order() > a.order()) throw PreconditionError("cell index must satisfy |gamma| <= m");
  if (cutoff < 1) throw ShapeError("cell cutoff must be at least 1");
  const auto principal = a.principal();
  if (const auto rep = validate_ellipticity(principal); rep.symbol_min < a.lambda0() - 1e-12)
    throw PreconditionError("principal part is not elliptic: " + rep.verdict);

  const int m = a.order();
  const DiscreteOperator op(a, 1, cutoff, /*principal_only=*/true);
  const ModeBox& box = op.box();
  const std::size_t S = box.size();
  const std::size_t zero = S / 2;

  std::vector<cplx> rhs(S);
  std::vector<double> weight(S, 0.0);
  const double w0 = std::pow(kTwoPi, 2 * m);
  const auto top = enumerate(a.dim(), m, IndexMode::ExactlyM);
  box.for_each([&](std::size_t i, std::span<const int> n) {
    weight[i] = w0 * lambda_m(n, m);
    cplx s{};
    for (const auto& alpha : top) {
      if (const auto* f = a.find(alpha, gamma)) s -= std::conj(derivative_symbol(n, alpha)) * f->coeff(n);
    }
    rhs[i] = s;
  });
  rhs[zero] = 0.0;

  // Symmetric diagonal scaling by the preconditioner lambda0 (2 pi)^{2m} Lambda_m(n).
  std::vector<double> inv_sqrt(S, 0.0);
  for (std::size_t i = 0; i < S; ++i) {
    if (i != zero) inv_sqrt[i] = 1.0 / std::sqrt(a.lambda0() * weight[i]);
  }
  std::vector<cplx> b(S);
  for (std::size_t i = 0; i < S; ++i) b[i] = rhs[i] * inv_sqrt[i];

  std::vector<cplx> tmp(S);
  LinearMap scaled = [&](std::span<const cplx> z, std::span<cplx> out) {
    for (std::size_t i = 0; i < S; ++i) tmp[i] = z[i] * inv_sqrt[i];
    op.apply(tmp, out);
    for (std::size_t i = 0; i < S; ++i) out[i] *= inv_sqrt[i];
  };

  KrylovOptions opts = policy;
  opts.tol = tol;
  auto kr = gmres(scaled, b, std::vector<cplx>(S), opts);
  if (!kr.converged) throw SolverError("cell problem " + gamma.to_string() + " hit the iteration cap", kr.history);

  std::vector<cplx> coeffs(S);
  for (std::size_t i = 0; i < S; ++i) coeffs[i] = kr.x[i] * inv_sqrt[i];
  coeffs[zero] = 0.0;
  PeriodicField field(a.dim(), cutoff, std::move(coeffs));

  // Residual of the symmetrized field in the dual norm.
  std::vector<cplx> applied(S);
  op.apply(field.coeffs(), applied);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < S; ++i) {
    if (i == zero) continue;
    num += std::norm(applied[i] - rhs[i]) / weight[i];
    den += std::norm(rhs[i]) / weight[i];
  }
  const double residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  return {std::move(field), residual, kr.iterations};
}

PeriodicField solve_cell(const CoefficientMatrix& a, const MultiIndex& gamma, int cutoff, double tol) {
  return solve_cell_detailed(a, gamma, cutoff, tol).field;
}

CellSolutionSet solve_all_cells(const CoefficientMatrix& a, int cutoff, double tol, int workers) {
  if (cutoff < 0) cutoff = default_cell_cutoff(a);
  CellSolutionSet set;
  set.gamma_index = enumerate(a.dim(), a.order(), IndexMode::UpToM);
  set.cutoff = cutoff;
  set.tol = tol;
  set.matrix_fingerprint = a.fingerprint();

  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto& gammas = set.gamma_index.members;
  std::vector<std::future<CellSolveResult>> pending;
  std::vector<CellSolveResult> results;
  results.reserve(gammas.size());
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (workers == 1) {
      results.push_back(solve_cell_detailed(a, gammas[i], cutoff, tol));
      continue;
    }
    pending.push_back(std::async(std::launch::async, [&, i] { return solve_cell_detailed(a, gammas[i], cutoff, tol); }));
    if (static_cast<int>(pending.size()) == workers || i + 1 == gammas.size()) {
      for (auto& f : pending) results.push_back(f.get());
      pending.clear();
    }
  }
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    set.residuals.emplace(gammas[i], results[i].residual);
    set.iterations.emplace(gammas[i], results[i].iterations);
    set.solutions.emplace(gammas[i], std::move(results[i].field));
  }
  return set;
}

double HomogenizedMatrix::value(const MultiIndex& alpha, const MultiIndex& beta) const {
  auto it = entries.find({alpha, beta});
  return it == entries.end() ? 0.0 : it->second;
}

CoefficientMatrix HomogenizedMatrix::as_coefficients() const {
  CoefficientMatrix out(d, m, lambda0, lambda1, "homogenized");
  for (const auto& [key, v] : entries) {
    if (v != 0.0) out.set(key.first, key.second, PeriodicField::constant(d, v));
  }
  return out;
}

cplx HomogenizedMatrix::symbol(std::span<const int> n) const {
  cplx s{};
  for (const auto& [key, v] : entries) s += v * derivative_symbol(n, key.second) * std::conj(derivative_symbol(n, key.first));
  return s;
}

std::map<CoefficientMatrix::Key, PeriodicField, PairOrder> tilde_matrix(const CoefficientMatrix& a, const CellSolutionSet& cells) {
  require_consistent(a, cells);
  const auto all = enumerate(a.dim(), a.order(), IndexMode::UpToM);
  const auto top = enumerate(a.dim(), a.order(), IndexMode::ExactlyM);
  std::map<MultiIndex, std::vector<PeriodicField>, IndexOrder> grads;  // D^gamma N_beta, |gamma| = m
  for (const auto& beta : all) {
    std::vector<PeriodicField> g;
    for (const auto& gamma : top) g.push_back(cells.at(beta).derivative(gamma));
    grads.emplace(beta, std::move(g));
  }
  std::map<CoefficientMatrix::Key, PeriodicField, PairOrder> out;
  for (const auto& alpha : all) {
    for (const auto& beta : all) {
      PeriodicField acc = a.entry(alpha, beta).with_cutoff(cells.cutoff);
      for (std::size_t g = 0; g < top.size(); ++g) {
        if (const auto* f = a.find(alpha, top.members[g])) acc += product(*f, grads.at(beta)[g], cells.cutoff);
      }
      out.emplace(CoefficientMatrix::Key{alpha, beta}, std::move(acc));
    }
  }
  return out;
}

HomogenizedMatrix homogenize(const CoefficientMatrix& a, const CellSolutionSet& cells) {
  require_consistent(a, cells);
  const auto all = enumerate(a.dim(), a.order(), IndexMode::UpToM);
  const auto top = enumerate(a.dim(), a.order(), IndexMode::ExactlyM);
  HomogenizedMatrix out;
  out.d = a.dim();
  out.m = a.order();
  out.lambda0 = a.lambda0();
  out.lambda1 = a.lambda1();
  for (const auto& alpha : all) {
    for (const auto& beta : all) {
      double v = a.entry(alpha, beta).mean();
      for (const auto& gamma : top) {
        if (const auto* f = a.find(alpha, gamma)) v += inner(*f, cells.at(beta).derivative(gamma));
      }
      out.entries.emplace(CoefficientMatrix::Key{alpha, beta}, v);
    }
  }
  const auto check = verify_homogenized(out, a.lambda0(), sphere_samples(a.dim(), 256));
  out.lambda0_check = check.ok;
  out.symbol_min = check.symbol_min;
  return out;
}

HomogenizedCheck verify_homogenized(const HomogenizedMatrix& ahat, double lambda0, const std::vector<std::vector<double>>& xi_samples,
                                    double tol) {
  const auto top = enumerate(ahat.d, ahat.m, IndexMode::ExactlyM);
  HomogenizedCheck out;
  out.symbol_min = std::numeric_limits<double>::infinity();
  for (const auto& xi : xi_samples) {
    double num = 0.0, den = 0.0;
    for (const auto& alpha : top) {
      const double xa = monomial(std::span<const double>(xi), alpha);
      den += xa * xa;
      for (const auto& beta : top) num += ahat.value(alpha, beta) * monomial(std::span<const double>(xi), beta) * xa;
    }
    out.symbol_min = std::min(out.symbol_min, num / den);
  }
  out.ok = std::isfinite(out.symbol_min) && out.symbol_min >= lambda0 - tol;
  return out;
}

double cell_orthogonality_check(const CoefficientMatrix& a, const CellSolutionSet& cells, const MultiIndex& beta, const MultiIndex& delta) {
  require_consistent(a, cells);
  const auto top = enumerate(a.dim(), a.order(), IndexMode::ExactlyM);
  const auto& nb = cells.at(beta);
  const auto& nd = cells.at(delta);
  double total = 0.0;
  for (const auto& alpha : top) {
    const auto test = nd.derivative(alpha);
    if (const auto* f = a.find(alpha, beta)) total += inner(*f, test);
    for (const auto& gamma : top) {
      if (const auto* f = a.find(alpha, gamma)) total += inner(product(*f, nb.derivative(gamma), cells.cutoff), test);
    }
  }
  return total;
}

}  // namespace homog
