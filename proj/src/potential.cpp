#include "homog/potential.hpp"

#include <cmath>
#include <numbers>

#include "homog/errors.hpp"

namespace homog {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double total_l2_squared(const SolenoidalVector& g) {
  double s = 0.0;
  for (const auto& [alpha, f] : g.components) s += f.l2_norm() * f.l2_norm();
  return s;
}

const PeriodicField& component_or(const SolenoidalVector& g, const MultiIndex& alpha, const PeriodicField& zero) {
  auto it = g.components.find(alpha);
  return it == g.components.end() ? zero : it->second;
}

}  // namespace

int SolenoidalVector::cutoff() const {
  int c = 0;
  for (const auto& [alpha, f] : components) c = std::max(c, f.cutoff());
  return c;
}

double solenoidal_residual(const SolenoidalVector& g) {
  const double total = total_l2_squared(g);
  if (total == 0.0) return 0.0;
  const ModeBox box{g.d, g.cutoff()};
  double acc = 0.0;
  box.for_each([&](std::size_t, std::span<const int> n) {
    const double lam = lambda_m(n, g.m);
    if (lam == 0.0) return;
    cplx s{};
    for (const auto& [alpha, f] : g.components) s += monomial(n, alpha) * f.coeff(n);
    acc += std::norm(s) / lam;
  });
  return std::sqrt(acc / total);
}

double mean_residual(const SolenoidalVector& g) {
  const double total = total_l2_squared(g);
  if (total == 0.0) return 0.0;
  double worst = 0.0;
  for (const auto& [alpha, f] : g.components) worst = std::max(worst, std::abs(f.mean()));
  return worst / std::sqrt(total);
}

double SkewPotential::skew_defect() const {
  double worst = 0.0;
  for (const auto& [key, f] : components) {
    const auto& t = components.at({key.second, key.first});
    for (std::size_t i = 0; i < f.coeffs().size(); ++i) worst = std::max(worst, std::abs(f.coeffs()[i] + t.coeffs()[i]));
  }
  return worst;
}

double SkewPotential::divergence_residual(const SolenoidalVector& g) const {
  const double total = total_l2_squared(g);
  const auto top = enumerate(d, m, IndexMode::ExactlyM);
  const PeriodicField zero(d, 0);
  double acc = 0.0;
  for (const auto& alpha : top) {
    PeriodicField div(d, 0);
    for (const auto& gamma : top) div += at(alpha, gamma).derivative(gamma);
    div -= component_or(g, alpha, zero);
    acc += div.l2_norm() * div.l2_norm();
  }
  return total > 0.0 ? std::sqrt(acc / total) : std::sqrt(acc);
}

SkewPotential skew_potential(const SolenoidalVector& g, double input_tol) {
  if (const double r = mean_residual(g); r > input_tol)
    throw PreconditionError("solenoidal input violates <g_alpha> = 0 (relative " + std::to_string(r) + ")");
  if (const double r = solenoidal_residual(g); r > input_tol)
    throw PreconditionError("solenoidal input violates sum n^alpha g^n_alpha = 0 (relative " + std::to_string(r) + ")");

  const auto top = enumerate(g.d, g.m, IndexMode::ExactlyM);
  const int N = g.cutoff();
  const ModeBox box{g.d, N};
  const PeriodicField zero(g.d, 0);
  std::vector<PeriodicField> padded;
  for (const auto& alpha : top) padded.push_back(component_or(g, alpha, zero).with_cutoff(N));

  // (2 pi i)^{-m}
  const cplx inv_factor = 1.0 / std::pow(cplx(0.0, kTwoPi), g.m);
  const std::size_t p = top.size();
  std::vector<std::vector<cplx>> coeffs(p * p, std::vector<cplx>(box.size()));
  box.for_each([&](std::size_t idx, std::span<const int> n) {
    const double lam = lambda_m(n, g.m);
    if (lam == 0.0) return;
    for (std::size_t a = 0; a < p; ++a) {
      const double na = monomial(n, top.members[a]);
      const cplx ga = padded[a].coeffs()[idx];
      for (std::size_t b = a + 1; b < p; ++b) {
        const double nb = monomial(n, top.members[b]);
        const cplx gb = padded[b].coeffs()[idx];
        const cplx v = (-gb * na + ga * nb) * inv_factor / lam;
        coeffs[a * p + b][idx] = v;
        coeffs[b * p + a][idx] = -v;
      }
    }
  });

  SkewPotential out;
  out.d = g.d;
  out.m = g.m;
  double worst = 0.0;
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < p; ++b) {
      PeriodicField f(g.d, N, std::move(coeffs[a * p + b]));
      worst = std::max(worst, f.norms(g.m).hm);
      out.components.emplace(CoefficientMatrix::Key{top.members[a], top.members[b]}, std::move(f));
    }
  }
  double gsum = 0.0;
  for (const auto& f : padded) gsum += f.l2_norm();
  out.measured_constant = gsum > 0.0 ? worst / gsum : 0.0;
  return out;
}

std::vector<PeriodicField> scalar_potential(const PeriodicField& g) {
  if (std::abs(g.mean()) > 1e-12 * std::max(1.0, g.l2_norm())) throw PreconditionError("scalar potential requires <g> = 0");
  const int d = g.dim();
  std::vector<cplx> u(g.box().size());
  g.box().for_each([&](std::size_t i, std::span<const int> n) {
    double n2 = 0.0;
    for (int v : n) n2 += static_cast<double>(v) * v;
    if (n2 > 0.0) u[i] = g.coeffs()[i] / (-kTwoPi * kTwoPi * n2);
  });
  const PeriodicField U(d, g.cutoff(), std::move(u));
  std::vector<PeriodicField> grad;
  for (int j = 0; j < d; ++j) grad.push_back(U.derivative(MultiIndex::unit(d, j)));
  return grad;
}

SolenoidalVector GMatrix::column(const MultiIndex& beta) const {
  SolenoidalVector v;
  for (const auto& [key, f] : entries) {
    if (key.second != beta) continue;
    v.d = f.dim();
    v.m = std::max(v.m, key.first.order());
  }
  for (const auto& [key, f] : entries) {
    if (key.second == beta && key.first.order() == v.m) v.components.emplace(key.first, f);
  }
  return v;
}

GMatrix g_matrix(const CoefficientMatrix& a, const CellSolutionSet& cells, const HomogenizedMatrix& ahat, double flag_tol) {
  if (ahat.d != a.dim() || ahat.m != a.order()) throw ConsistencyError("homogenized matrix does not match the coefficient matrix");
  GMatrix out;
  const auto tilde = tilde_matrix(a, cells);
  for (const auto& [key, field] : tilde) out.entries.emplace(key, field - PeriodicField::constant(a.dim(), ahat.value(key.first, key.second)));
  for (const auto& beta : enumerate(a.dim(), a.order(), IndexMode::UpToM)) {
    SolenoidalVector col;
    col.d = a.dim();
    col.m = a.order();
    double gsq = 0.0, scale = 0.0;
    for (const auto& alpha : enumerate(a.dim(), a.order(), IndexMode::ExactlyM)) {
      const auto& g = out.entries.at({alpha, beta});
      col.components.emplace(alpha, g);
      gsq += g.l2_norm() * g.l2_norm();
      scale += std::pow(tilde.at({alpha, beta}).l2_norm(), 2);
    }
    // measured against the flux column itself: g vanishes identically when the flux is constant
    const double r = scale > 0.0 ? solenoidal_residual(col) * std::sqrt(gsq / scale) : 0.0;
    out.solenoidal_residuals.emplace(beta, r);
    if (r > flag_tol) out.under_resolved = true;
  }
  return out;
}

namespace {

ZeroFunctional contract(const SkewPotential& G, const PeriodicField& u_factor, const PeriodicField& phi, int k, bool symmetrize) {
  if (k < 1) throw PreconditionError("eps = 1/k needs k >= 1");
  const auto top = enumerate(G.d, G.m, IndexMode::ExactlyM);
  const double eps_m = std::pow(static_cast<double>(k), -G.m);
  ZeroFunctional out;
  for (std::size_t a = 0; a < top.size(); ++a) {
    for (std::size_t g = 0; g < top.size(); ++g) {
      const auto& alpha = top.members[a];
      const auto& gamma = top.members[g];
      const auto& entry = (symmetrize && g < a) ? G.at(gamma, alpha) : G.at(alpha, gamma);
      const auto weighted = product(entry.rescale(k), u_factor, phi.cutoff());
      const double term = eps_m * inner(weighted, phi.derivative(alpha + gamma));
      out.value += term;
      out.scale += std::abs(term);
    }
  }
  return out;
}

}  // namespace

ZeroFunctional zero_functional_check(const SkewPotential& G, const PeriodicField& u_factor, const PeriodicField& phi, int k) {
  return contract(G, u_factor, phi, k, false);
}

ZeroFunctional symmetric_control_check(const SkewPotential& G, const PeriodicField& u_factor, const PeriodicField& phi, int k) {
  return contract(G, u_factor, phi, k, true);
}

}  // namespace homog
