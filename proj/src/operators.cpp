#include "homog/operators.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "homog/errors.hpp"

namespace homog {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t volume(int d, int M) {
  std::size_t v = 1;
  for (int i = 0; i < d; ++i) v *= static_cast<std::size_t>(M);
  return v;
}

}  // namespace

CoefficientMatrix::CoefficientMatrix(int d, int m, double lambda0, double lambda1, std::string name)
    : d_(d), m_(m), lambda0_(lambda0), lambda1_(lambda1), name_(std::move(name)) {
  if (d < 1 || m < 1) throw PreconditionError("coefficient matrix needs d >= 1 and m >= 1");
  if (!(lambda0 > 0.0) || !(lambda1 > 0.0)) throw PreconditionError("ellipticity constants must be positive");
}

void CoefficientMatrix::set(const MultiIndex& alpha, const MultiIndex& beta, PeriodicField value) {
  if (alpha.dim() != d_ || beta.dim() != d_ || value.dim() != d_) throw ShapeError("entry dimension does not match the matrix");
  if (alpha.order() > m_ || beta.order() > m_) throw PreconditionError("entry index exceeds the operator order");
  entries_.insert_or_assign({alpha, beta}, std::move(value));
}

void CoefficientMatrix::add(const MultiIndex& alpha, const MultiIndex& beta, const PeriodicField& value) {
  if (auto* existing = find(alpha, beta)) {
    set(alpha, beta, *existing + value);
  } else {
    set(alpha, beta, value);
  }
}

const PeriodicField* CoefficientMatrix::find(const MultiIndex& alpha, const MultiIndex& beta) const {
  auto it = entries_.find({alpha, beta});
  return it == entries_.end() ? nullptr : &it->second;
}

PeriodicField CoefficientMatrix::entry(const MultiIndex& alpha, const MultiIndex& beta) const {
  if (auto* f = find(alpha, beta)) return *f;
  return PeriodicField(d_, 0);
}

CoefficientMatrix CoefficientMatrix::principal() const {
  CoefficientMatrix out(d_, m_, lambda0_, lambda1_, name_);
  for (const auto& [key, field] : entries_) {
    if (key.first.order() == m_ && key.second.order() == m_) out.entries_.emplace(key, field);
  }
  return out;
}

bool CoefficientMatrix::has_lower_order() const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& kv) {
    return kv.first.first.order() + kv.first.second.order() < 2 * m_ && kv.second.l2_norm() > 0.0;
  });
}

int CoefficientMatrix::degree() const {
  int deg = 0;
  for (const auto& [key, field] : entries_) deg = std::max(deg, field.degree());
  return deg;
}

CoefficientMatrix CoefficientMatrix::scaled_lower_order(double s) const {
  CoefficientMatrix out(*this);
  for (auto& [key, field] : out.entries_) {
    if (key.first.order() + key.second.order() < 2 * m_) field *= s;
  }
  return out;
}

bool CoefficientMatrix::is_constant() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const auto& kv) { return kv.second.degree() == 0; });
}

std::uint64_t CoefficientMatrix::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  mix(&d_, sizeof d_);
  mix(&m_, sizeof m_);
  mix(&lambda0_, sizeof lambda0_);
  mix(&lambda1_, sizeof lambda1_);
  for (const auto& [key, field] : entries_) {
    const auto tag = key.first.to_string() + key.second.to_string();
    mix(tag.data(), tag.size());
    const int deg = field.degree();
    const auto trimmed = field.with_cutoff(deg);
    mix(&deg, sizeof deg);
    mix(trimmed.coeffs().data(), trimmed.coeffs().size_bytes());
  }
  return h;
}

std::vector<std::vector<double>> sphere_samples(int d, int count) {
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(count));
  if (d == 1) {
    for (int i = 0; i < count; ++i) out.push_back({i % 2 == 0 ? 1.0 : -1.0});
    return out;
  }
  if (d == 2) {
    for (int i = 0; i < count; ++i) {
      const double t = kTwoPi * (i + 0.5) / count;
      out.push_back({std::cos(t), std::sin(t)});
    }
    return out;
  }
  if (d == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / count;
      const double r = std::sqrt(1.0 - z * z);
      out.push_back({r * std::cos(golden * i), r * std::sin(golden * i), z});
    }
    return out;
  }
  // Halton points pushed through Box-Muller, then normalized.
  static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  const int pairs = (d + 1) / 2;
  if (2 * pairs > static_cast<int>(std::size(primes))) throw PreconditionError("sphere sampling supports d <= 16");
  auto halton = [](int i, int base) {
    double f = 1.0, r = 0.0;
    for (int n = i; n > 0; n /= base) {
      f /= base;
      r += f * (n % base);
    }
    return r;
  };
  for (int i = 1; i <= count; ++i) {
    std::vector<double> v;
    for (int p = 0; p < pairs; ++p) {
      const double u1 = halton(i, primes[2 * p]);
      const double u2 = halton(i, primes[2 * p + 1]);
      const double rad = std::sqrt(-2.0 * std::log(u1));
      v.push_back(rad * std::cos(kTwoPi * u2));
      v.push_back(rad * std::sin(kTwoPi * u2));
    }
    v.resize(static_cast<std::size_t>(d));
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    out.push_back(std::move(v));
  }
  return out;
}

EllipticityReport validate_ellipticity(const CoefficientMatrix& a, int lattice, const std::vector<std::vector<double>>& xi_samples,
                                       double tol) {
  if (xi_samples.empty()) throw PreconditionError("ellipticity check needs at least one xi sample");
  const int d = a.dim();
  const int R = std::max(lattice, 2 * a.degree() + 1);
  EllipticityReport rep;

  std::map<CoefficientMatrix::Key, std::vector<double>, PairOrder> grids;
  for (const auto& [key, field] : a.entries()) {
    auto s = field.samples(R);
    for (double v : s) rep.sup_max = std::max(rep.sup_max, std::abs(v));
    if (key.first.order() == a.order() && key.second.order() == a.order()) grids.emplace(key, std::move(s));
  }
  rep.sup_bound_ok = rep.sup_max <= a.lambda1() * (1.0 + tol) + tol;

  const auto top = enumerate(d, a.order(), IndexMode::ExactlyM);
  const std::size_t npts = volume(d, R);
  rep.symbol_min = std::numeric_limits<double>::infinity();
  std::vector<double> mono(top.size());
  for (const auto& xi : xi_samples) {
    if (static_cast<int>(xi.size()) != d) throw ShapeError("xi sample has wrong dimension");
    double denom = 0.0;
    for (std::size_t i = 0; i < top.size(); ++i) {
      mono[i] = monomial(std::span<const double>(xi), top.members[i]);
      denom += mono[i] * mono[i];
    }
    if (!(denom > 0.0)) throw PreconditionError("xi samples must be nonzero");
    for (std::size_t p = 0; p < npts; ++p) {
      double num = 0.0;
      for (const auto& [key, g] : grids) {
        num += g[p] * mono[static_cast<std::size_t>(top.position(key.second))] * mono[static_cast<std::size_t>(top.position(key.first))];
      }
      rep.symbol_min = std::min(rep.symbol_min, num / denom);
    }
  }
  if (grids.empty()) rep.symbol_min = 0.0;
  const bool symbol_ok = rep.symbol_min >= a.lambda0() - tol;
  rep.ok = rep.sup_bound_ok && symbol_ok;
  if (rep.ok) {
    rep.verdict = "ok";
  } else if (!rep.sup_bound_ok && !symbol_ok) {
    rep.verdict = "sup bound and symbol condition violated";
  } else if (!rep.sup_bound_ok) {
    rep.verdict = "sup bound violated";
  } else {
    rep.verdict = "symbol condition violated";
  }
  return rep;
}

EllipticityReport validate_ellipticity(const CoefficientMatrix& a) {
  return validate_ellipticity(a, std::max(32, 4 * a.degree() + 1), sphere_samples(a.dim(), 256));
}

namespace {

int default_garding_cutoff(int d) {
  switch (d) {
    case 1: return 16;
    case 2: return 8;
    case 3: return 4;
    default: return 2;
  }
}

// Hermitian part of the Galerkin matrix minus (lambda0/2) times the ||.||_m^2 weight.
Eigen::MatrixXcd shifted_hermitian_form(const CoefficientMatrix& a, int cutoff) {
  const ModeBox box{a.dim(), cutoff};
  const auto S = static_cast<Eigen::Index>(box.size());
  std::vector<std::vector<int>> modes(box.size());
  box.for_each([&](std::size_t i, std::span<const int> n) { modes[i].assign(n.begin(), n.end()); });

  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(S, S);
  std::vector<int> q(static_cast<std::size_t>(a.dim()));
  for (const auto& [key, field] : a.entries()) {
    for (Eigen::Index r = 0; r < S; ++r) {
      const auto& n = modes[static_cast<std::size_t>(r)];
      const cplx left = std::conj(derivative_symbol(n, key.first));
      for (Eigen::Index c = 0; c < S; ++c) {
        const auto& np = modes[static_cast<std::size_t>(c)];
        for (std::size_t j = 0; j < q.size(); ++j) q[j] = n[j] - np[j];
        const cplx coef = field.coeff(q);
        if (coef == cplx{}) continue;
        G(r, c) += left * coef * derivative_symbol(np, key.second);
      }
    }
  }
  Eigen::MatrixXcd H = 0.5 * (G + G.adjoint());
  const double w = std::pow(kTwoPi, 2 * a.order());
  for (Eigen::Index r = 0; r < S; ++r) H(r, r) -= 0.5 * a.lambda0() * w * lambda_m(modes[static_cast<std::size_t>(r)], a.order());
  return H;
}

}  // namespace

double estimate_garding(const CoefficientMatrix& a, int cutoff) {
  if (!a.has_lower_order()) return 0.0;
  if (cutoff < 0) cutoff = default_garding_cutoff(a.dim());
  const Eigen::MatrixXcd H = shifted_hermitian_form(a, cutoff);
  const Eigen::Index S = H.rows();

  double gersh = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < S; ++r) {
    double off = 0.0;
    for (Eigen::Index c = 0; c < S; ++c) {
      if (c != r) off += std::abs(H(r, c));
    }
    gersh = std::min(gersh, H(r, r).real() - off);
  }
  // The smallest eigenvalue sits among low modes; the shift only needs to be below it.
  double shift = gersh - 1.0;
  Eigen::VectorXcd x = Eigen::VectorXcd::Ones(S) / std::sqrt(static_cast<double>(S));
  std::vector<double> history;
  double rho = (x.adjoint() * H * x)(0).real();
  const double tol = 1e-10 * std::max(1.0, std::abs(shift));
  constexpr int kCap = 5000;
  Eigen::LLT<Eigen::MatrixXcd> llt(H - shift * Eigen::MatrixXcd::Identity(S, S));
  bool converged = false;
  for (int it = 0; it < kCap; ++it) {
    x = llt.solve(x);
    x.normalize();
    const Eigen::VectorXcd hx = H * x;
    rho = (x.adjoint() * hx)(0).real();
    const double res = (hx - rho * x).norm();
    history.push_back(res);
    if (res <= tol) {
      converged = true;
      break;
    }
    // Tighten the shift toward the Rayleigh quotient once the residual certifies
    // an eigenvalue in [rho - res, rho]; keeps the factorization positive definite.
    if (it % 25 == 24 && rho - 2.0 * res > shift + 1e-3 * (rho - shift)) {
      shift = rho - 2.0 * res - 1e-6 * (1.0 + std::abs(rho));
      llt.compute(H - shift * Eigen::MatrixXcd::Identity(S, S));
      if (llt.info() != Eigen::Success) {
        shift = gersh - 1.0;
        llt.compute(H - shift * Eigen::MatrixXcd::Identity(S, S));
      }
    }
  }
  if (!converged) throw SolverError("Garding inverse iteration did not converge", std::move(history));
  return std::max(0.0, -rho);
}

EllipticityReport check_operator(const CoefficientMatrix& a) {
  auto rep = validate_ellipticity(a);
  rep.lambda2_estimate = estimate_garding(a);
  return rep;
}

DiscreteOperator::DiscreteOperator(const CoefficientMatrix& a, int k, int cutoff, bool principal_only)
    : d_(a.dim()), box_{a.dim(), cutoff} {
  if (k < 1) throw PreconditionError("rescale factor must be >= 1");
  if (cutoff < 0) throw ShapeError("negative cutoff");
  const int coef_cut = k * a.degree();
  M_ = fft::good_size(std::max(2 * cutoff + coef_cut + 1, 2 * std::max(cutoff, coef_cut) + 1));
  const std::size_t vol = volume(d_, M_);

  std::vector<MultiIndex> betas;
  std::vector<MultiIndex> alphas;
  for (const auto& [key, field] : a.entries()) {
    if (principal_only && (key.first.order() != a.order() || key.second.order() != a.order())) continue;
    if (field.l2_norm() == 0.0) continue;
    if (std::find(alphas.begin(), alphas.end(), key.first) == alphas.end()) alphas.push_back(key.first);
    if (std::find(betas.begin(), betas.end(), key.second) == betas.end()) betas.push_back(key.second);
  }
  for (const auto& beta : betas) {
    std::vector<cplx> sym(box_.size());
    box_.for_each([&](std::size_t i, std::span<const int> n) { sym[i] = derivative_symbol(n, beta); });
    beta_symbols_.push_back(std::move(sym));
  }
  for (const auto& alpha : alphas) {
    Flux flux;
    flux.symbol.resize(box_.size());
    box_.for_each([&](std::size_t i, std::span<const int> n) { flux.symbol[i] = std::conj(derivative_symbol(n, alpha)); });
    for (std::size_t b = 0; b < betas.size(); ++b) {
      const auto* field = a.find(alpha, betas[b]);
      if (!field || field->l2_norm() == 0.0) continue;
      const auto fine = field->rescale(k);
      std::vector<cplx> g(vol);
      fft::scatter(fine.coeffs(), d_, fine.cutoff(), g, M_);
      fft::backward(g, d_, M_);
      for (auto& v : g) v = {v.real(), 0.0};
      coeff_grids_.push_back(std::move(g));
      flux.terms.push_back({static_cast<int>(b), static_cast<int>(coeff_grids_.size() - 1)});
    }
    fluxes_.push_back(std::move(flux));
  }
}

void DiscreteOperator::apply(std::span<const cplx> in, std::span<cplx> out) const {
  if (in.size() != box_.size() || out.size() != box_.size()) throw ShapeError("operator input does not match the cutoff");
  const std::size_t vol = volume(d_, M_);
  const std::size_t S = box_.size();
  std::vector<std::vector<cplx>> dgrids(beta_symbols_.size(), std::vector<cplx>(vol));
  std::vector<cplx> spec(S);
  for (std::size_t b = 0; b < beta_symbols_.size(); ++b) {
    for (std::size_t i = 0; i < S; ++i) spec[i] = in[i] * beta_symbols_[b][i];
    fft::scatter(spec, d_, box_.N, dgrids[b], M_);
    fft::backward(dgrids[b], d_, M_);
  }
  std::fill(out.begin(), out.end(), cplx{});
  std::vector<cplx> flux_grid(vol);
  const double scale = 1.0 / static_cast<double>(vol);
  for (const auto& flux : fluxes_) {
    std::fill(flux_grid.begin(), flux_grid.end(), cplx{});
    for (const auto& t : flux.terms) {
      const auto& cg = coeff_grids_[static_cast<std::size_t>(t.coeff_slot)];
      const auto& dg = dgrids[static_cast<std::size_t>(t.beta_slot)];
      for (std::size_t p = 0; p < vol; ++p) flux_grid[p] += cg[p].real() * dg[p];
    }
    fft::forward(flux_grid, d_, M_);
    fft::gather(flux_grid, d_, M_, spec, box_.N, scale);
    for (std::size_t i = 0; i < S; ++i) out[i] += flux.symbol[i] * spec[i];
  }
}

PeriodicField DiscreteOperator::apply(const PeriodicField& u) const {
  if (u.dim() != d_) throw ShapeError("field dimension does not match the operator");
  const auto padded = u.cutoff() == box_.N ? u : u.with_cutoff(box_.N);
  std::vector<cplx> out(box_.size());
  apply(padded.coeffs(), out);
  return PeriodicField(d_, box_.N, std::move(out));
}

PeriodicField apply(const CoefficientMatrix& a, const PeriodicField& u, int k) {
  if (u.dim() != a.dim()) throw ShapeError("field dimension does not match the coefficient matrix");
  return DiscreteOperator(a, k, u.cutoff()).apply(u);
}

double weak_form(const CoefficientMatrix& a, const PeriodicField& u, const PeriodicField& phi, int k) {
  if (u.dim() != a.dim() || phi.dim() != a.dim()) throw ShapeError("field dimension does not match the coefficient matrix");
  double total = 0.0;
  for (const auto& [key, field] : a.entries()) {
    const auto flux = product(field.rescale(k), u.derivative(key.second), phi.cutoff());
    total += inner(flux, phi.derivative(key.first));
  }
  return total;
}

cplx constant_symbol(const CoefficientMatrix& a, std::span<const int> n) {
  cplx s{};
  for (const auto& [key, field] : a.entries()) {
    s += field.mean() * derivative_symbol(n, key.second) * std::conj(derivative_symbol(n, key.first));
  }
  return s;
}

}  // namespace homog
