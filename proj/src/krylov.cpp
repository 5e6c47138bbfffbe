#include "homog/krylov.hpp"

#include <cmath>

namespace homog {

namespace {

double norm2(std::span<const cplx> v) {
  double s = 0.0;
  for (auto z : v) s += std::norm(z);
  return std::sqrt(s);
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

int default_iteration_cap(std::size_t unknowns) {
  return static_cast<int>(10.0 * std::sqrt(static_cast<double>(unknowns))) + 200;
}

KrylovResult gmres(const LinearMap& op, std::span<const cplx> b, std::span<const cplx> x0, const KrylovOptions& opts) {
  const std::size_t n = b.size();
  KrylovResult res;
  res.x.assign(x0.begin(), x0.end());
  if (res.x.size() != n) res.x.assign(n, cplx{});
  const int cap = opts.max_iterations > 0 ? opts.max_iterations : default_iteration_cap(n);
  const int restart = std::max(1, opts.restart);

  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(res.x.begin(), res.x.end(), cplx{});
    res.converged = true;
    res.history.push_back(0.0);
    return res;
  }

  std::vector<cplx> r(n), w(n);
  std::vector<std::vector<cplx>> V(static_cast<std::size_t>(restart) + 1, std::vector<cplx>(n));
  std::vector<std::vector<cplx>> H(static_cast<std::size_t>(restart) + 1, std::vector<cplx>(static_cast<std::size_t>(restart)));
  std::vector<cplx> cs(static_cast<std::size_t>(restart)), sn(static_cast<std::size_t>(restart)), g(static_cast<std::size_t>(restart) + 1);

  auto true_residual = [&] {
    op(res.x, w);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
    return norm2(r);
  };

  double beta = true_residual();
  res.history.push_back(beta / bnorm);
  while (res.iterations < cap) {
    if (beta / bnorm <= opts.tol) {
      res.converged = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), cplx{});
    g[0] = beta;
    int j = 0;
    for (; j < restart && res.iterations < cap; ++j) {
      ++res.iterations;
      auto& vj1 = V[static_cast<std::size_t>(j) + 1];
      op(V[static_cast<std::size_t>(j)], vj1);
      for (int i = 0; i <= j; ++i) {
        const cplx h = dot(V[static_cast<std::size_t>(i)], vj1);
        H[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = h;
        for (std::size_t t = 0; t < n; ++t) vj1[t] -= h * V[static_cast<std::size_t>(i)][t];
      }
      const double hn = norm2(vj1);
      H[static_cast<std::size_t>(j) + 1][static_cast<std::size_t>(j)] = hn;
      if (hn > 0.0) {
        for (auto& v : vj1) v /= hn;
      }
      for (int i = 0; i < j; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const auto uj = static_cast<std::size_t>(j);
        const cplx t0 = H[ui][uj];
        const cplx t1 = H[ui + 1][uj];
        H[ui][uj] = std::conj(cs[ui]) * t0 + std::conj(sn[ui]) * t1;
        H[ui + 1][uj] = -sn[ui] * t0 + cs[ui] * t1;
      }
      const auto uj = static_cast<std::size_t>(j);
      const cplx a = H[uj][uj];
      const cplx c = H[uj + 1][uj];
      const double rho = std::sqrt(std::norm(a) + std::norm(c));
      if (rho == 0.0) {
        cs[uj] = 1.0;
        sn[uj] = 0.0;
      } else {
        cs[uj] = a / rho;
        sn[uj] = c / rho;
      }
      H[uj][uj] = rho;
      H[uj + 1][uj] = 0.0;
      g[uj + 1] = -sn[uj] * g[uj];
      g[uj] = std::conj(cs[uj]) * g[uj];
      const double est = std::abs(g[uj + 1]) / bnorm;
      res.history.push_back(est);
      if (est <= opts.tol || hn == 0.0) {
        ++j;
        break;
      }
    }
    // Back substitution for the j x j triangular system.
    std::vector<cplx> y(static_cast<std::size_t>(j));
    for (int i = j - 1; i >= 0; --i) {
      const auto ui = static_cast<std::size_t>(i);
      cplx s = g[ui];
      for (int t = i + 1; t < j; ++t) s -= H[ui][static_cast<std::size_t>(t)] * y[static_cast<std::size_t>(t)];
      y[ui] = s / H[ui][ui];
    }
    for (int i = 0; i < j; ++i) {
      const auto& vi = V[static_cast<std::size_t>(i)];
      const cplx yi = y[static_cast<std::size_t>(i)];
      for (std::size_t t = 0; t < n; ++t) res.x[t] += yi * vi[t];
    }
    beta = true_residual();
    res.history.push_back(beta / bnorm);
  }
  res.residual = beta / bnorm;
  if (res.residual <= opts.tol) res.converged = true;
  return res;
}

}  // namespace homog
