#pragma once

// Reference computations written independently of the library's transform
// pipeline: dense Galerkin matrices are assembled by direct convolution of
// coefficient arrays, 1d quantities by quadrature, pointwise values by direct
// summation of the trigonometric series.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "homog/operators.hpp"

namespace oracle {

using homog::cplx;
using homog::CoefficientMatrix;
using homog::MultiIndex;
using homog::PeriodicField;

inline constexpr double kPi = std::numbers::pi;

/// Midpoint rule for <1/a>^{-1} of a 1-periodic function (spectrally accurate).
inline double harmonic_mean(const std::function<double(double)>& a, int samples = 8192) {
  double s = 0.0;
  for (int j = 0; j < samples; ++j) s += 1.0 / a((j + 0.5) / samples);
  return samples / s;
}

inline double mean_of(const std::function<double(double)>& a, int samples = 8192) {
  double s = 0.0;
  for (int j = 0; j < samples; ++j) s += a((j + 0.5) / samples);
  return s / samples;
}

/// Enumerates wavenumbers of the box |n_j| <= N, last axis fastest.
inline std::vector<std::vector<int>> modes(int d, int N) {
  std::vector<std::vector<int>> out;
  std::vector<int> n(static_cast<std::size_t>(d), -N);
  while (true) {
    out.push_back(n);
    int j = d - 1;
    while (j >= 0 && n[static_cast<std::size_t>(j)] == N) n[static_cast<std::size_t>(j--)] = -N;
    if (j < 0) break;
    ++n[static_cast<std::size_t>(j)];
  }
  return out;
}

inline cplx pow_symbol(const std::vector<int>& n, const MultiIndex& alpha, double sign) {
  cplx s{1.0, 0.0};
  for (int i = 0; i < alpha.dim(); ++i)
    for (int r = 0; r < alpha[i]; ++r) s *= cplx{0.0, sign * 2.0 * kPi * n[static_cast<std::size_t>(i)]};
  return s;
}

/// Coefficient of a(k x) at wavenumber q: a_{q/k} when k | q, else 0.
inline cplx rescaled_coeff(const PeriodicField& a, const std::vector<int>& q, int k) {
  std::vector<int> r(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] % k != 0) return {};
    r[i] = q[i] / k;
  }
  return a.coeff(r);
}

/// B_{np} = sum_{ab} a_{ab,(n-p)/k} (2 pi i p)^b (-2 pi i n)^a + lambda delta_{np}: the form
/// B(e_p, e_n) = sum int a_{ab}(kx) D^b e_p conj(D^a e_n) dx on the box |n_j| <= N.
inline Eigen::MatrixXcd dense_galerkin(const CoefficientMatrix& a, int k, int N, double lambda, bool principal_only = false,
                                       bool drop_zero_mode = false) {
  auto ms = modes(a.dim(), N);
  if (drop_zero_mode) {
    std::erase_if(ms, [](const std::vector<int>& n) {
      for (int v : n)
        if (v != 0) return false;
      return true;
    });
  }
  const auto S = static_cast<Eigen::Index>(ms.size());
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(S, S);
  for (Eigen::Index r = 0; r < S; ++r) {
    for (Eigen::Index c = 0; c < S; ++c) {
      std::vector<int> q(ms[0].size());
      for (std::size_t i = 0; i < q.size(); ++i) q[i] = ms[r][i] - ms[c][i];
      cplx s{};
      for (const auto& [key, f] : a.entries()) {
        if (principal_only && (key.first.order() < a.order() || key.second.order() < a.order())) continue;
        const cplx coef = rescaled_coeff(f, q, k);
        if (coef == cplx{}) continue;
        s += coef * pow_symbol(ms[c], key.second, 1.0) * pow_symbol(ms[r], key.first, -1.0);
      }
      B(r, c) = s;
    }
    B(r, r) += lambda;
  }
  return B;
}

/// Dense solve of the truncated epsilon problem.
inline std::vector<cplx> dense_solve(const CoefficientMatrix& a, int k, int N, double lambda, const PeriodicField& f) {
  const auto ms = modes(a.dim(), N);
  Eigen::VectorXcd b(static_cast<Eigen::Index>(ms.size()));
  for (std::size_t i = 0; i < ms.size(); ++i) b(static_cast<Eigen::Index>(i)) = f.coeff(ms[i]);
  const Eigen::VectorXcd x = dense_galerkin(a, k, N, lambda).partialPivLu().solve(b);
  return std::vector<cplx>(x.data(), x.data() + x.size());
}

/// Dense solve of the mean-zero cell problem for N_gamma; returns coefficients on the
/// full box with the zero mode set to 0.
inline std::vector<cplx> dense_cell(const CoefficientMatrix& a, const MultiIndex& gamma, int N) {
  const auto all = modes(a.dim(), N);
  std::vector<std::vector<int>> ms;
  for (const auto& n : all) {
    bool zero = true;
    for (int v : n) zero = zero && v == 0;
    if (!zero) ms.push_back(n);
  }
  const auto S = static_cast<Eigen::Index>(ms.size());
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(S);
  for (Eigen::Index r = 0; r < S; ++r)
    for (const auto& [key, f] : a.entries())
      if (key.first.order() == a.order() && key.second == gamma) b(r) -= pow_symbol(ms[r], key.first, -1.0) * f.coeff(ms[r]);
  const Eigen::VectorXcd x = dense_galerkin(a, 1, N, 0.0, true, true).partialPivLu().solve(b);
  std::vector<cplx> out;
  Eigen::Index j = 0;
  for (const auto& n : all) {
    bool zero = true;
    for (int v : n) zero = zero && v == 0;
    out.push_back(zero ? cplx{} : x(j++));
  }
  return out;
}

/// Smallest lambda2 >= 0 with Re B(u,u) + lambda2 ||u||^2 >= (lambda0/2) ||u||_m^2 on the box,
/// ||u||_m^2 = sum_{|g|=m} ||D^g u||^2, from a full dense eigendecomposition.
inline double dense_garding(const CoefficientMatrix& a, int N) {
  const auto ms = modes(a.dim(), N);
  const Eigen::MatrixXcd B = dense_galerkin(a, 1, N, 0.0);
  Eigen::MatrixXcd H = 0.5 * (B + B.adjoint());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    double w = 0.0;
    for (const auto& g : homog::enumerate(a.dim(), a.order(), homog::IndexMode::ExactlyM)) w += std::norm(pow_symbol(ms[i], g, 1.0));
    const auto idx = static_cast<Eigen::Index>(i);
    H(idx, idx) -= 0.5 * a.lambda0() * w;
  }
  const double mu = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(H, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return std::max(0.0, -mu);
}

}  // namespace oracle
