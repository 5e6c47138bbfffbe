#pragma once

#include <functional>
#include <span>
#include <vector>

#include "homog/fft.hpp"

namespace homog {

using LinearMap = std::function<void(std::span<const cplx>, std::span<cplx>)>;

/// Solver policy. A non-positive max_iterations selects 10 sqrt(n) + 200.
struct KrylovOptions {
  double tol = 1e-10;
  int max_iterations = 0;
  int restart = 40;
};

struct KrylovResult {
  std::vector<cplx> x;
  int iterations = 0;
  double residual = 0.0;  ///< ||b - A x|| / ||b|| at exit
  std::vector<double> history;
  bool converged = false;
};

/// Restarted GMRES with modified Gram-Schmidt and Givens rotations. Minimizes the
/// Euclidean residual, so callers pass a system already scaled into the norm they
/// want controlled. Valid for nonsymmetric systems with positive definite Hermitian part.
KrylovResult gmres(const LinearMap& op, std::span<const cplx> b, std::span<const cplx> x0, const KrylovOptions& opts);

int default_iteration_cap(std::size_t unknowns);

}  // namespace homog
