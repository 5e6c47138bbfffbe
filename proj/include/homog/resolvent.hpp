#pragma once

#include "homog/cell.hpp"
#include "homog/krylov.hpp"

namespace homog {

/// A^eps u + lambda u = f on the unit torus with eps = 1/k.
struct TorusProblem {
  CoefficientMatrix a;
  int k = 1;
  double lambda = 1.0;
  PeriodicField f;
  int cutoff = 0;  ///< fine cutoff; must be a multiple of k
  double tol = 1e-10;
  double lambda_floor = 1.0;     ///< 1 + lambda2 estimate
  bool lambda_override = false;  ///< skip the floor check (recorded in reports)
  KrylovOptions policy{};
};

/// Builds a problem with the default policies: lambda = 1 + 2 lambda2 unless given,
/// fine cutoff = k * cell_cutoff.
TorusProblem make_problem(const CoefficientMatrix& a, int k, const PeriodicField& f, int cell_cutoff, double lambda = -1.0,
                          double tol = 1e-10);

struct EpsilonSolution {
  PeriodicField u;
  double residual = 0.0;  ///< relative dual-norm residual of the Galerkin system
  int iterations = 0;
  double energy_ratio = 0.0;  ///< ||u||_{H^m} / ||f||_{L2}
};

EpsilonSolution solve_epsilon_detailed(const TorusProblem& p);
PeriodicField solve_epsilon(const TorusProblem& p);

/// Exact per-mode solve of \hat A u + lambda u = f.
PeriodicField solve_homogenized(const HomogenizedMatrix& ahat, double lambda, const PeriodicField& f);
/// ||u||_{H^{2m}} / ||f||_{L2} for the homogenized solution.
double homogenized_regularity_ratio(const HomogenizedMatrix& ahat, double lambda, const PeriodicField& f);

/// u + eps^m sum_{|g|<=m} N_g(x/eps) D^g u at the given fine cutoff (default k * cell cutoff).
PeriodicField first_approximation(const PeriodicField& u, const CellSolutionSet& cells, int k, int cutoff = -1);
/// As first_approximation with D^g u replaced by its Steklov average.
PeriodicField smoothed_first_approximation(const PeriodicField& u, const CellSolutionSet& cells, int k, int cutoff = -1);

/// K^eps f = eps^m sum N_g(x/eps) S^eps D^g (\hat A + lambda)^{-1} f.
PeriodicField corrector_apply(const PeriodicField& f, const HomogenizedMatrix& ahat, const CellSolutionSet& cells, int k, double lambda,
                              int cutoff = -1);

struct ApproximationBundle {
  PeriodicField f;
  PeriodicField u;
  PeriodicField u_eps;
  PeriodicField v_eps;
  PeriodicField v_hat;
  PeriodicField s_u_eps;
  int k = 1;
  double lambda = 1.0;
  int iterations = 0;
  double residual = 0.0;
};

/// Solves both problems at p and assembles every approximation at p.cutoff.
ApproximationBundle build_bundle(const TorusProblem& p, const CellSolutionSet& cells, const HomogenizedMatrix& ahat);

struct ErrorReport {
  double eps = 0.0;
  double l2_u = 0.0;        ///< ||u^eps - u||_{L2}
  double hm_vhat = 0.0;     ///< ||u^eps - \hat v^eps||_{H^m}
  double hm_steklov = 0.0;  ///< ||S^eps u^eps - u||_{H^m}
  double hm_v = 0.0;        ///< ||u^eps - v^eps||_{H^m} (unsmoothed, informational)
  double f_norm = 0.0;
  double ratio_l2_u = 0.0;
  double ratio_hm_vhat = 0.0;
  double ratio_hm_steklov = 0.0;
};

ErrorReport error_report(const ApproximationBundle& bundle, int m);

}  // namespace homog
