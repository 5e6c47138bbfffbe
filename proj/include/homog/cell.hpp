#pragma once

#include <cstdint>
#include <map>

#include "homog/krylov.hpp"
#include "homog/operators.hpp"

namespace homog {

/// Mean-zero solutions N_gamma of the periodic cell problems, |gamma| <= m.
struct CellSolutionSet {
  IndexSet gamma_index;
  std::map<MultiIndex, PeriodicField, IndexOrder> solutions;
  std::map<MultiIndex, double, IndexOrder> residuals;  ///< relative dual-norm residuals
  std::map<MultiIndex, int, IndexOrder> iterations;
  int cutoff = 0;
  double tol = 0.0;
  std::uint64_t matrix_fingerprint = 0;

  const PeriodicField& at(const MultiIndex& gamma) const { return solutions.at(gamma); }
};

/// Cell cutoff 4 * (coefficient degree) + 8.
int default_cell_cutoff(const CoefficientMatrix& a);

struct CellSolveResult {
  PeriodicField field;
  double residual = 0.0;
  int iterations = 0;
};

/// Solves sum_{|a|=|b|=m} D^a (a_{ab} D^b N) = -sum_{|a|=m} D^a a_{a gamma} on the
/// mean-zero trigonometric space |n_j| <= cutoff. Residual is measured in the dual
/// norm of the space with ||phi||^2 = sum_{|a|=m} ||D^a phi||^2.
CellSolveResult solve_cell_detailed(const CoefficientMatrix& a, const MultiIndex& gamma, int cutoff, double tol,
                                    const KrylovOptions& policy = {});
PeriodicField solve_cell(const CoefficientMatrix& a, const MultiIndex& gamma, int cutoff, double tol = 1e-10);

/// Every gamma with |gamma| <= m; solves run concurrently and are assembled in index order.
CellSolutionSet solve_all_cells(const CoefficientMatrix& a, int cutoff = -1, double tol = 1e-10, int workers = 0);

/// Constant matrix \hat a_{ab}, |a|, |b| <= m.
struct HomogenizedMatrix {
  int d = 0;
  int m = 0;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  std::map<CoefficientMatrix::Key, double, PairOrder> entries;
  bool lambda0_check = false;
  double symbol_min = 0.0;

  double value(const MultiIndex& alpha, const MultiIndex& beta) const;
  /// As a coefficient matrix with constant entries (for apply/weak_form).
  CoefficientMatrix as_coefficients() const;
  /// sum \hat a_{ab} (2 pi i n)^b (-2 pi i n)^a
  cplx symbol(std::span<const int> n) const;
};

struct HomogenizedCheck {
  bool ok = false;
  double symbol_min = 0.0;
};

/// \tilde a_{ab}(y) = a_{ab}(y) + sum_{|g|=m} a_{ag}(y) D^g N_b(y), projected onto
/// the cell resolution.
std::map<CoefficientMatrix::Key, PeriodicField, PairOrder> tilde_matrix(const CoefficientMatrix& a, const CellSolutionSet& cells);

/// \hat a_{ab} = < \tilde a_{ab} >, followed by the symbol check against lambda0.
HomogenizedMatrix homogenize(const CoefficientMatrix& a, const CellSolutionSet& cells);

HomogenizedCheck verify_homogenized(const HomogenizedMatrix& ahat, double lambda0, const std::vector<std::vector<double>>& xi_samples,
                                    double tol = 1e-10);

/// < sum_{|a|=m} (a_{ab} + sum_{|g|=m} a_{ag} D^g N_b) D^a N_delta >, which the cell
/// equations force to vanish.
double cell_orthogonality_check(const CoefficientMatrix& a, const CellSolutionSet& cells, const MultiIndex& beta, const MultiIndex& delta);

}  // namespace homog
