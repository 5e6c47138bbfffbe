#pragma once

#include <map>
#include <vector>

#include "homog/cell.hpp"

namespace homog {

/// {g_alpha}_{|alpha|=m}: mean-zero with sum_{|alpha|=m} D^alpha g_alpha = 0.
struct SolenoidalVector {
  int d = 1;
  int m = 1;
  std::map<MultiIndex, PeriodicField, IndexOrder> components;

  const PeriodicField& operator[](const MultiIndex& alpha) const { return components.at(alpha); }
  int cutoff() const;
};

/// Normalized violation of sum_{|alpha|=m} n^alpha g^n_alpha = 0:
/// sqrt(sum_n |sum_a n^a g^n_a|^2 / Lambda_m(n)) / sqrt(sum_a ||g_a||^2), in [0, 1].
double solenoidal_residual(const SolenoidalVector& g);
/// max_alpha |<g_alpha>| / sqrt(sum ||g_alpha||^2).
double mean_residual(const SolenoidalVector& g);

/// G_{alpha beta} = -G_{beta alpha} with sum_{|gamma|=m} D^gamma G_{alpha gamma} = g_alpha.
struct SkewPotential {
  int d = 1;
  int m = 1;
  std::map<CoefficientMatrix::Key, PeriodicField, PairOrder> components;
  /// max_{a,b} ||G_ab||_{H^m} / sum_a ||g_a||_{L2}
  double measured_constant = 0.0;

  const PeriodicField& at(const MultiIndex& alpha, const MultiIndex& beta) const { return components.at({alpha, beta}); }
  /// max |G_ab + G_ba| over coefficients.
  double skew_defect() const;
  /// sqrt(sum_a ||sum_g D^g G_ag - g_a||^2) / sqrt(sum_a ||g_a||^2)
  double divergence_residual(const SolenoidalVector& g) const;
};

/// Explicit Fourier construction, mode by mode for n != 0. Inputs are validated to
/// input_tol (relative) first.
SkewPotential skew_potential(const SolenoidalVector& g, double input_tol = 1e-9);

/// G = grad U with Laplace U = g, so div G = g. Requires <g> = 0.
std::vector<PeriodicField> scalar_potential(const PeriodicField& g);

struct GMatrix {
  std::map<CoefficientMatrix::Key, PeriodicField, PairOrder> entries;  ///< g_ab = \tilde a_ab - \hat a_ab
  /// per beta: dual-norm size of sum_a D^a g_ab relative to the flux column sqrt(sum_a ||\tilde a_ab||^2)
  std::map<MultiIndex, double, IndexOrder> solenoidal_residuals;
  bool under_resolved = false;

  /// {g_ab}_{|a|=m} for fixed beta.
  SolenoidalVector column(const MultiIndex& beta) const;
};

GMatrix g_matrix(const CoefficientMatrix& a, const CellSolutionSet& cells, const HomogenizedMatrix& ahat, double flag_tol = 1e-8);

struct ZeroFunctional {
  double value = 0.0;
  double scale = 0.0;  ///< sum of |individual (alpha, gamma) contributions|
};

/// sum_{|a|=|g|=m} int eps^m G_ag(x/eps) u(x) D^a D^g phi(x) dx with eps = 1/k.
ZeroFunctional zero_functional_check(const SkewPotential& G, const PeriodicField& u_factor, const PeriodicField& phi, int k);

/// Same contraction with G_ag replaced by the symmetric matrix that agrees with G
/// on and above the diagonal. Generically nonzero; a negative control.
ZeroFunctional symmetric_control_check(const SkewPotential& G, const PeriodicField& u_factor, const PeriodicField& phi, int k);

}  // namespace homog
