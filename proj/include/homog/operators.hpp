#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "homog/field.hpp"
#include "homog/multiindex.hpp"

namespace homog {

struct PairOrder {
  bool operator()(const std::pair<MultiIndex, MultiIndex>& a, const std::pair<MultiIndex, MultiIndex>& b) const {
    if (auto c = compare(a.first, b.first); c != 0) return c < 0;
    return compare(a.second, b.second) < 0;
  }
};

/// Periodic coefficients a_{alpha beta}(y), |alpha|, |beta| <= m, of the
/// divergence-form operator sum (-1)^{|alpha|} D^alpha (a_{alpha beta} D^beta).
/// Entries that were never set are identically zero.
class CoefficientMatrix {
 public:
  using Key = std::pair<MultiIndex, MultiIndex>;
  using Entries = std::map<Key, PeriodicField, PairOrder>;

  CoefficientMatrix(int d, int m, double lambda0, double lambda1, std::string name = {});

  int dim() const { return d_; }
  int order() const { return m_; }
  double lambda0() const { return lambda0_; }
  double lambda1() const { return lambda1_; }
  const std::string& name() const { return name_; }

  /// Replaces (or inserts) the entry; the field is widened to the matrix dimension check.
  void set(const MultiIndex& alpha, const MultiIndex& beta, PeriodicField value);
  /// Adds to an existing entry.
  void add(const MultiIndex& alpha, const MultiIndex& beta, const PeriodicField& value);
  const PeriodicField* find(const MultiIndex& alpha, const MultiIndex& beta) const;
  PeriodicField entry(const MultiIndex& alpha, const MultiIndex& beta) const;
  const Entries& entries() const { return entries_; }

  /// Only the |alpha| = |beta| = m block.
  CoefficientMatrix principal() const;
  bool has_lower_order() const;
  /// Largest trigonometric degree over all entries.
  int degree() const;
  /// Every entry multiplied by s, for entries with |alpha| + |beta| < 2m only.
  CoefficientMatrix scaled_lower_order(double s) const;
  bool is_constant() const;
  /// FNV-1a hash of (d, m, lambda0, lambda1, every entry's key and coefficients).
  std::uint64_t fingerprint() const;

 private:
  int d_;
  int m_;
  double lambda0_;
  double lambda1_;
  std::string name_;
  Entries entries_;
};

/// Deterministic, well-spread points on the unit sphere of R^d.
std::vector<std::vector<double>> sphere_samples(int d, int count = 256);

struct EllipticityReport {
  bool sup_bound_ok = false;
  double sup_max = 0.0;          ///< max |a_{alpha beta}(y)| over the lattice
  double symbol_min = 0.0;       ///< min over (y, xi) of the principal symbol ratio
  double lambda2_estimate = 0.0; ///< Garding shift, filled by check_operator
  bool ok = false;
  std::string verdict;
};

/// Pointwise necessary condition sum a_{ab}(y) xi^b xi^a >= lambda0 sum (xi^a)^2
/// on an R^d lattice and the sup bound |a_{ab}| <= lambda1. Never throws on failure.
EllipticityReport validate_ellipticity(const CoefficientMatrix& a, int lattice, const std::vector<std::vector<double>>& xi_samples,
                                       double tol = 1e-12);
EllipticityReport validate_ellipticity(const CoefficientMatrix& a);

/// Smallest lambda2 >= 0 with Re<Au,u> + lambda2 ||u||^2 >= (lambda0/2) ||u||_m^2 on
/// the cutoff-N trigonometric space (||u||_m the top-order seminorm); inverse iteration on the Hermitian part.
double estimate_garding(const CoefficientMatrix& a, int cutoff = -1);

/// Default resolvent shift 1 + 2 lambda2.
inline double default_lambda(double lambda2) { return 1.0 + 2.0 * lambda2; }

/// Ellipticity report with the Garding estimate filled in.
EllipticityReport check_operator(const CoefficientMatrix& a);

/// Strong-form application u -> sum (-1)^{|a|} D^a (a_{ab}(k x) D^b u) truncated
/// to |n_j| <= cutoff. Coefficient samples are precomputed on a padded grid large
/// enough that every retained mode is exact.
class DiscreteOperator {
 public:
  DiscreteOperator(const CoefficientMatrix& a, int k, int cutoff, bool principal_only = false);

  int dim() const { return d_; }
  int cutoff() const { return box_.N; }
  int grid() const { return M_; }
  const ModeBox& box() const { return box_; }

  void apply(std::span<const cplx> in, std::span<cplx> out) const;
  PeriodicField apply(const PeriodicField& u) const;

 private:
  struct Term {
    int beta_slot;
    int coeff_slot;
  };
  struct Flux {
    std::vector<cplx> symbol;  // (-2 pi i n)^alpha per mode
    std::vector<Term> terms;
  };
  int d_;
  ModeBox box_;
  int M_;
  std::vector<std::vector<cplx>> beta_symbols_;
  std::vector<std::vector<cplx>> coeff_grids_;
  std::vector<Flux> fluxes_;
};

/// Convenience wrapper over DiscreteOperator at the cutoff of u.
PeriodicField apply(const CoefficientMatrix& a, const PeriodicField& u, int k = 1);

/// sum_{a,b} int a_{ab}(k x) D^b u D^a phi dx via exact spectral products.
double weak_form(const CoefficientMatrix& a, const PeriodicField& u, const PeriodicField& phi, int k = 1);

/// s(n) = sum a_{ab} (2 pi i n)^b (-2 pi i n)^a using the mean of every entry.
cplx constant_symbol(const CoefficientMatrix& a, std::span<const int> n);

}  // namespace homog
