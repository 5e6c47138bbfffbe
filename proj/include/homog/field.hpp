#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "homog/fft.hpp"
#include "homog/multiindex.hpp"

namespace homog {

/// Wavenumber box |n_j| <= N in dimension d. Row-major, last axis fastest,
/// so the entry for -n sits at size() - 1 - index(n).
struct ModeBox {
  int d = 1;
  int N = 0;

  int width() const { return 2 * N + 1; }
  std::size_t size() const;
  std::size_t index(std::span<const int> n) const;
  std::size_t mirror(std::size_t idx) const { return size() - 1 - idx; }
  bool contains(std::span<const int> n) const;

  /// fn(std::size_t idx, std::span<const int> n) over every mode in layout order.
  template <class Fn>
  void for_each(Fn&& fn) const {
    std::vector<int> n(static_cast<std::size_t>(d), -N);
    const std::size_t count = size();
    for (std::size_t i = 0; i < count; ++i) {
      fn(i, std::span<const int>(n));
      for (int j = d - 1; j >= 0; --j) {
        auto& nj = n[static_cast<std::size_t>(j)];
        if (++nj <= N) break;
        nj = -N;
      }
    }
  }
};

/// (2 pi i n)^alpha.
cplx derivative_symbol(std::span<const int> n, const MultiIndex& alpha);

/// sin(t)/t with sinc(0) = 1.
double sinc(double t);

struct FieldNorms {
  double l2 = 0.0;
  std::vector<double> seminorms;  ///< ||u||_j for j = 0..m
  double hm = 0.0;
};

/// Real 1-periodic function on the unit cell (or the unit torus), held as a
/// trigonometric polynomial sum_{|n_j| <= N} c_n exp(2 pi i n.y) with
/// c_{-n} = conj(c_n). Sample grids are the points y_j = j / R, j = 0..R-1.
class PeriodicField {
 public:
  PeriodicField() : PeriodicField(1, 0) {}
  /// Zero field.
  PeriodicField(int d, int cutoff);
  /// Hermitian symmetry is enforced by averaging c_n with conj(c_{-n}).
  PeriodicField(int d, int cutoff, std::vector<cplx> coeffs);

  static PeriodicField constant(int d, double value);

  /// One trigonometric term: c exp(2 pi i n.y) + conj(c) exp(-2 pi i n.y);
  /// for n = 0 only Re(c) is used.
  struct Term {
    std::vector<int> n;
    cplx c;
  };
  /// Sum of Terms; cutoff defaults to the largest |n_j| present.
  static PeriodicField from_terms(int d, std::span<const Term> terms, int cutoff = -1);

  /// Samples on a uniform R^d grid (R >= 3). Cutoff defaults to (R-1)/2 and
  /// may not exceed it.
  static PeriodicField from_samples(int d, int R, std::span<const double> samples, int cutoff = -1);

  int dim() const { return box_.d; }
  int cutoff() const { return box_.N; }
  const ModeBox& box() const { return box_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  /// c_n; zero outside the stored box.
  cplx coeff(std::span<const int> n) const;
  cplx coeff(std::initializer_list<int> n) const { return coeff(std::span<const int>(n.begin(), n.size())); }

  /// Largest |n_j| over nonzero coefficients (trigonometric degree).
  int degree(double tol = 0.0) const;

  /// Real samples on an R^d grid, R >= 2N+1.
  std::vector<double> samples(int R) const;
  /// Max |Im| of the synthesized samples relative to the L2 norm.
  double imaginary_defect(int R) const;
  /// Point evaluation by direct summation.
  double evaluate(std::span<const double> y) const;

  double mean() const;
  PeriodicField derivative(const MultiIndex& alpha) const;
  /// Truncate or zero-pad to a new cutoff.
  PeriodicField with_cutoff(int cutoff) const;
  /// x -> f(k x): c_n moves to wavenumber k n. Cutoff becomes k N unless
  /// target_cutoff is given; target_cutoff must be a multiple of k.
  PeriodicField rescale(int k, int target_cutoff = -1) const;
  /// Steklov average over a cell of size eps = 1/k: c_n * prod_j sinc(pi n_j / k).
  PeriodicField steklov(int k) const;
  FieldNorms norms(int m) const;

  double l2_norm() const;
  /// Squared ||u||_j seminorm.
  double seminorm_squared(int j) const;

  PeriodicField& operator+=(const PeriodicField& other);
  PeriodicField& operator-=(const PeriodicField& other);
  PeriodicField& operator*=(double s);
  friend PeriodicField operator+(PeriodicField a, const PeriodicField& b) { return a += b; }
  friend PeriodicField operator-(PeriodicField a, const PeriodicField& b) { return a -= b; }
  friend PeriodicField operator*(double s, PeriodicField a) { return a *= s; }
  friend PeriodicField operator*(PeriodicField a, double s) { return a *= s; }

  /// Max |c_n - conj(c_{-n})|.
  double hermitian_defect() const;

 private:
  ModeBox box_;
  std::vector<cplx> coeffs_;
};

/// Pointwise product computed on a grid padded so that every retained mode is
/// exact; result cutoff defaults to max of the two input cutoffs.
PeriodicField product(const PeriodicField& f, const PeriodicField& g, int cutoff = -1);

/// int_Y f g dy (exact for the stored coefficients).
double inner(const PeriodicField& f, const PeriodicField& g);

}  // namespace homog
