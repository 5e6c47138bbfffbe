#include "homog/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "homog/errors.hpp"

namespace homog {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

cplx i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

std::size_t ModeBox::size() const { return ipow(static_cast<std::size_t>(width()), d); }

std::size_t ModeBox::index(std::span<const int> n) const {
  std::size_t idx = 0;
  for (int j = 0; j < d; ++j) idx = idx * static_cast<std::size_t>(width()) + static_cast<std::size_t>(n[static_cast<std::size_t>(j)] + N);
  return idx;
}

bool ModeBox::contains(std::span<const int> n) const {
  if (static_cast<int>(n.size()) != d) return false;
  return std::all_of(n.begin(), n.end(), [&](int v) { return v >= -N && v <= N; });
}

cplx derivative_symbol(std::span<const int> n, const MultiIndex& alpha) {
  return std::pow(kTwoPi, alpha.order()) * i_power(alpha.order()) * monomial(n, alpha);
}

double sinc(double t) {
  if (std::abs(t) < 1e-4) {
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(t) / t;
}

PeriodicField::PeriodicField(int d, int cutoff) : box_{d, cutoff} {
  if (d < 1 || cutoff < 0) throw ShapeError("field needs d >= 1 and cutoff >= 0");
  coeffs_.assign(box_.size(), cplx{});
}

PeriodicField::PeriodicField(int d, int cutoff, std::vector<cplx> coeffs) : box_{d, cutoff}, coeffs_(std::move(coeffs)) {
  if (d < 1 || cutoff < 0) throw ShapeError("field needs d >= 1 and cutoff >= 0");
  if (coeffs_.size() != box_.size()) throw ShapeError("coefficient array does not match (2N+1)^d");
  const std::size_t half = coeffs_.size() / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const std::size_t j = box_.mirror(i);
    const cplx avg = 0.5 * (coeffs_[i] + std::conj(coeffs_[j]));
    coeffs_[i] = avg;
    coeffs_[j] = std::conj(avg);
  }
  coeffs_[half] = {coeffs_[half].real(), 0.0};
}

PeriodicField PeriodicField::constant(int d, double value) {
  PeriodicField f(d, 0);
  f.coeffs_[0] = value;
  return f;
}

PeriodicField PeriodicField::from_terms(int d, std::span<const Term> terms, int cutoff) {
  int deg = 0;
  for (const auto& t : terms) {
    if (static_cast<int>(t.n.size()) != d) throw ShapeError("term wavenumber has wrong dimension");
    for (int v : t.n) deg = std::max(deg, std::abs(v));
  }
  if (cutoff < 0) cutoff = deg;
  ModeBox box{d, cutoff};
  std::vector<cplx> c(box.size());
  for (const auto& t : terms) {
    if (!box.contains(t.n)) continue;
    const std::size_t i = box.index(t.n);
    if (i == box.mirror(i)) {
      c[i] += t.c.real();
    } else {
      c[i] += t.c;
      c[box.mirror(i)] += std::conj(t.c);
    }
  }
  return PeriodicField(d, cutoff, std::move(c));
}

PeriodicField PeriodicField::from_samples(int d, int R, std::span<const double> samples, int cutoff) {
  if (R < 3) throw ShapeError("sample grid needs at least 3 points per axis");
  if (samples.size() != ipow(static_cast<std::size_t>(R), d)) throw ShapeError("sample count is not R^d");
  const int max_cut = (R - 1) / 2;
  if (cutoff < 0) cutoff = max_cut;
  if (cutoff > max_cut) throw ShapeError("cutoff exceeds what the sample grid resolves");
  std::vector<cplx> grid(samples.begin(), samples.end());
  fft::forward(grid, d, R);
  ModeBox box{d, cutoff};
  std::vector<cplx> c(box.size());
  fft::gather(grid, d, R, c, cutoff, 1.0 / static_cast<double>(grid.size()));
  return PeriodicField(d, cutoff, std::move(c));
}

cplx PeriodicField::coeff(std::span<const int> n) const {
  if (!box_.contains(n)) return {};
  return coeffs_[box_.index(n)];
}

int PeriodicField::degree(double tol) const {
  int deg = 0;
  box_.for_each([&](std::size_t i, std::span<const int> n) {
    if (std::abs(coeffs_[i]) > tol) {
      for (int v : n) deg = std::max(deg, std::abs(v));
    }
  });
  return deg;
}

std::vector<double> PeriodicField::samples(int R) const {
  if (R < 2 * box_.N + 1) throw ShapeError("sample grid too coarse for the field cutoff");
  std::vector<cplx> grid(ipow(static_cast<std::size_t>(R), box_.d));
  fft::scatter(coeffs_, box_.d, box_.N, grid, R);
  fft::backward(grid, box_.d, R);
  std::vector<double> out(grid.size());
  std::transform(grid.begin(), grid.end(), out.begin(), [](cplx v) { return v.real(); });
  return out;
}

double PeriodicField::imaginary_defect(int R) const {
  if (R < 2 * box_.N + 1) throw ShapeError("sample grid too coarse for the field cutoff");
  std::vector<cplx> grid(ipow(static_cast<std::size_t>(R), box_.d));
  fft::scatter(coeffs_, box_.d, box_.N, grid, R);
  fft::backward(grid, box_.d, R);
  double worst = 0.0;
  for (auto v : grid) worst = std::max(worst, std::abs(v.imag()));
  const double scale = l2_norm();
  return scale > 0.0 ? worst / scale : worst;
}

double PeriodicField::evaluate(std::span<const double> y) const {
  if (static_cast<int>(y.size()) != box_.d) throw ShapeError("evaluation point has wrong dimension");
  cplx s{};
  box_.for_each([&](std::size_t i, std::span<const int> n) {
    double phase = 0.0;
    for (int j = 0; j < box_.d; ++j) phase += n[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)];
    s += coeffs_[i] * std::polar(1.0, kTwoPi * phase);
  });
  return s.real();
}

double PeriodicField::mean() const { return coeffs_[coeffs_.size() / 2].real(); }

PeriodicField PeriodicField::derivative(const MultiIndex& alpha) const {
  if (alpha.dim() != box_.d) throw ShapeError("multi-index dimension does not match the field");
  PeriodicField out(*this);
  box_.for_each([&](std::size_t i, std::span<const int> n) { out.coeffs_[i] *= derivative_symbol(n, alpha); });
  return out;
}

PeriodicField PeriodicField::with_cutoff(int cutoff) const {
  PeriodicField out(box_.d, cutoff);
  const int common = std::min(cutoff, box_.N);
  ModeBox inner{box_.d, common};
  inner.for_each([&](std::size_t, std::span<const int> n) { out.coeffs_[out.box_.index(n)] = coeffs_[box_.index(n)]; });
  return out;
}

PeriodicField PeriodicField::rescale(int k, int target_cutoff) const {
  if (k < 1) throw PreconditionError("rescale factor must be a positive integer");
  if (target_cutoff < 0) target_cutoff = k * box_.N;
  if (target_cutoff % k != 0) throw AlignmentError("fine cutoff is not a multiple of the rescale factor");
  PeriodicField out(box_.d, target_cutoff);
  std::vector<int> kn(static_cast<std::size_t>(box_.d));
  box_.for_each([&](std::size_t i, std::span<const int> n) {
    for (int j = 0; j < box_.d; ++j) kn[static_cast<std::size_t>(j)] = k * n[static_cast<std::size_t>(j)];
    if (out.box_.contains(kn)) out.coeffs_[out.box_.index(kn)] = coeffs_[i];
  });
  return out;
}

PeriodicField PeriodicField::steklov(int k) const {
  if (k < 1) throw PreconditionError("Steklov averaging needs eps = 1/k with k >= 1");
  PeriodicField out(*this);
  const double h = std::numbers::pi / static_cast<double>(k);
  box_.for_each([&](std::size_t i, std::span<const int> n) {
    double mult = 1.0;
    for (int v : n) mult *= sinc(h * v);
    out.coeffs_[i] *= mult;
  });
  return out;
}

double PeriodicField::seminorm_squared(int j) const {
  double s = 0.0;
  const double w = std::pow(kTwoPi, 2 * j);
  box_.for_each([&](std::size_t i, std::span<const int> n) {
    const double a = std::norm(coeffs_[i]);
    if (a != 0.0) s += a * w * lambda_m(n, j);
  });
  return s;
}

FieldNorms PeriodicField::norms(int m) const {
  FieldNorms out;
  double total = 0.0;
  for (int j = 0; j <= m; ++j) {
    const double sq = seminorm_squared(j);
    out.seminorms.push_back(std::sqrt(sq));
    total += sq;
  }
  out.l2 = out.seminorms.front();
  out.hm = std::sqrt(total);
  return out;
}

double PeriodicField::l2_norm() const {
  double s = 0.0;
  for (auto c : coeffs_) s += std::norm(c);
  return std::sqrt(s);
}

PeriodicField& PeriodicField::operator+=(const PeriodicField& other) {
  if (other.box_.d != box_.d) throw ShapeError("field dimension mismatch");
  if (other.box_.N > box_.N) *this = with_cutoff(other.box_.N);
  other.box_.for_each([&](std::size_t i, std::span<const int> n) { coeffs_[box_.index(n)] += other.coeffs_[i]; });
  return *this;
}

PeriodicField& PeriodicField::operator-=(const PeriodicField& other) {
  if (other.box_.d != box_.d) throw ShapeError("field dimension mismatch");
  if (other.box_.N > box_.N) *this = with_cutoff(other.box_.N);
  other.box_.for_each([&](std::size_t i, std::span<const int> n) { coeffs_[box_.index(n)] -= other.coeffs_[i]; });
  return *this;
}

PeriodicField& PeriodicField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

double PeriodicField::hermitian_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) worst = std::max(worst, std::abs(coeffs_[i] - std::conj(coeffs_[box_.mirror(i)])));
  return worst;
}

PeriodicField product(const PeriodicField& f, const PeriodicField& g, int cutoff) {
  if (f.dim() != g.dim()) throw ShapeError("field dimension mismatch");
  const int d = f.dim();
  if (cutoff < 0) cutoff = std::max(f.cutoff(), g.cutoff());
  const int need = std::max({f.cutoff() + g.cutoff() + cutoff + 1, 2 * f.cutoff() + 1, 2 * g.cutoff() + 1, 2 * cutoff + 1});
  const int M = fft::good_size(need);
  std::size_t vol = 1;
  for (int i = 0; i < d; ++i) vol *= static_cast<std::size_t>(M);
  std::vector<cplx> a(vol), b(vol);
  fft::scatter(f.coeffs(), d, f.cutoff(), a, M);
  fft::scatter(g.coeffs(), d, g.cutoff(), b, M);
  fft::backward(a, d, M);
  fft::backward(b, d, M);
  for (std::size_t i = 0; i < vol; ++i) a[i] *= b[i];
  fft::forward(a, d, M);
  std::vector<cplx> c(ModeBox{d, cutoff}.size());
  fft::gather(a, d, M, c, cutoff, 1.0 / static_cast<double>(vol));
  return PeriodicField(d, cutoff, std::move(c));
}

double inner(const PeriodicField& f, const PeriodicField& g) {
  if (f.dim() != g.dim()) throw ShapeError("field dimension mismatch");
  const PeriodicField& small = f.cutoff() <= g.cutoff() ? f : g;
  const PeriodicField& large = f.cutoff() <= g.cutoff() ? g : f;
  double s = 0.0;
  small.box().for_each([&](std::size_t i, std::span<const int> n) {
    s += (small.coeffs()[i] * std::conj(large.coeff(n))).real();
  });
  return s;
}

}  // namespace homog
