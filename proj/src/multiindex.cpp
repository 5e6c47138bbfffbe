#include "homog/multiindex.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "homog/errors.hpp"

namespace homog {

MultiIndex::MultiIndex(std::vector<int> orders) : orders_(std::move(orders)) {
  for (int a : orders_) {
    if (a < 0) throw PreconditionError("multi-index components must be non-negative");
  }
  order_ = std::accumulate(orders_.begin(), orders_.end(), 0);
}

MultiIndex MultiIndex::unit(int d, int axis) {
  std::vector<int> o(static_cast<std::size_t>(d), 0);
  o.at(static_cast<std::size_t>(axis)) = 1;
  return MultiIndex(std::move(o));
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (dim() != other.dim()) throw ShapeError("multi-index dimension mismatch");
  std::vector<int> o(orders_);
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += other.orders_[i];
  return MultiIndex(std::move(o));
}

std::string MultiIndex::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(orders_[i]);
  }
  s += ')';
  return s;
}

MultiIndex MultiIndex::parse(std::string_view text) {
  std::vector<int> o;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip();
  if (i >= text.size() || text[i] != '(') throw PreconditionError("multi-index must start with '('");
  ++i;
  for (;;) {
    skip();
    std::size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (start == i) throw PreconditionError("malformed multi-index: " + std::string(text));
    o.push_back(std::stoi(std::string(text.substr(start, i - start))));
    skip();
    if (i < text.size() && text[i] == ',') {
      ++i;
      continue;
    }
    if (i < text.size() && text[i] == ')') break;
    throw PreconditionError("malformed multi-index: " + std::string(text));
  }
  return MultiIndex(std::move(o));
}

std::strong_ordering compare(const MultiIndex& a, const MultiIndex& b) {
  if (auto c = a.order() <=> b.order(); c != 0) return c;
  if (auto c = a.dim() <=> b.dim(); c != 0) return c;
  for (int i = 0; i < a.dim(); ++i) {
    if (a[i] != b[i]) return b[i] <=> a[i];
  }
  return std::strong_ordering::equal;
}

int IndexSet::position(const MultiIndex& alpha) const {
  auto it = std::find(members.begin(), members.end(), alpha);
  return it == members.end() ? -1 : static_cast<int>(it - members.begin());
}

namespace {

// Emits indices with |alpha| == total in lexicographically descending order.
void fill_exact(int d, int total, std::vector<int>& cur, int axis, std::vector<MultiIndex>& out) {
  if (axis == d - 1) {
    cur[static_cast<std::size_t>(axis)] = total;
    out.emplace_back(cur);
    return;
  }
  for (int a = total; a >= 0; --a) {
    cur[static_cast<std::size_t>(axis)] = a;
    fill_exact(d, total - a, cur, axis + 1, out);
  }
}

}  // namespace

IndexSet enumerate(int d, int m, IndexMode mode) {
  if (d < 1 || m < 0) throw PreconditionError("enumerate requires d >= 1 and m >= 0");
  IndexSet set{d, m, mode, {}};
  std::vector<int> cur(static_cast<std::size_t>(d), 0);
  const int lo = mode == IndexMode::ExactlyM ? m : 0;
  for (int total = lo; total <= m; ++total) fill_exact(d, total, cur, 0, set.members);
  return set;
}

double monomial(std::span<const double> xi, const MultiIndex& alpha) {
  double r = 1.0;
  for (int i = 0; i < alpha.dim(); ++i) {
    for (int p = 0; p < alpha[i]; ++p) r *= xi[static_cast<std::size_t>(i)];
  }
  return r;
}

double monomial(std::span<const int> n, const MultiIndex& alpha) {
  double r = 1.0;
  for (int i = 0; i < alpha.dim(); ++i) {
    for (int p = 0; p < alpha[i]; ++p) r *= static_cast<double>(n[static_cast<std::size_t>(i)]);
  }
  return r;
}

double lambda_m(std::span<const int> n, int m) {
  const auto set = enumerate(static_cast<int>(n.size()), m, IndexMode::ExactlyM);
  double s = 0.0;
  for (const auto& g : set) {
    const double v = monomial(n, g);
    s += v * v;
  }
  return s;
}

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace homog
