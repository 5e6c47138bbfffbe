#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace homog {

/// Derivative orders (alpha_1, ..., alpha_d) with the total order |alpha| cached.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> orders);
  MultiIndex(std::initializer_list<int> orders) : MultiIndex(std::vector<int>(orders)) {}

  static MultiIndex zero(int d) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(d), 0)); }
  /// alpha = e_axis (a single first derivative).
  static MultiIndex unit(int d, int axis);

  int dim() const { return static_cast<int>(orders_.size()); }
  int order() const { return order_; }
  int operator[](int i) const { return orders_[static_cast<std::size_t>(i)]; }
  std::span<const int> orders() const { return orders_; }

  MultiIndex operator+(const MultiIndex& other) const;

  bool operator==(const MultiIndex& other) const = default;

  /// "(a1,...,ad)"
  std::string to_string() const;
  static MultiIndex parse(std::string_view text);

 private:
  std::vector<int> orders_;
  int order_ = 0;
};

/// The documented total order: ascending |alpha|, then lexicographically
/// descending in the first differing component, so (2,0) < (1,1) < (0,2).
std::strong_ordering compare(const MultiIndex& a, const MultiIndex& b);

struct IndexOrder {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const { return compare(a, b) < 0; }
};

enum class IndexMode { ExactlyM, UpToM };

struct IndexSet {
  int d = 0;
  int m = 0;
  IndexMode mode = IndexMode::ExactlyM;
  std::vector<MultiIndex> members;

  std::size_t size() const { return members.size(); }
  auto begin() const { return members.begin(); }
  auto end() const { return members.end(); }
  /// Position of alpha in members, or -1.
  int position(const MultiIndex& alpha) const;
};

/// All multi-indices in dimension d with |alpha| == m (or <= m), in IndexOrder.
IndexSet enumerate(int d, int m, IndexMode mode);

/// xi^alpha = prod xi_i^alpha_i with 0^0 = 1.
double monomial(std::span<const double> xi, const MultiIndex& alpha);
/// Integer-vector overload used for wavenumbers.
double monomial(std::span<const int> n, const MultiIndex& alpha);

/// sum_{|gamma|=m} (n^gamma)^2.
double lambda_m(std::span<const int> n, int m);

/// e_{alpha beta}.
inline int kronecker(const MultiIndex& a, const MultiIndex& b) { return a == b ? 1 : 0; }

/// Binomial coefficient C(n, k) for small arguments.
long long binomial(int n, int k);

}  // namespace homog
