#include "homog/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "homog/errors.hpp"

namespace homog::fft {

namespace {

struct PlanCache {
  std::mutex mu;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(int d, int M, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(d, M, sign);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    std::vector<int> dims(static_cast<std::size_t>(d), M);
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(M);
    std::vector<cplx> scratch(total);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan p = fftw_plan_dft(d, dims.data(), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw Error("FFTW failed to create a plan");
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

std::size_t volume(int d, int M) {
  std::size_t v = 1;
  for (int i = 0; i < d; ++i) v *= static_cast<std::size_t>(M);
  return v;
}

void run(std::span<cplx> data, int d, int M, int sign) {
  if (data.size() != volume(d, M)) throw ShapeError("FFT buffer size does not match M^d");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(cache().get(d, M, sign), buf, buf);
}

}  // namespace

int good_size(int n) {
  if (n <= 1) return 1;
  for (int m = n;; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

void forward(std::span<cplx> data, int d, int M) { run(data, d, M, FFTW_FORWARD); }
void backward(std::span<cplx> data, int d, int M) { run(data, d, M, FFTW_BACKWARD); }

namespace {

// Calls fn(coeff_index, grid_index) for every |n_j| <= N.
template <class Fn>
void for_each_mode(int d, int N, int M, Fn&& fn) {
  const int width = 2 * N + 1;
  std::vector<int> n(static_cast<std::size_t>(d), -N);
  const std::size_t count = volume(d, width);
  for (std::size_t c = 0; c < count; ++c) {
    std::size_t g = 0;
    for (int j = 0; j < d; ++j) {
      const int nj = n[static_cast<std::size_t>(j)];
      g = g * static_cast<std::size_t>(M) + static_cast<std::size_t>(nj >= 0 ? nj : nj + M);
    }
    fn(c, g);
    for (int j = d - 1; j >= 0; --j) {
      auto& nj = n[static_cast<std::size_t>(j)];
      if (++nj <= N) break;
      nj = -N;
    }
  }
}

}  // namespace

void scatter(std::span<const cplx> coeffs, int d, int N, std::span<cplx> grid, int M) {
  if (M < 2 * N + 1) throw ShapeError("grid too small for the coefficient cutoff");
  if (grid.size() != volume(d, M) || coeffs.size() != volume(d, 2 * N + 1))
    throw ShapeError("scatter buffer size mismatch");
  std::fill(grid.begin(), grid.end(), cplx{});
  for_each_mode(d, N, M, [&](std::size_t c, std::size_t g) { grid[g] = coeffs[c]; });
}

void gather(std::span<const cplx> grid, int d, int M, std::span<cplx> coeffs, int N, double scale) {
  if (M < 2 * N + 1) throw ShapeError("grid too small for the coefficient cutoff");
  if (grid.size() != volume(d, M) || coeffs.size() != volume(d, 2 * N + 1))
    throw ShapeError("gather buffer size mismatch");
  for_each_mode(d, N, M, [&](std::size_t c, std::size_t g) { coeffs[c] = grid[g] * scale; });
}

}  // namespace homog::fft
