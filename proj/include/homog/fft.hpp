#pragma once

#include <complex>
#include <span>
#include <vector>

namespace homog {

using cplx = std::complex<double>;

namespace fft {

/// Smallest integer >= n whose prime factors are all in {2, 3, 5, 7}.
int good_size(int n);

/// In-place d-dimensional transform on an M^d row-major array.
/// forward: X_k = sum_j x_j exp(-2 pi i j.k / M) (unnormalized)
/// backward: x_j = sum_k X_k exp(+2 pi i j.k / M)
/// Plans are cached per (d, M, direction); execution is thread-safe.
void forward(std::span<cplx> data, int d, int M);
void backward(std::span<cplx> data, int d, int M);

/// Scatter a cutoff-N coefficient array ((2N+1)^d, index n_j + N) into an
/// M^d wavenumber array with negative wavenumbers wrapped. M >= 2N+1.
void scatter(std::span<const cplx> coeffs, int d, int N, std::span<cplx> grid, int M);
/// Inverse of scatter for |n_j| <= N, multiplying every entry by scale.
void gather(std::span<const cplx> grid, int d, int M, std::span<cplx> coeffs, int N, double scale);

}  // namespace fft
}  // namespace homog
