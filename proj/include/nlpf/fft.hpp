#pragma once

#include <complex>
#include <span>
#include <vector>

namespace nlpf::fft {

int next_pow2(int n);

/// In-place iterative radix-2 transform; size must be a power of two.
/// Unnormalized: inverse(forward(x)) == size * x.
void transform(std::span<std::complex<double>> data, bool inverse);

/// Batched transforms over the rows / columns of a row-major rows×cols array.
/// Rows (or columns) are independent, so these parallelize without changing
/// any summation order.
void transform_rows(std::vector<std::complex<double>>& a, int rows, int cols, bool inverse);
void transform_cols(std::vector<std::complex<double>>& a, int rows, int cols, bool inverse);

}  // namespace nlpf::fft
