#include "nlpf/fft.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

namespace nlpf::fft {

int next_pow2(int n) {
    int m = 1;
    while (m < n) m <<= 1;
    return m;
}

void transform(std::span<std::complex<double>> data, bool inverse) {
    const std::size_t n = data.size();
    assert(n > 0 && (n & (n - 1)) == 0);
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = data[i + k];
                const std::complex<double> v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

void transform_rows(std::vector<std::complex<double>>& a, int rows, int cols, bool inverse) {
    assert(static_cast<std::size_t>(rows) * cols == a.size());
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) {
        transform(std::span<std::complex<double>>(a.data() + static_cast<std::size_t>(r) * cols,
                                                  static_cast<std::size_t>(cols)),
                  inverse);
    }
}

void transform_cols(std::vector<std::complex<double>>& a, int rows, int cols, bool inverse) {
    assert(static_cast<std::size_t>(rows) * cols == a.size());
#pragma omp parallel for schedule(static)
    for (int c = 0; c < cols; ++c) {
        std::vector<std::complex<double>> tmp(static_cast<std::size_t>(rows));
        for (int r = 0; r < rows; ++r) tmp[r] = a[static_cast<std::size_t>(r) * cols + c];
        transform(tmp, inverse);
        for (int r = 0; r < rows; ++r) a[static_cast<std::size_t>(r) * cols + c] = tmp[r];
    }
}

}  // namespace nlpf::fft
