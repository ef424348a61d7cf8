#include "nlpf/parallel.hpp"

#include <cassert>

namespace nlpf::par {

double det_sum(std::span<const double> x) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
    if (n == 0) return 0.0;
    const std::ptrdiff_t nb = (n + kSumBlock - 1) / kSumBlock;
    if (nb == 1) {
        double s = 0.0;
        for (std::ptrdiff_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    std::vector<double> partial(static_cast<std::size_t>(nb), 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
        const std::ptrdiff_t lo = b * kSumBlock;
        const std::ptrdiff_t hi = std::min(lo + kSumBlock, n);
        double s = 0.0;
        for (std::ptrdiff_t i = lo; i < hi; ++i) s += x[i];
        partial[static_cast<std::size_t>(b)] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

double det_dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
    if (n == 0) return 0.0;
    const std::ptrdiff_t nb = (n + kSumBlock - 1) / kSumBlock;
    if (nb == 1) {
        double s = 0.0;
        for (std::ptrdiff_t i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    }
    std::vector<double> partial(static_cast<std::size_t>(nb), 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t blk = 0; blk < nb; ++blk) {
        const std::ptrdiff_t lo = blk * kSumBlock;
        const std::ptrdiff_t hi = std::min(lo + kSumBlock, n);
        double s = 0.0;
        for (std::ptrdiff_t i = lo; i < hi; ++i) s += a[i] * b[i];
        partial[static_cast<std::size_t>(blk)] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace nlpf::par

namespace nlpf::ref {

double sum(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace nlpf::ref
