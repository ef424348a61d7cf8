#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nlpf::par {

// Block size for deterministic reductions. Results depend only on the data,
// never on the number of OpenMP threads: each block is summed serially in
// index order, block partials are combined serially in block order.
inline constexpr std::ptrdiff_t kSumBlock = 2048;

double det_sum(std::span<const double> x);
double det_dot(std::span<const double> a, std::span<const double> b);

}  // namespace nlpf::par

namespace nlpf::ref {

// Plain left-to-right serial reductions, kept as the reference the blocked
// parallel versions are tested and benchmarked against.
double sum(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace nlpf::ref
