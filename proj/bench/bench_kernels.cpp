// Timings for the OpenMP kernels: same code path pinned to one thread versus
// all threads, plus the serial reference oracles kept for testing.
// Usage: nlpf_bench [n1d] [n2d] (defaults 1024 and 48).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nlpf/diagnostics.hpp"
#include "nlpf/grid.hpp"
#include "nlpf/kernel.hpp"
#include "nlpf/parallel.hpp"

using namespace nlpf;
using clk = std::chrono::steady_clock;

namespace {

int max_threads() {
#ifdef _OPENMP
    static const int n = omp_get_max_threads();  // captured before any override
    return n;
#else
    return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
    omp_set_num_threads(n);
#else
    (void)n;
#endif
}

double seconds_since(clk::time_point t0) {
    return std::chrono::duration<double>(clk::now() - t0).count();
}

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e30;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = clk::now();
        fn();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

template <typename F>
void row_threads(const char* name, int reps, F&& fn) {
    set_threads(1);
    const double serial = time_best_of(reps, fn);
    set_threads(max_threads());
    const double parallel = time_best_of(reps, fn);
    std::printf("%-36s %12.3f %12.3f %8.2fx\n", name, serial * 1e3, parallel * 1e3,
                serial / parallel);
}

volatile double sink = 0.0;

}  // namespace

int main(int argc, char** argv) {
    const int n1d = argc > 1 ? std::atoi(argv[1]) : 1024;
    const int n2d = argc > 2 ? std::atoi(argv[2]) : 48;

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    const double len1[] = {1.0};
    const int cnt1[] = {n1d};
    const DomainGrid g1 = build_grid(1, len1, cnt1);
    const double len2[] = {1.0, 1.0};
    const int cnt2[] = {n2d, n2d};
    const DomainGrid g2 = build_grid(2, len2, cnt2);

    KernelSpec kernel;
    kernel.family = KernelFamily::Gaussian;
    kernel.amplitude = 1.0;
    kernel.width = 0.1;

    std::printf("threads: %d\n", max_threads());
    std::printf("%-36s %12s %12s %8s\n", "kernel (same code, 1 vs all threads)", "1 thr [ms]",
                "all [ms]", "speedup");

    for (const DomainGrid* g : {&g1, &g2}) {
        ScalarField v = make_field(*g, FieldTag::Other);
        for (auto& x : v.values) x = unit(rng);
        char label[72];
        const char* dim_tag = g->dim == 1 ? "1d" : "2d";

        const NonlocalOperator op = NonlocalOperator::build(*g, kernel, ConvStrategy::Fast);

        std::snprintf(label, sizeof(label), "stencil neg_laplacian %s N=%lld", dim_tag,
                      static_cast<long long>(g->total()));
        row_threads(label, 7, [&] { sink = apply_neg_laplacian(v).values[0]; });

        std::snprintf(label, sizeof(label), "dense convolution %s", dim_tag);
        row_threads(label, 5, [&] { sink = op.apply_direct(v).values[0]; });

        std::snprintf(label, sizeof(label), "fft convolution %s", dim_tag);
        row_threads(label, 5, [&] { sink = op.apply_fast(v).values[0]; });
    }

    std::vector<double> big(1 << 22);
    for (auto& x : big) x = unit(rng);
    row_threads("blocked deterministic dot 4M", 9, [&] { sink = par::det_dot(big, big); });

    // oracle paths kept for tests (serial by design, shown for scale)
    set_threads(max_threads());
    std::printf("\n%-36s %12s\n", "test oracle (serial by design)", "[ms]");
    {
        ScalarField v = make_field(g2, FieldTag::Other);
        for (auto& x : v.values) x = unit(rng);
        const NonlocalOperator op = NonlocalOperator::build(g2, kernel, ConvStrategy::Direct);
        const double t_oracle =
            time_best_of(3, [&] { sink = ref::convolve_direct(kernel, v).values[0]; });
        std::printf("%-36s %12.3f\n", "brute-force quadrature convolution", t_oracle * 1e3);
        ScalarField chi = v;
        for (auto& x : chi.values) x *= 0.5;
        chi.tag = FieldTag::Chi;
        const double t_pair =
            time_best_of(3, [&] { sink = ref::interaction_energy_double_sum(op, chi); });
        std::printf("%-36s %12.3f\n", "pair double-sum interaction energy", t_pair * 1e3);
    }
    return 0;
}
