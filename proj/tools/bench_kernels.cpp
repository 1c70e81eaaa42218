// Timing comparison of the serial reference kernels against the OpenMP
// variants, with an equality check on every output (the parallel kernels
// promise bitwise-identical results).
#include <chrono>
#include <cstdio>
#include <vector>

#include "soak/kernels.hpp"
#include "soak/matrix.hpp"
#include "soak/rng.hpp"

namespace {

using soak::Matrix;

Matrix random_matrix(std::size_t rows, std::size_t cols, soak::SplitMix64& rng) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.uniform() * 2.0 - 1.0;
    }
    return m;
}

template <typename F>
double time_ms(int reps, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) body();
    const auto end = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(end - start).count() /
           static_cast<double>(reps);
}

void report(const char* name, double serial_ms, double parallel_ms, bool match) {
    std::printf("%-18s %10.3f ms %12.3f ms %8.2fx %s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, match ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
    soak::SplitMix64 rng(42);
    std::printf("threads available: %d\n", soak::kernels::max_threads());
    std::printf("%-18s %13s %15s %9s %s\n", "kernel", "serial", "parallel", "speedup",
                "outputs");

    {
        const std::size_t na = 400, nb = 600, dim = 64;
        const Matrix a = random_matrix(na, dim, rng);
        const Matrix b = random_matrix(nb, dim, rng);
        Matrix out_s(na, nb), out_p(na, nb);
        const double serial = time_ms(20, [&] {
            soak::kernels::pairwise_sq_dists_serial(a.data(), na, b.data(), nb, dim,
                                                    out_s.data());
        });
        const double parallel = time_ms(20, [&] {
            soak::kernels::pairwise_sq_dists(a.data(), na, b.data(), nb, dim, out_p.data());
        });
        report("pairwise_sq_dists", serial, parallel, out_s == out_p);
    }

    {
        const std::size_t n = 4000, p = 64, c = 12;
        const Matrix x = random_matrix(n, p, rng);
        const Matrix w = random_matrix(c, p, rng);
        std::vector<double> bias(c, 0.1);
        Matrix out_s(n, c), out_p(n, c);
        const double serial = time_ms(50, [&] {
            soak::kernels::linear_forward_serial(x.data(), n, p, w.data(), bias.data(), c,
                                                 out_s.data());
        });
        const double parallel = time_ms(50, [&] {
            soak::kernels::linear_forward(x.data(), n, p, w.data(), bias.data(), c,
                                          out_p.data());
        });
        report("linear_forward", serial, parallel, out_s == out_p);
    }

    {
        const std::size_t n = 4000, p = 64, c = 12;
        const Matrix x = random_matrix(n, p, rng);
        const Matrix r = random_matrix(n, c, rng);
        Matrix out_s(c, p), out_p(c, p);
        const double serial = time_ms(50, [&] {
            soak::kernels::residual_xt_serial(r.data(), x.data(), n, p, c, out_s.data());
        });
        const double parallel = time_ms(50, [&] {
            soak::kernels::residual_xt(r.data(), x.data(), n, p, c, out_p.data());
        });
        report("residual_xt", serial, parallel, out_s == out_p);
    }
    return 0;
}
