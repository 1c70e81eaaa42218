#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "soak/kernels.hpp"
#include "soak/matrix.hpp"
#include "soak/rng.hpp"

using namespace soak;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.uniform() * 4.0 - 2.0;
    }
    return m;
}

// Independent transcriptions of the definitions, kept dumb on purpose.
Matrix naive_pairwise(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double acc = 0.0;
            for (std::size_t d = 0; d < a.cols(); ++d) {
                const double diff = a(i, d) - b(j, d);
                acc += diff * diff;
            }
            out(i, j) = acc;
        }
    }
    return out;
}

Matrix naive_forward(const Matrix& x, const Matrix& w, const std::vector<double>& bias) {
    Matrix out(x.rows(), w.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t c = 0; c < w.rows(); ++c) {
            double acc = bias[c];
            for (std::size_t j = 0; j < x.cols(); ++j) acc += x(i, j) * w(c, j);
            out(i, c) = acc;
        }
    }
    return out;
}

Matrix naive_residual_xt(const Matrix& r, const Matrix& x) {
    Matrix out(r.cols(), x.cols());
    for (std::size_t c = 0; c < r.cols(); ++c) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < x.rows(); ++i) acc += r(i, c) * x(i, j);
            out(c, j) = acc;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("pairwise_sq_dists: serial correct, parallel bitwise equal") {
    for (const auto [na, nb, dim] : {std::tuple<std::size_t, std::size_t, std::size_t>{1, 1, 1},
                                     {7, 3, 5},
                                     {40, 61, 16},
                                     {101, 33, 2}}) {
        const Matrix a = random_matrix(na, dim, 100 + na);
        const Matrix b = random_matrix(nb, dim, 200 + nb);
        Matrix serial(na, nb);
        Matrix parallel(na, nb);
        kernels::pairwise_sq_dists_serial(a.data(), na, b.data(), nb, dim, serial.data());
        kernels::pairwise_sq_dists(a.data(), na, b.data(), nb, dim, parallel.data());

        const Matrix expected = naive_pairwise(a, b);
        for (std::size_t i = 0; i < na; ++i) {
            for (std::size_t j = 0; j < nb; ++j) {
                CHECK(serial(i, j) == doctest::Approx(expected(i, j)).epsilon(1e-12));
            }
        }
        CHECK(serial == parallel);  // bitwise
    }
}

TEST_CASE("linear_forward: serial correct, parallel bitwise equal") {
    const std::size_t n = 57, p = 13, c = 4;
    const Matrix x = random_matrix(n, p, 7);
    const Matrix w = random_matrix(c, p, 8);
    std::vector<double> bias{0.5, -1.0, 0.0, 2.5};
    Matrix serial(n, c);
    Matrix parallel(n, c);
    kernels::linear_forward_serial(x.data(), n, p, w.data(), bias.data(), c, serial.data());
    kernels::linear_forward(x.data(), n, p, w.data(), bias.data(), c, parallel.data());

    const Matrix expected = naive_forward(x, w, bias);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < c; ++k) {
            CHECK(serial(i, k) == doctest::Approx(expected(i, k)).epsilon(1e-12));
        }
    }
    CHECK(serial == parallel);
}

TEST_CASE("residual_xt: serial correct, parallel bitwise equal") {
    const std::size_t n = 83, p = 9, c = 5;
    const Matrix x = random_matrix(n, p, 21);
    const Matrix r = random_matrix(n, c, 22);
    Matrix serial(c, p);
    Matrix parallel(c, p);
    kernels::residual_xt_serial(r.data(), x.data(), n, p, c, serial.data());
    kernels::residual_xt(r.data(), x.data(), n, p, c, parallel.data());

    const Matrix expected = naive_residual_xt(r, x);
    for (std::size_t k = 0; k < c; ++k) {
        for (std::size_t j = 0; j < p; ++j) {
            CHECK(serial(k, j) == doctest::Approx(expected(k, j)).epsilon(1e-12));
        }
    }
    CHECK(serial == parallel);
}

TEST_CASE("parallel results do not depend on the thread count") {
#ifdef _OPENMP
    const std::size_t na = 64, nb = 48, dim = 10;
    const Matrix a = random_matrix(na, dim, 31);
    const Matrix b = random_matrix(nb, dim, 32);
    Matrix reference(na, nb);
    kernels::pairwise_sq_dists_serial(a.data(), na, b.data(), nb, dim, reference.data());

    const int saved = omp_get_max_threads();
    for (const int threads : {1, 2, 3, 8}) {
        omp_set_num_threads(threads);
        Matrix out(na, nb);
        kernels::pairwise_sq_dists(a.data(), na, b.data(), nb, dim, out.data());
        CHECK(out == reference);
    }
    omp_set_num_threads(saved);
#else
    CHECK(kernels::max_threads() == 1);
#endif
}
