#include "soak/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace soak::kernels {

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

inline double sq_dist_row(const double* u, const double* v, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        const double d = u[k] - v[k];
        acc += d * d;
    }
    return acc;
}

inline double dot_row(const double* u, const double* v, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) acc += u[k] * v[k];
    return acc;
}

}  // namespace

void pairwise_sq_dists_serial(const double* a, std::size_t n_a,
                              const double* b, std::size_t n_b,
                              std::size_t dim, double* out) {
    for (std::size_t i = 0; i < n_a; ++i) {
        const double* ai = a + i * dim;
        double* row = out + i * n_b;
        for (std::size_t j = 0; j < n_b; ++j) {
            row[j] = sq_dist_row(ai, b + j * dim, dim);
        }
    }
}

void pairwise_sq_dists(const double* a, std::size_t n_a,
                       const double* b, std::size_t n_b,
                       std::size_t dim, double* out) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_a); ++i) {
        const double* ai = a + static_cast<std::size_t>(i) * dim;
        double* row = out + static_cast<std::size_t>(i) * n_b;
        for (std::size_t j = 0; j < n_b; ++j) {
            row[j] = sq_dist_row(ai, b + j * dim, dim);
        }
    }
}

void linear_forward_serial(const double* x, std::size_t n, std::size_t p,
                           const double* w, const double* bias,
                           std::size_t n_classes, double* logits) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = x + i * p;
        double* row = logits + i * n_classes;
        for (std::size_t c = 0; c < n_classes; ++c) {
            row[c] = dot_row(xi, w + c * p, p) + bias[c];
        }
    }
}

void linear_forward(const double* x, std::size_t n, std::size_t p,
                    const double* w, const double* bias,
                    std::size_t n_classes, double* logits) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const double* xi = x + static_cast<std::size_t>(i) * p;
        double* row = logits + static_cast<std::size_t>(i) * n_classes;
        for (std::size_t c = 0; c < n_classes; ++c) {
            row[c] = dot_row(xi, w + c * p, p) + bias[c];
        }
    }
}

void residual_xt_serial(const double* r, const double* x, std::size_t n,
                        std::size_t p, std::size_t n_classes, double* grad) {
    for (std::size_t c = 0; c < n_classes; ++c) {
        for (std::size_t j = 0; j < p; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += r[i * n_classes + c] * x[i * p + j];
            }
            grad[c * p + j] = acc;
        }
    }
}

void residual_xt(const double* r, const double* x, std::size_t n,
                 std::size_t p, std::size_t n_classes, double* grad) {
#pragma omp parallel for collapse(2) schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_classes); ++c) {
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(p); ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += r[i * n_classes + c] * x[i * p + static_cast<std::size_t>(j)];
            }
            grad[static_cast<std::size_t>(c) * p + static_cast<std::size_t>(j)] = acc;
        }
    }
}

}  // namespace soak::kernels
