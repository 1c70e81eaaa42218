#pragma once

#include <cstddef>

// Hot inner loops, each in two variants: a serial reference and an OpenMP
// version. Every output element is written by exactly one thread with the
// same per-element summation order as the reference, so the parallel
// variants are bitwise identical to the serial ones for any thread count.

namespace soak::kernels {

// Number of OpenMP threads the parallel variants will use (1 without OpenMP).
int max_threads();

// out[i*n_b + j] = squared Euclidean distance between a-row i and b-row j.
// a: n_a x dim, b: n_b x dim, both row-major.
void pairwise_sq_dists_serial(const double* a, std::size_t n_a,
                              const double* b, std::size_t n_b,
                              std::size_t dim, double* out);
void pairwise_sq_dists(const double* a, std::size_t n_a,
                       const double* b, std::size_t n_b,
                       std::size_t dim, double* out);

// logits[i*n_classes + c] = dot(x row i, w row c) + bias[c].
// x: n x p, w: n_classes x p, bias: n_classes.
void linear_forward_serial(const double* x, std::size_t n, std::size_t p,
                           const double* w, const double* bias,
                           std::size_t n_classes, double* logits);
void linear_forward(const double* x, std::size_t n, std::size_t p,
                    const double* w, const double* bias,
                    std::size_t n_classes, double* logits);

// grad[c*p + j] = sum_i r[i*n_classes + c] * x[i*p + j].
// The transposed product that dominates the logistic gradient.
void residual_xt_serial(const double* r, const double* x, std::size_t n,
                        std::size_t p, std::size_t n_classes, double* grad);
void residual_xt(const double* r, const double* x, std::size_t n,
                 std::size_t p, std::size_t n_classes, double* grad);

}  // namespace soak::kernels
