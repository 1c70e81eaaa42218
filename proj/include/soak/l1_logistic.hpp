#pragma once

#include <cstddef>
#include <vector>

#include "soak/matrix.hpp"

// Multinomial logistic loss with an elementwise L1 penalty on non-intercept
// weights, solved by proximal gradient descent with backtracking line search
// along a geometric lambda path with warm starts.

namespace soak::l1 {

// Standardized design matrix plus 0-based class labels.
struct Problem {
    const Matrix* x = nullptr;          // n x p
    const std::vector<int>* y = nullptr;
    std::size_t n_classes = 0;

    std::size_t n() const { return x->rows(); }
    std::size_t p() const { return x->cols(); }
};

// Mean multinomial negative log-likelihood; fills logits (n x C).
double loss(const Problem& prob, const Matrix& w, const std::vector<double>& b, Matrix& logits);

// Gradient of the mean NLL from already-computed logits.
void grad_from_logits(const Problem& prob, const Matrix& logits, Matrix& grad_w,
                      std::vector<double>& grad_b);

// Same, returning the mean NLL computed in the same pass.
double loss_grad_from_logits(const Problem& prob, const Matrix& logits, Matrix& grad_w,
                             std::vector<double>& grad_b);

// Convenience wrapper: loss and gradient in one call.
double loss_and_grad(const Problem& prob, const Matrix& w, const std::vector<double>& b,
                     Matrix& grad_w, std::vector<double>& grad_b);

// Smoothed log class priors; finite even when a class is absent.
std::vector<double> prior_intercepts(const Problem& prob);

// Smallest penalty that keeps every non-intercept weight at exactly zero:
// max |grad_w| at the intercept-only solution, with a relative cushion so
// the zero solution survives floating-point noise. Returns 0 when the
// gradient is identically zero (all-constant features).
double lambda_max(const Problem& prob);

// Geometric sequence from lmax down to lmax * min_ratio; {0} when lmax == 0.
std::vector<double> lambda_path(double lmax, int length, double min_ratio);

struct SolveInfo {
    int iterations = 0;
    std::vector<double> objective_trace;  // penalized objective per accepted step
};

// One lambda, warm-started through w/b. Stops when the relative objective
// decrease falls below tol or after max_iter iterations. step_hint carries
// the accepted step size across calls.
SolveInfo solve(const Problem& prob, double lambda, Matrix& w, std::vector<double>& b,
                double tol = 1e-8, int max_iter = 10000, double* step_hint = nullptr);

// Penalized objective f + lambda * ||w||_1 at a point (for tests/diagnostics).
double objective(const Problem& prob, double lambda, const Matrix& w,
                 const std::vector<double>& b);

}  // namespace soak::l1
