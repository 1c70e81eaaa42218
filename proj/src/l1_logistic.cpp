#include "soak/l1_logistic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "soak/kernels.hpp"

namespace soak::l1 {

namespace {

double l1_norm(const Matrix& w) {
    double acc = 0.0;
    const double* ptr = w.data();
    const std::size_t size = w.rows() * w.cols();
    for (std::size_t i = 0; i < size; ++i) acc += std::fabs(ptr[i]);
    return acc;
}

inline double soft_threshold(double v, double threshold) {
    if (v > threshold) return v - threshold;
    if (v < -threshold) return v + threshold;
    return 0.0;
}

}  // namespace

double loss(const Problem& prob, const Matrix& w, const std::vector<double>& b, Matrix& logits) {
    const std::size_t n = prob.n();
    const std::size_t c = prob.n_classes;
    if (logits.rows() != n || logits.cols() != c) logits = Matrix(n, c);
    kernels::linear_forward(prob.x->data(), n, prob.p(), w.data(), b.data(), c, logits.data());

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = logits.row(i);
        double m = row[0];
        for (std::size_t k = 1; k < c; ++k) m = std::max(m, row[k]);
        double sum = 0.0;
        for (std::size_t k = 0; k < c; ++k) sum += std::exp(row[k] - m);
        const double lse = m + std::log(sum);
        total += lse - row[static_cast<std::size_t>((*prob.y)[i])];
    }
    return total / static_cast<double>(n);
}

double loss_grad_from_logits(const Problem& prob, const Matrix& logits, Matrix& grad_w,
                             std::vector<double>& grad_b) {
    const std::size_t n = prob.n();
    const std::size_t p = prob.p();
    const std::size_t c = prob.n_classes;

    // one pass per row: log-sum-exp for the loss, softmax residual for the
    // gradient, sharing the exp evaluations
    Matrix resid(n, c);
    const double inv_n = 1.0 / static_cast<double>(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = logits.row(i);
        double m = row[0];
        for (std::size_t k = 1; k < c; ++k) m = std::max(m, row[k]);
        double sum = 0.0;
        double* r = resid.row(i);
        for (std::size_t k = 0; k < c; ++k) {
            r[k] = std::exp(row[k] - m);
            sum += r[k];
        }
        total += m + std::log(sum) - row[static_cast<std::size_t>((*prob.y)[i])];
        const double scale = inv_n / sum;
        for (std::size_t k = 0; k < c; ++k) r[k] *= scale;
        r[static_cast<std::size_t>((*prob.y)[i])] -= inv_n;
    }

    if (grad_w.rows() != c || grad_w.cols() != p) grad_w = Matrix(c, p);
    kernels::residual_xt(resid.data(), prob.x->data(), n, p, c, grad_w.data());

    grad_b.assign(c, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = resid.row(i);
        for (std::size_t k = 0; k < c; ++k) grad_b[k] += r[k];
    }
    return total * inv_n;
}

void grad_from_logits(const Problem& prob, const Matrix& logits, Matrix& grad_w,
                      std::vector<double>& grad_b) {
    (void)loss_grad_from_logits(prob, logits, grad_w, grad_b);
}

double loss_and_grad(const Problem& prob, const Matrix& w, const std::vector<double>& b,
                     Matrix& grad_w, std::vector<double>& grad_b) {
    Matrix logits;
    const double f = loss(prob, w, b, logits);
    grad_from_logits(prob, logits, grad_w, grad_b);
    return f;
}

std::vector<double> prior_intercepts(const Problem& prob) {
    const std::size_t c = prob.n_classes;
    std::vector<double> counts(c, 0.0);
    for (const int label : *prob.y) counts[static_cast<std::size_t>(label)] += 1.0;
    const double denom = static_cast<double>(prob.n()) + 0.5 * static_cast<double>(c);
    std::vector<double> b(c);
    for (std::size_t k = 0; k < c; ++k) b[k] = std::log((counts[k] + 0.5) / denom);
    return b;
}

double lambda_max(const Problem& prob) {
    Matrix w(prob.n_classes, prob.p());
    std::vector<double> b = prior_intercepts(prob);
    Matrix grad_w;
    std::vector<double> grad_b;
    loss_and_grad(prob, w, b, grad_w, grad_b);
    double lmax = 0.0;
    const double* g = grad_w.data();
    const std::size_t size = grad_w.rows() * grad_w.cols();
    for (std::size_t i = 0; i < size; ++i) lmax = std::max(lmax, std::fabs(g[i]));
    // relative cushion keeps w == 0 exact at the head of the path
    return lmax * (1.0 + 1e-10);
}

std::vector<double> lambda_path(double lmax, int length, double min_ratio) {
    if (length < 1) throw std::invalid_argument("lambda path length must be >= 1");
    if (lmax <= 0.0) return {0.0};
    if (length == 1) return {lmax};
    std::vector<double> path(static_cast<std::size_t>(length));
    const double log_lmax = std::log(lmax);
    const double log_ratio = std::log(min_ratio);
    for (int j = 0; j < length; ++j) {
        path[static_cast<std::size_t>(j)] =
            std::exp(log_lmax + log_ratio * static_cast<double>(j) / static_cast<double>(length - 1));
    }
    return path;
}

double objective(const Problem& prob, double lambda, const Matrix& w,
                 const std::vector<double>& b) {
    Matrix logits;
    return loss(prob, w, b, logits) + lambda * l1_norm(w);
}

// Proximal gradient with backtracking line search, accelerated by Nesterov
// extrapolation under a monotone safeguard: a candidate that would raise the
// penalized objective is rejected and the momentum restarted, so the trace
// of accepted objectives never increases. Logits at the extrapolated point
// are the same linear combination of the two stored logit matrices (the
// forward map is affine), which saves one matrix product per iteration.
SolveInfo solve(const Problem& prob, double lambda, Matrix& w, std::vector<double>& b,
                double tol, int max_iter, double* step_hint) {
    const std::size_t c = prob.n_classes;
    const std::size_t p = prob.p();
    const std::size_t n = prob.n();
    if (w.rows() != c || w.cols() != p) w = Matrix(c, p);
    if (b.size() != c) b.assign(c, 0.0);

    SolveInfo info;
    Matrix logits_x;
    double fx = loss(prob, w, b, logits_x);
    double hx = fx + lambda * l1_norm(w);
    info.objective_trace.push_back(hx);

    Matrix w_prev = w;
    std::vector<double> b_prev = b;
    Matrix logits_prev = logits_x;

    Matrix wy(c, p);
    std::vector<double> by(c);
    Matrix logits_y(n, c);
    Matrix grad_w(c, p);
    std::vector<double> grad_b(c);
    Matrix w_cand(c, p);
    std::vector<double> b_cand(c);
    Matrix logits_cand(n, c);

    double step = (step_hint != nullptr && *step_hint > 0.0) ? *step_hint : 1.0;
    double t = 1.0;
    double theta_next = 0.0;
    bool plain = true;  // no extrapolation on the first step of each call

    for (int iter = 0; iter < max_iter; ++iter) {
        info.iterations = iter + 1;
        const double theta = plain ? 0.0 : theta_next;
        if (theta == 0.0) {
            wy = w;
            by = b;
            logits_y = logits_x;
        } else {
            for (std::size_t idx = 0; idx < c * p; ++idx) {
                wy.data()[idx] = w.data()[idx] + theta * (w.data()[idx] - w_prev.data()[idx]);
            }
            for (std::size_t k = 0; k < c; ++k) {
                by[k] = b[k] + theta * (b[k] - b_prev[k]);
            }
            for (std::size_t idx = 0; idx < n * c; ++idx) {
                logits_y.data()[idx] =
                    logits_x.data()[idx] +
                    theta * (logits_x.data()[idx] - logits_prev.data()[idx]);
            }
        }
        const double f_y = loss_grad_from_logits(prob, logits_y, grad_w, grad_b);

        double f_cand = 0.0;
        for (;;) {
            const double threshold = step * lambda;
            double quad = 0.0;  // ||candidate - y||^2
            double lin = 0.0;   // <grad(y), candidate - y>
            for (std::size_t idx = 0; idx < c * p; ++idx) {
                const double next =
                    soft_threshold(wy.data()[idx] - step * grad_w.data()[idx], threshold);
                const double delta = next - wy.data()[idx];
                w_cand.data()[idx] = next;
                quad += delta * delta;
                lin += grad_w.data()[idx] * delta;
            }
            for (std::size_t k = 0; k < c; ++k) {
                const double next = by[k] - step * grad_b[k];
                const double delta = next - by[k];
                b_cand[k] = next;
                quad += delta * delta;
                lin += grad_b[k] * delta;
            }
            f_cand = loss(prob, w_cand, b_cand, logits_cand);
            const double bound = f_y + lin + quad / (2.0 * step);
            if (f_cand <= bound + 1e-12 * std::max(1.0, std::fabs(f_y)) || step < 1e-18) break;
            step *= 0.5;
        }

        const double h_cand = f_cand + lambda * l1_norm(w_cand);
        if (h_cand > hx + 1e-12 * std::max(1.0, std::fabs(hx))) {
            // a plain step that cannot decrease the objective is the
            // numerical floor; an extrapolated one just overshot, so drop
            // momentum and retry from x
            if (theta == 0.0) break;
            plain = true;
            t = 1.0;
            continue;
        }

        const double decrease = hx - h_cand;
        std::swap(w_prev, w);
        std::swap(w, w_cand);
        std::swap(b_prev, b);
        std::swap(b, b_cand);
        std::swap(logits_prev, logits_x);
        std::swap(logits_x, logits_cand);
        hx = h_cand;
        info.objective_trace.push_back(hx);

        if (decrease <= tol * std::max(1.0, std::fabs(hx))) {
            // a stalled accelerated step gets one plain retry before we
            // declare convergence
            if (theta == 0.0) break;
            plain = true;
            t = 1.0;
            continue;
        }

        const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        theta_next = (t - 1.0) / t_new;
        t = t_new;
        plain = false;
        step *= 1.25;  // optimistic growth, backtracking will trim it
    }

    if (step_hint != nullptr) *step_hint = step;
    return info;
}

}  // namespace soak::l1
