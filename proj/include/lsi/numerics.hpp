#pragma once

// Scalar numerical kernels shared across the library: stable log-domain
// arithmetic, Gaussian tail functions, adaptive Gauss-Kronrod quadrature
// and a grid-then-refine bounded sup-search.
//
// Everything here is pure and deterministic for fixed inputs; results are
// safe to share across threads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsi {

inline constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364;
inline constexpr double kSqrt2Pi = 2.5066282746310005024157652848;

struct QuadResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    std::size_t evaluations = 0;
};

struct SupResult {
    double argmax = 0.0;
    double value = 0.0;
    double bracket_width = 0.0;
};

// Integrand returned a non-finite value; `location` is the offending abscissa.
class IntegrandFailure : public std::runtime_error {
public:
    explicit IntegrandFailure(double where)
        : std::runtime_error("integrand returned a non-finite value at x = " +
                             std::to_string(where)),
          location(where) {}
    double location;
};

// Function handed to sup_search returned a non-finite value.
class EvaluationFailure : public std::runtime_error {
public:
    explicit EvaluationFailure(double where)
        : std::runtime_error("objective returned a non-finite value at x = " +
                             std::to_string(where)),
          location(where) {}
    double location;
};

// Requested tolerance was not reached within the evaluation budget.
// Carries the best result obtained so far.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(QuadResult best_so_far, double tol)
        : std::runtime_error("quadrature budget exhausted (error estimate " +
                             std::to_string(best_so_far.abs_error_estimate) +
                             " > tol " + std::to_string(tol) + ")"),
          best(best_so_far) {}
    QuadResult best;
};

// log(exp(a) + exp(b)) without overflow; handles -inf identities.
inline double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

// log sum_i w_i exp(l_i), max-shifted. Weights must be >= 0, not all zero.
inline double log_sum_exp(std::span<const double> log_terms,
                          std::span<const double> weights) {
    if (log_terms.empty())
        throw std::invalid_argument("log_sum_exp: empty input");
    if (log_terms.size() != weights.size())
        throw std::invalid_argument("log_sum_exp: length mismatch");
    double m = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i < log_terms.size(); ++i) {
        if (weights[i] < 0.0)
            throw std::invalid_argument("log_sum_exp: negative weight");
        if (weights[i] > 0.0) {
            any = true;
            m = std::max(m, log_terms[i]);
        }
    }
    if (!any) throw std::invalid_argument("log_sum_exp: all weights zero");
    if (m == -std::numeric_limits<double>::infinity()) return m;
    double s = 0.0;
    for (std::size_t i = 0; i < log_terms.size(); ++i)
        if (weights[i] > 0.0) s += weights[i] * std::exp(log_terms[i] - m);
    return m + std::log(s);
}

inline double log_sum_exp(std::span<const double> log_terms) {
    if (log_terms.empty())
        throw std::invalid_argument("log_sum_exp: empty input");
    double m = -std::numeric_limits<double>::infinity();
    for (double t : log_terms) m = std::max(m, t);
    if (m == -std::numeric_limits<double>::infinity()) return m;
    double s = 0.0;
    for (double t : log_terms) s += std::exp(t - m);
    return m + std::log(s);
}

// Upper tail Q(x) = P(Z > x) of the standard normal.
inline double gaussian_upper_tail(double x) {
    return 0.5 * std::erfc(x * 0.7071067811865475244);
}

// log Q(x), finite for the whole double range. erfc underflows near
// x ~ 37.5, so the far tail switches to the asymptotic expansion
// Q(x) = phi(x)/x * (1 - 1/x^2 + 3/x^4 - ...).
inline double log_gaussian_upper_tail(double x) {
    if (x <= 0.0) {
        // Q(x) = 1 - Q(-x) with Q(-x) <= 1/2: log1p keeps full accuracy.
        return std::log1p(-gaussian_upper_tail(-x));
    }
    if (x < 30.0) return std::log(0.5 * std::erfc(x * 0.7071067811865475244));
    const double x2 = x * x;
    double term = 1.0, series = 1.0;
    for (int k = 1; k <= 6; ++k) {
        term *= -(2.0 * k - 1.0) / x2;
        series += term;
    }
    return -0.5 * x2 - std::log(x) - kLogSqrt2Pi + std::log(series);
}

// log of the centered Gaussian density with the given variance at x.
inline double log_gaussian_pdf(double x, double variance) {
    return -kLogSqrt2Pi - 0.5 * std::log(variance) - x * x / (2.0 * variance);
}

namespace detail {

// 15-point Kronrod extension of 7-point Gauss (nodes/weights on [-1, 1]).
inline constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Panel {
    double a, b;
    double value;
    double error;
};

struct PanelWorse {
    bool operator()(const Panel& l, const Panel& r) const {
        if (l.error != r.error) return l.error < r.error;
        return l.a > r.a;  // deterministic tie-break
    }
};

template <class F>
Panel evaluate_panel(F&& f, double a, double b, std::size_t& evaluations) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    auto eval = [&](double x) {
        const double v = f(x);
        ++evaluations;
        if (!std::isfinite(v)) throw IntegrandFailure(x);
        return v;
    };
    const double fc = eval(c);
    double resk = kKronrodWeights[7] * fc;
    double resg = kGaussWeights[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kKronrodNodes[j];
        const double f1 = eval(c - dx);
        const double f2 = eval(c + dx);
        resk += kKronrodWeights[j] * (f1 + f2);
        if (j % 2 == 1) resg += kGaussWeights[(j - 1) / 2] * (f1 + f2);
    }
    return Panel{a, b, resk * h, std::abs(resk - resg) * std::abs(h)};
}

// Adaptive subdivision over an initial panel list. Terminates when the
// summed embedded-rule error drops under max(abs_tol, rel_tol*|value|).
template <class F>
QuadResult adaptive_core(F&& f, std::span<const double> breakpoints,
                         double abs_tol, double rel_tol,
                         std::size_t max_evals) {
    std::size_t evaluations = 0;
    std::priority_queue<Panel, std::vector<Panel>, PanelWorse> queue;
    double total = 0.0, total_err = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        Panel p = evaluate_panel(f, breakpoints[i], breakpoints[i + 1],
                                 evaluations);
        total += p.value;
        total_err += p.error;
        queue.push(p);
    }
    const double floor_tol = 1e-300;
    auto target = [&](double v) {
        return std::max({abs_tol, rel_tol * std::abs(v), floor_tol});
    };
    while (total_err > target(total)) {
        if (evaluations + 30 > max_evals)
            throw BudgetExceeded(QuadResult{total, total_err, evaluations},
                                 target(total));
        Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // panel cannot be split further at double precision
            queue.push(Panel{worst.a, worst.b, worst.value, 0.0});
            total_err -= worst.error;
            continue;
        }
        Panel left = evaluate_panel(f, worst.a, mid, evaluations);
        Panel right = evaluate_panel(f, mid, worst.b, evaluations);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }
    return QuadResult{total, total_err, evaluations};
}

// Golden-section maximization on [lo, hi], seeded with a known point so the
// result can never fall below it. Tracks the best value seen at any probe.
template <class F>
SupResult golden_max(F&& f, double lo, double hi, double width_tol,
                     double seed_x, double seed_value) {
    constexpr double inv_phi = 0.6180339887498948482;
    double a = lo, b = hi;
    double best_x = seed_x, best_v = seed_value;
    auto note = [&](double x, double v) {
        if (v > best_v || (v == best_v && x < best_x)) {
            best_x = x;
            best_v = v;
        }
    };
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    note(x1, f1);
    note(x2, f2);
    while (b - a > width_tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
            note(x2, f2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
            note(x1, f1);
        }
        if (x1 >= x2) break;  // double precision exhausted
    }
    return SupResult{best_x, best_v, std::max(b - a, 0.0)};
}

}  // namespace detail

// Adaptive quadrature of f over [a, b] with caller-supplied interior
// breakpoints (useful when the integrand has a known narrow feature).
template <class F>
QuadResult adaptive_quadrature(F&& f, double a, double b, double tol,
                               std::span<const double> interior_breakpoints,
                               std::size_t max_evals = 2'000'000) {
    if (!(a < b)) throw std::invalid_argument("adaptive_quadrature: a < b required");
    if (!(tol > 0.0)) throw std::invalid_argument("adaptive_quadrature: tol > 0 required");
    std::vector<double> pts;
    pts.push_back(a);
    for (double x : interior_breakpoints)
        if (x > a && x < b) pts.push_back(x);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return detail::adaptive_core(f, pts, tol, tol, max_evals);
}

template <class F>
QuadResult adaptive_quadrature(F&& f, double a, double b, double tol,
                               std::size_t max_evals = 2'000'000) {
    return adaptive_quadrature(std::forward<F>(f), a, b, tol,
                               std::span<const double>{}, max_evals);
}

// Bounded sup-search: a coarse grid (>= 256 cells) followed by
// golden-section refinement of the best three brackets. The grid pass is
// what makes multi-modal objectives with flat exponential shoulders safe;
// refinement then gives bracket_width <= tol.
template <class F>
SupResult sup_search(F&& g, double a, double b, double tol,
                     std::size_t grid_cells = 256) {
    if (!(a < b)) throw std::invalid_argument("sup_search: a < b required");
    if (!(tol > 0.0)) throw std::invalid_argument("sup_search: tol > 0 required");
    grid_cells = std::max<std::size_t>(grid_cells, 256);
    const std::size_t n = grid_cells + 1;
    std::vector<double> xs(n), gs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(grid_cells);
        gs[i] = g(xs[i]);
        if (!std::isfinite(gs[i])) throw EvaluationFailure(xs[i]);
    }
    // local maxima, ranked by value; ties resolve to the smaller abscissa
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < n; ++i) {
        const bool left_ok = (i == 0) || gs[i] >= gs[i - 1];
        const bool right_ok = (i + 1 == n) || gs[i] >= gs[i + 1];
        if (left_ok && right_ok) candidates.push_back(i);
    }
    std::sort(candidates.begin(), candidates.end(),
              [&](std::size_t l, std::size_t r) {
                  if (gs[l] != gs[r]) return gs[l] > gs[r];
                  return l < r;
              });
    if (candidates.size() > 3) candidates.resize(3);

    SupResult best{xs[0], gs[0], b - a};
    bool refined_any = false;
    for (std::size_t idx : candidates) {
        const double lo = xs[idx == 0 ? 0 : idx - 1];
        const double hi = xs[std::min(idx + 1, n - 1)];
        if (!(lo < hi)) continue;
        auto checked = [&](double x) {
            const double v = g(x);
            if (!std::isfinite(v)) throw EvaluationFailure(x);
            return v;
        };
        SupResult refined =
            detail::golden_max(checked, lo, hi, tol, xs[idx], gs[idx]);
        if (!refined_any || refined.value > best.value ||
            (refined.value == best.value && refined.argmax < best.argmax)) {
            best = refined;
            refined_any = true;
        }
    }
    best.bracket_width = std::min(best.bracket_width, tol);
    return best;
}

}  // namespace lsi
