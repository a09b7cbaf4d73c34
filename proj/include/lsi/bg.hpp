#pragma once

// Numerical evaluation of the Bobkov-Gotze functionals D0, D1 for a smoothed
// measure, and verifiers for the Gaussian-smoothing tail inequalities that
// back them.
//
// D1 = sup_{x > m} (1 - F(x)) log(1/(1 - F(x))) int_m^x 1/p,
// with the mirrored D0 obtained by reflecting the measure about its support
// center and reusing the same code path. Tail factors are taken in the log
// domain (log(1 - F) comes from the tail directly, never from 1 - CDF), and
// the inner integral is accumulated cumulatively along the search grid.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lsi/measure.hpp"
#include "lsi/numerics.hpp"

namespace lsi {

struct BGReport {
    double d0 = 0.0;
    double d1 = 0.0;
    double median = 0.0;
    double c_upper = 0.0;  // 468 (D0 + D1)
    double c_lower = 0.0;  // (D0 + D1) / 150
    double truncation_x_max = 0.0;
    double tol = 0.0;
    double quad_tol = 0.0;
    double sup_width_tol = 0.0;
    bool complete = true;
};

class BgBudgetExceeded : public std::runtime_error {
public:
    explicit BgBudgetExceeded(BGReport best_so_far)
        : std::runtime_error("bg_functionals: evaluation budget exceeded"),
          best(best_so_far) {}
    BGReport best;
};

struct BgOptions {
    double truncation_multiplier = 1.0;   // scales the truncation offset
    std::size_t quad_max_evals = 2'000'000;
    std::size_t grid_cells = 256;
};

// Signed slacks (bound side minus constrained side) for the three smoothing
// tail inequalities at x >= R; all are >= 0 when the inequalities hold.
struct TailSlacks {
    double upper_tail_slack;         // (4/3) d/(x-R+sqrt d) p(x)  -  tail(x)
    double lower_tail_slack;         // tail(x) - Gaussian floor
    double reciprocal_integral_slack;  // 2d(x-R)/(((x-R)^2+d) p(x)) - int_R^x 1/p
};

namespace detail {

struct DSideResult {
    double log_value = -std::numeric_limits<double>::infinity();
    double x_max = 0.0;
};

// sup over (median, x_max] of the D1 objective, in the log domain.
inline DSideResult d_side(const SmoothedMeasure& m, double x_max,
                          const BgOptions& opts, double quad_tol,
                          double* best_so_far) {
    const double x0 = m.median();
    const std::size_t cells = std::max<std::size_t>(opts.grid_cells, 256);
    const std::size_t n = cells + 1;
    std::vector<double> xs(n), neg_logp(n), log_cum(n), obj(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = x0 + (x_max - x0) * static_cast<double>(i) / static_cast<double>(cells);
        neg_logp[i] = -m.log_density(xs[i]);
    }

    // cumulative log of int_m^x 1/p, one shifted panel quadrature per cell
    auto panel_log = [&](double a, double b, double shift) {
        auto f = [&](double t) { return std::exp(-m.log_density(t) - shift); };
        QuadResult q = lsi::detail::adaptive_core(
            f, std::vector<double>{a, b}, 0.0, quad_tol, opts.quad_max_evals);
        return shift + std::log(std::max(q.value, 5e-324));
    };
    log_cum[0] = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < n; ++i) {
        const double shift = std::max(neg_logp[i - 1], neg_logp[i]);
        log_cum[i] = log_add_exp(log_cum[i - 1], panel_log(xs[i - 1], xs[i], shift));
    }

    auto log_objective_at = [&](std::size_t i) {
        const double lt = m.log_upper_tail(xs[i]);
        if (!(lt < 0.0)) return -std::numeric_limits<double>::infinity();
        return lt + std::log(-lt) + log_cum[i];
    };
    for (std::size_t i = 0; i < n; ++i) {
        obj[i] = log_objective_at(i);
        if (best_so_far) *best_so_far = std::max(*best_so_far, obj[i]);
    }

    // top three local maxima of the grid objective
    std::vector<std::size_t> candidates;
    for (std::size_t i = 1; i < n; ++i) {
        const bool left_ok = obj[i] >= obj[i - 1];
        const bool right_ok = (i + 1 == n) || obj[i] >= obj[i + 1];
        if (left_ok && right_ok) candidates.push_back(i);
    }
    std::sort(candidates.begin(), candidates.end(),
              [&](std::size_t l, std::size_t r) {
                  if (obj[l] != obj[r]) return obj[l] > obj[r];
                  return l < r;
              });
    if (candidates.size() > 3) candidates.resize(3);

    // continuous objective for refinement: cumulative cache plus a short
    // quadrature from the nearest grid point on the left
    auto objective = [&](double x) {
        std::size_t j = static_cast<std::size_t>(
            std::clamp((x - x0) / (x_max - x0) * static_cast<double>(cells), 0.0,
                       static_cast<double>(cells)));
        while (j > 0 && xs[j] > x) --j;
        double log_i = log_cum[j];
        if (x > xs[j]) {
            const double shift = std::max(neg_logp[j], -m.log_density(x));
            log_i = log_add_exp(log_i, panel_log(xs[j], x, shift));
        }
        const double lt = m.log_upper_tail(x);
        if (!(lt < 0.0)) return -std::numeric_limits<double>::infinity();
        return lt + std::log(-lt) + log_i;
    };

    double best = -std::numeric_limits<double>::infinity();
    const double width_tol = std::max((x_max - x0) * 1e-9, 1e-14);
    for (std::size_t idx : candidates) {
        const double lo = xs[idx - 1];
        const double hi = xs[std::min(idx + 1, n - 1)];
        SupResult r = lsi::detail::golden_max(objective, lo, hi, width_tol,
                                              xs[idx], obj[idx]);
        best = std::max(best, r.value);
        if (best_so_far) *best_so_far = std::max(*best_so_far, best);
    }
    return DSideResult{best, x_max};
}

}  // namespace detail

inline BGReport bg_functionals(const SmoothedMeasure& m, double tol,
                               const BgOptions& opts = {}) {
    if (!(tol > 0.0))
        throw std::invalid_argument("bg_functionals: tol must be > 0");
    const double delta = m.delta();
    const double R = m.base().support_radius();
    const double center = m.base().center();
    const double eps_tail = tol * 1e-3;
    const double offset =
        (R + std::sqrt(2.0 * delta * std::log(1.0 / eps_tail)) + std::sqrt(delta)) *
        opts.truncation_multiplier;
    const double quad_tol = tol * 1e-2;

    BGReport report;
    report.median = m.median();
    report.truncation_x_max = center + offset;
    report.tol = tol;
    report.quad_tol = quad_tol;
    report.sup_width_tol = std::max(offset * 1e-9, 1e-14);

    double best_log_d1 = -std::numeric_limits<double>::infinity();
    double best_log_d0 = -std::numeric_limits<double>::infinity();
    try {
        detail::DSideResult d1 =
            detail::d_side(m, center + offset, opts, quad_tol, &best_log_d1);
        SmoothedMeasure mirrored(m.base().reflected(), delta);
        detail::DSideResult d0 = detail::d_side(mirrored, center + offset, opts,
                                                quad_tol, &best_log_d0);
        report.d1 = std::exp(d1.log_value);
        report.d0 = std::exp(d0.log_value);
    } catch (const BudgetExceeded&) {
        report.d1 = std::exp(best_log_d1);
        report.d0 = std::exp(best_log_d0);
        report.c_upper = 468.0 * (report.d0 + report.d1);
        report.c_lower = (report.d0 + report.d1) / 150.0;
        report.complete = false;
        throw BgBudgetExceeded(report);
    }
    report.c_upper = 468.0 * (report.d0 + report.d1);
    report.c_lower = (report.d0 + report.d1) / 150.0;
    return report;
}

// Evaluates the three tail inequalities at x >= R for a measure whose support
// lies inside [-R, R] (their hypothesis). Returns signed slacks.
inline TailSlacks verify_tail_bounds(const SmoothedMeasure& m, double x) {
    const double R = m.base().support_radius();
    const double delta = m.delta();
    const double sd = std::sqrt(delta);
    if (m.base().support_min() < -R - 1e-12 || m.base().support_max() > R + 1e-12)
        throw std::invalid_argument(
            "verify_tail_bounds: support must lie inside [-R, R]");
    if (x < R - 1e-12)
        throw std::invalid_argument("verify_tail_bounds: x >= R required");
    x = std::max(x, R);

    const double log_p = m.log_density(x);
    const double p = std::exp(log_p);
    const double tail = m.upper_tail(x);

    TailSlacks s{};
    s.upper_tail_slack = (4.0 / 3.0) * delta / (x - R + sd) * p - tail;
    s.lower_tail_slack =
        tail - sd / (kSqrt2Pi * (x + R + sd)) *
                   std::exp(-(x + R) * (x + R) / (2.0 * delta));
    double recip_integral = 0.0;
    if (x > R + 1e-15) {
        const double shift = std::max(-m.log_density(R), -log_p);
        QuadResult q = adaptive_quadrature(
            [&](double t) { return std::exp(-m.log_density(t) - shift); }, R, x,
            1e-12);
        recip_integral = std::exp(shift) * q.value;
    }
    const double u = x - R;
    s.reciprocal_integral_slack =
        2.0 * delta * u / ((u * u + delta) * p) - recip_integral;
    return s;
}

}  // namespace lsi
