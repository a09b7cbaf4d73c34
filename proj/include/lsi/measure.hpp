#pragma once

// Compactly supported probability measures on R (atoms plus an absolutely
// continuous part) and exact smoothed quantities of mu * gamma_delta.
//
// All smoothed queries work in the log domain so that tails keep full
// relative accuracy: log densities come from a max-shifted mixture sum and
// tail probabilities from Gaussian tail functions, never from 1 - CDF.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lsi/numerics.hpp"

namespace lsi {

struct Atom {
    double x;
    double w;
};

// Absolutely continuous part: a density callable on its support interval.
struct DensityPart {
    std::function<double(double)> rho;
    double a;
    double b;
};

class Measure1D {
public:
    Measure1D(std::vector<Atom> atoms, std::optional<DensityPart> density,
              double support_radius)
        : atoms_(std::move(atoms)),
          density_(std::move(density)),
          radius_(support_radius) {
        validate();
    }

    static Measure1D point_mass(double x, double support_radius) {
        return Measure1D({{x, 1.0}}, std::nullopt, support_radius);
    }

    // mu = (delta_{-R} + delta_{+R}) / 2
    static Measure1D two_point(double R) {
        return Measure1D({{-R, 0.5}, {R, 0.5}}, std::nullopt, R);
    }

    static Measure1D uniform(double a, double b) {
        if (!(a < b)) throw std::invalid_argument("uniform: a < b required");
        const double h = 1.0 / (b - a);
        return Measure1D({}, DensityPart{[h](double) { return h; }, a, b},
                         0.5 * (b - a));
    }

    // density sum_k coeffs[k] s^k on [a, b] plus optional atoms
    static Measure1D polynomial(std::vector<double> coeffs, double a, double b,
                                double support_radius,
                                std::vector<Atom> atoms = {}) {
        if (!(a < b)) throw std::invalid_argument("polynomial: a < b required");
        auto rho = [c = std::move(coeffs)](double s) {
            double v = 0.0;
            for (std::size_t k = c.size(); k-- > 0;) v = v * s + c[k];
            return v;
        };
        return Measure1D(std::move(atoms), DensityPart{std::move(rho), a, b},
                         support_radius);
    }

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::optional<DensityPart>& density() const { return density_; }
    double support_radius() const { return radius_; }
    double support_min() const { return hull_min_; }
    double support_max() const { return hull_max_; }
    double center() const { return 0.5 * (hull_min_ + hull_max_); }

    // int s^2 dmu(s)
    double raw_second_moment() const {
        double m2 = 0.0;
        for (const Atom& a : atoms_) m2 += a.w * a.x * a.x;
        if (density_) {
            const auto& d = *density_;
            m2 += adaptive_quadrature([&](double s) { return s * s * d.rho(s); },
                                      d.a, d.b, 1e-13)
                      .value;
        }
        return m2;
    }

    // mirror image about the support hull center
    Measure1D reflected() const {
        const double c2 = hull_min_ + hull_max_;
        std::vector<Atom> atoms;
        atoms.reserve(atoms_.size());
        for (const Atom& a : atoms_) atoms.push_back({c2 - a.x, a.w});
        std::optional<DensityPart> density;
        if (density_) {
            const DensityPart& d = *density_;
            density = DensityPart{
                [rho = d.rho, c2](double s) { return rho(c2 - s); },
                c2 - d.b, c2 - d.a};
        }
        return Measure1D(std::move(atoms), std::move(density), radius_);
    }

    Measure1D translated(double shift) const {
        std::vector<Atom> atoms;
        atoms.reserve(atoms_.size());
        for (const Atom& a : atoms_) atoms.push_back({a.x + shift, a.w});
        std::optional<DensityPart> density;
        if (density_) {
            const DensityPart& d = *density_;
            density = DensityPart{
                [rho = d.rho, shift](double s) { return rho(s - shift); },
                d.a + shift, d.b + shift};
        }
        return Measure1D(std::move(atoms), std::move(density), radius_);
    }

private:
    void validate() {
        if (!(radius_ > 0.0))
            throw std::invalid_argument("Measure1D: support radius must be > 0");
        if (atoms_.empty() && !density_)
            throw std::invalid_argument("Measure1D: measure is empty");
        double mass = 0.0;
        hull_min_ = std::numeric_limits<double>::infinity();
        hull_max_ = -std::numeric_limits<double>::infinity();
        for (const Atom& a : atoms_) {
            if (!(a.w > 0.0))
                throw std::invalid_argument("Measure1D: atom weights must be > 0");
            mass += a.w;
            hull_min_ = std::min(hull_min_, a.x);
            hull_max_ = std::max(hull_max_, a.x);
        }
        if (density_) {
            const DensityPart& d = *density_;
            if (!(d.a < d.b))
                throw std::invalid_argument("Measure1D: density support empty");
            // spot-check non-negativity before trusting the integral
            for (int i = 0; i <= 512; ++i) {
                const double s = d.a + (d.b - d.a) * i / 512.0;
                if (d.rho(s) < -1e-12)
                    throw std::invalid_argument("Measure1D: density is negative");
            }
            mass += adaptive_quadrature(d.rho, d.a, d.b, 1e-13).value;
            hull_min_ = std::min(hull_min_, d.a);
            hull_max_ = std::max(hull_max_, d.b);
        }
        if (std::abs(mass - 1.0) > 1e-9)
            throw std::invalid_argument("Measure1D: total mass is not 1");
        if (hull_max_ - hull_min_ > 2.0 * radius_ + 1e-12 * std::max(1.0, radius_))
            throw std::invalid_argument(
                "Measure1D: support exceeds an interval of length 2R");
    }

    std::vector<Atom> atoms_;
    std::optional<DensityPart> density_;
    double radius_;
    double hull_min_ = 0.0;
    double hull_max_ = 0.0;
};

// The convolution mu * gamma_delta. Immutable after construction; the median
// is located once by bisection (the smoothed density is strictly positive, so
// it is unique).
class SmoothedMeasure {
public:
    SmoothedMeasure(Measure1D base, double delta)
        : base_(std::move(base)), delta_(delta) {
        if (!(delta > 0.0))
            throw std::invalid_argument("SmoothedMeasure: delta must be > 0");
        sqrt_delta_ = std::sqrt(delta);
        median_ = locate_median();
    }

    const Measure1D& base() const { return base_; }
    double delta() const { return delta_; }
    double median() const { return median_; }

    // log p_delta(t); finite for every finite t
    double log_density(double t) const {
        std::vector<double> terms;
        terms.reserve(base_.atoms().size() + 1);
        for (const Atom& a : base_.atoms())
            terms.push_back(std::log(a.w) + log_gaussian_pdf(t - a.x, delta_));
        if (base_.density()) {
            const DensityPart& d = *base_.density();
            // shift by the kernel maximum over the support so the integrand
            // stays O(1) even when t is far away
            const double dist = t < d.a ? d.a - t : (t > d.b ? t - d.b : 0.0);
            const double shift = log_gaussian_pdf(dist, delta_);
            auto integrand = [&](double s) {
                return d.rho(s) * std::exp(log_gaussian_pdf(t - s, delta_) - shift);
            };
            QuadResult q = adaptive_quadrature(integrand, d.a, d.b, inner_tol_,
                                               kernel_breakpoints(t, d.a, d.b));
            terms.push_back(shift + std::log(std::max(q.value,
                                                      5e-324)));
        }
        return log_sum_exp(std::span<const double>(terms));
    }

    // log P(X > x), assembled from Gaussian upper tails directly
    double log_upper_tail(double x) const {
        return log_tail_impl(x, /*upper=*/true);
    }

    // log P(X <= x)
    double log_lower_tail(double x) const {
        return log_tail_impl(x, /*upper=*/false);
    }

    double upper_tail(double x) const { return std::exp(log_upper_tail(x)); }
    double cdf(double x) const { return std::exp(log_lower_tail(x)); }

    // int_l^r p_delta, full relative accuracy (no CDF cancellation)
    double interval_mass(double l, double r, double rel_tol = 1e-12) const {
        if (!(l < r)) return 0.0;
        const double mid = 0.5 * (l + r);
        const double shift = std::max({log_density(l), log_density(mid), log_density(r)});
        auto integrand = [&](double t) { return std::exp(log_density(t) - shift); };
        std::vector<double> pts;
        for (const Atom& a : base_.atoms()) pts.push_back(a.x);
        QuadResult q = detail_integrate(integrand, l, r, rel_tol, pts);
        return std::exp(shift) * q.value;
    }

    // int t^2 dmu_delta = int s^2 dmu + delta (moment additivity)
    double second_moment() const { return base_.raw_second_moment() + delta_; }

private:
    double locate_median() const {
        double lo = base_.support_min() - 12.0 * sqrt_delta_;
        double hi = base_.support_max() + 12.0 * sqrt_delta_;
        for (int i = 0; i < 400; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double f = cdf(mid);
            if (std::abs(f - 0.5) <= 1e-10) return mid;
            (f < 0.5 ? lo : hi) = mid;
            if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                               std::max(1.0, std::abs(mid)))
                return mid;
        }
        return 0.5 * (lo + hi);
    }

    double log_tail_impl(double x, bool upper) const {
        std::vector<double> terms;
        terms.reserve(base_.atoms().size() + 1);
        auto log_q = [&](double center) {
            const double z = (upper ? x - center : center - x) / sqrt_delta_;
            return log_gaussian_upper_tail(z);
        };
        for (const Atom& a : base_.atoms())
            terms.push_back(std::log(a.w) + log_q(a.x));
        if (base_.density()) {
            const DensityPart& d = *base_.density();
            // the tail kernel is monotone in s; its max sits at the support
            // endpoint nearest the queried direction
            const double shift = std::max(log_q(d.a), log_q(d.b));
            auto integrand = [&](double s) {
                return d.rho(s) * std::exp(log_q(s) - shift);
            };
            QuadResult q = adaptive_quadrature(integrand, d.a, d.b, inner_tol_,
                                               kernel_breakpoints(x, d.a, d.b));
            terms.push_back(shift + std::log(std::max(q.value, 5e-324)));
        }
        return log_sum_exp(std::span<const double>(terms));
    }

    // panel seeds aligned to the Gaussian kernel scale around t
    std::vector<double> kernel_breakpoints(double t, double a, double b) const {
        std::vector<double> pts;
        for (int k = -8; k <= 8; ++k) {
            const double s = t + k * sqrt_delta_;
            if (s > a && s < b) pts.push_back(s);
        }
        return pts;
    }

    template <class F>
    QuadResult detail_integrate(F&& f, double l, double r, double rel_tol,
                                std::span<const double> pts) const {
        return detail::adaptive_core(
            f,
            [&] {
                std::vector<double> bp;
                bp.push_back(l);
                for (double x : pts)
                    if (x > l && x < r) bp.push_back(x);
                bp.push_back(r);
                std::sort(bp.begin(), bp.end());
                bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
                return bp;
            }(),
            /*abs_tol=*/0.0, rel_tol, /*max_evals=*/2'000'000);
    }

    Measure1D base_;
    double delta_;
    double sqrt_delta_;
    double median_;
    double inner_tol_ = 1e-12;
};

}  // namespace lsi
