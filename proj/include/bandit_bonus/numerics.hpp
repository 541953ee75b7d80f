/**
 * @file numerics.hpp
 * @brief Small numerical toolbox: bisection root finding on monotone brackets,
 *        adaptive Simpson quadrature, and a monotone cubic (PCHIP) interpolant.
 *
 * Root finding is bisection-only by design: every function we invert is
 * monotone by model assumption, while derivative smoothness is not guaranteed,
 * so Newton-type methods buy nothing and can escape the bracket.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "bandit_bonus/errors.hpp"

namespace bb::num {

/**
 * @brief Finds a root of @p f on [lo, hi] by bisection.
 *
 * Requires f(lo) and f(hi) to have opposite signs (a zero at either endpoint
 * is returned immediately). Iterates until the bracket width falls below
 * @p tol_x or @p max_iter halvings have been performed.
 */
template <class F>
double bisect(F&& f, double lo, double hi, double tol_x = 1e-12, int max_iter = 200) {
    double flo = f(lo);
    if (flo == 0.0) return lo;
    double fhi = f(hi);
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw SolverError("bisect: no sign change on [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
    for (int i = 0; i < max_iter && (hi - lo) > tol_x; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace detail {

inline double simpson_panel(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive_simpson_rec(F& f, double a, double fa, double b, double fb, double m, double fm,
                            double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson_panel(a, fa, m, fm, flm);
    const double right = simpson_panel(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/**
 * @brief Adaptive Simpson quadrature of @p f over [a, b] to absolute tolerance @p tol.
 */
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-10, int max_depth = 48) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = detail::simpson_panel(a, fa, b, fb, fm);
    return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

/// Uniformly spaced grid of @p n points on [lo, hi] (endpoints included).
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

/**
 * @brief Monotone cubic interpolant (Fritsch-Carlson PCHIP) through strictly
 *        increasing sample points.
 *
 * Preserves monotonicity of the data, which is what lets us use the derivative
 * of the interpolant as a (nonnegative) density for tabulated cost laws.
 */
class MonotoneCubic {
  public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw InvariantError("MonotoneCubic: need at least two samples of equal length");
        std::vector<double> delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double dx = x_[i + 1] - x_[i];
            if (dx <= 0.0) throw InvariantError("MonotoneCubic: abscissae must be strictly increasing");
            delta[i] = (y_[i + 1] - y_[i]) / dx;
            if (delta[i] < 0.0) throw InvariantError("MonotoneCubic: ordinates must be non-decreasing");
        }
        d_.assign(n, 0.0);
        d_[0] = delta[0];
        d_[n - 1] = delta[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                d_[i] = 0.0; // local extremum in the data: flatten
            } else {
                // Harmonic-mean slope limiter keeps the interpolant monotone.
                const double w1 = 2.0 * (x_[i + 1] - x_[i]) + (x_[i] - x_[i - 1]);
                const double w2 = (x_[i + 1] - x_[i]) + 2.0 * (x_[i] - x_[i - 1]);
                d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
    }

    double min_x() const { return x_.front(); }
    double max_x() const { return x_.back(); }

    /// Interpolated value at @p x (clamped to the sample range).
    double value(double x) const { return eval(x).first; }

    /// Derivative of the interpolant at @p x (nonnegative for monotone data).
    double derivative(double x) const { return eval(x).second; }

    /// (value, derivative) pair at @p x.
    std::pair<double, double> eval(double x) const {
        x = std::clamp(x, x_.front(), x_.back());
        const std::size_t i = segment(x);
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        // Cubic Hermite basis on the segment.
        const double t2 = t * t;
        const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        const double h10 = t * (1.0 - t) * (1.0 - t);
        const double h01 = t2 * (3.0 - 2.0 * t);
        const double h11 = t2 * (t - 1.0);
        const double v = h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
        const double dh00 = 6.0 * t * (t - 1.0);
        const double dh10 = (1.0 - t) * (1.0 - 3.0 * t);
        const double dh01 = -dh00;
        const double dh11 = t * (3.0 * t - 2.0);
        const double dv = (dh00 * y_[i] + dh01 * y_[i + 1]) / h + dh10 * d_[i] + dh11 * d_[i + 1];
        return {v, dv};
    }

  private:
    std::size_t segment(double x) const {
        // Index of the segment [x_i, x_{i+1}] containing x.
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - x_.begin());
        if (i > 0) --i;
        return std::min(i, x_.size() - 2);
    }

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> d_; // endpoint slopes per sample
};

} // namespace bb::num
