/**
 * @file valuations.hpp
 * @brief Risky-arm valuation laws for the perfect-learning model: closed-form
 *        and quadrature oracles for E max{R1, R2}, plus per-path samplers for
 *        the Monte Carlo validator.
 *
 * Three specifications are supported:
 *   - UniformR1(X):   R1 ~ U[0, X].
 *   - RhoMix(rho):    R1 = rho*x + (1-rho)*y with x ~ U(0,4), y ~ U(1,3);
 *                     closed two-branch formula available at R2 = 3.
 *   - NumericQuadrature: any law given by its CDF, integrated adaptively.
 */
#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "bandit_bonus/errors.hpp"
#include "bandit_bonus/numerics.hpp"
#include "bandit_bonus/rng.hpp"

namespace bb {

/**
 * @brief E max{R1, R2} for R1 ~ U[0, X].
 *
 * For 0 <= R2 <= X the integral is closed-form, (X^2 + R2^2) / (2X); for
 * R2 > X the maximum is degenerate at R2.
 */
inline double emax_uniform_r1(double x_max, double r2) {
    if (!(x_max > 0.0)) throw std::domain_error("emax_uniform_r1: X > 0 required");
    if (r2 < 0.0) throw std::domain_error("emax_uniform_r1: R2 >= 0 required");
    if (r2 >= x_max) return r2;
    return (x_max * x_max + r2 * r2) / (2.0 * x_max);
}

/// Mean of R1 ~ U[0, X].
inline double er1_uniform_r1(double x_max) { return 0.5 * x_max; }

/**
 * @brief E max{R1, 3} for the mixture R1 = rho*x + (1-rho)*y, x ~ U(0,4), y ~ U(1,3).
 *
 * Two closed-form branches meet continuously at rho = 2/3; the formula is
 * specific to R2 = 3 (other safe values go through emax_numeric).
 */
inline double emax_rho_mix(double rho, double r2) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("emax_rho_mix: rho must lie in (0, 1)");
    if (r2 != 3.0) throw std::domain_error("emax_rho_mix: closed form is specific to R2 = 3");
    if (rho < 2.0 / 3.0) {
        return (18.0 + (12.0 - 15.0 * rho) / (2.0 * (1.0 - rho)) +
                rho * (rho + 9.0) / (6.0 * (1.0 - rho))) / 8.0;
    }
    return (58.0 / 3.0 + 13.0 * rho / 3.0 + 4.0 / (3.0 * rho)) / 8.0;
}

/// Mean of the rho-mixture: rho*2 + (1-rho)*2 = 2.
inline double er1_rho_mix(double /*rho*/) { return 2.0; }

/**
 * @brief E max{R1, R2} for a law on [lo, hi] given by its CDF, by adaptive
 *        Simpson quadrature (absolute tolerance 1e-10).
 *
 * Uses E max{R1, R2} = R2 + integral(R2..hi) (1 - F(x)) dx, which needs only
 * the CDF and a single one-dimensional integral.
 */
inline double emax_numeric(const std::function<double(double)>& cdf, double lo, double hi, double r2) {
    if (!(hi > lo)) throw std::domain_error("emax_numeric: empty support");
    if (r2 >= hi) return r2;
    const double a = std::max(r2, lo);
    double tail = num::adaptive_simpson([&](double x) { return 1.0 - cdf(x); }, a, hi, 1e-10);
    if (r2 < lo) {
        // Below the support the integrand is identically 1.
        tail += lo - r2;
    }
    return r2 + tail;
}

/// Per-path sampler signature used by the discrete Monte Carlo simulator.
using R1Sampler = std::function<double(std::mt19937_64&)>;

inline R1Sampler make_uniform_r1_sampler(double x_max) {
    if (!(x_max > 0.0)) throw std::domain_error("uniform R1 sampler: X > 0 required");
    return [x_max](std::mt19937_64& gen) { return x_max * canonical_u01(gen); };
}

inline R1Sampler make_rho_mix_sampler(double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("rho-mix sampler: rho must lie in (0, 1)");
    return [rho](std::mt19937_64& gen) {
        const double x = 4.0 * canonical_u01(gen);
        const double y = 1.0 + 2.0 * canonical_u01(gen);
        return rho * x + (1.0 - rho) * y;
    };
}

} // namespace bb
