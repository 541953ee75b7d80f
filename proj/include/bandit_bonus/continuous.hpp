/**
 * @file continuous.hpp
 * @brief Exponential-bandit monopolist solver: partial- and full-coverage
 *        value ODEs with smooth pasting, all switching cutoffs, the naive
 *        single-strategy benchmarks, and the immediate-revelation regime that
 *        appears when the reporting-cost cap is small.
 *
 * The belief alpha that the risky arm is good drifts down with every no-news
 * report and jumps to one on conclusive good news (arrival rate lambda, lump
 * value z). Regimes order as SA -> PC -> (IR) -> FC -> NB in alpha:
 *
 *   PC-ODE:  U' = [beta(b) - lambda alpha z + s - alpha lambda^2 z / r
 *                  + lambda alpha U] / ((alpha^2 - alpha) lambda),
 *            with b recovered from the Bellman identity r U - s = H^2(b)/h(b)
 *            and the smooth-pasting launch U(alpha_sa_pc) = s/r, U' = 0.
 *   FC-ODE:  V' = [beta(b) + alpha lambda V - alpha lambda^2 z / r]
 *                  / ((alpha^2 - alpha) lambda), b from r V - alpha lambda z.
 *   IR-ODE:  r Y = lambda alpha z (1 + lambda/r) - cbar - alpha lambda Y
 *                  + (alpha^2 - alpha) lambda Y', bonus pinned at cbar.
 *
 * Integration is classical fixed-step fourth-order marching: every step needs
 * an inner information-rent inversion, so adaptive error control would
 * interleave badly with the implicit bonus recovery; accuracy is checked by
 * halving-step comparisons in the tests instead. Every smooth-pasting launch
 * starts one offset (1e-6) above the boundary with the boundary value and a
 * zero derivative, which is first-order consistent.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bandit_bonus/cost_model.hpp"
#include "bandit_bonus/errors.hpp"
#include "bandit_bonus/numerics.hpp"
#include "bandit_bonus/strategy.hpp"

namespace bb {

struct ContinuousModel {
    double discount_rate = 0.0; ///< r > 0
    double arrival_rate = 0.0;  ///< lambda > 0, good-news intensity
    double lump_value = 0.0;    ///< z > 0, lump utility on good news
    double safe_flow = 0.0;     ///< s, the safe arm's flow value
    CostDistribution costs = CostDistribution::uniform(1.0);
    /// When set, the reporting-cost cap is treated as non-binding even though
    /// the sufficient condition below fails; every solve then verifies after
    /// the fact that no bonus actually reached the cap.
    bool assume_cbar_large = false;

    /// Good-news flow value g = lambda z.
    double g() const { return arrival_rate * lump_value; }

    /**
     * @brief Whether the cap-free solver applies.
     *
     * The sufficient condition is cbar > (lambda/r + 1)(g - s); it is not
     * necessary, so configurations may instead declare the cap non-binding
     * via assume_cbar_large. When false the immediate-revelation solver must
     * be used.
     */
    bool ir_admissible() const {
        return assume_cbar_large ||
               costs.cbar() > (arrival_rate / discount_rate + 1.0) * (g() - safe_flow);
    }

    /// Fails fast naming the violated assumption.
    void validate() const {
        if (!(discount_rate > 0.0)) throw InvariantError("continuous model: r > 0 violated");
        if (!(arrival_rate > 0.0)) throw InvariantError("continuous model: lambda > 0 violated");
        if (!(lump_value > 0.0)) throw InvariantError("continuous model: z > 0 violated");
        if (!(g() > safe_flow && safe_flow > 0.0))
            throw InvariantError("continuous model: g == lambda z > s > 0 violated");
    }
};

/// Gridded value function with per-point bonus and regime label.
struct ValueCurve {
    std::vector<double> alphas;
    std::vector<double> values;
    std::vector<double> bonuses;
    std::vector<Strategy> regions;

    std::size_t size() const { return alphas.size(); }
    void push(double a, double v, double b, Strategy s) {
        alphas.push_back(a);
        values.push_back(v);
        bonuses.push_back(b);
        regions.push_back(s);
    }
};

struct PolicyPoint {
    Strategy strategy = Strategy::SA;
    double bonus = 0.0;
    double value = 0.0;
};

/**
 * @brief Solved policy: switching cutoffs, the dense marched branches, and a
 *        display curve on the uniform storage grid.
 */
struct PolicyMap {
    ContinuousModel model;
    double alpha_sa_pc = 0.0;
    double alpha_pc_fc = 0.0;
    double alpha_fc_nb = 0.0;
    /// Secondary detector for the FC->NB boundary (value-slope tangency with
    /// the non-bonus line); coincides with the intersection form analytically.
    double alpha_fc_nb_tangent = 0.0;
    /// Present only when the small-cap solver ran; equal to alpha_pc_fc when
    /// the cap turned out not to bind.
    std::optional<double> alpha_pc_ir;
    std::optional<double> alpha_ir_fc;
    ValueCurve pc;    ///< dense partial-coverage branch (starts at alpha_sa_pc)
    ValueCurve ir;    ///< dense capped branch (empty unless the cap binds)
    ValueCurve fc;    ///< dense full-coverage branch (ends at alpha_fc_nb)
    ValueCurve curve; ///< display curve on the uniform storage grid
};

/// Belief below which only the safe arm is sold: r s / (lambda (g - s) + r g).
inline double cutoff_sa_pc(const ContinuousModel& m) {
    return m.discount_rate * m.safe_flow /
           (m.arrival_rate * (m.g() - m.safe_flow) + m.discount_rate * m.g());
}

/// Partial-to-full coverage switch at the myopic-indifference belief s / (lambda z).
inline double cutoff_pc_fc(const ContinuousModel& m) { return m.safe_flow / m.g(); }

/**
 * @brief Stopping benchmark for a seller restricted to the always-report arm
 *        (bonus pinned at the cost cap): r (cbar + s) / (lambda (g - s) + r g).
 *
 * Smooth pasting of that arm's value against the safe annuity s / r gives
 * cbar + s = alpha (lambda (g - s) + r g) / r, the capped analogue of
 * cutoff_sa_pc (whose numerator lacks the cbar bonus outflow).  This is a
 * standalone benchmark, not a boundary of the solved policy map: the
 * unrestricted seller enters partial coverage at the lower cutoff_sa_pc.
 */
inline double cutoff_sa_ir(const ContinuousModel& m) {
    return m.discount_rate * (m.costs.cbar() + m.safe_flow) /
           (m.arrival_rate * (m.g() - m.safe_flow) + m.discount_rate * m.g());
}

namespace detail {

constexpr double kLaunchOffset = 1e-6;  ///< pasting-launch offset above a boundary
constexpr double kCutoffTol = 1e-10;    ///< bisection tolerance for detected cutoffs
constexpr double kGridUpperBound = 0.999;
constexpr double kGridLowerMargin = 0.05;

template <class Rhs>
double rk4_step(const Rhs& rhs, double a0, double v0, double a1) {
    const double h = a1 - a0;
    const double k1 = rhs(a0, v0);
    const double k2 = rhs(a0 + 0.5 * h, v0 + 0.5 * h * k1);
    const double k3 = rhs(a0 + 0.5 * h, v0 + 0.5 * h * k2);
    const double k4 = rhs(a1, v0 + h * k3);
    return v0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Node sequence from start to end with nominal step h, landing exactly on any
/// requested interior points (used to hit the display grid without interpolation).
/// When @p ramp_lower is finite the step is additionally capped at
/// ramp_fraction times the distance to that boundary: near a smooth-pasting
/// launch the recovered control behaves like sqrt(alpha - boundary), and
/// full-size stages would overshoot below the branch. @p ramp_upper does the
/// same approaching a stiff upper boundary (the surplus recursion relaxes onto
/// the no-bonus line there).
inline std::vector<double> march_nodes(double start, double end, double h,
                                       const std::vector<double>& landings,
                                       double ramp_lower = std::nan(""),
                                       double ramp_upper = std::nan(""),
                                       double ramp_fraction = 0.5) {
    std::vector<double> nodes{start};
    std::size_t li = 0;
    double a = start;
    while (end - a > 1e-12) {
        while (li < landings.size() && landings[li] <= a + 1e-12) ++li;
        double step = h;
        if (std::isfinite(ramp_lower))
            step = std::min(step, std::max(ramp_fraction * (a - ramp_lower), 0.5 * kLaunchOffset));
        if (std::isfinite(ramp_upper))
            step = std::min(step, std::max(ramp_fraction * (ramp_upper - a), 0.5 * kLaunchOffset));
        double next = std::min(a + step, end);
        if (li < landings.size() && landings[li] < next) next = landings[li];
        if (end - next < 1e-12) next = end;
        nodes.push_back(next);
        a = next;
    }
    return nodes;
}

/**
 * @brief Stable launch-ramp fraction for a square-root pasting branch.
 *
 * Near a smooth-pasting boundary the state obeys y' = r [kappa sqrt(y) - q x
 * + ...] / D0 with x the distance from the boundary, so the branch leaves as
 * y = sigma^2 x^2 with 2 |D0| sigma^2 + r kappa sigma - r q = 0.  The local
 * Jacobian r kappa / (2 sqrt(y)) / |D0| then scales like 1/x, and explicit
 * fourth-order stages of size phi*x stay damped only while
 * phi r kappa / (2 sigma |D0|) remains well inside the stability interval;
 * the fraction is chosen to hold that product at 0.7 (capped at the default
 * one-half, floored to keep node counts bounded).
 */
inline double pasting_ramp_fraction(double r, double kappa, double q, double d0_abs) {
    if (!(kappa > 0.0) || !(q > 0.0) || !(d0_abs > 0.0)) return 0.5;
    const double sigma =
        (-r * kappa + std::sqrt(r * r * kappa * kappa + 8.0 * d0_abs * r * q)) / (4.0 * d0_abs);
    if (!(sigma > 0.0)) return 0.5;
    return std::clamp(1.4 * sigma * d0_abs / (r * kappa), 0.02, 0.5);
}

/**
 * @brief Bisects a monitor's sign change inside one marching interval.
 *
 * State is re-integrated from the anchor (a0, v0) with a single fourth-order
 * step per probe; over intervals no wider than the marching step that is far
 * more accurate than the cutoff tolerance.
 */
template <class Rhs, class Mon>
std::pair<double, double> refine_zero(const Rhs& rhs, const Mon& mon, double a0, double v0,
                                      double a1, double tol_alpha = kCutoffTol) {
    double lo = a0, hi = a1;
    double flo = mon(a0, v0);
    for (int i = 0; i < 80 && (hi - lo) > tol_alpha; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double vmid = rk4_step(rhs, a0, v0, mid);
        const double fm = mon(mid, vmid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    const double a = 0.5 * (lo + hi);
    return {a, rk4_step(rhs, a0, v0, a)};
}

/// Saturating information-rent inversion: negative rents clamp to b = 0 and
/// rents at/above the cap's rent clamp to b = cbar (transient overshoots only).
inline double bonus_from_rent(const CostDistribution& costs, double rent, double rent_cap) {
    if (rent <= 0.0) return 0.0;
    if (rent >= rent_cap) return costs.cbar();
    return costs.info_rent_inverse(rent);
}

struct PcMarch {
    ValueCurve seg;
    bool cap_crossed = false;
    double cap_alpha = 0.0;
    double cap_value = 0.0;
};

/**
 * @brief Marches the PC-ODE from the stopping boundary up to @p end_alpha.
 *
 * With @p stop_at_cap the march halts where the recovered bonus reaches cbar
 * (returning the crossing); otherwise breaching the cap is a hard error since
 * the cap-free solver's premise is then wrong.
 */
inline PcMarch march_pc(const ContinuousModel& m, double grid_step, double end_alpha,
                        const std::vector<double>& landings, bool stop_at_cap) {
    const double r = m.discount_rate, lam = m.arrival_rate, z = m.lump_value, s = m.safe_flow;
    const double a2 = cutoff_sa_pc(m);
    const double rent_cap = m.costs.info_rent(m.costs.cbar());
    // Stage states may dip a hair below the branch near the pasting launch
    // (the rent is quadratic in alpha - a2 there); clamp those, but treat a
    // material drop as divergence.
    const double drift_tol = 1e-7 * std::max(1.0, std::abs(s));
    const auto rhs = [&](double alpha, double u) -> double {
        const double y = r * u - s;
        if (y < -drift_tol)
            throw SolverError("partial-coverage march drifted below the pasting branch (r U < s)");
        const double b = bonus_from_rent(m.costs, std::max(y, 0.0), rent_cap);
        return (m.costs.virtual_value(b) - lam * alpha * z + s - alpha * lam * lam * z / r +
                lam * alpha * u) /
               ((alpha * alpha - alpha) * lam);
    };
    const auto cap_monitor = [&](double, double u) { return (r * u - s) - rent_cap; };

    PcMarch out;
    out.seg.push(a2, s / r, 0.0, Strategy::PC);
    // Launch-series data: near a2 the recovered bonus behaves like
    // beta(b) ~ 2 sqrt(y / h(0)), so kappa = 2 / sqrt(h(0)).
    const double h0 = m.costs.pdf(0.0);
    const double ramp = pasting_ramp_fraction(
        r, h0 > 0.0 ? 2.0 / std::sqrt(h0) : 0.0,
        lam * (z * (r + lam) - s) / r, (a2 - a2 * a2) * lam);
    const std::vector<double> nodes =
        march_nodes(a2 + kLaunchOffset, end_alpha, grid_step, landings, a2, std::nan(""), ramp);
    double a = nodes.front();
    double u = s / r; // pasting launch: boundary value, zero derivative
    out.seg.push(a, u, 0.0, Strategy::PC);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double next = nodes[i];
        const double u_next = rk4_step(rhs, a, u, next);
        const double y = r * u_next - s;
        if (y >= rent_cap) {
            if (!stop_at_cap)
                throw SolverError(
                    "reporting-bonus cap reached on the partial-coverage branch: the premise "
                    "'cap never binds' (large cbar) is violated for this configuration");
            const auto [ac, uc] = refine_zero(rhs, cap_monitor, a, u, next);
            out.seg.push(ac, uc, m.costs.cbar(), Strategy::PC);
            out.cap_crossed = true;
            out.cap_alpha = ac;
            out.cap_value = uc;
            return out;
        }
        out.seg.push(next, u_next, bonus_from_rent(m.costs, std::max(y, 0.0), rent_cap),
                     Strategy::PC);
        a = next;
        u = u_next;
    }
    return out;
}

struct FcMarch {
    ValueCurve seg;
    double alpha_nb = 0.0;         ///< intersection detector: first r V = alpha lambda z
    double alpha_nb_tangent = 0.0; ///< tangency detector: V' = lambda z / r
    double value_at_nb = 0.0;
};

/**
 * @brief Marches the FC-ODE upward from (a_start, v_start) until the non-bonus
 *        boundary, detected both as the first sign change of r V - alpha
 *        lambda z (bracketed and bisected to 1e-10) and as the value-slope
 *        tangency V' = lambda z / r just beyond it.
 */
inline FcMarch march_fc(const ContinuousModel& m, double a_start, double v_start, double grid_step,
                        const std::vector<double>& landings) {
    const double r = m.discount_rate, lam = m.arrival_rate, z = m.lump_value;
    const double rent_cap = m.costs.info_rent(m.costs.cbar());
    const auto rhs = [&](double alpha, double v) -> double {
        const double y = r * v - alpha * lam * z;
        const double b = bonus_from_rent(m.costs, std::max(y, 0.0), rent_cap);
        return (m.costs.virtual_value(b) + lam * alpha * v - alpha * lam * lam * z / r) /
               ((alpha * alpha - alpha) * lam);
    };
    const auto nb_monitor = [&](double alpha, double v) { return r * v - alpha * lam * z; };
    const auto tangent_monitor = [&](double alpha, double v) { return rhs(alpha, v) - lam * z / r; };

    FcMarch out;
    const std::vector<double> nodes =
        march_nodes(a_start, kGridUpperBound, grid_step, landings);
    double a = nodes.front();
    double v = v_start;
    out.seg.push(a, v, bonus_from_rent(m.costs, std::max(r * v - a * lam * z, 0.0), rent_cap),
                 Strategy::FC);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double next = nodes[i];
        const double v_next = rk4_step(rhs, a, v, next);
        if (nb_monitor(next, v_next) <= 0.0) {
            const auto [ac, vc] = refine_zero(rhs, nb_monitor, a, v, next);
            out.alpha_nb = ac;
            out.value_at_nb = vc;
            out.seg.push(ac, vc, 0.0, Strategy::FC);
            // Tangency form: V' crosses lambda z / r at the same point; bracket
            // it by continuing a few clamped steps past the intersection.
            double ta = a, tv = v;
            double probe = ac;
            double pv = vc;
            int guard = 0;
            while (tangent_monitor(probe, pv) <= 0.0 && guard++ < 64) {
                ta = probe;
                tv = pv;
                probe = std::min(probe + grid_step, 1.0 - 1e-9);
                pv = rk4_step(rhs, ta, tv, probe);
            }
            if (guard >= 64) {
                out.alpha_nb_tangent = ac; // detectors coincide analytically
            } else {
                out.alpha_nb_tangent = refine_zero(rhs, tangent_monitor, ta, tv, probe).first;
            }
            return out;
        }
        out.seg.push(next, v_next,
                     bonus_from_rent(m.costs, std::max(r * v_next - next * lam * z, 0.0), rent_cap),
                     Strategy::FC);
        a = next;
        v = v_next;
    }
    throw SolverError(
        "full-coverage march did not reach the non-bonus boundary before alpha = 0.999");
}

struct IrMarch {
    ValueCurve seg;
    bool uncapped = false;
    double exit_alpha = 0.0;
    double exit_value = 0.0;
};

/**
 * @brief Marches the capped-bonus branch (bonus pinned at cbar, certain
 *        reporting) from the PC-side cap crossing until the full-coverage
 *        first-order condition re-enters the support.
 */
inline IrMarch march_ir(const ContinuousModel& m, double a_start, double y_start, double grid_step,
                        const std::vector<double>& landings) {
    const double r = m.discount_rate, lam = m.arrival_rate, z = m.lump_value;
    const double cbar = m.costs.cbar();
    const double rent_cap = m.costs.info_rent(cbar);
    const auto rhs = [&](double alpha, double y) -> double {
        return (r * y - lam * alpha * z * (1.0 + lam / r) + cbar + alpha * lam * y) /
               ((alpha * alpha - alpha) * lam);
    };
    // The unclamped FC bonus re-enters [0, cbar] where r Y - alpha lambda z
    // falls back to the cap's information rent.
    const auto exit_monitor = [&](double alpha, double y) {
        return (r * y - alpha * lam * z) - rent_cap;
    };

    IrMarch out;
    const std::vector<double> nodes =
        march_nodes(a_start, kGridUpperBound, grid_step, landings);
    double a = nodes.front();
    double y = y_start;
    out.seg.push(a, y, cbar, Strategy::IR);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double next = nodes[i];
        const double y_next = rk4_step(rhs, a, y, next);
        if (exit_monitor(next, y_next) <= 0.0) {
            const auto [ac, yc] = refine_zero(rhs, exit_monitor, a, y, next);
            out.seg.push(ac, yc, cbar, Strategy::IR);
            out.uncapped = true;
            out.exit_alpha = ac;
            out.exit_value = yc;
            return out;
        }
        out.seg.push(next, y_next, cbar, Strategy::IR);
        a = next;
        y = y_next;
    }
    throw SolverError("capped-bonus branch never released the cap before alpha = 0.999");
}

/// Exact-node lookup (falling back to linear interpolation) in a dense branch.
inline std::pair<double, double> branch_lookup(const ValueCurve& seg, double alpha) {
    const auto& xs = seg.alphas;
    if (alpha <= xs.front()) return {seg.values.front(), seg.bonuses.front()};
    if (alpha >= xs.back()) return {seg.values.back(), seg.bonuses.back()};
    const auto it = std::lower_bound(xs.begin(), xs.end(), alpha);
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    if (std::abs(xs[j] - alpha) <= 1e-9) return {seg.values[j], seg.bonuses[j]};
    const std::size_t i = j - 1;
    const double t = (alpha - xs[i]) / (xs[j] - xs[i]);
    return {seg.values[i] + t * (seg.values[j] - seg.values[i]),
            seg.bonuses[i] + t * (seg.bonuses[j] - seg.bonuses[i])};
}

/// Builds the display curve on the uniform storage grid from the dense branches.
inline void assemble_display(PolicyMap& map, std::size_t display_points) {
    const ContinuousModel& m = map.model;
    const double lo = std::max(map.alpha_sa_pc - kGridLowerMargin, 1e-6);
    const std::vector<double> grid = num::linspace(lo, kGridUpperBound, display_points);
    const double s_over_r = m.safe_flow / m.discount_rate;
    const double g_over_r = m.g() / m.discount_rate;
    for (const double a : grid) {
        if (a <= map.alpha_sa_pc) {
            map.curve.push(a, s_over_r, 0.0, Strategy::SA);
        } else if (a >= map.alpha_fc_nb) {
            map.curve.push(a, a * g_over_r, 0.0, Strategy::NB);
        } else if (map.alpha_pc_ir && a > *map.alpha_pc_ir && a < *map.alpha_ir_fc) {
            const auto [v, b] = branch_lookup(map.ir, a);
            map.curve.push(a, v, b, Strategy::IR);
        } else if (a <= (map.alpha_pc_ir ? *map.alpha_pc_ir : map.alpha_pc_fc)) {
            const auto [v, b] = branch_lookup(map.pc, a);
            map.curve.push(a, v, b, Strategy::PC);
        } else {
            const auto [v, b] = branch_lookup(map.fc, a);
            map.curve.push(a, v, b, Strategy::FC);
        }
    }
}

/// Display-grid landing points so the marchers hit storage nodes exactly.
inline std::vector<double> display_landings(const ContinuousModel& m, std::size_t display_points) {
    const double lo = std::max(cutoff_sa_pc(m) - kGridLowerMargin, 1e-6);
    return num::linspace(lo, kGridUpperBound, display_points);
}

} // namespace detail

/**
 * @brief Solves the partial-coverage value ODE on [alpha_sa_pc, alpha_pc_fc].
 *
 * The left endpoint carries the smooth-pasting values U = s/r, b = 0; bonuses
 * increase along the segment.
 */
inline ValueCurve solve_pc_curve(const ContinuousModel& m, double grid_step) {
    m.validate();
    if (!(grid_step > 0.0)) throw InvariantError("solve_pc_curve: grid_step > 0 violated");
    const double a2 = cutoff_sa_pc(m);
    if (a2 <= 0.0 || a2 >= 1.0)
        throw SolverError("solve_pc_curve: stopping boundary degenerate at the belief-space edge");
    return detail::march_pc(m, grid_step, cutoff_pc_fc(m), {}, false).seg;
}

struct FcCurve {
    ValueCurve curve;
    double alpha_fc_nb = 0.0;
    double alpha_fc_nb_tangent = 0.0;
};

/**
 * @brief Solves the full-coverage value ODE from the coverage switch upward.
 *
 * @p u_at_switch is the partial-coverage value at alpha_pc_fc (smooth
 * pasting); the march terminates at the first alpha with r V = alpha lambda z
 * and also reports the tangency-form detection of the same boundary.
 */
inline FcCurve solve_fc_curve(const ContinuousModel& m, double u_at_switch, double grid_step) {
    m.validate();
    if (!(grid_step > 0.0)) throw InvariantError("solve_fc_curve: grid_step > 0 violated");
    detail::FcMarch fc = detail::march_fc(m, cutoff_pc_fc(m), u_at_switch, grid_step, {});
    return {std::move(fc.seg), fc.alpha_nb, fc.alpha_nb_tangent};
}

struct NaiveBoundary {
    double alpha1 = 0.0;
    double b1 = 0.0;
};

/**
 * @brief Stopping boundary of the naive full-coverage-only monopolist.
 *
 * Solves the smooth-pasting system beta(b1) = alpha1 lambda (lambda z - s)/r,
 * s = alpha1 z lambda + H^2(b1)/h(b1) by nested bisection; b1 is eliminated
 * through the information-rent inverse on the outer bracket.
 */
inline NaiveBoundary naive_fc_boundary(const ContinuousModel& m) {
    m.validate();
    const double r = m.discount_rate, lam = m.arrival_rate, z = m.lump_value, s = m.safe_flow;
    const double rent_cap = m.costs.info_rent(m.costs.cbar());
    // The rent identity pins b(alpha) only where s - alpha g fits under the
    // cap; at the bracket edge the rent equals the cap only up to roundoff,
    // so the inversion argument is clamped into the invertible range.
    double lo = (s > rent_cap) ? (s - rent_cap) / m.g() : 1e-12;
    double hi = cutoff_pc_fc(m) - 1e-12;
    const auto b_of = [&](double alpha) {
        const double rent = std::clamp(s - alpha * m.g(), 0.0, rent_cap);
        return m.costs.info_rent_inverse(rent);
    };
    const auto f = [&](double alpha) {
        return m.costs.virtual_value(b_of(alpha)) - alpha * lam * (lam * z - s) / r;
    };
    if (!(lo < hi) || f(lo) * f(hi) > 0.0)
        throw SolverError("naive full-coverage boundary: no root in (0, 1) x (0, cbar)");
    NaiveBoundary out;
    out.alpha1 = num::bisect(f, lo, hi, 1e-13);
    out.b1 = b_of(out.alpha1);
    return out;
}

/**
 * @brief Value curve of the naive full-coverage-only benchmark: s/r below its
 *        own stopping boundary, the FC-ODE solution above it.
 */
inline FcCurve solve_naive_fc_curve(const ContinuousModel& m, double grid_step) {
    const NaiveBoundary nb = naive_fc_boundary(m);
    detail::FcMarch fc = detail::march_fc(m, nb.alpha1 + detail::kLaunchOffset,
                                          m.safe_flow / m.discount_rate, grid_step, {});
    return {std::move(fc.seg), fc.alpha_nb, fc.alpha_nb_tangent};
}

/**
 * @brief Value curve of the naive partial-coverage-only benchmark: the PC-ODE
 *        continued past the coverage switch until the bonus cap binds (or the
 *        grid upper bound is reached).
 */
inline ValueCurve solve_naive_pc_curve(const ContinuousModel& m, double grid_step) {
    m.validate();
    return detail::march_pc(m, grid_step, detail::kGridUpperBound, {}, true).seg;
}

/**
 * @brief Full cap-free solve: composes the stopping boundary, the PC and FC
 *        marches, and the analytic SA/NB tails into a PolicyMap.
 */
inline PolicyMap solve_policy(const ContinuousModel& m, double grid_step,
                              std::size_t display_points = 2001) {
    m.validate();
    if (!(grid_step > 0.0)) throw InvariantError("solve_policy: grid_step > 0 violated");
    if (display_points < 2) throw InvariantError("solve_policy: display grid needs >= 2 points");
    if (!m.ir_admissible())
        throw InvariantError(
            "solve_policy: cap condition cbar > (lambda/r + 1)(g - s) violated and not "
            "overridden; use the immediate-revelation solver");
    PolicyMap map;
    map.model = m;
    map.alpha_sa_pc = cutoff_sa_pc(m);
    map.alpha_pc_fc = cutoff_pc_fc(m);
    const std::vector<double> landings = detail::display_landings(m, display_points);

    detail::PcMarch pc = detail::march_pc(m, grid_step, map.alpha_pc_fc, landings, false);
    map.pc = std::move(pc.seg);
    detail::FcMarch fc =
        detail::march_fc(m, map.pc.alphas.back(), map.pc.values.back(), grid_step, landings);
    map.fc = std::move(fc.seg);
    map.alpha_fc_nb = fc.alpha_nb;
    map.alpha_fc_nb_tangent = fc.alpha_nb_tangent;
    detail::assemble_display(map, display_points);
    return map;
}

/**
 * @brief Small-cap solve: inserts the capped (immediate-revelation) branch
 *        between partial and full coverage.
 *
 * The cap crossings alpha_pc_ir / alpha_ir_fc are located where the unclamped
 * first-order-condition bonus leaves and re-enters [0, cbar]; between them the
 * bonus is pinned at cbar. If the cap never binds the result degenerates to
 * the cap-free composition with both crossings collapsed onto alpha_pc_fc.
 */
inline PolicyMap solve_policy_with_ir(const ContinuousModel& m, double grid_step,
                                      std::size_t display_points = 2001) {
    m.validate();
    if (!(grid_step > 0.0)) throw InvariantError("solve_policy_with_ir: grid_step > 0 violated");
    if (m.ir_admissible())
        throw InvariantError(
            "solve_policy_with_ir: the cap-free regime applies (cbar large); use solve_policy");
    PolicyMap map;
    map.model = m;
    map.alpha_sa_pc = cutoff_sa_pc(m);
    map.alpha_pc_fc = cutoff_pc_fc(m);
    const std::vector<double> landings = detail::display_landings(m, display_points);

    detail::PcMarch pc = detail::march_pc(m, grid_step, map.alpha_pc_fc, landings, true);
    map.pc = std::move(pc.seg);
    double fc_start_alpha, fc_start_value;
    if (pc.cap_crossed) {
        map.alpha_pc_ir = pc.cap_alpha;
        detail::IrMarch ir = detail::march_ir(m, pc.cap_alpha, pc.cap_value, grid_step, landings);
        map.ir = std::move(ir.seg);
        map.alpha_ir_fc = ir.exit_alpha;
        fc_start_alpha = ir.exit_alpha;
        fc_start_value = ir.exit_value;
    } else {
        // Cap never binds: degenerate to the cap-free composition.
        map.alpha_pc_ir = map.alpha_pc_fc;
        map.alpha_ir_fc = map.alpha_pc_fc;
        fc_start_alpha = map.pc.alphas.back();
        fc_start_value = map.pc.values.back();
    }
    detail::FcMarch fc = detail::march_fc(m, fc_start_alpha, fc_start_value, grid_step, landings);
    map.fc = std::move(fc.seg);
    // In the small-cap regime the boundary is characterized by the tangency
    // V' = lambda z / r; the intersection detector is kept alongside.
    map.alpha_fc_nb = fc.alpha_nb_tangent;
    map.alpha_fc_nb_tangent = fc.alpha_nb_tangent;
    if (fc.alpha_nb > map.alpha_fc_nb) map.alpha_fc_nb = fc.alpha_nb;
    detail::assemble_display(map, display_points);
    return map;
}

/// Dispatches to the cap-free or small-cap solver based on the model's flag.
inline PolicyMap solve_policy_auto(const ContinuousModel& m, double grid_step,
                                   std::size_t display_points = 2001) {
    return m.ir_admissible() ? solve_policy(m, grid_step, display_points)
                             : solve_policy_with_ir(m, grid_step, display_points);
}

/**
 * @brief Policy lookup at a belief: regime label by cutoff comparison, bonus
 *        and value interpolated on the dense branches; bonus is exactly zero
 *        in SA and NB where the closed-form values apply.
 */
inline PolicyPoint policy_at(const PolicyMap& map, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("policy_at: belief must lie in (0, 1)");
    const ContinuousModel& m = map.model;
    if (alpha <= map.alpha_sa_pc)
        return {Strategy::SA, 0.0, m.safe_flow / m.discount_rate};
    if (alpha >= map.alpha_fc_nb)
        return {Strategy::NB, 0.0, alpha * m.g() / m.discount_rate};
    if (map.alpha_pc_ir && alpha > *map.alpha_pc_ir && alpha < *map.alpha_ir_fc) {
        const auto [v, b] = detail::branch_lookup(map.ir, alpha);
        return {Strategy::IR, b, v};
    }
    if (alpha <= (map.alpha_pc_ir ? *map.alpha_pc_ir : map.alpha_pc_fc)) {
        const auto [v, b] = detail::branch_lookup(map.pc, alpha);
        return {Strategy::PC, b, v};
    }
    const auto [v, b] = detail::branch_lookup(map.fc, alpha);
    return {Strategy::FC, b, v};
}

} // namespace bb
