/**
 * @file planner.hpp
 * @brief Social planner's mechanism benchmark and the welfare comparison.
 *
 * The planner chooses an allocation p, a reporting requirement q, and a flow
 * transfer t per arriving consumer; screening reduces to two reporting-cost
 * cutoffs. With B(alpha) = alpha lambda^2 z / r + (alpha^2 - alpha) lambda W'
 * - lambda alpha W (the planner's marginal value of a report):
 *
 *   PC region:  lambda C1 = lambda z alpha - s + B(alpha),
 *               r W - s = integral_0^C1 lambda (C1 - c) dH(c)
 *   FC region:  lambda C2 = B(alpha),
 *               r W - lambda z alpha = integral_0^C2 lambda (C2 - c) dH(c)
 *
 * Substituting B back turns each identity into a first-order ODE for W with
 * the cutoff recovered by inverting the integral (closed form under the
 * uniform law, bisection otherwise), structurally the twin of the
 * monopolist's ODEs with lambda C in place of the virtual value. The planner
 * stops at the same belief as the partial-coverage monopolist and switches
 * coverage at the same myopic belief; only the upper boundary (C2 = 0)
 * differs, landing strictly above the monopolist's.
 *
 * Also here: the social surplus Lambda generated under the monopolist's
 * (non-optimized) policy, and the three-way comparison W >= Lambda >= Pi.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bandit_bonus/continuous.hpp"
#include "bandit_bonus/cost_model.hpp"
#include "bandit_bonus/errors.hpp"
#include "bandit_bonus/strategy.hpp"

namespace bb {

/**
 * @brief Planner solution: W with the reporting cutoffs C1/C2 stored in the
 *        curves' bonus column, and the planner's switching beliefs.
 */
struct PlannerSolution {
    ContinuousModel model;
    double alpha_sa_pc = 0.0; ///< equals the monopolist's stopping belief
    double alpha_pc_fc = 0.0; ///< equals the myopic coverage switch s / (lambda z)
    double alpha_fc_nb = 0.0; ///< C2 = 0 boundary, above the monopolist's
    ValueCurve pc;    ///< dense W on the partial-coverage region; bonus column = C1
    ValueCurve fc;    ///< dense W on the full-coverage region; bonus column = C2
    ValueCurve curve; ///< display curve; bonus column = active cutoff C(alpha)
};

/// One row of the planner's allocation/reporting/transfer table.
struct MechanismRule {
    int p = 0;                  ///< risky-arm allocation (0/1)
    std::optional<int> q;       ///< reporting requirement; empty when p = 0
    double t = 0.0;             ///< flow transfer charged to the consumer
};

namespace detail {

/// Expected report subsidy Phi(C) = integral_0^C lambda (C - c) dH(c),
/// extended past the support by Phi(C) = lambda (C - mean_c) for C >= cbar.
inline double report_subsidy(const CostDistribution& costs, double lam, double cutoff) {
    if (cutoff <= 0.0) return 0.0;
    const double cbar = costs.cbar();
    if (cutoff >= cbar) return lam * (cutoff - costs.truncated_cost_mass(cbar));
    if (costs.kind() == CostDistribution::Kind::UniformOnZeroToCbar)
        return lam * cutoff * cutoff / (2.0 * cbar);
    return lam * (cutoff * costs.cdf(cutoff) - costs.truncated_cost_mass(cutoff));
}

/// Inverts the subsidy integral for the cutoff; exact beyond the support.
inline double report_subsidy_inverse(const CostDistribution& costs, double lam, double y) {
    if (y <= 0.0) return 0.0;
    const double cbar = costs.cbar();
    const double mean = costs.truncated_cost_mass(cbar);
    if (y >= lam * (cbar - mean)) return y / lam + mean;
    if (costs.kind() == CostDistribution::Kind::UniformOnZeroToCbar)
        return std::sqrt(2.0 * y * cbar / lam);
    const auto f = [&](double c) { return report_subsidy(costs, lam, c) - y; };
    return num::bisect(f, 0.0, cbar, 1e-12);
}

} // namespace detail

/**
 * @brief Solves the planner's W by upward marching from the shared stopping
 *        belief, switching identities at the myopic belief and terminating
 *        where the full-coverage cutoff C2 reaches zero.
 */
inline PlannerSolution solve_planner(const ContinuousModel& m, double grid_step,
                                     std::size_t display_points = 2001) {
    m.validate();
    if (!(grid_step > 0.0)) throw InvariantError("solve_planner: grid_step > 0 violated");
    const double r = m.discount_rate, lam = m.arrival_rate, z = m.lump_value, s = m.safe_flow;
    PlannerSolution sol;
    sol.model = m;
    sol.alpha_sa_pc = cutoff_sa_pc(m);
    sol.alpha_pc_fc = cutoff_pc_fc(m);
    const std::vector<double> landings = detail::display_landings(m, display_points);
    const double drift_tol = 1e-7 * std::max(1.0, std::abs(s));

    // Partial-coverage region: pasting launch W = s/r, W' = 0 at the shared
    // stopping belief; same ramped nodes as the monopolist's branch.
    const auto rhs_pc = [&](double alpha, double w) -> double {
        const double y = r * w - s;
        if (y < -drift_tol)
            throw SolverError("planner march drifted below the pasting branch (r W < s)");
        const double c1 = detail::report_subsidy_inverse(m.costs, lam, std::max(y, 0.0));
        return (lam * c1 - lam * alpha * z + s - alpha * lam * lam * z / r + lam * alpha * w) /
               ((alpha * alpha - alpha) * lam);
    };
    sol.pc.push(sol.alpha_sa_pc, s / r, 0.0, Strategy::PC);
    {
        // Launch-series data: near the shared stopping belief the subsidy term
        // behaves like lambda C1 ~ sqrt(2 lambda y / h(0)).
        const double a2 = sol.alpha_sa_pc;
        const double h0 = m.costs.pdf(0.0);
        const double ramp = detail::pasting_ramp_fraction(
            r, h0 > 0.0 ? std::sqrt(2.0 * lam / h0) : 0.0,
            lam * (z * (r + lam) - s) / r, (a2 - a2 * a2) * lam);
        const std::vector<double> nodes =
            detail::march_nodes(sol.alpha_sa_pc + detail::kLaunchOffset, sol.alpha_pc_fc,
                                grid_step, landings, sol.alpha_sa_pc, std::nan(""), ramp);
        double a = nodes.front();
        double w = s / r;
        sol.pc.push(a, w, 0.0, Strategy::PC);
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            const double next = nodes[i];
            w = detail::rk4_step(rhs_pc, a, w, next);
            a = next;
            sol.pc.push(a, w,
                        detail::report_subsidy_inverse(m.costs, lam, std::max(r * w - s, 0.0)),
                        Strategy::PC);
        }
    }

    // Full-coverage region: value continuity at the myopic switch (the cutoff
    // identity is continuous there: lambda C1 - lambda C2 = lambda z alpha - s
    // vanishes at alpha = s / (lambda z)); terminate where r W = lambda z alpha.
    const auto rhs_fc = [&](double alpha, double w) -> double {
        const double y = r * w - alpha * lam * z;
        const double c2 = detail::report_subsidy_inverse(m.costs, lam, std::max(y, 0.0));
        return (lam * c2 + lam * alpha * w - alpha * lam * lam * z / r) /
               ((alpha * alpha - alpha) * lam);
    };
    const auto nb_monitor = [&](double alpha, double w) { return r * w - alpha * lam * z; };
    {
        const std::vector<double> nodes = detail::march_nodes(
            sol.pc.alphas.back(), detail::kGridUpperBound, grid_step, landings);
        double a = nodes.front();
        double w = sol.pc.values.back();
        sol.fc.push(a, w,
                    detail::report_subsidy_inverse(m.costs, lam, std::max(r * w - a * lam * z, 0.0)),
                    Strategy::FC);
        bool terminated = false;
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            const double next = nodes[i];
            const double w_next = detail::rk4_step(rhs_fc, a, w, next);
            if (nb_monitor(next, w_next) <= 0.0) {
                const auto [ac, wc] = detail::refine_zero(rhs_fc, nb_monitor, a, w, next);
                sol.fc.push(ac, wc, 0.0, Strategy::FC);
                sol.alpha_fc_nb = ac;
                terminated = true;
                break;
            }
            a = next;
            w = w_next;
            sol.fc.push(a, w,
                        detail::report_subsidy_inverse(m.costs, lam,
                                                       std::max(r * w - a * lam * z, 0.0)),
                        Strategy::FC);
        }
        if (!terminated)
            throw SolverError(
                "planner march did not reach the no-experimentation boundary before alpha = 0.999");
    }

    // Display curve: closed-form tails, dense-branch nodes in between.
    const double lo = std::max(sol.alpha_sa_pc - detail::kGridLowerMargin, 1e-6);
    for (const double a : num::linspace(lo, detail::kGridUpperBound, display_points)) {
        if (a <= sol.alpha_sa_pc) {
            sol.curve.push(a, s / r, 0.0, Strategy::SA);
        } else if (a >= sol.alpha_fc_nb) {
            sol.curve.push(a, a * m.g() / r, 0.0, Strategy::NB);
        } else if (a <= sol.alpha_pc_fc) {
            const auto [w, c1] = detail::branch_lookup(sol.pc, a);
            sol.curve.push(a, w, c1, Strategy::PC);
        } else {
            const auto [w, c2] = detail::branch_lookup(sol.fc, a);
            sol.curve.push(a, w, c2, Strategy::FC);
        }
    }
    return sol;
}

/**
 * @brief Table row of the planner's mechanism at a (belief, reported cost).
 *
 * On the full-coverage region the low-cost band reports with transfer
 * alpha z lambda - lambda C2, the middle band consumes without reporting at
 * the full price, and the top band (when C1 < cbar) is allocated the safe arm
 * at transfer s; the partial-coverage region collapses the middle band. Above
 * the planner's no-experimentation boundary everyone consumes the risky arm
 * unconditionally; below the stopping belief everyone gets the safe arm.
 */
inline MechanismRule mechanism_at(const PlannerSolution& sol, double alpha, double c) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("mechanism_at: belief must lie in (0, 1)");
    if (!(c >= 0.0 && c <= sol.model.costs.cbar()))
        throw std::domain_error("mechanism_at: reported cost outside [0, cbar]");
    const double lam = sol.model.arrival_rate, z = sol.model.lump_value, s = sol.model.safe_flow;
    const double full_price = alpha * z * lam;
    if (alpha >= sol.alpha_fc_nb) return {1, 0, full_price};
    if (alpha <= sol.alpha_sa_pc) return {0, std::nullopt, s};
    if (alpha > sol.alpha_pc_fc) {
        const double c2 = detail::branch_lookup(sol.fc, alpha).second;
        const double c1 = c2 + z * alpha - s / lam; // lambda C1 = lambda z alpha - s + lambda C2
        if (c < c2) return {1, 1, full_price - lam * c2};
        if (c <= c1) return {1, 0, full_price};
        return {0, std::nullopt, s};
    }
    const double c1 = detail::branch_lookup(sol.pc, alpha).second;
    if (c < c1) return {1, 1, full_price - lam * c1};
    return {0, std::nullopt, s};
}

/**
 * @brief Social surplus Lambda generated by the monopolist's solved policy.
 *
 * The bonus is imposed, not optimized: with P = H(b(alpha)) the recursion
 * [r + P alpha lambda] Lambda = stage + P (alpha^2 - alpha) lambda Lambda'
 * + P alpha lambda^2 z / r marches upward from Lambda = s/r at the stopping
 * belief. The reporting-cost flow enters through the truncated mean
 * T(b) = integral_0^b c dH(c); the stage flow is alpha z lambda - T(b) under
 * full coverage and H(b) lambda z alpha - T(b) + (1 - H(b)) s under partial
 * coverage (the capped branch is full coverage with b = cbar). Both ends are
 * singular: the launch reuses the pasting ramp, and near the no-bonus
 * boundary the recursion relaxes onto alpha lambda z / r, so the march ramps
 * down and hands over to that line.
 *
 * Returns the display-grid curve (same layout as the policy's), with region
 * labels copied from the monopolist.
 */
inline ValueCurve social_surplus_under_monopolist(const PolicyMap& policy, double grid_step) {
    const ContinuousModel& m = policy.model;
    m.validate();
    if (!(grid_step > 0.0))
        throw InvariantError("social_surplus_under_monopolist: grid_step > 0 violated");
    const double r = m.discount_rate, lam = m.arrival_rate, z = m.lump_value, s = m.safe_flow;
    const double a2 = policy.alpha_sa_pc;
    const double a_nb = policy.alpha_fc_nb;

    const auto bonus_at = [&](double alpha) -> double {
        if (policy.alpha_pc_ir && alpha > *policy.alpha_pc_ir && alpha < *policy.alpha_ir_fc)
            return detail::branch_lookup(policy.ir, alpha).second;
        if (alpha <= (policy.alpha_pc_ir ? *policy.alpha_pc_ir : policy.alpha_pc_fc))
            return detail::branch_lookup(policy.pc, alpha).second;
        return detail::branch_lookup(policy.fc, alpha).second;
    };
    // Full coverage (including the capped branch) starts where partial ends.
    const double pc_end = policy.alpha_pc_ir ? *policy.alpha_pc_ir : policy.alpha_pc_fc;
    const auto rhs = [&](double alpha, double L) -> double {
        const double b = bonus_at(alpha);
        const double P = m.costs.cdf(std::min(b, m.costs.cbar()));
        if (P < 1e-10) return 0.0; // launch vicinity: flat branch limit
        const double T = m.costs.truncated_cost_mass(std::min(b, m.costs.cbar()));
        const double stage = (alpha <= pc_end)
                                 ? P * lam * z * alpha - T + (1.0 - P) * s
                                 : alpha * z * lam - T;
        return ((r + P * alpha * lam) * L - stage - P * alpha * lam * lam * z / r) /
               (P * (alpha * alpha - alpha) * lam);
    };

    // Dense march over (a2, a_nb) with ramps at both singular ends. Landing
    // exactly on the monopolist's regime switches keeps the stage-flow kinks
    // off step interiors; once the imposed bonus falls below 1e-5 the surplus
    // sits on the no-bonus line to within O(b^2) and the march hands over.
    ValueCurve dense;
    dense.push(a2, s / r, 0.0, Strategy::PC);
    std::vector<double> landings = detail::display_landings(m, policy.curve.size());
    landings.push_back(policy.alpha_pc_fc);
    if (policy.alpha_pc_ir) landings.push_back(*policy.alpha_pc_ir);
    if (policy.alpha_ir_fc) landings.push_back(*policy.alpha_ir_fc);
    std::sort(landings.begin(), landings.end());
    const std::vector<double> nodes =
        detail::march_nodes(a2 + detail::kLaunchOffset, a_nb - 1e-7, grid_step, landings, a2, a_nb);
    double a = nodes.front();
    double L = s / r;
    dense.push(a, L, bonus_at(a), Strategy::PC);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (a > policy.alpha_pc_fc && bonus_at(nodes[i]) < 1e-5) break;
        L = detail::rk4_step(rhs, a, L, nodes[i]);
        a = nodes[i];
        dense.push(a, L, bonus_at(a), Strategy::PC);
    }

    ValueCurve out;
    for (std::size_t i = 0; i < policy.curve.size(); ++i) {
        const double alpha = policy.curve.alphas[i];
        const Strategy region = policy.curve.regions[i];
        double val;
        if (alpha <= a2) {
            val = s / r;
        } else if (alpha >= dense.alphas.back()) {
            val = alpha * m.g() / r; // no reports beyond: surplus on the no-bonus line
        } else {
            val = detail::branch_lookup(dense, alpha).first;
        }
        out.push(alpha, val, policy.curve.bonuses[i], region);
    }
    return out;
}

/// Shared-grid welfare rows: planner W, surplus-under-monopolist Lambda,
/// monopolist profit Pi.
struct WelfareTable {
    std::vector<double> alphas;
    std::vector<double> planner;    ///< W
    std::vector<double> surplus;    ///< Lambda
    std::vector<double> profit;     ///< Pi
    double planner_alpha_fc_nb = 0.0;
    double monopolist_alpha_fc_nb = 0.0;
};

/**
 * @brief Solves all three curves on one grid and checks the welfare ordering
 *        W >= Lambda >= Pi (1e-6 slack) plus W = Lambda above the planner's
 *        no-experimentation boundary, reporting the violating belief.
 */
inline WelfareTable welfare_compare(const ContinuousModel& m, double grid_step,
                                    std::size_t display_points = 2001) {
    const PolicyMap policy = solve_policy_auto(m, grid_step, display_points);
    const PlannerSolution plan = solve_planner(m, grid_step, display_points);
    const ValueCurve lambda_curve = social_surplus_under_monopolist(policy, grid_step);

    WelfareTable table;
    table.planner_alpha_fc_nb = plan.alpha_fc_nb;
    table.monopolist_alpha_fc_nb = policy.alpha_fc_nb;
    const double slack = 1e-6;
    for (std::size_t i = 0; i < policy.curve.size(); ++i) {
        const double alpha = policy.curve.alphas[i];
        const double W = plan.curve.values[i];
        const double Lam = lambda_curve.values[i];
        const double Pi = policy.curve.values[i];
        if (W < Lam - slack)
            throw InvariantError("welfare ordering W >= Lambda violated at alpha = " +
                                 std::to_string(alpha));
        if (Lam < Pi - slack)
            throw InvariantError("welfare ordering Lambda >= Pi violated at alpha = " +
                                 std::to_string(alpha));
        if (alpha >= plan.alpha_fc_nb && std::abs(W - Lam) > slack)
            throw InvariantError(
                "W = Lambda beyond the planner's no-experimentation boundary violated at alpha = " +
                std::to_string(alpha));
        table.alphas.push_back(alpha);
        table.planner.push_back(W);
        table.surplus.push_back(Lam);
        table.profit.push_back(Pi);
    }
    return table;
}

} // namespace bb
