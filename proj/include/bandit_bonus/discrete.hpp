/**
 * @file discrete.hpp
 * @brief Perfect-learning model solver: recursive bonus schedules, their fixed
 *        points, strategy profits, and the FC/PC/SA/NB/IR selection over R2.
 *
 * A short-lived consumer arrives each period t = 1..T. Before the risky arm's
 * value R1 is revealed the seller prices it at E R1 (the safe arm at R2) and
 * may pay a review bonus b_t for a report; the first report reveals R1 and all
 * later consumers buy max{R1, R2}. The derived constants are
 *   M = E max{R1, R2} - E R1   and   N = M + (E R1 - R2) / r,
 * and the optimal schedules iterate the backward map Gamma(x) = beta^{-1}(r psi(x))
 * built from psi(x) = beta(x) + M - H^2(x)/h(x) (variant N analogous), with the
 * extended branch psi(x) = x + M outside [0, cbar].
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bandit_bonus/cost_model.hpp"
#include "bandit_bonus/errors.hpp"
#include "bandit_bonus/strategy.hpp"

namespace bb {

struct DiscreteModel {
    /// Number of consumer periods; std::nullopt means an infinite horizon.
    std::optional<int> horizon;
    double discount = 0.0; ///< per-period discount factor r in (0, 1)
    double er1 = 0.0;      ///< E R1, the risky arm's prior mean
    double emax = 0.0;     ///< E max{R1, R2}
    double r2 = 0.0;       ///< the safe arm's known value R2 >= 0
    CostDistribution costs = CostDistribution::uniform(1.0);

    double m_const() const { return emax - er1; }
    double n_const() const { return m_const() + (er1 - r2) / discount; }

    /// Fails fast naming the violated assumption.
    void validate() const {
        if (!(discount > 0.0 && discount < 1.0))
            throw InvariantError("discrete model: discount r in (0, 1) violated");
        if (horizon && *horizon < 1)
            throw InvariantError("discrete model: horizon T >= 1 violated");
        if (!(r2 >= 0.0)) throw InvariantError("discrete model: R2 >= 0 violated");
        if (emax < std::max(er1, r2) - 1e-12)
            throw InvariantError("discrete model: E max{R1, R2} >= max(E R1, R2) violated");
    }
};

struct BonusSchedule {
    std::vector<double> bonuses; ///< b_1..b_T, or a single constant for T = infinity
    Strategy strategy = Strategy::SA;
    /// Set when a negative iterate other than the final one had to be clamped
    /// (outside the documented three-contingency classification).
    bool interior_clamped = false;
};

enum class PsiVariant { M, N };

/**
 * @brief psi(x) = beta(x) + M - H^2(x)/h(x) on [0, cbar], x + M outside
 *        (variant N analogous); continuous at both junctions.
 */
inline double psi(const DiscreteModel& model, double x, PsiVariant variant) {
    const double shift = (variant == PsiVariant::M) ? model.m_const() : model.n_const();
    if (x < 0.0 || x > model.costs.cbar()) return x + shift;
    return model.costs.virtual_value(x) + shift - model.costs.info_rent(x);
}

/**
 * @brief One backward step of the bonus recursion, b_p = beta^{-1}(r psi(b_{p+1})).
 *
 * When r psi(b_next) is negative the raw negative value is returned unchanged
 * as a sentinel: the recursion must pass through the extended branch before
 * re-entering [0, cbar], so clamping happens only in the schedule builders.
 */
inline double gamma_step(const DiscreteModel& model, double b_next, PsiVariant variant) {
    const double y = model.discount * psi(model, b_next, variant);
    if (y < 0.0) return y;
    return model.costs.virtual_inverse(y);
}

/**
 * @brief Fixed point of the bonus recursion in (0, cbar), if it exists.
 *
 * Variant M solves Psi(x) = (1 - 1/r) beta(x) + M - H^2(x)/h(x) = 0; variant N
 * solves (1/r - 1) beta(x) + H^2(x)/h(x) = N. Returns std::nullopt when the
 * shift constant is non-positive or the root would exceed cbar (the
 * IR-dominant regime).
 */
inline std::optional<double> fixed_point(const DiscreteModel& model, PsiVariant variant) {
    const double r = model.discount;
    const double shift = (variant == PsiVariant::M) ? model.m_const() : model.n_const();
    if (shift <= 0.0) return std::nullopt;
    // Both variants reduce to finding the root of an increasing function minus
    // the shift: f(x) = (1/r - 1) beta(x) + H^2(x)/h(x) (Fact A.2 monotonicity).
    const auto f = [&](double x) {
        return (1.0 / r - 1.0) * model.costs.virtual_value(x) + model.costs.info_rent(x) - shift;
    };
    const double cbar = model.costs.cbar();
    if (f(cbar) <= 0.0) return std::nullopt; // root beyond the support
    return num::bisect(f, 0.0, cbar, 1e-13);
}

namespace detail {

inline BonusSchedule all_zero_schedule(const DiscreteModel& model, Strategy label) {
    BonusSchedule s;
    s.strategy = label;
    s.bonuses.assign(model.horizon ? static_cast<std::size_t>(*model.horizon) : 1u, 0.0);
    return s;
}

inline BonusSchedule ir_schedule(const DiscreteModel& model) {
    BonusSchedule s;
    s.strategy = Strategy::IR;
    s.bonuses.assign(model.horizon ? static_cast<std::size_t>(*model.horizon) : 1u, 0.0);
    s.bonuses.front() = model.costs.cbar();
    return s;
}

} // namespace detail

/**
 * @brief Optimal full-coverage schedule: b_T = 0, b_t = Gamma^(T-t)(0).
 *
 * T = 1 degenerates to the all-zero non-bonus schedule. If any entry would
 * exceed cbar the immediate-revelation schedule (cbar, 0, ..., 0) is returned
 * instead. An infinite horizon yields the constant fixed point b*.
 */
inline BonusSchedule fc_schedule(const DiscreteModel& model) {
    const double cbar = model.costs.cbar();
    if (!model.horizon) {
        const auto fp = fixed_point(model, PsiVariant::M);
        if (!fp) {
            if (model.m_const() <= 0.0) return detail::all_zero_schedule(model, Strategy::NB);
            return detail::ir_schedule(model);
        }
        BonusSchedule s;
        s.strategy = Strategy::FC;
        s.bonuses = {*fp};
        return s;
    }
    const int t_count = *model.horizon;
    if (t_count == 1) return detail::all_zero_schedule(model, Strategy::NB);
    if (model.m_const() <= 0.0) return detail::all_zero_schedule(model, Strategy::NB);
    std::vector<double> b(static_cast<std::size_t>(t_count), 0.0);
    for (int t = t_count - 2; t >= 0; --t) {
        b[static_cast<std::size_t>(t)] =
            gamma_step(model, b[static_cast<std::size_t>(t) + 1], PsiVariant::M);
        if (b[static_cast<std::size_t>(t)] > cbar) return detail::ir_schedule(model);
    }
    BonusSchedule s;
    s.strategy = Strategy::FC;
    s.bonuses = std::move(b);
    return s;
}

/**
 * @brief Optimal partial-coverage schedule via the variant-N recursion.
 *
 * The terminal value d_T solves beta(d_T) = E R1 - R2 (negative allowed as an
 * interior value on the extended branch); earlier entries iterate Gamma_N.
 * Negative entries are clamped to zero in the final schedule. d_1 <= 0 turns
 * the schedule into SA; d_1 >= cbar into immediate revelation. An infinite
 * horizon yields the constant b_N*, or SA when that fixed point is absent.
 */
inline BonusSchedule pc_schedule(const DiscreteModel& model) {
    const double cbar = model.costs.cbar();
    if (!model.horizon) {
        const auto fp = fixed_point(model, PsiVariant::N);
        if (!fp) return detail::all_zero_schedule(model, Strategy::SA);
        BonusSchedule s;
        s.strategy = Strategy::PC;
        s.bonuses = {*fp};
        return s;
    }
    const int t_count = *model.horizon;
    const double gap = model.er1 - model.r2;
    std::vector<double> d(static_cast<std::size_t>(t_count), 0.0);
    // Terminal condition on the extended branch: beta(x) = x below zero.
    d.back() = (gap > 0.0) ? model.costs.virtual_inverse(gap) : gap;
    for (int t = t_count - 2; t >= 0; --t)
        d[static_cast<std::size_t>(t)] =
            gamma_step(model, d[static_cast<std::size_t>(t) + 1], PsiVariant::N);
    if (d.front() <= 0.0) return detail::all_zero_schedule(model, Strategy::SA);
    if (d.front() >= cbar) return detail::ir_schedule(model);
    BonusSchedule s;
    s.strategy = Strategy::PC;
    s.bonuses = std::move(d);
    for (std::size_t t = 0; t < s.bonuses.size(); ++t) {
        if (s.bonuses[t] < 0.0) {
            if (t + 1 < s.bonuses.size()) s.interior_clamped = true;
            s.bonuses[t] = 0.0;
        }
    }
    return s;
}

/**
 * @brief Total discounted profit of a strategy with its schedule.
 *
 * FC: Emax (1-r^T)/(1-r) - psi(b_1); PC: the same with psi evaluated at the
 * partial-coverage schedule's first bonus (variant M deliberately — not
 * psi_N); SA: R2 (1-r^T)/(1-r); NB: E R1 (1-r^T)/(1-r);
 * IR: Emax (1-r^T)/(1-r) - M - cbar. The horizon factor becomes 1/(1-r) when
 * T is infinite.
 */
inline double strategy_profit(const DiscreteModel& model, Strategy strategy,
                              const BonusSchedule& schedule) {
    if (schedule.strategy != strategy)
        throw std::invalid_argument("strategy_profit: schedule was built for strategy " +
                                    std::string(to_string(schedule.strategy)) + ", not " +
                                    std::string(to_string(strategy)));
    const double r = model.discount;
    const double factor = model.horizon
                              ? (1.0 - std::pow(r, static_cast<double>(*model.horizon))) / (1.0 - r)
                              : 1.0 / (1.0 - r);
    switch (strategy) {
        case Strategy::SA: return model.r2 * factor;
        case Strategy::NB: return model.er1 * factor;
        case Strategy::IR: return model.emax * factor - model.m_const() - model.costs.cbar();
        case Strategy::FC:
        case Strategy::PC: return model.emax * factor - psi(model, schedule.bonuses.front(), PsiVariant::M);
    }
    throw std::invalid_argument("strategy_profit: unknown strategy");
}

struct StrategyChoice {
    Strategy strategy = Strategy::SA;
    BonusSchedule schedule;
    double profit = 0.0;
};

/**
 * @brief Evaluates all admissible strategies and returns the argmax.
 *
 * Immediate revelation is considered only when the interior assumption
 * Psi(cbar) < 0 and Psi_N(cbar) < 0 fails, or when a schedule builder itself
 * escalates to IR. Exact profit ties break by the documented reporting-favoring
 * order FC > PC > NB > SA, with IR ranked last.
 */
inline StrategyChoice optimal_strategy(const DiscreteModel& model) {
    const double cbar = model.costs.cbar();
    const double beta_cap = model.costs.virtual_value(cbar);
    const double rent_cap = model.costs.info_rent(cbar);
    const double r = model.discount;
    const double psi_cap_m = (1.0 - 1.0 / r) * beta_cap + model.m_const() - rent_cap;
    const double psi_cap_n = (1.0 - 1.0 / r) * beta_cap + model.n_const() - rent_cap;
    const bool interior_assumption = psi_cap_m < 0.0 && psi_cap_n < 0.0;

    std::vector<StrategyChoice> candidates;
    const auto add = [&](Strategy st, BonusSchedule sched) {
        candidates.push_back({st, std::move(sched), 0.0});
        candidates.back().profit = strategy_profit(model, st, candidates.back().schedule);
    };

    add(Strategy::SA, detail::all_zero_schedule(model, Strategy::SA));
    add(Strategy::NB, detail::all_zero_schedule(model, Strategy::NB));
    bool have_ir = false;
    if (BonusSchedule fc = fc_schedule(model); fc.strategy == Strategy::FC) {
        add(Strategy::FC, std::move(fc));
    } else if (fc.strategy == Strategy::IR) {
        add(Strategy::IR, std::move(fc));
        have_ir = true;
    }
    if (BonusSchedule pc = pc_schedule(model); pc.strategy == Strategy::PC) {
        add(Strategy::PC, std::move(pc));
    } else if (pc.strategy == Strategy::IR && !have_ir) {
        add(Strategy::IR, std::move(pc));
        have_ir = true;
    }
    if (!interior_assumption && !have_ir) add(Strategy::IR, detail::ir_schedule(model));

    const auto rank = [](Strategy st) {
        switch (st) {
            case Strategy::FC: return 0;
            case Strategy::PC: return 1;
            case Strategy::NB: return 2;
            case Strategy::SA: return 3;
            case Strategy::IR: return 4;
        }
        return 5;
    };
    const StrategyChoice* best = &candidates.front();
    for (const auto& c : candidates) {
        if (c.profit > best->profit ||
            (c.profit == best->profit && rank(c.strategy) < rank(best->strategy)))
            best = &c;
    }
    return *best;
}

struct SweepRow {
    double r2 = 0.0;
    double pi_fc = 0.0;
    double pi_pc = 0.0;
    double pi_sa = 0.0;
    double pi_nb = 0.0;
    double pi_ir = 0.0;
    Strategy winner = Strategy::SA;
};

/**
 * @brief Profit-versus-R2 sweep: one row per grid point.
 *
 * E max{R1, R2} depends on R2, so it is re-supplied per grid point through
 * @p emax_of_r2. Each profit column reports the best profit attainable within
 * that strategy family (builders that escalate — e.g. an FC schedule breaching
 * cbar — contribute the profit of the schedule they actually produce).
 */
inline std::vector<SweepRow> sweep_r2(const DiscreteModel& proto, const std::vector<double>& r2_grid,
                                      const std::function<double(double)>& emax_of_r2) {
    std::vector<SweepRow> rows;
    rows.reserve(r2_grid.size());
    for (const double r2 : r2_grid) {
        DiscreteModel m = proto;
        m.r2 = r2;
        m.emax = emax_of_r2(r2);
        m.validate();
        SweepRow row;
        row.r2 = r2;
        row.pi_sa = strategy_profit(m, Strategy::SA, detail::all_zero_schedule(m, Strategy::SA));
        row.pi_nb = strategy_profit(m, Strategy::NB, detail::all_zero_schedule(m, Strategy::NB));
        row.pi_ir = strategy_profit(m, Strategy::IR, detail::ir_schedule(m));
        const BonusSchedule fc = fc_schedule(m);
        row.pi_fc = strategy_profit(m, fc.strategy, fc);
        const BonusSchedule pc = pc_schedule(m);
        row.pi_pc = strategy_profit(m, pc.strategy, pc);
        row.winner = optimal_strategy(m).strategy;
        rows.push_back(row);
    }
    return rows;
}

} // namespace bb
