/**
 * @file sim.hpp
 * @brief Monte Carlo validation of the analytic value functions by direct
 *        simulation of the arrival/purchase/report/belief-update process.
 *
 * Continuous model, one period of length dt per arriving consumer:
 *   - prices are fair per period: the risky price is the consumer's expected
 *     within-period utility alpha z lambda (1 - e^{-(r+lambda) dt})/(r+lambda),
 *     the safe price is s (1 - e^{-r dt})/r (its sum telescopes to s/r);
 *   - the consumer reports iff cost <= bonus, receiving the flow-equivalent
 *     lump b (1 - e^{-r dt})/r at period end (discounted by e^{-r dt});
 *   - conditional on a good product, a report carries the lump with
 *     probability 1 - e^{-lambda dt}: the belief jumps to 1 and the analytic
 *     tail e^{-r(t+dt)} lambda z / r ends the path; a no-news report applies
 *     one Bayes step; non-reporting periods leave the belief unchanged;
 *   - SA and NB beliefs are absorbing and close with their exact tails s/r
 *     and alpha lambda z / r.
 *
 * Discrete model, one consumer per period t = 1..T with perfect learning:
 *   pre-revelation prices are the fair ER1 (risky) / R2 (safe); the first
 *   report (cost <= b_t) reveals R1 at period end and costs the seller b_t;
 *   afterwards the better arm sells at its known value max{R1, R2}.
 *
 * Each path owns an engine seeded from (master_seed, path_id), so results
 * are bit-identical for a given configuration regardless of thread count;
 * aggregation always runs in path order.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "bandit_bonus/continuous.hpp"
#include "bandit_bonus/discrete.hpp"
#include "bandit_bonus/errors.hpp"
#include "bandit_bonus/rng.hpp"
#include "bandit_bonus/strategy.hpp"
#include "bandit_bonus/valuations.hpp"

namespace bb {

struct SimConfig {
    double dt = 1e-3;           ///< period length (continuous model)
    double horizon = 40.0;      ///< truncation time (continuous model)
    std::size_t n_paths = 100000;
    std::uint64_t master_seed = 20240901ULL;
    double alpha0 = 0.5;        ///< initial public belief (continuous model)
    int threads = 1;            ///< worker threads; results thread-count invariant
    bool tail_correction = true;///< add the solver value at horizon truncation
    std::size_t trace_paths = 0;///< dump per-period rows for this many leading paths

    void validate_common() const {
        if (n_paths < 1) throw InvariantError("sim config: n_paths >= 1 violated");
        if (threads < 1) throw InvariantError("sim config: threads >= 1 violated");
    }
    /// Discretization-validity gates for the continuous simulator.
    void validate_continuous(const ContinuousModel& m) const {
        validate_common();
        if (!(dt > 0.0)) throw InvariantError("sim config: dt > 0 violated");
        if (!(horizon > 0.0)) throw InvariantError("sim config: horizon > 0 violated");
        if (!(alpha0 > 0.0 && alpha0 < 1.0))
            throw InvariantError("sim config: alpha0 in (0, 1) violated");
        if (!(m.arrival_rate * dt < 0.1))
            throw InvariantError("sim config: lambda * dt < 0.1 violated (dt too coarse)");
        if (!(m.discount_rate * dt < 0.1))
            throw InvariantError("sim config: r * dt < 0.1 violated (dt too coarse)");
    }
};

/// Summary of per-path first-regime-exit times (time units in the continuous
/// model, period index in the discrete model).
struct StopTimeStats {
    double mean = 0.0;
    double median = 0.0;
    double q90 = 0.0;
    double exited_fraction = 0.0; ///< paths whose regime changed before truncation
};

struct SimResult {
    double mean = 0.0;
    double std_error = 0.0; ///< sample std / sqrt(n_paths)
    std::size_t n_paths = 0;
    double good_state_fraction = 0.0;
    StopTimeStats stop_time;
};

/// Per-path digest used by the belief-consistency checks.
struct PathSummary {
    bool good = false;
    bool jumped = false;
    std::uint32_t no_news_reports = 0; ///< Bayes steps taken before jump/exit
    double first_exit_time = 0.0;
    double profit = 0.0;
};

/// One per-period trace record (cash_flow is the period's undiscounted net).
struct TraceRow {
    std::uint64_t path_id = 0;
    double t = 0.0;
    double alpha = 0.0;
    Strategy strategy = Strategy::SA;
    double bonus = 0.0;
    double cost = 0.0;
    bool reported = false;
    double cash_flow = 0.0;
};

/**
 * @brief One no-news Bayes step: alpha' = alpha e^{-lambda dt} /
 *        (alpha e^{-lambda dt} + 1 - alpha); 0 and 1 are fixed points.
 */
inline double bayes_update(double alpha, double arrival_rate, double dt) {
    const double down = alpha * std::exp(-arrival_rate * dt);
    return down / (down + 1.0 - alpha);
}

namespace detail {

/// Runs fn(path_id) over [0, n) split across the requested worker threads.
template <class Fn>
void run_paths(std::size_t n, int threads, Fn&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

/// Sequential (path-ordered) aggregation into mean / std error / quantiles.
inline SimResult aggregate(const std::vector<double>& profits, const std::vector<double>& exits,
                           const std::vector<char>& good, const std::vector<char>& exited) {
    SimResult out;
    out.n_paths = profits.size();
    bool degenerate = true;
    for (const double p : profits)
        if (p != profits.front()) {
            degenerate = false;
            break;
        }
    if (degenerate) {
        out.mean = profits.front();
    } else {
        double sum = 0.0;
        for (const double p : profits) sum += p;
        out.mean = sum / static_cast<double>(out.n_paths);
    }
    double ss = 0.0;
    for (const double p : profits) ss += (p - out.mean) * (p - out.mean);
    // An all-identical sample has zero variance by definition; skip the
    // accumulation so rounding in `mean` cannot surface as a spurious 1e-16.
    out.std_error = (out.n_paths > 1 && !degenerate)
                        ? std::sqrt(ss / static_cast<double>(out.n_paths - 1)) /
                              std::sqrt(static_cast<double>(out.n_paths))
                        : 0.0;
    std::size_t n_good = 0, n_exited = 0;
    double exit_sum = 0.0;
    for (std::size_t i = 0; i < out.n_paths; ++i) {
        n_good += good[i] ? 1 : 0;
        n_exited += exited[i] ? 1 : 0;
        exit_sum += exits[i];
    }
    out.good_state_fraction = static_cast<double>(n_good) / static_cast<double>(out.n_paths);
    out.stop_time.exited_fraction =
        static_cast<double>(n_exited) / static_cast<double>(out.n_paths);
    out.stop_time.mean = exit_sum / static_cast<double>(out.n_paths);
    std::vector<double> sorted(exits);
    std::sort(sorted.begin(), sorted.end());
    out.stop_time.median = sorted[sorted.size() / 2];
    out.stop_time.q90 = sorted[static_cast<std::size_t>(0.9 * static_cast<double>(sorted.size()))];
    return out;
}

} // namespace detail

/**
 * @brief Simulates the continuous model under a solved policy and returns
 *        discounted-profit statistics.
 *
 * Optional outputs: @p summaries collects one PathSummary per path;
 * @p trace collects per-period rows for the first cfg.trace_paths paths.
 */
inline SimResult simulate_continuous(const PolicyMap& policy, const SimConfig& cfg,
                                     std::vector<PathSummary>* summaries = nullptr,
                                     std::vector<TraceRow>* trace = nullptr) {
    const ContinuousModel& m = policy.model;
    m.validate();
    cfg.validate_continuous(m);
    const double r = m.discount_rate, lam = m.arrival_rate, z = m.lump_value, s = m.safe_flow;
    const double disc_dt = std::exp(-r * cfg.dt);
    const double p_lump = 1.0 - std::exp(-lam * cfg.dt);
    const double fair_coeff = lam * z * (1.0 - std::exp(-(r + lam) * cfg.dt)) / (r + lam);
    const double safe_price = s * (1.0 - disc_dt) / r;
    const double lump_coeff = (1.0 - disc_dt) / r; // flow-to-period-lump factor
    const std::size_t n = cfg.n_paths;

    std::vector<double> profits(n), exits(n);
    std::vector<char> good_flags(n), exited_flags(n);
    if (summaries) summaries->assign(n, PathSummary{});
    std::vector<std::vector<TraceRow>> trace_buckets(trace ? cfg.trace_paths : 0);

    const auto run_one = [&](std::size_t path) {
        std::mt19937_64 gen = make_path_engine(cfg.master_seed, path);
        const bool good = canonical_u01(gen) < cfg.alpha0;
        double alpha = cfg.alpha0;
        double t = 0.0, disc = 1.0, profit = 0.0;
        PolicyPoint pol = policy_at(policy, alpha);
        const Strategy initial = pol.strategy;
        bool exited = false, jumped = false, truncated = true;
        double exit_time = cfg.horizon;
        std::uint32_t no_news = 0;
        std::vector<TraceRow>* rows =
            (trace && path < cfg.trace_paths) ? &trace_buckets[path] : nullptr;

        const auto mark_exit = [&](double when) {
            if (!exited) {
                exited = true;
                exit_time = when;
            }
        };

        while (t < cfg.horizon - 1e-12) {
            if (pol.strategy == Strategy::SA) {
                mark_exit(t);
                profit += disc * s / r;
                truncated = false;
                break;
            }
            if (pol.strategy == Strategy::NB) {
                mark_exit(t);
                profit += disc * (alpha * m.g() / r);
                truncated = false;
                break;
            }
            const double c = m.costs.quantile(canonical_u01(gen));
            const bool report = c <= pol.bonus;
            const bool risky = (pol.strategy != Strategy::PC) || report;
            double cash = risky ? alpha * fair_coeff : safe_price;
            if (report) cash -= disc_dt * pol.bonus * lump_coeff;
            profit += disc * cash;
            if (rows)
                rows->push_back({path, t, alpha, pol.strategy, pol.bonus, c, report, cash});
            t += cfg.dt;
            disc *= disc_dt;
            if (report) {
                if (good && canonical_u01(gen) < p_lump) {
                    jumped = true;
                    mark_exit(t);
                    profit += disc * lam * z / r; // belief 1 from the period end on
                    truncated = false;
                    break;
                }
                ++no_news;
                alpha = bayes_update(alpha, lam, cfg.dt);
                pol = policy_at(policy, alpha);
                if (pol.strategy != initial) mark_exit(t);
            }
        }
        if (truncated && cfg.tail_correction) profit += disc * pol.value;

        profits[path] = profit;
        exits[path] = exit_time;
        good_flags[path] = good ? 1 : 0;
        exited_flags[path] = exited ? 1 : 0;
        if (summaries)
            (*summaries)[path] = PathSummary{good, jumped, no_news, exit_time, profit};
    };

    detail::run_paths(n, cfg.threads, run_one);
    if (trace) {
        trace->clear();
        for (auto& bucket : trace_buckets)
            trace->insert(trace->end(), bucket.begin(), bucket.end());
    }
    return detail::aggregate(profits, exits, good_flags, exited_flags);
}

/**
 * @brief Simulates the discrete perfect-learning model under a bonus schedule.
 *
 * R1 and all T reporting costs are drawn up front per path; stop-time
 * statistics are in period units (first-report period, sentinel T+1 when no
 * report occurs). good_state_fraction reports the share of paths where the
 * risky draw beat the safe value.
 */
inline SimResult simulate_discrete(const DiscreteModel& model, const BonusSchedule& schedule,
                                   const R1Sampler& r1_sampler, const SimConfig& cfg) {
    model.validate();
    cfg.validate_common();
    if (!model.horizon)
        throw InvariantError(
            "simulate_discrete: infinite horizon rejected; truncate explicitly or use the "
            "continuous simulator");
    const int T = *model.horizon;
    if (schedule.bonuses.size() != static_cast<std::size_t>(T))
        throw std::invalid_argument("simulate_discrete: schedule length must equal the horizon");
    const std::size_t n = cfg.n_paths;
    const double r2 = model.r2, er1 = model.er1, disc = model.discount;

    std::vector<double> profits(n), exits(n);
    std::vector<char> good_flags(n), exited_flags(n);

    const auto run_one = [&](std::size_t path) {
        std::mt19937_64 gen = make_path_engine(cfg.master_seed, path);
        const double r1 = r1_sampler(gen);
        std::vector<double> costs(static_cast<std::size_t>(T));
        for (auto& c : costs) c = model.costs.quantile(canonical_u01(gen));

        bool revealed = false;
        double profit = 0.0, df = 1.0;
        int first_report = T + 1; // period of the first report; sentinel T+1
        const double post_price = std::max(r1, r2);
        for (int t = 1; t <= T; ++t, df *= disc) {
            if (revealed) {
                profit += df * post_price;
                continue;
            }
            const double b = schedule.bonuses[static_cast<std::size_t>(t - 1)];
            switch (schedule.strategy) {
                case Strategy::SA:
                    profit += df * r2;
                    break;
                case Strategy::NB:
                    profit += df * er1;
                    break;
                case Strategy::FC:
                case Strategy::IR:
                    profit += df * er1;
                    if (costs[static_cast<std::size_t>(t - 1)] <= b && b > 0.0) {
                        profit -= df * b;
                        revealed = true;
                        first_report = t;
                    }
                    break;
                case Strategy::PC:
                    if (costs[static_cast<std::size_t>(t - 1)] <= b && b > 0.0) {
                        profit += df * (er1 - b);
                        revealed = true;
                        first_report = t;
                    } else {
                        profit += df * r2;
                    }
                    break;
            }
        }
        profits[path] = profit;
        exits[path] = first_report;
        good_flags[path] = r1 > r2 ? 1 : 0;
        exited_flags[path] = revealed ? 1 : 0;
    };

    detail::run_paths(n, cfg.threads, run_one);
    return detail::aggregate(profits, exits, good_flags, exited_flags);
}

} // namespace bb
