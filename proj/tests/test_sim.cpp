#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "bandit_bonus/sim.hpp"
#include "bandit_bonus/valuations.hpp"

using namespace bb;

namespace {

ContinuousModel capfree() {
    ContinuousModel m;
    m.discount_rate = 0.5;
    m.arrival_rate = 0.8;
    m.lump_value = 7.0;
    m.safe_flow = 2.8;
    m.costs = CostDistribution::uniform(1.0);
    m.assume_cbar_large = true;
    return m;
}

const PolicyMap& shared_policy() {
    static const PolicyMap map = solve_policy(capfree(), 1e-3, 201);
    return map;
}

DiscreteModel discrete_benchmark(int horizon) {
    DiscreteModel m;
    m.horizon = horizon;
    m.discount = 0.95;
    m.r2 = 2.0;
    m.er1 = er1_uniform_r1(4.0);
    m.emax = emax_uniform_r1(4.0, m.r2);
    m.costs = CostDistribution::uniform(1.0);
    return m;
}

} // namespace

TEST_CASE("one no-news update follows the posterior odds", "[sim]") {
    const double expect = std::exp(-0.1) / (std::exp(-0.1) + 1.0);
    CHECK(bayes_update(0.5, 1.0, 0.1) == Catch::Approx(expect).margin(1e-15));
    CHECK(bayes_update(0.5, 1.0, 0.1) == Catch::Approx(0.4750208).margin(1e-7));
    CHECK(bayes_update(0.0, 1.0, 0.1) == 0.0);
    CHECK(bayes_update(1.0, 1.0, 0.1) == 1.0);
    // Longer silence pushes the belief down further.
    CHECK(bayes_update(0.5, 1.0, 0.2) < bayes_update(0.5, 1.0, 0.1));
}

TEST_CASE("config validation gates the discretization", "[sim]") {
    const ContinuousModel m = capfree();
    SimConfig cfg;
    cfg.n_paths = 10;
    CHECK_NOTHROW(cfg.validate_continuous(m));
    cfg.dt = 0.2; // lambda dt = 0.16 >= 0.1
    CHECK_THROWS_AS(cfg.validate_continuous(m), InvariantError);
    cfg = SimConfig{};
    cfg.n_paths = 0;
    CHECK_THROWS_AS(cfg.validate_common(), InvariantError);
    cfg = SimConfig{};
    cfg.threads = 0;
    CHECK_THROWS_AS(cfg.validate_common(), InvariantError);
    cfg = SimConfig{};
    cfg.alpha0 = 1.0;
    CHECK_THROWS_AS(cfg.validate_continuous(m), InvariantError);
}

TEST_CASE("absorbing launches are exact with zero standard error", "[sim]") {
    const PolicyMap& map = shared_policy();
    SimConfig cfg;
    cfg.n_paths = 500;
    cfg.alpha0 = 0.2; // below the stopping boundary: safe annuity from t = 0
    const SimResult sa = simulate_continuous(map, cfg);
    CHECK(sa.mean == capfree().safe_flow / capfree().discount_rate);
    CHECK(sa.std_error == 0.0);
    CHECK(sa.stop_time.exited_fraction == 1.0);
    CHECK(sa.stop_time.median == 0.0);

    cfg.alpha0 = 0.9; // above the no-bonus boundary: the solver's line exactly
    const SimResult nb = simulate_continuous(map, cfg);
    CHECK(nb.mean == policy_at(map, 0.9).value);
    CHECK(nb.std_error == 0.0);
}

TEST_CASE("independent runs and thread splits are bit-identical", "[sim]") {
    const PolicyMap& map = shared_policy();
    SimConfig cfg;
    cfg.n_paths = 2000;
    cfg.alpha0 = 0.45;
    cfg.threads = 1;
    const SimResult a = simulate_continuous(map, cfg);
    const SimResult b = simulate_continuous(map, cfg);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    cfg.threads = 4;
    const SimResult c = simulate_continuous(map, cfg);
    CHECK(a.mean == c.mean);
    CHECK(a.std_error == c.std_error);
    CHECK(a.good_state_fraction == c.good_state_fraction);
    CHECK(a.stop_time.mean == c.stop_time.mean);
}

TEST_CASE("continuous estimate brackets the solver value", "[sim]") {
    const PolicyMap& map = shared_policy();
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.alpha0 = 0.45;
    cfg.threads = 4;
    const SimResult res = simulate_continuous(map, cfg);
    const double target = policy_at(map, cfg.alpha0).value;
    CHECK(std::fabs(res.mean - target) < 3.0 * res.std_error);
    CHECK(res.std_error < 0.05);
    // Share of good states matches the prior within binomial noise.
    CHECK(std::fabs(res.good_state_fraction - cfg.alpha0) <
          3.0 * std::sqrt(cfg.alpha0 * (1.0 - cfg.alpha0) / double(cfg.n_paths)));
}

TEST_CASE("halving dt moves the estimate by less than one standard error", "[sim]") {
    const PolicyMap& map = shared_policy();
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.alpha0 = 0.45;
    cfg.threads = 4;
    cfg.master_seed = 424242ULL;
    cfg.dt = 1e-3;
    const SimResult coarse = simulate_continuous(map, cfg);
    cfg.dt = 5e-4;
    const SimResult fine = simulate_continuous(map, cfg);
    // The two estimates are independent draws, so the gap is itself noisy
    // (sd about 1.4 standard errors); the pinned seed makes the check a
    // deterministic regression documenting that no systematic dt trend is
    // hiding above the noise floor at this sample size.
    CHECK(std::fabs(coarse.mean - fine.mean) <
          std::max(coarse.std_error, fine.std_error));
}

TEST_CASE("jumps happen only on good paths and beliefs drift down", "[sim]") {
    const PolicyMap& map = shared_policy();
    SimConfig cfg;
    cfg.n_paths = 300;
    cfg.alpha0 = 0.55;
    cfg.trace_paths = 4;
    std::vector<PathSummary> summaries;
    std::vector<TraceRow> trace;
    const SimResult res = simulate_continuous(map, cfg, &summaries, &trace);
    REQUIRE(summaries.size() == cfg.n_paths);

    std::size_t jumps = 0;
    for (const PathSummary& p : summaries) {
        if (p.jumped) {
            CHECK(p.good); // conclusive news only arrives in the good state
            ++jumps;
        }
        CHECK(p.first_exit_time <= cfg.horizon);
        CHECK(std::isfinite(p.profit));
    }
    CHECK(jumps > 0);
    CHECK(res.stop_time.exited_fraction > 0.5);

    REQUIRE(!trace.empty());
    std::map<std::uint64_t, const TraceRow*> last_row;
    for (const TraceRow& row : trace) {
        CHECK(row.path_id < cfg.trace_paths);
        CHECK((row.strategy == Strategy::PC || row.strategy == Strategy::FC));
        if (row.reported) CHECK(row.cost <= row.bonus);
        const auto it = last_row.find(row.path_id);
        if (it != last_row.end()) {
            CHECK(row.t == Catch::Approx(it->second->t + cfg.dt).margin(1e-9));
            CHECK(row.alpha <= it->second->alpha + 1e-15);
        }
        last_row[row.path_id] = &row;
    }
}

TEST_CASE("belief after k silent reports matches the k-fold posterior", "[sim]") {
    const PolicyMap& map = shared_policy();
    SimConfig cfg;
    cfg.n_paths = 30000;
    cfg.alpha0 = 0.5;
    cfg.threads = 4;
    std::vector<PathSummary> summaries;
    simulate_continuous(map, cfg, &summaries);

    const std::uint32_t k = 400;
    double predicted = cfg.alpha0;
    for (std::uint32_t i = 0; i < k; ++i)
        predicted = bayes_update(predicted, capfree().arrival_rate, cfg.dt);

    std::size_t qualifying = 0, good = 0;
    for (const PathSummary& p : summaries) {
        if (p.no_news_reports >= k) {
            ++qualifying;
            good += p.good ? 1 : 0;
        }
    }
    REQUIRE(qualifying > 10000);
    const double observed = double(good) / double(qualifying);
    const double ci99 =
        2.576 * std::sqrt(predicted * (1.0 - predicted) / double(qualifying));
    CHECK(std::fabs(observed - predicted) < ci99 + 0.002);
}

TEST_CASE("dropping the tail correction lowers truncated estimates", "[sim]") {
    const PolicyMap& map = shared_policy();
    SimConfig cfg;
    cfg.n_paths = 2000;
    cfg.alpha0 = 0.45;
    cfg.horizon = 1.0; // truncate early so most paths are still running
    const SimResult with_tail = simulate_continuous(map, cfg);
    cfg.tail_correction = false;
    const SimResult without = simulate_continuous(map, cfg);
    CHECK(with_tail.stop_time.exited_fraction < 1.0);
    CHECK(without.mean < with_tail.mean);
}

TEST_CASE("discrete deterministic schedules are exact", "[sim]") {
    const DiscreteModel m = discrete_benchmark(8);
    const R1Sampler sampler = make_uniform_r1_sampler(4.0);
    SimConfig cfg;
    cfg.n_paths = 5000;
    const double factor = (1.0 - std::pow(m.discount, 8)) / (1.0 - m.discount);

    const SimResult nb = simulate_discrete(m, detail::all_zero_schedule(m, Strategy::NB),
                                           sampler, cfg);
    CHECK(nb.mean == Catch::Approx(m.er1 * factor).margin(1e-12));
    CHECK(nb.std_error == 0.0);
    CHECK(nb.stop_time.exited_fraction == 0.0);
    CHECK(nb.stop_time.median == 9.0); // sentinel horizon + 1: no reports

    const SimResult sa = simulate_discrete(m, detail::all_zero_schedule(m, Strategy::SA),
                                           sampler, cfg);
    CHECK(sa.mean == Catch::Approx(m.r2 * factor).margin(1e-12));
    CHECK(sa.std_error == 0.0);
}

TEST_CASE("discrete estimate matches the closed-form profit", "[sim]") {
    const DiscreteModel m = discrete_benchmark(2);
    const BonusSchedule fc = fc_schedule(m);
    SimConfig cfg;
    cfg.n_paths = 50000;
    cfg.threads = 4;
    const SimResult res = simulate_discrete(m, fc, make_uniform_r1_sampler(4.0), cfg);
    CHECK(std::fabs(res.mean - 3.95640625) < 3.0 * res.std_error);
    CHECK(std::fabs(res.good_state_fraction - 0.5) <
          3.0 * std::sqrt(0.25 / double(cfg.n_paths)));

    // Thread-count invariance holds for the discrete engine too.
    cfg.threads = 1;
    const SimResult single = simulate_discrete(m, fc, make_uniform_r1_sampler(4.0), cfg);
    CHECK(single.mean == res.mean);
    CHECK(single.std_error == res.std_error);
}

TEST_CASE("discrete guards reject unusable inputs", "[sim]") {
    DiscreteModel inf = discrete_benchmark(2);
    inf.horizon.reset();
    SimConfig cfg;
    cfg.n_paths = 10;
    CHECK_THROWS_AS(
        simulate_discrete(inf, fc_schedule(inf), make_uniform_r1_sampler(4.0), cfg),
        InvariantError);

    const DiscreteModel m = discrete_benchmark(2);
    BonusSchedule wrong = fc_schedule(m);
    wrong.bonuses.pop_back();
    CHECK_THROWS_AS(simulate_discrete(m, wrong, make_uniform_r1_sampler(4.0), cfg),
                    std::invalid_argument);
}
