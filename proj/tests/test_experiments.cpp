#include <doctest.h>

#include <cmath>

#include "majdyn/experiments.hpp"
#include "majdyn/graph.hpp"

using namespace majdyn;

namespace {

ordered_json strip_clock(ExperimentReport rep) {
    auto j = rep.to_json();
    j.erase("wall_clock_seconds");
    return j;
}

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("ci helpers") {
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    const auto ci = mean_ci(xs);
    CHECK(ci.estimate == doctest::Approx(2.5));
    CHECK(ci.lo < 2.5);
    CHECK(ci.hi > 2.5);

    // Wald interval collapses at the boundary, by choice of interval type
    const auto zero = proportion_ci(0, 50);
    CHECK(zero.fraction == 0.0);
    CHECK(zero.hi == 0.0);
    const auto full = proportion_ci(50, 50);
    CHECK(full.lo == 1.0);
    const auto mid = proportion_ci(30, 100);
    CHECK(mid.lo == doctest::Approx(0.3 - 1.96 * std::sqrt(0.3 * 0.7 / 100.0)));
}

TEST_CASE("initial mean square: n=1 is exactly 1 in every trial") {
    const auto rep = run_experiment(
        ordered_json{{"experiment", "initial-mean-sq"}, {"n", 1}, {"trials", 200}});
    CHECK(rep.passed());
    CHECK(rep.results["mean_sq"]["estimate"].get<double>() == 1.0);
    CHECK(rep.results["mean_sq"]["half_width"].get<double>() == 0.0);
}

TEST_CASE("initial mean square matches the n=3 exhaustive oracle") {
    // oracle: enumerate all 8 states; E[m0^2] = (2*1 + 6*(1/9)) / 8 = 1/3
    double oracle = 0.0;
    for (int mask = 0; mask < 8; ++mask) {
        int sum = 0;
        for (int b = 0; b < 3; ++b) sum += (mask >> b & 1) ? 1 : -1;
        const double m = static_cast<double>(sum) / 3.0;
        oracle += m * m / 8.0;
    }
    CHECK(oracle == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    const auto rep = run_experiment(ordered_json{
        {"experiment", "initial-mean-sq"}, {"n", 3}, {"trials", 40000}, {"seed", 2}});
    CHECK(rep.passed());
    const double est = rep.results["mean_sq"]["estimate"].get<double>();
    const double hw = rep.results["mean_sq"]["half_width"].get<double>();
    CHECK(std::abs(est - oracle) <= 3.0 * hw);
}

TEST_CASE("reports are bit-identical across worker counts") {
    const ordered_json base{{"experiment", "time1-moments"},
                            {"n", 201},
                            {"p", 0.2},
                            {"trials", 16},
                            {"seed", 9}};
    ordered_json cfg1 = base;
    cfg1["workers"] = 1;
    ordered_json cfg4 = base;
    cfg4["workers"] = 4;
    auto j1 = strip_clock(run_experiment(cfg1));
    auto j4 = strip_clock(run_experiment(cfg4));
    j1["config"].erase("workers");
    j4["config"].erase("workers");
    CHECK(j1.dump() == j4.dump());
}

TEST_CASE("echoed config replays to the same report") {
    const auto rep = run_experiment(ordered_json{
        {"experiment", "initial-mean-sq"}, {"n", 17}, {"trials", 500}, {"seed", 11}});
    const auto replay = run_experiment(rep.config);
    CHECK(strip_clock(rep).dump() == strip_clock(replay).dump());
}

TEST_CASE("unknown ids and keys are rejected") {
    CHECK_THROWS_AS(run_experiment(ordered_json{{"experiment", "nope"}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_experiment(ordered_json{{"experiment", "initial-mean-sq"},
                                                {"trails", 10}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_experiment(ordered_json::object()), std::invalid_argument);
}

TEST_CASE("every gate carries provenance and thresholds in the report") {
    const auto rep = run_experiment(ordered_json{
        {"experiment", "time1-moments"}, {"n", 201}, {"p", 0.2}, {"trials", 16}});
    const auto j = rep.to_json();
    CHECK(j["version"] == kVersionString);
    CHECK(j["config"]["n"] == 201);
    REQUIRE(j["gates"].size() == 2);
    for (const auto& gate : j["gates"]) {
        CHECK(gate.contains("provenance"));
        CHECK(gate["provenance"].contains("formula"));
        CHECK(gate.contains("threshold"));
    }
    CHECK_THROWS_AS(run_experiment(ordered_json{{"experiment", "time1-moments"},
                                                {"n", 200}}),
                    std::invalid_argument); // even n
}

TEST_CASE("complete graph reaches unanimity at time 1, so also by 3 and 4") {
    const auto rep = run_experiment(ordered_json{{"experiment", "gnp-unanimity"},
                                                 {"n", 513},
                                                 {"p", 1.0},
                                                 {"trials", 20},
                                                 {"seed", 3}});
    CHECK(rep.passed());
    CHECK(rep.results["unanimous_at_4"]["fraction"].get<double>() == 1.0);
    CHECK(rep.results["unanimous_at_3"]["fraction"].get<double>() == 1.0);
    CHECK(rep.results["excluded_zero_mean_trials"].get<std::int64_t>() == 0); // odd n
    CHECK(rep.gates.size() == 2); // p = 1 is inside both time-4 and time-3 regimes
}

TEST_CASE("very high degree reaches unanimity by time 3") {
    const auto rep = run_experiment(ordered_json{{"experiment", "gnp-unanimity"},
                                                 {"n", 4096},
                                                 {"p", 0.2},
                                                 {"trials", 50},
                                                 {"seed", 3}});
    CHECK(rep.passed());
    REQUIRE(rep.gates.size() == 2); // p = 0.2 > n^{-1/3}: time-3 gate active
    CHECK(rep.results["unanimous_at_3"]["lo"].get<double>() >= 0.4);
}

TEST_CASE("out-of-regime parameters disable gates but still report") {
    const auto rep = run_experiment(ordered_json{{"experiment", "gnp-unanimity"},
                                                 {"n", 600},
                                                 {"p", 0.01},
                                                 {"trials", 5},
                                                 {"seed", 3}});
    CHECK_FALSE(rep.regime_ok);
    CHECK(rep.gates.empty());
    CHECK(rep.passed()); // no active gates
}

TEST_CASE("rrg-disagreement at q outside (1/3, 2/3) runs ungated") {
    const auto rep = run_experiment(ordered_json{{"experiment", "rrg-disagreement"},
                                                 {"n", 500},
                                                 {"q", 0.99},
                                                 {"trials", 3},
                                                 {"horizon", 500},
                                                 {"seed", 5}});
    CHECK_FALSE(rep.regime_ok);
    CHECK(rep.gates.empty());
    CHECK(rep.trial_records.size() == 3);
}

TEST_CASE("rrg-disagreement desk instance passes its gates") {
    const auto rep = run_experiment(ordered_json{{"experiment", "rrg-disagreement"},
                                                 {"n", 4000},
                                                 {"q", 0.5},
                                                 {"trials", 6},
                                                 {"seed", 5}});
    CHECK(rep.regime_ok);
    CHECK(rep.passed());
    CHECK(rep.results["both_sign_certified_cycles"]["successes"].get<std::int64_t>() == 6);
}

TEST_CASE("flip-bound families run within their bounds") {
    for (const char* family : {"rrg", "gnp", "tree", "cycle"}) {
        ordered_json cfg{{"experiment", "flip-bound"}, {"family", family}, {"trials", 4},
                         {"seed", 6}};
        if (std::string(family) == "rrg")
            cfg["n"] = 500, cfg["d"] = 5;
        else if (std::string(family) == "gnp")
            cfg["n"] = 500, cfg["p"] = 0.01;
        else if (std::string(family) == "tree")
            cfg["d"] = 3, cfg["radius"] = 6;
        else
            cfg["n"] = 64;
        const auto rep = run_experiment(cfg);
        CHECK(rep.passed());
    }
}

TEST_CASE("weighted flip-bound certifies (eps, W) per trial") {
    const auto rep = run_experiment(ordered_json{{"experiment", "flip-bound"},
                                                 {"family", "rrg"},
                                                 {"n", 300},
                                                 {"d", 5},
                                                 {"trials", 5},
                                                 {"weighted", true},
                                                 {"seed", 6}});
    CHECK(rep.passed());
    for (const auto& record : rep.trial_records) {
        CHECK(record["eps"].get<double>() >= 1.0); // odd integer weights
        CHECK(record["W"].get<double>() <= 25.0);  // 5 edges of weight <= 5
        CHECK(record["avg_flips"].get<double>() <= record["bound"].get<double>());
    }
}

TEST_CASE("near-period2-balance flags degenerate unanimous starts") {
    // n = 1: the single opinion is unanimous at t = 0, flagged out-of-band
    const auto rep = run_experiment(ordered_json{{"experiment", "near-period2-balance"},
                                                 {"family", "gnp"},
                                                 {"n", 1},
                                                 {"d", 0},
                                                 {"trials", 3},
                                                 {"seed", 7}});
    CHECK(rep.results["degenerate_trials"].get<std::int64_t>() == 3);
    CHECK(rep.results["valid_trials"].get<std::int64_t>() == 0);
    CHECK_FALSE(rep.passed()); // the gate cannot certify anything without trials
}

TEST_CASE("near-period2-balance small instance stays balanced") {
    const auto rep = run_experiment(ordered_json{{"experiment", "near-period2-balance"},
                                                 {"family", "rrg"},
                                                 {"n", 2000},
                                                 {"d", 3},
                                                 {"eps", 0.1},
                                                 {"trials", 10},
                                                 {"seed", 8}});
    CHECK(rep.passed());
    CHECK(rep.results["valid_trials"].get<std::int64_t>() == 10);
}

TEST_CASE("minority-residue gates only the monotone trend") {
    const auto rep = run_experiment(ordered_json{{"experiment", "minority-residue"},
                                                 {"n", 512},
                                                 {"p", 0.2},
                                                 {"trials", 30},
                                                 {"seed", 9}});
    CHECK(rep.passed());
    REQUIRE(rep.gates.size() == 1);
    CHECK(rep.gates[0].name == "median_residue_monotone");
    CHECK(rep.results["residue_t2"].contains("envelope_c_over_p2"));
}

TEST_CASE("growth-heuristic records qualifying ratios only") {
    const auto rep = run_experiment(ordered_json{{"experiment", "growth-heuristic"},
                                                 {"n", 5000},
                                                 {"d", 20.0},
                                                 {"steps", 5},
                                                 {"trials", 8},
                                                 {"seed", 10}});
    CHECK(rep.passed());
    CHECK(rep.results["qualifying_ratios"]["count"].get<std::int64_t>() > 0);
    const double med = rep.results["qualifying_ratios"]["median"].get<double>();
    CHECK(med >= 2.0);   // 0.1 * d
    CHECK(med <= 200.0); // 10 * d
}

TEST_CASE("level-graph validates depth and passes at a small depth") {
    CHECK_THROWS_AS(
        run_experiment(ordered_json{{"experiment", "level-graph"}, {"depth", 4}}),
        std::invalid_argument);
    const auto rep = run_experiment(ordered_json{{"experiment", "level-graph"},
                                                 {"depth", 7},
                                                 {"trials", 400},
                                                 {"full_trials", 6},
                                                 {"seed", 12}});
    CHECK(rep.passed());
    CHECK(rep.results["coin_levels"].size() == 2); // levels 1 and 4 at depth 7
    CHECK(rep.results["coin_flips"].get<std::int64_t>() == 800);
}

TEST_CASE("conjecture sweep is ungated and tabulates fractions") {
    const auto rep = run_experiment(ordered_json{{"experiment", "conjecture-sweep"},
                                                 {"n", 200},
                                                 {"degrees", ordered_json::array({2.0, 20.0})},
                                                 {"trials", 4},
                                                 {"seed", 13}});
    CHECK(rep.gates.empty());
    CHECK(rep.passed());
    REQUIRE(rep.results["sweep"].size() == 2);
    CHECK(rep.results["sweep"][0]["plus_fractions"].size() == 4);
}

TEST_CASE("trial exceptions propagate out of the worker pool") {
    // d >= n makes every trial's graph construction fail inside the workers
    CHECK_THROWS_AS(run_experiment(ordered_json{{"experiment", "flip-bound"},
                                                {"family", "rrg"},
                                                {"n", 10},
                                                {"d", 11},
                                                {"trials", 8},
                                                {"workers", 4}}),
                    std::invalid_argument);
}

TEST_CASE("registry lists every implemented experiment") {
    const auto ids = experiment_ids();
    CHECK(ids.size() == 10);
    for (const auto& id : ids) {
        // each id dispatches (invalid params are fine, unknown id is not)
        try {
            run_experiment(ordered_json{{"experiment", id}, {"trials", 0}});
        } catch (const std::invalid_argument&) {
            // acceptable: zero trials or missing regime parameters
        }
    }
}

} // TEST_SUITE
