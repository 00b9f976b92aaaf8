// Acceptance suite: one check per release criterion, each printing a single
// PASS/FAIL line. Exit status 0 iff every selected criterion passes.
//
//   majdyn_acceptance                 run all criteria
//   majdyn_acceptance --criterion N   run one
//   majdyn_acceptance --list          list ids

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "majdyn/analysis.hpp"
#include "majdyn/dynamics.hpp"
#include "majdyn/errors.hpp"
#include "majdyn/experiments.hpp"
#include "majdyn/generators.hpp"
#include "majdyn/graph.hpp"
#include "majdyn/percolation.hpp"
#include "majdyn/rng.hpp"

using namespace majdyn;

namespace {

struct Criterion {
    int id;
    const char* summary;
    std::function<bool(std::string&)> check;
};

// ---------------------------------------------------------------------------
// 1: potential identity, exact in integers (unweighted) / 1e-12 (weighted),
//    and monotone, over 1000 randomized runs across the generator zoo
// ---------------------------------------------------------------------------

Graph attach_odd_weights(const Graph& g, Rng& rng, bool dyadic) {
    const auto edges = g.edges();
    std::vector<double> ws(edges.size());
    for (auto& w : ws) {
        const double odd = static_cast<double>(1 + 2 * rng.bounded(3)); // 1, 3, 5
        w = dyadic ? odd / 8.0 : odd;
    }
    return Graph::from_edges(g.vertex_count(), edges, ws);
}

bool criterion_potential_identity(std::string& detail) {
    Rng zoo_rng(20250810, 0);
    std::int64_t runs = 0, weighted_runs = 0;
    const std::int64_t target = 1000;

    while (runs < target) {
        const std::uint64_t pick = zoo_rng.bounded(6);
        Graph g = [&]() -> Graph {
            switch (pick) {
                case 0: { // sparse-to-medium gnp
                    const std::int64_t n = 4 + zoo_rng.bounded(2000);
                    const double c = 0.5 + zoo_rng.next_double() * 7.5;
                    return gen_gnp(n, std::min(1.0, c / static_cast<double>(n)), zoo_rng);
                }
                case 1: { // dense small gnp
                    const std::int64_t n = 4 + zoo_rng.bounded(60);
                    return gen_gnp(n, 0.1 + 0.8 * zoo_rng.next_double(), zoo_rng);
                }
                case 2: { // random regular
                    const std::int64_t d = 3 + zoo_rng.bounded(3);
                    std::int64_t n = 8 + zoo_rng.bounded(1992);
                    if ((n * d) % 2 != 0) ++n;
                    return gen_random_regular(n, d, zoo_rng);
                }
                case 3: { // tree ball
                    const std::int64_t d = 2 + zoo_rng.bounded(4);
                    const std::int64_t radius = 1 + zoo_rng.bounded(d == 2 ? 12 : 6);
                    return gen_tree_ball(d, radius);
                }
                case 4: // level graph
                    return gen_level_graph(
                        {1 + static_cast<std::int64_t>(zoo_rng.bounded(9))});
                default: { // cycle / path / complete
                    const std::int64_t n = 3 + zoo_rng.bounded(300);
                    const auto fam = zoo_rng.bounded(3);
                    return fam == 0   ? cycle_graph(n)
                           : fam == 1 ? path_graph(n)
                                      : complete_graph(std::min<std::int64_t>(n, 60));
                }
            }
        }();

        const bool weighted = g.edge_count() > 0 && zoo_rng.bounded(10) < 3;
        double self_weight = 1.0;
        if (weighted) {
            const bool dyadic = zoo_rng.bounded(2) == 0;
            g = attach_odd_weights(g, zoo_rng, dyadic);
            self_weight = dyadic ? 0.375 : 1.0; // odd on the weight grid
            ++weighted_runs;
        }
        const double q = 0.3 + 0.4 * zoo_rng.next_double();
        const OpinionState x0 = gen_opinions_iid(g.vertex_count(), q, zoo_rng);

        RunOptions opt;
        opt.weighted = weighted;
        opt.self_weight = self_weight;
        opt.max_steps = 500;
        opt.check_identity = true; // throws InvariantViolation on any failure
        opt.check_flip_bound = !weighted;
        try {
            run(g, x0, opt);
        } catch (const std::exception& e) {
            detail = "run " + std::to_string(runs) + " failed: " + e.what();
            return false;
        }
        ++runs;
    }
    detail = std::to_string(runs) + " runs (" + std::to_string(weighted_runs) +
             " weighted), decrement identity exact and potential monotone in all";
    return true;
}

// ---------------------------------------------------------------------------
// 2: Goles-Olivos, exhaustively over all 2^n initial states on a fixed zoo
// ---------------------------------------------------------------------------

bool criterion_goles_olivos(std::string& detail) {
    std::vector<std::pair<std::string, Graph>> zoo;
    for (std::int64_t n = 3; n <= 12; ++n)
        zoo.emplace_back("cycle" + std::to_string(n), cycle_graph(n));
    for (std::int64_t n = 1; n <= 12; ++n)
        zoo.emplace_back("path" + std::to_string(n), path_graph(n));
    for (std::int64_t n = 1; n <= 12; ++n)
        zoo.emplace_back("complete" + std::to_string(n), complete_graph(n));
    Rng rng(7, 0);
    for (int i = 0; i < 20; ++i) {
        const std::int64_t n = 5 + rng.bounded(8); // 5..12
        const double p = 0.15 + 0.7 * rng.next_double();
        zoo.emplace_back("gnp" + std::to_string(i), gen_gnp(n, p, rng));
    }

    std::int64_t total_runs = 0;
    for (const auto& [name, g] : zoo) {
        const std::int64_t n = g.vertex_count();
        OpinionState x0;
        x0.values.resize(n);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            for (std::int64_t i = 0; i < n; ++i)
                x0.values[i] = (mask >> i & 1) ? std::int8_t{1} : std::int8_t{-1};
            RunOptions opt;
            opt.max_steps = 2000;
            auto [trace, outcome] = run(g, x0, opt);
            ++total_runs;
            if (outcome.kind == RunOutcome::Kind::BudgetExhausted) {
                detail = name + " state " + std::to_string(mask) + " did not settle";
                return false;
            }
        }
    }
    detail = std::to_string(total_runs) + " exhaustive runs over " +
             std::to_string(zoo.size()) + " graphs, all fixed-point or period-two";
    return true;
}

// ---------------------------------------------------------------------------

bool report_gates_pass(const ExperimentReport& rep, std::string& detail) {
    if (rep.gates.empty()) {
        detail = "no gates were active";
        return false;
    }
    for (const auto& g : rep.gates) {
        if (!g.passed) {
            detail = "gate " + g.name + " failed: value " + std::to_string(g.value) +
                     " vs threshold " + std::to_string(g.threshold);
            return false;
        }
    }
    return true;
}

bool criterion_flip_bound(std::string& detail) {
    auto rep = run_experiment(ordered_json{{"experiment", "flip-bound"},
                                           {"family", "rrg"},
                                           {"n", 10000},
                                           {"d", 5},
                                           {"q", 0.5},
                                           {"trials", 20},
                                           {"seed", 1}});
    if (!report_gates_pass(rep, detail)) return false;
    auto repw = run_experiment(ordered_json{{"experiment", "flip-bound"},
                                            {"family", "rrg"},
                                            {"n", 2000},
                                            {"d", 5},
                                            {"q", 0.5},
                                            {"trials", 20},
                                            {"weighted", true},
                                            {"seed", 1}});
    if (!report_gates_pass(repw, detail)) return false;
    detail = "unweighted avg flips within 2d = 10 in 20/20 trials; weighted within "
             "certified 2W/eps in 20/20";
    return true;
}

bool criterion_gnp_unanimity(std::string& detail) {
    auto rep = run_experiment(ordered_json{{"experiment", "gnp-unanimity"},
                                           {"n", 4096},
                                           {"p", 0.06},
                                           {"trials", 200},
                                           {"seed", 1}});
    if (!report_gates_pass(rep, detail)) return false;
    detail = "time-4 unanimity fraction " +
             rep.results["unanimous_at_4"]["fraction"].dump() + ", lower CI " +
             rep.results["unanimous_at_4"]["lo"].dump() + " >= 0.4";
    return true;
}

bool criterion_time1_moments(std::string& detail) {
    auto rep = run_experiment(ordered_json{{"experiment", "time1-moments"},
                                           {"n", 2001},
                                           {"p", 0.1},
                                           {"trials", 500},
                                           {"seed", 1}});
    if (!report_gates_pass(rep, detail)) return false;
    detail = "E[sgn(m0) m1] = " + rep.results["signed_mean"]["estimate"].dump() +
             " vs bound " + rep.results["mean_lower_bound"].dump() + "; E[m1^2] = " +
             rep.results["second_moment"]["estimate"].dump() + " vs bound " +
             rep.results["second_moment_upper_bound"].dump();
    return true;
}

bool criterion_rrg_disagreement(std::string& detail) {
    auto rep = run_experiment(ordered_json{{"experiment", "rrg-disagreement"},
                                           {"n", 100000},
                                           {"q", 0.5},
                                           {"trials", 50},
                                           {"seed", 1}});
    if (!report_gates_pass(rep, detail)) return false;
    detail = "unanimity in " + rep.results["unanimity_fraction"]["successes"].dump() +
             "/50 trials; both-sign certified frozen cycles in " +
             rep.results["both_sign_certified_cycles"]["successes"].dump() +
             "/50; all certified cycles invariant over 100 steps";
    return true;
}

// ---------------------------------------------------------------------------
// 7: Fourier oracle equivalence + stability bound
// ---------------------------------------------------------------------------

bool criterion_fourier_oracle(std::string& detail) {
    for (int k = 1; k <= 15; k += 2) {
        const auto table = FourierTable::from_truth_table(majority_truth_table(k), k);
        if (!table.parseval_exact()) {
            detail = "Parseval failed at k=" + std::to_string(k);
            return false;
        }
        const std::int64_t expect = maj_singleton_raw(k);
        for (int b = 0; b < k; ++b) {
            if (table.raw(1u << b) != expect) {
                detail = "singleton mismatch at k=" + std::to_string(k) + " bit " +
                         std::to_string(b) + ": " + std::to_string(table.raw(1u << b)) +
                         " != " + std::to_string(expect);
                return false;
            }
        }
        for (int i = 0; i <= 100; ++i) {
            const double rho = static_cast<double>(i) / 100.0;
            const double stab = noise_stability(table, rho);
            if (stab > rho + 1e-12) {
                detail = "Stab_rho > rho at k=" + std::to_string(k) +
                         ", rho=" + std::to_string(rho);
                return false;
            }
        }
    }
    detail = "singleton coefficients match enumeration exactly for odd k <= 15; Parseval "
             "exact; Stab_rho <= rho on the 101-point grid";
    return true;
}

// ---------------------------------------------------------------------------
// 8: mixing lemma at lambda = 4 sqrt(np) over 20 seeds
// ---------------------------------------------------------------------------

bool criterion_mixing(std::string& detail) {
    const std::int64_t n = 2000;
    const double p = 0.1;
    const double reference = 4.0 * std::sqrt(static_cast<double>(n) * p);
    int within = 0, subset_ok = 0;
    double max_lambda = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng graph_rng(seed, 0), loop_rng(seed, 3), subset_rng(seed, 4);
        const Graph g = gen_gnp(n, p, graph_rng);
        const auto est = estimate_lambda(g, p, loop_rng);
        max_lambda = std::max(max_lambda, est.lambda);
        if (est.lambda <= reference) ++within;
        const auto check = mixing_lemma_check(g, est, 10000, subset_rng);
        if (check.pass) ++subset_ok;
    }
    detail = "lambda <= 4 sqrt(np) = " + std::to_string(reference) + " in " +
             std::to_string(within) + "/20 seeds (max lambda " + std::to_string(max_lambda) +
             "); subset check passed in " + std::to_string(subset_ok) + "/20";
    return within >= 19 && subset_ok >= 19;
}

bool criterion_balance(std::string& detail) {
    auto rep_rrg = run_experiment(ordered_json{{"experiment", "near-period2-balance"},
                                               {"family", "rrg"},
                                               {"n", 10000},
                                               {"d", 3},
                                               {"eps", 0.05},
                                               {"trials", 50},
                                               {"seed", 1}});
    if (!report_gates_pass(rep_rrg, detail)) return false;
    auto rep_gnp = run_experiment(ordered_json{{"experiment", "near-period2-balance"},
                                               {"family", "gnp"},
                                               {"n", 10000},
                                               {"d", 3},
                                               {"eps", 0.05},
                                               {"trials", 50},
                                               {"seed", 1}});
    if (!report_gates_pass(rep_gnp, detail)) return false;
    detail = "rrg in-band fraction " + rep_rrg.results["fraction_in_band"].dump() +
             ", gnp in-band fraction " + rep_gnp.results["fraction_in_band"].dump() +
             ", both >= 0.9";
    return true;
}

bool criterion_level_graph(std::string& detail) {
    auto rep = run_experiment(ordered_json{{"experiment", "level-graph"},
                                           {"depth", 12},
                                           {"trials", 10000},
                                           {"seed", 1}});
    if (!report_gates_pass(rep, detail)) return false;
    detail = "shift identity exact in all full-dynamics trials; coin frequency " +
             rep.results["plus_frequency"].dump() + " (z = " +
             rep.results["frequency_z"].dump() + ") over " +
             rep.results["coin_flips"].dump() + " flips";
    return true;
}

bool criterion_growth_heuristic(std::string& detail) {
    auto rep = run_experiment(ordered_json{{"experiment", "growth-heuristic"},
                                           {"n", 100000},
                                           {"d", 100.0},
                                           {"trials", 50},
                                           {"seed", 1}});
    if (!report_gates_pass(rep, detail)) return false;
    detail = "median ratio " + rep.results["qualifying_ratios"]["median"].dump() +
             " within [10, 1000] over " + rep.results["qualifying_ratios"]["count"].dump() +
             " qualifying steps";
    return true;
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "potential decrement identity, exact + monotone, randomized zoo",
         criterion_potential_identity},
        {2, "Goles-Olivos period-two, exhaustive over all states, n <= 12",
         criterion_goles_olivos},
        {3, "flip-count bound 2W/eps on RRG(10^4, 5) and weighted variant",
         criterion_flip_bound},
        {4, "unanimity by time 4 on Gnp(4096, 0.06), lower CI >= 0.4",
         criterion_gnp_unanimity},
        {5, "time-1 moment bounds on Gnp(2001, 0.1)", criterion_time1_moments},
        {6, "disagreement + frozen cycles on RRG(10^5, 4)", criterion_rrg_disagreement},
        {7, "Fourier oracle equivalence and stability bound", criterion_fourier_oracle},
        {8, "expander mixing at lambda = 4 sqrt(np) on Gnp(2000, 0.1)", criterion_mixing},
        {9, "near-period-two balance on RRG(10^4, 3) and Gnp(10^4, 3/n)",
         criterion_balance},
        {10, "level-graph shift identity and fair-coin source, depth 12",
         criterion_level_graph},
        {11, "mean-square growth heuristic, order d per step", criterion_growth_heuristic},
    };

    int selected = -1;
    for (int a = 1; a < argc; ++a) {
        if (std::strcmp(argv[a], "--criterion") == 0 && a + 1 < argc) {
            selected = std::atoi(argv[a + 1]);
            ++a;
        } else if (std::strcmp(argv[a], "--list") == 0) {
            for (const auto& c : criteria) std::printf("%2d  %s\n", c.id, c.summary);
            return 0;
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N | --list]\n", argv[0]);
            return 1;
        }
    }

    int failures = 0;
    for (const auto& c : criteria) {
        if (selected > 0 && c.id != selected) continue;
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok;
        try {
            ok = c.check(detail);
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %2d: %s (%.1fs)\n", ok ? "PASS" : "FAIL", c.id,
                    c.summary, secs);
        std::printf("        %s\n", detail.c_str());
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
