#include "majdyn/majdyn.h"

#include <charconv>
#include <cstring>
#include <new>
#include <string>

#include "majdyn/analysis.hpp"
#include "majdyn/dynamics.hpp"
#include "majdyn/errors.hpp"
#include "majdyn/experiments.hpp"
#include "majdyn/generators.hpp"
#include "majdyn/graph.hpp"
#include "majdyn/percolation.hpp"
#include "majdyn/rng.hpp"

using namespace majdyn;

struct majdyn_graph_s {
    Graph graph;
};

struct majdyn_opinions_s {
    OpinionState state;
};

struct majdyn_sim_result_s {
    Trace trace;
    RunOutcome outcome;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <class Fn>
majdyn_status guarded(Fn&& fn) {
    try {
        fn();
        return MAJDYN_OK;
    } catch (const TieError& e) {
        set_error(e.what());
        return MAJDYN_ERR_TIE;
    } catch (const BudgetError& e) {
        set_error(e.what());
        return MAJDYN_ERR_BUDGET;
    } catch (const ParseError& e) {
        set_error(e.what());
        return MAJDYN_ERR_PARSE;
    } catch (const ConvergenceError& e) {
        set_error(e.what());
        return MAJDYN_ERR_CONVERGENCE;
    } catch (const InvariantViolation& e) {
        set_error(e.what());
        return MAJDYN_ERR_INVARIANT;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return MAJDYN_ERR_INVALID;
    } catch (const ordered_json::exception& e) {
        set_error(e.what());
        return MAJDYN_ERR_PARSE;
    } catch (const std::runtime_error& e) {
        set_error(e.what());
        // file-path errors come through here from the edge-list helpers
        return std::string(e.what()).find("open") != std::string::npos ? MAJDYN_ERR_IO
                                                                       : MAJDYN_ERR_INTERNAL;
    } catch (const std::exception& e) {
        set_error(e.what());
        return MAJDYN_ERR_INTERNAL;
    } catch (...) {
        set_error("unknown error");
        return MAJDYN_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

majdyn_status require(bool cond, const char* msg) {
    if (cond) return MAJDYN_OK;
    set_error(msg);
    return MAJDYN_ERR_INVALID;
}

} // namespace

extern "C" {

const char* majdyn_version(void) { return kVersionString; }

const char* majdyn_last_error(void) { return g_last_error.c_str(); }

void majdyn_string_free(char* s) { delete[] s; }

majdyn_status majdyn_graph_build(int64_t n, const int64_t* endpoints, int64_t m,
                                 const double* weights, majdyn_graph** out) {
    if (auto rc = require(out && (m == 0 || endpoints), "null argument")) return rc;
    return guarded([&] {
        std::vector<Edge> edges(m);
        for (int64_t e = 0; e < m; ++e)
            edges[e] = {static_cast<Vertex>(endpoints[2 * e]),
                        static_cast<Vertex>(endpoints[2 * e + 1])};
        std::span<const double> w = weights ? std::span<const double>(weights, m)
                                            : std::span<const double>();
        *out = new majdyn_graph_s{Graph::from_edges(n, edges, w)};
    });
}

majdyn_status majdyn_graph_gnp(int64_t n, double p, uint64_t seed, uint64_t stream,
                               majdyn_graph** out) {
    if (auto rc = require(out != nullptr, "null output")) return rc;
    return guarded([&] {
        Rng rng(seed, stream);
        *out = new majdyn_graph_s{gen_gnp(n, p, rng)};
    });
}

majdyn_status majdyn_graph_random_regular(int64_t n, int64_t d, uint64_t seed,
                                          uint64_t stream, majdyn_graph** out) {
    if (auto rc = require(out != nullptr, "null output")) return rc;
    return guarded([&] {
        Rng rng(seed, stream);
        *out = new majdyn_graph_s{gen_random_regular(n, d, rng)};
    });
}

majdyn_status majdyn_graph_tree_ball(int64_t degree, int64_t radius, majdyn_graph** out) {
    if (auto rc = require(out != nullptr, "null output")) return rc;
    return guarded([&] { *out = new majdyn_graph_s{gen_tree_ball(degree, radius)}; });
}

majdyn_status majdyn_graph_level(int64_t depth, majdyn_graph** out) {
    if (auto rc = require(out != nullptr, "null output")) return rc;
    return guarded([&] { *out = new majdyn_graph_s{gen_level_graph({depth})}; });
}

majdyn_status majdyn_graph_read_file(const char* path, majdyn_graph** out) {
    if (auto rc = require(out && path, "null argument")) return rc;
    return guarded([&] { *out = new majdyn_graph_s{read_edge_list_file(path)}; });
}

majdyn_status majdyn_graph_write_file(const majdyn_graph* g, const char* path) {
    if (auto rc = require(g && path, "null argument")) return rc;
    return guarded([&] { write_edge_list_file(g->graph, path); });
}

int64_t majdyn_graph_vertex_count(const majdyn_graph* g) {
    return g ? g->graph.vertex_count() : -1;
}

int64_t majdyn_graph_edge_count(const majdyn_graph* g) {
    return g ? g->graph.edge_count() : -1;
}

int64_t majdyn_graph_degree(const majdyn_graph* g, int64_t v) {
    if (!g || v < 0 || v >= g->graph.vertex_count()) return -1;
    return g->graph.degree(static_cast<Vertex>(v));
}

int majdyn_graph_is_weighted(const majdyn_graph* g) {
    return g && g->graph.weighted() ? 1 : 0;
}

int majdyn_graph_is_connected(const majdyn_graph* g) {
    return g && g->graph.connected() ? 1 : 0;
}

void majdyn_graph_free(majdyn_graph* g) { delete g; }

majdyn_status majdyn_opinions_iid(int64_t n, double q, uint64_t seed, uint64_t stream,
                                  majdyn_opinions** out) {
    if (auto rc = require(out != nullptr, "null output")) return rc;
    return guarded([&] {
        Rng rng(seed, stream);
        *out = new majdyn_opinions_s{gen_opinions_iid(n, q, rng)};
    });
}

majdyn_status majdyn_opinions_constant(int64_t n, int8_t value, majdyn_opinions** out) {
    if (auto rc = require(out != nullptr, "null output")) return rc;
    return guarded([&] { *out = new majdyn_opinions_s{OpinionState::constant(n, value)}; });
}

majdyn_status majdyn_opinions_from_values(const int8_t* values, int64_t n,
                                          majdyn_opinions** out) {
    if (auto rc = require(out && (n == 0 || values), "null argument")) return rc;
    return guarded([&] {
        OpinionState s;
        s.values.assign(values, values + n);
        for (auto v : s.values)
            if (v != 1 && v != -1) throw std::invalid_argument("opinions must be +1/-1");
        *out = new majdyn_opinions_s{std::move(s)};
    });
}

int64_t majdyn_opinions_count(const majdyn_opinions* x) { return x ? x->state.size() : -1; }

majdyn_status majdyn_opinions_copy_values(const majdyn_opinions* x, int8_t* buffer,
                                          int64_t length) {
    if (auto rc = require(x && buffer, "null argument")) return rc;
    if (auto rc = require(length >= x->state.size(), "buffer too small")) return rc;
    std::memcpy(buffer, x->state.values.data(), x->state.values.size());
    return MAJDYN_OK;
}

void majdyn_opinions_free(majdyn_opinions* x) { delete x; }

void majdyn_sim_params_init(majdyn_sim_params* params) {
    if (!params) return;
    params->max_steps = 10000;
    params->min_steps = 0;
    params->weighted = 0;
    params->self_weight = 1.0;
    params->check_invariants = 1;
}

majdyn_status majdyn_simulate(const majdyn_graph* g, const majdyn_opinions* x0,
                              const majdyn_sim_params* params, majdyn_sim_result** out) {
    if (auto rc = require(g && x0 && out, "null argument")) return rc;
    return guarded([&] {
        RunOptions opt;
        if (params) {
            opt.max_steps = params->max_steps;
            opt.min_steps = params->min_steps;
            opt.weighted = params->weighted != 0;
            opt.self_weight = params->self_weight;
            opt.check_identity = params->check_invariants != 0;
            opt.check_flip_bound = params->check_invariants != 0;
        }
        auto [trace, outcome] = run(g->graph, x0->state, opt);
        *out = new majdyn_sim_result_s{std::move(trace), std::move(outcome)};
    });
}

int32_t majdyn_sim_outcome(const majdyn_sim_result* r) {
    if (!r) return -1;
    switch (r->outcome.kind) {
        case RunOutcome::Kind::FixedPoint: return MAJDYN_OUTCOME_FIXED_POINT;
        case RunOutcome::Kind::PeriodTwo: return MAJDYN_OUTCOME_PERIOD_TWO;
        case RunOutcome::Kind::BudgetExhausted: return MAJDYN_OUTCOME_BUDGET_EXHAUSTED;
    }
    return -1;
}

int64_t majdyn_sim_entry_time(const majdyn_sim_result* r) {
    return r ? r->outcome.entry_time : -1;
}

int64_t majdyn_sim_steps(const majdyn_sim_result* r) { return r ? r->trace.steps() : -1; }

majdyn_status majdyn_sim_trace_csv(const majdyn_sim_result* r, char** out) {
    if (auto rc = require(r && out, "null argument")) return rc;
    return guarded([&] { *out = dup_string(r->trace.to_csv()); });
}

majdyn_status majdyn_sim_outcome_json(const majdyn_sim_result* r, char** out) {
    if (auto rc = require(r && out, "null argument")) return rc;
    return guarded([&] {
        const auto& trace = r->trace;
        const auto& oc = r->outcome;
        ordered_json j;
        j["outcome"] = to_string(oc.kind);
        j["entry_time"] = oc.entry_time;
        j["steps"] = trace.steps();
        j["final_mean"] = trace.mean.back();
        j["final_unanimous"] = trace.unanimous.back() != 0;
        j["average_flips_per_vertex"] = trace.average_flips_per_vertex();
        j["final_potential"] = trace.potential.back();
        *out = dup_string(j.dump(2));
    });
}

majdyn_status majdyn_sim_final_opinions(const majdyn_sim_result* r, majdyn_opinions** out) {
    if (auto rc = require(r && out, "null argument")) return rc;
    return guarded([&] { *out = new majdyn_opinions_s{r->outcome.final_state}; });
}

void majdyn_sim_result_free(majdyn_sim_result* r) { delete r; }

majdyn_status majdyn_experiment_run(const char* config_json, char** report_json) {
    if (auto rc = require(config_json && report_json, "null argument")) return rc;
    return guarded([&] {
        const auto config = ordered_json::parse(config_json);
        const auto report = run_experiment(config);
        *report_json = dup_string(report.to_json().dump(2));
    });
}

const char* majdyn_experiment_ids(void) {
    static const std::string ids = [] {
        std::string acc;
        for (const auto& id : experiment_ids()) {
            if (!acc.empty()) acc += ',';
            acc += id;
        }
        return acc;
    }();
    return ids.c_str();
}

namespace {

void append_double_field(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    out.append(buf, ptr - buf);
}

} // namespace

majdyn_status majdyn_fourier_maj_csv(int32_t k, char** csv) {
    if (auto rc = require(csv != nullptr, "null output")) return rc;
    return guarded([&] {
        const auto table = FourierTable::from_truth_table(majority_truth_table(k), k);
        std::string out = "mask,coefficient\n";
        for (std::size_t mask = 0; mask < table.size(); ++mask) {
            out += std::to_string(mask);
            out += ',';
            append_double_field(out, table.coefficient(static_cast<std::uint32_t>(mask)));
            out += '\n';
        }
        *csv = dup_string(out);
    });
}

majdyn_status majdyn_stability_maj_csv(int32_t k, double rho_begin, double rho_end,
                                       double rho_step, char** csv) {
    if (auto rc = require(csv != nullptr, "null output")) return rc;
    return guarded([&] {
        if (!(rho_step > 0.0) || rho_end < rho_begin)
            throw std::invalid_argument("stability: need rho_step > 0 and rho_end >= rho_begin");
        const auto table = FourierTable::from_truth_table(majority_truth_table(k), k);
        std::string out = "rho,stability\n";
        // integer stepping keeps the endpoint exact for grids like 0:1:0.1
        const auto count = static_cast<std::int64_t>(
            std::floor((rho_end - rho_begin) / rho_step + 1e-9));
        for (std::int64_t i = 0; i <= count; ++i) {
            const double rho = std::min(rho_begin + rho_step * static_cast<double>(i), rho_end);
            append_double_field(out, rho);
            out += ',';
            append_double_field(out, noise_stability(table, rho));
            out += '\n';
        }
        *csv = dup_string(out);
    });
}

majdyn_status majdyn_mixing_check_json(int64_t n, double p, int64_t samples, uint64_t seed,
                                       char** json) {
    if (auto rc = require(json != nullptr, "null output")) return rc;
    return guarded([&] {
        Rng graph_rng(seed, 0);
        Rng loop_rng(seed, 3);
        Rng subset_rng(seed, 4);
        const Graph g = gen_gnp(n, p, graph_rng);
        const auto est = estimate_lambda(g, p, loop_rng);
        const auto check = mixing_lemma_check(g, est, samples, subset_rng);
        const double reference = 4.0 * std::sqrt(static_cast<double>(n) * p);
        ordered_json j;
        j["n"] = n;
        j["p"] = p;
        j["lambda"] = est.lambda;
        j["iterations"] = est.iterations;
        j["tolerance"] = est.tolerance;
        j["residual"] = est.residual;
        j["reference_bound"] = reference;
        j["reference_formula"] = "4 sqrt(n p)";
        j["lambda_within_reference"] = est.lambda <= reference;
        j["samples"] = check.samples;
        j["worst_discrepancy"] = check.worst_discrepancy;
        j["worst_subset_sizes"] = ordered_json::array({check.worst_a_size, check.worst_b_size});
        j["subset_check_pass"] = check.pass;
        *json = dup_string(j.dump(2));
    });
}

majdyn_status majdyn_overlap_json(int32_t n1, int32_t n2, int32_t m, char** json) {
    if (auto rc = require(json != nullptr, "null output")) return rc;
    return guarded([&] {
        const double value = overlap_correlation(n1, n2, m);
        const double lower =
            static_cast<double>(m) * maj_singleton_coeff(n1) * maj_singleton_coeff(n2);
        ordered_json j;
        j["n1"] = n1;
        j["n2"] = n2;
        j["m"] = m;
        j["correlation"] = value;
        j["singleton_lower_bound"] = lower;
        j["bound_formula"] = "m * MajHat_{n1}(singleton) * MajHat_{n2}(singleton)";
        j["bound_holds"] = value >= lower - 1e-12;
        *json = dup_string(j.dump(2));
    });
}

majdyn_status majdyn_cluster_report_json(const majdyn_graph* g, const majdyn_opinions* x,
                                         char** json) {
    if (auto rc = require(g && x && json, "null argument")) return rc;
    return guarded([&] { *json = dup_string(cluster_report_json(g->graph, x->state).dump(2)); });
}

} // extern "C"
