// majdyn command-line tool. Talks to the core exclusively through the C API
// in majdyn/majdyn.h; flag parsing and file placement live here.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "majdyn/majdyn.h"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitSoftFail = 2; // budget exhausted or gates failed

struct StringGuard {
    char* s = nullptr;
    ~StringGuard() { majdyn_string_free(s); }
};

int fail(const std::string& context) {
    std::cerr << "error: " << context << ": " << majdyn_last_error() << "\n";
    return kExitError;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

struct GraphSpec {
    std::string kind = "gnp"; // gnp | rrg | tree | level
    std::string edge_list;    // overrides kind when set
    std::int64_t n = 1000;
    double p = 0.01;
    std::int64_t d = 4;
    std::int64_t radius = 6;
    std::int64_t depth = 8;

    ordered_json to_json() const {
        ordered_json j;
        if (!edge_list.empty()) {
            j["edge_list"] = edge_list;
            return j;
        }
        j["family"] = kind;
        if (kind == "gnp") {
            j["n"] = n;
            j["p"] = p;
        } else if (kind == "rrg") {
            j["n"] = n;
            j["d"] = d;
        } else if (kind == "tree") {
            j["d"] = d;
            j["radius"] = radius;
        } else if (kind == "level") {
            j["depth"] = depth;
        }
        return j;
    }
};

majdyn_status build_graph(const GraphSpec& spec, std::uint64_t seed, majdyn_graph** out) {
    if (!spec.edge_list.empty()) return majdyn_graph_read_file(spec.edge_list.c_str(), out);
    if (spec.kind == "gnp") return majdyn_graph_gnp(spec.n, spec.p, seed, 0, out);
    if (spec.kind == "rrg") return majdyn_graph_random_regular(spec.n, spec.d, seed, 0, out);
    if (spec.kind == "tree") return majdyn_graph_tree_ball(spec.d, spec.radius, out);
    if (spec.kind == "level") return majdyn_graph_level(spec.depth, out);
    std::cerr << "error: unknown graph family " << spec.kind << "\n";
    return MAJDYN_ERR_INVALID;
}

int cmd_simulate(const GraphSpec& spec, const std::string& opinions, double q,
                 std::uint64_t seed, std::int64_t horizon, bool weighted, double self_weight,
                 bool clusters, const std::string& out_dir) {
    majdyn_graph* graph = nullptr;
    if (build_graph(spec, seed, &graph) != MAJDYN_OK) return fail("building graph");

    const std::int64_t n = majdyn_graph_vertex_count(graph);
    majdyn_opinions* x0 = nullptr;
    majdyn_status rc;
    if (opinions == "all-plus")
        rc = majdyn_opinions_constant(n, 1, &x0);
    else if (opinions == "all-minus")
        rc = majdyn_opinions_constant(n, -1, &x0);
    else
        rc = majdyn_opinions_iid(n, q, seed, 1, &x0);
    if (rc != MAJDYN_OK) {
        majdyn_graph_free(graph);
        return fail("building opinions");
    }

    majdyn_sim_params params;
    majdyn_sim_params_init(&params);
    params.max_steps = horizon;
    params.weighted = weighted ? 1 : 0;
    params.self_weight = self_weight;

    majdyn_sim_result* result = nullptr;
    rc = majdyn_simulate(graph, x0, &params, &result);
    majdyn_opinions_free(x0);
    if (rc != MAJDYN_OK) {
        majdyn_graph_free(graph);
        return fail("simulate");
    }

    StringGuard csv, outcome_json, clusters_json;
    if (majdyn_sim_trace_csv(result, &csv.s) != MAJDYN_OK ||
        majdyn_sim_outcome_json(result, &outcome_json.s) != MAJDYN_OK) {
        majdyn_sim_result_free(result);
        majdyn_graph_free(graph);
        return fail("extracting results");
    }
    if (clusters) {
        majdyn_opinions* final_state = nullptr;
        if (majdyn_sim_final_opinions(result, &final_state) != MAJDYN_OK ||
            majdyn_cluster_report_json(graph, final_state, &clusters_json.s) != MAJDYN_OK) {
            majdyn_opinions_free(final_state);
            majdyn_sim_result_free(result);
            majdyn_graph_free(graph);
            return fail("cluster report");
        }
        majdyn_opinions_free(final_state);
    }

    ordered_json out;
    out["version"] = majdyn_version();
    out["config"] = ordered_json{{"subcommand", "simulate"},
                                 {"graph", spec.to_json()},
                                 {"opinions", opinions},
                                 {"q", q},
                                 {"seed", seed},
                                 {"horizon", horizon},
                                 {"weighted", weighted},
                                 {"self_weight", self_weight}};
    out["graph"] = ordered_json{{"n", n},
                                {"m", majdyn_graph_edge_count(graph)},
                                {"weighted", majdyn_graph_is_weighted(graph) != 0},
                                {"connected", majdyn_graph_is_connected(graph) != 0}};
    out["result"] = ordered_json::parse(outcome_json.s);

    const int32_t kind = majdyn_sim_outcome(result);
    majdyn_sim_result_free(result);
    majdyn_graph_free(graph);

    try {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "trace.csv", csv.s);
        write_file(fs::path(out_dir) / "outcome.json", out.dump(2) + "\n");
        if (clusters_json.s) {
            ordered_json wrapped;
            wrapped["version"] = majdyn_version();
            wrapped["config"] = out["config"];
            wrapped["clusters"] = ordered_json::parse(clusters_json.s);
            write_file(fs::path(out_dir) / "clusters.json", wrapped.dump(2) + "\n");
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    std::cout << out["result"].dump(2) << "\n";
    return kind == MAJDYN_OUTCOME_BUDGET_EXHAUSTED ? kExitSoftFail : kExitOk;
}

int cmd_experiment(const ordered_json& config, const std::string& out_dir) {
    try {
        fs::create_directories(out_dir); // experiments may emit CSVs while running
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    StringGuard report;
    if (majdyn_experiment_run(config.dump().c_str(), &report.s) != MAJDYN_OK)
        return fail("experiment");
    const auto parsed = ordered_json::parse(report.s);
    try {
        write_file(fs::path(out_dir) / "report.json", std::string(report.s) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    std::cout << "experiment " << parsed["experiment"].get<std::string>()
              << (parsed["pass"].get<bool>() ? ": PASS" : ": FAIL");
    if (!parsed["regime"]["ok"].get<bool>())
        std::cout << " (out of regime, gates disabled)";
    std::cout << "\n";
    for (const auto& gate : parsed["gates"]) {
        std::cout << "  [" << (gate["passed"].get<bool>() ? "pass" : "FAIL") << "] "
                  << gate["name"].get<std::string>() << ": value "
                  << gate["value"].dump() << " vs threshold " << gate["threshold"].dump()
                  << "\n";
    }
    return parsed["pass"].get<bool>() ? kExitOk : kExitSoftFail;
}

int write_analysis(const std::string& out_dir, const std::string& name,
                   const std::string& content, const ordered_json& config) {
    try {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / name, content);
        ordered_json meta;
        meta["version"] = majdyn_version();
        meta["config"] = config;
        meta["file"] = name;
        write_file(fs::path(out_dir) / (name + ".meta.json"), meta.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    std::cout << "wrote " << (fs::path(out_dir) / name).string() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"majority dynamics on finite graphs"};
    app.set_version_flag("--version", std::string(majdyn_version()));
    app.require_subcommand(1);

    std::string out_dir = ".";
    app.add_option("--out", out_dir, "output directory")->capture_default_str();

    // ---- simulate
    auto* sim = app.add_subcommand("simulate", "run one trajectory");
    GraphSpec spec;
    std::string opinions = "iid";
    double q = 0.5;
    std::uint64_t seed = 1;
    std::int64_t horizon = 10000;
    bool weighted = false;
    double self_weight = 1.0;
    sim->add_option("--graph", spec.kind, "graph family: gnp|rrg|tree|level")
        ->capture_default_str();
    sim->add_option("--edge-list", spec.edge_list, "read the graph from an edge-list file");
    sim->add_option("--n", spec.n, "vertex count")->capture_default_str();
    sim->add_option("--p", spec.p, "edge probability (gnp)")->capture_default_str();
    sim->add_option("--d", spec.d, "degree (rrg, tree)")->capture_default_str();
    sim->add_option("--radius", spec.radius, "ball radius (tree)")->capture_default_str();
    sim->add_option("--depth", spec.depth, "level count (level)")->capture_default_str();
    sim->add_option("--opinions", opinions, "iid|all-plus|all-minus")->capture_default_str();
    sim->add_option("--q", q, "P[opinion = +1] for iid opinions")->capture_default_str();
    sim->add_option("--seed", seed, "master seed")->envname("MAJDYN_SEED")
        ->capture_default_str();
    sim->add_option("--horizon", horizon, "step budget")->capture_default_str();
    sim->add_flag("--weighted", weighted, "use edge weights from the input graph");
    sim->add_option("--self-weight", self_weight, "self-vote weight at even-degree vertices")
        ->capture_default_str();
    bool clusters = false;
    sim->add_flag("--clusters", clusters,
                  "also write the per-sign cluster report of the final state");

    // ---- experiment
    auto* exp = app.add_subcommand("experiment", "run a registered experiment");
    std::string exp_id;
    std::string config_path;
    ordered_json overrides = ordered_json::object();
    std::int64_t trials = -1, exp_horizon = -1, steps = -1, exp_depth = -1, full_trials = -1;
    std::int64_t exp_n = -1, exp_d = -1, trace_trials = -1, invariance_steps = -1;
    std::int64_t workers = -1;
    double exp_p = -1.0, exp_q = -1.0, exp_eps = -1.0, beta = -1.0, c_env = -1.0;
    std::uint64_t exp_seed = 1;
    bool exp_seed_set = false, exp_weighted = false, require_connected = false;
    std::string family;
    exp->add_option("id", exp_id,
                    std::string("experiment id, one of: ") + majdyn_experiment_ids());
    exp->add_option("--config", config_path, "run exactly from an echoed config JSON file");
    exp->add_option("--n", exp_n, "vertex count");
    exp->add_option("--p", exp_p, "edge probability");
    exp->add_option("--d", exp_d, "degree / mean degree");
    exp->add_option("--q", exp_q, "P[opinion = +1]");
    exp->add_option("--eps", exp_eps, "tolerance fraction");
    exp->add_option("--depth", exp_depth, "level-graph depth");
    exp->add_option("--trials", trials, "Monte Carlo trials");
    exp->add_option("--full-trials", full_trials, "full-dynamics trials (level-graph)");
    exp->add_option("--horizon", exp_horizon, "step budget per run");
    exp->add_option("--steps", steps, "recorded steps (growth-heuristic)");
    exp->add_option("--beta", beta, "soft-gate factor (growth-heuristic)");
    exp->add_option("--c-env", c_env, "envelope constant (minority-residue)");
    exp->add_option("--invariance-steps", invariance_steps,
                    "frozen-cycle check horizon (rrg-disagreement)");
    exp->add_option("--family", family, "graph family (flip-bound, near-period2-balance)");
    exp->add_flag("--weighted", exp_weighted, "weighted variant (flip-bound)");
    exp->add_flag("--require-connected", require_connected,
                  "resample random regular graphs until connected");
    exp->add_option("--trace-trials", trace_trials, "emit trace CSVs for this many trials");
    exp->add_option("--workers", workers, "trial-level worker threads (0 = all cores)");
    auto* seed_opt = exp->add_option("--seed", exp_seed, "master seed")
                         ->envname("MAJDYN_SEED");

    // ---- analyze
    auto* ana = app.add_subcommand("analyze", "exact oracles and spectral checks");
    ana->require_subcommand(1);
    auto* fourier = ana->add_subcommand("fourier", "majority Fourier spectrum CSV");
    std::int64_t maj_k = 5;
    fourier->add_option("--maj", maj_k, "arity of the majority (odd)")->capture_default_str();
    auto* stab = ana->add_subcommand("stability", "noise stability curve CSV");
    std::int64_t stab_k = 3;
    std::string rho_grid = "0:1:0.1";
    stab->add_option("--maj", stab_k, "arity of the majority (odd)")->capture_default_str();
    stab->add_option("--rho-grid", rho_grid, "grid begin:end:step")->capture_default_str();
    auto* mixing = ana->add_subcommand("mixing", "expander mixing check on one Gnp sample");
    std::int64_t mix_n = 2000, mix_samples = 10000;
    double mix_p = 0.1;
    std::uint64_t mix_seed = 1;
    mixing->add_option("--n", mix_n, "vertex count")->capture_default_str();
    mixing->add_option("--p", mix_p, "edge probability")->capture_default_str();
    mixing->add_option("--samples", mix_samples, "subset pairs to sample")
        ->capture_default_str();
    mixing->add_option("--seed", mix_seed, "seed")->envname("MAJDYN_SEED")
        ->capture_default_str();
    auto* overlap = ana->add_subcommand("overlap", "overlap correlation of two majorities");
    std::int64_t ov_n1 = 5, ov_n2 = 3, ov_m = 3;
    overlap->add_option("--n1", ov_n1)->capture_default_str();
    overlap->add_option("--n2", ov_n2)->capture_default_str();
    overlap->add_option("--m", ov_m)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed())
        return cmd_simulate(spec, opinions, q, seed, horizon, weighted, self_weight, clusters,
                            out_dir);

    if (exp->parsed()) {
        ordered_json config;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "error: cannot open config " << config_path << "\n";
                return kExitError;
            }
            try {
                config = ordered_json::parse(in);
                if (config.contains("config")) config = config["config"]; // accept a report
            } catch (const std::exception& e) {
                std::cerr << "error: bad config JSON: " << e.what() << "\n";
                return kExitError;
            }
        } else {
            if (exp_id.empty()) {
                std::cerr << "error: experiment id or --config required\n";
                return kExitError;
            }
            config["experiment"] = exp_id;
            auto set_if = [&](const char* key, const auto& value, bool given) {
                if (given) config[key] = value;
            };
            set_if("n", exp_n, exp_n >= 0);
            set_if("p", exp_p, exp_p >= 0.0);
            set_if("d", exp_d, exp_d >= 0);
            set_if("q", exp_q, exp_q >= 0.0);
            set_if("eps", exp_eps, exp_eps >= 0.0);
            set_if("depth", exp_depth, exp_depth >= 0);
            set_if("trials", trials, trials >= 0);
            set_if("full_trials", full_trials, full_trials >= 0);
            set_if("horizon", exp_horizon, exp_horizon >= 0);
            set_if("steps", steps, steps >= 0);
            set_if("beta", beta, beta >= 0.0);
            set_if("c_env", c_env, c_env >= 0.0);
            set_if("invariance_steps", invariance_steps, invariance_steps >= 0);
            set_if("family", family, !family.empty());
            set_if("weighted", exp_weighted, exp_weighted);
            set_if("require_connected", require_connected, require_connected);
            set_if("workers", workers, workers >= 0);
            exp_seed_set = seed_opt->count() > 0 || std::getenv("MAJDYN_SEED") != nullptr;
            set_if("seed", exp_seed, exp_seed_set);
            if (trace_trials >= 0) {
                config["trace_trials"] = trace_trials;
                config["trace_dir"] = out_dir;
            }
        }
        return cmd_experiment(config, out_dir);
    }

    if (fourier->parsed()) {
        StringGuard csv;
        if (majdyn_fourier_maj_csv(static_cast<int32_t>(maj_k), &csv.s) != MAJDYN_OK)
            return fail("fourier");
        return write_analysis(out_dir, "fourier_maj" + std::to_string(maj_k) + ".csv", csv.s,
                              ordered_json{{"subcommand", "analyze fourier"}, {"maj", maj_k}});
    }
    if (stab->parsed()) {
        double a = 0.0, b = 1.0, step = 0.1;
        if (std::sscanf(rho_grid.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3) {
            std::cerr << "error: --rho-grid must be begin:end:step\n";
            return kExitError;
        }
        StringGuard csv;
        if (majdyn_stability_maj_csv(static_cast<int32_t>(stab_k), a, b, step, &csv.s) !=
            MAJDYN_OK)
            return fail("stability");
        return write_analysis(out_dir, "stability_maj" + std::to_string(stab_k) + ".csv",
                              csv.s,
                              ordered_json{{"subcommand", "analyze stability"},
                                           {"maj", stab_k},
                                           {"rho_grid", rho_grid}});
    }
    if (mixing->parsed()) {
        StringGuard json;
        if (majdyn_mixing_check_json(mix_n, mix_p, mix_samples, mix_seed, &json.s) !=
            MAJDYN_OK)
            return fail("mixing");
        std::cout << json.s << "\n";
        const auto parsed = ordered_json::parse(json.s);
        const int rc = write_analysis(
            out_dir, "mixing.json", std::string(json.s) + "\n",
            ordered_json{{"subcommand", "analyze mixing"},
                         {"n", mix_n},
                         {"p", mix_p},
                         {"samples", mix_samples},
                         {"seed", mix_seed}});
        if (rc != kExitOk) return rc;
        return parsed["lambda_within_reference"].get<bool>() &&
                       parsed["subset_check_pass"].get<bool>()
                   ? kExitOk
                   : kExitSoftFail;
    }
    if (overlap->parsed()) {
        StringGuard json;
        if (majdyn_overlap_json(static_cast<int32_t>(ov_n1), static_cast<int32_t>(ov_n2),
                                static_cast<int32_t>(ov_m), &json.s) != MAJDYN_OK)
            return fail("overlap");
        std::cout << json.s << "\n";
        return write_analysis(out_dir, "overlap.json", std::string(json.s) + "\n",
                              ordered_json{{"subcommand", "analyze overlap"},
                                           {"n1", ov_n1},
                                           {"n2", ov_n2},
                                           {"m", ov_m}});
    }
    return kExitError;
}
