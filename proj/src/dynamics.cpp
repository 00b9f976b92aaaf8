#include "majdyn/dynamics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "majdyn/errors.hpp"

namespace majdyn {

namespace {

void require_state(const Graph& g, const OpinionState& x) {
    if (x.size() != g.vertex_count())
        throw std::invalid_argument("opinion state length does not match graph");
}

std::uint64_t state_hash(std::span<const std::int8_t> x) {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (auto v : x) {
        h ^= static_cast<std::uint64_t>(static_cast<std::uint8_t>(v));
        h *= 0x100000001B3ULL;
    }
    return h;
}

} // namespace

void step_into(const Graph& g, std::span<const std::int8_t> x, std::span<std::int8_t> y) {
    const std::int64_t n = g.vertex_count();
    for (Vertex v = 0; v < n; ++v) {
        auto nbrs = g.neighbors(v);
        std::int64_t sum = (nbrs.size() % 2 == 0) ? x[v] : 0;
        for (Vertex u : nbrs) sum += x[u];
        y[v] = sum > 0 ? std::int8_t{1} : std::int8_t{-1};
    }
}

void weighted_step_into(const Graph& g, std::span<const std::int8_t> x,
                        std::span<std::int8_t> y, double self_weight) {
    if (!g.weighted()) throw std::invalid_argument("weighted_step: graph has no weights");
    if (!(self_weight >= 0.0))
        throw std::invalid_argument("weighted_step: self weight must be non-negative");
    const std::int64_t n = g.vertex_count();
    for (Vertex v = 0; v < n; ++v) {
        auto nbrs = g.neighbors(v);
        auto ws = g.neighbor_weights(v);
        double sum = (nbrs.size() % 2 == 0) ? self_weight * x[v] : 0.0;
        for (std::size_t k = 0; k < nbrs.size(); ++k) sum += ws[k] * x[nbrs[k]];
        if (sum == 0.0)
            throw TieError(v, "weighted vote tie at vertex " + std::to_string(v));
        y[v] = sum > 0 ? std::int8_t{1} : std::int8_t{-1};
    }
}

OpinionState step(const Graph& g, const OpinionState& x) {
    require_state(g, x);
    OpinionState y;
    y.values.resize(x.values.size());
    y.time = x.time + 1;
    step_into(g, x.values, y.values);
    return y;
}

OpinionState weighted_step(const Graph& g, const OpinionState& x, double self_weight) {
    require_state(g, x);
    OpinionState y;
    y.values.resize(x.values.size());
    y.time = x.time + 1;
    weighted_step_into(g, x.values, y.values, self_weight);
    return y;
}

std::int64_t potential_quarters(const Graph& g, std::span<const std::int8_t> x_t,
                                std::span<const std::int8_t> x_t1) {
    std::int64_t disagreements = 0;
    const std::int64_t n = g.vertex_count();
    for (Vertex v = 0; v < n; ++v) {
        auto nbrs = g.neighbors(v);
        const auto yi = x_t1[v];
        if (nbrs.size() % 2 == 0) disagreements += (yi != x_t[v]);
        for (Vertex u : nbrs) disagreements += (yi != x_t[u]);
    }
    return 4 * disagreements;
}

double potential(const Graph& g, const OpinionState& x_t, const OpinionState& x_t1,
                 double self_weight) {
    require_state(g, x_t);
    require_state(g, x_t1);
    const std::int64_t n = g.vertex_count();
    if (n == 0) return 0.0;
    if (!g.weighted())
        return static_cast<double>(potential_quarters(g, x_t.values, x_t1.values)) /
               static_cast<double>(4 * n);
    double total = 0.0;
    for (Vertex v = 0; v < n; ++v) {
        auto nbrs = g.neighbors(v);
        auto ws = g.neighbor_weights(v);
        const double yi = x_t1.values[v];
        if (nbrs.size() % 2 == 0) {
            const double d = yi - x_t.values[v];
            total += self_weight * d * d;
        }
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            const double d = yi - x_t.values[nbrs[k]];
            total += ws[k] * d * d;
        }
    }
    return total / static_cast<double>(4 * n);
}

bool DecrementCheck::holds(double rel_tol) const {
    if (exact) return lhs_q == rhs_q;
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    return std::abs(lhs - rhs) <= rel_tol * scale;
}

DecrementCheck potential_decrement_check(const Graph& g, const OpinionState& x_prev,
                                         const OpinionState& x_cur, const OpinionState& x_next,
                                         double self_weight) {
    require_state(g, x_prev);
    require_state(g, x_cur);
    require_state(g, x_next);
    const std::int64_t n = g.vertex_count();
    DecrementCheck out{};
    if (n == 0) {
        out.exact = !g.weighted();
        return out;
    }

    if (!g.weighted()) {
        const std::int64_t q_cur = potential_quarters(g, x_cur.values, x_next.values);
        const std::int64_t q_prev = potential_quarters(g, x_prev.values, x_cur.values);
        std::int64_t rhs2 = 0; // sum_i (x_i(t+1) - x_i(t-1)) * S_i(t)
        for (Vertex v = 0; v < n; ++v) {
            const std::int64_t delta = x_next.values[v] - x_prev.values[v];
            if (delta == 0) continue;
            auto nbrs = g.neighbors(v);
            std::int64_t s = (nbrs.size() % 2 == 0) ? x_cur.values[v] : 0;
            for (Vertex u : nbrs) s += x_cur.values[u];
            rhs2 += delta * s;
        }
        out.exact = true;
        out.lhs_q = q_cur - q_prev;
        out.rhs_q = -2 * rhs2; // both sides in units of 1/(4n)
        out.lhs = static_cast<double>(out.lhs_q) / static_cast<double>(4 * n);
        out.rhs = static_cast<double>(out.rhs_q) / static_cast<double>(4 * n);
        return out;
    }

    out.lhs = potential(g, x_cur, x_next, self_weight) -
              potential(g, x_prev, x_cur, self_weight);
    double rhs_sum = 0.0;
    for (Vertex v = 0; v < n; ++v) {
        const double delta = x_next.values[v] - x_prev.values[v];
        if (delta == 0.0) continue;
        auto nbrs = g.neighbors(v);
        auto ws = g.neighbor_weights(v);
        double s = (nbrs.size() % 2 == 0) ? self_weight * x_cur.values[v] : 0.0;
        for (std::size_t k = 0; k < nbrs.size(); ++k) s += ws[k] * x_cur.values[nbrs[k]];
        rhs_sum += delta * s;
    }
    out.rhs = -rhs_sum / static_cast<double>(2 * n);
    return out;
}

namespace {

struct SignedSums {
    std::vector<double> sums; // all signed sums of one half
};

void enumerate_signed_sums(std::span<const double> w, std::vector<double>& out) {
    out.assign(std::size_t{1} << w.size(), 0.0);
    for (std::size_t mask = 0; mask < out.size(); ++mask) {
        double s = 0.0;
        for (std::size_t b = 0; b < w.size(); ++b)
            s += (mask >> b & 1) ? w[b] : -w[b];
        out[mask] = s;
    }
}

} // namespace

RegularityParams validate_regularity(const Graph& g, double self_weight, int max_enum_degree) {
    const std::int64_t n = g.vertex_count();
    const double self = g.weighted() ? self_weight : 1.0;
    double eps = std::numeric_limits<double>::infinity();
    double W = 0.0;

    std::vector<double> voters, lo_sums, hi_sums;
    std::vector<std::pair<double, std::size_t>> hi_sorted;
    for (Vertex v = 0; v < n; ++v) {
        auto nbrs = g.neighbors(v);
        if (static_cast<int>(nbrs.size()) > max_enum_degree)
            throw std::invalid_argument(
                "validate_regularity: degree " + std::to_string(nbrs.size()) + " at vertex " +
                std::to_string(v) + " exceeds enumeration cap " +
                std::to_string(max_enum_degree) + "; rely on runtime tie detection instead");
        voters.clear();
        if (g.weighted()) {
            auto ws = g.neighbor_weights(v);
            voters.assign(ws.begin(), ws.end());
        } else {
            voters.assign(nbrs.size(), 1.0);
        }
        if (nbrs.size() % 2 == 0) voters.push_back(self);

        double wd = 0.0;
        for (double w : voters) wd += w;
        W = std::max(W, wd);

        const std::size_t k = voters.size();
        const std::size_t half = k / 2;
        enumerate_signed_sums({voters.data(), half}, lo_sums);
        enumerate_signed_sums({voters.data() + half, k - half}, hi_sums);
        hi_sorted.clear();
        for (std::size_t m = 0; m < hi_sums.size(); ++m) hi_sorted.emplace_back(hi_sums[m], m);
        std::sort(hi_sorted.begin(), hi_sorted.end());

        for (std::size_t ml = 0; ml < lo_sums.size(); ++ml) {
            const double target = -lo_sums[ml];
            auto it = std::lower_bound(hi_sorted.begin(), hi_sorted.end(),
                                       std::make_pair(target, std::size_t{0}));
            for (int probe = 0; probe < 2; ++probe) {
                auto cand = it;
                if (probe == 1) {
                    if (cand == hi_sorted.begin()) continue;
                    --cand;
                }
                if (cand == hi_sorted.end()) continue;
                const double abs_sum = std::abs(lo_sums[ml] + cand->first);
                if (abs_sum < eps) {
                    eps = abs_sum;
                    if (eps == 0.0) {
                        std::vector<std::int8_t> pattern(k);
                        for (std::size_t b = 0; b < half; ++b)
                            pattern[b] = (ml >> b & 1) ? 1 : -1;
                        for (std::size_t b = half; b < k; ++b)
                            pattern[b] = (cand->second >> (b - half) & 1) ? 1 : -1;
                        throw TieError(v,
                                       "tie achievable at vertex " + std::to_string(v) +
                                           " (epsilon = 0)",
                                       std::move(pattern));
                    }
                }
            }
        }
    }
    if (n == 0) eps = 0.0;
    return {eps, W};
}

double Trace::average_flips_per_vertex() const {
    if (flips2_per_vertex.empty()) return 0.0;
    std::int64_t total = 0;
    for (auto f : flips2_per_vertex) total += f;
    return static_cast<double>(total) / static_cast<double>(flips2_per_vertex.size());
}

namespace {

void append_double(std::string& out, double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                   std::chars_format::general, 17);
    out.append(buf, ptr - buf);
}

} // namespace

std::string Trace::to_csv() const {
    std::string out = "t,mean,flips2,potential,unanimous\n";
    for (std::size_t t = 0; t < mean.size(); ++t) {
        out += std::to_string(t);
        out += ',';
        append_double(out, mean[t]);
        out += ',';
        out += std::to_string(flips2[t]);
        out += ',';
        append_double(out, potential[t]);
        out += ',';
        out += unanimous[t] ? '1' : '0';
        out += '\n';
    }
    return out;
}

const char* to_string(RunOutcome::Kind k) {
    switch (k) {
        case RunOutcome::Kind::FixedPoint: return "fixed-point";
        case RunOutcome::Kind::PeriodTwo: return "period-two";
        case RunOutcome::Kind::BudgetExhausted: return "budget-exhausted";
    }
    return "unknown";
}

namespace {

struct TraceRow {
    double mean;
    bool unanimous;
};

TraceRow summarize(std::span<const std::int8_t> x) {
    std::int64_t sum = 0;
    for (auto v : x) sum += v;
    const auto n = static_cast<std::int64_t>(x.size());
    return {n == 0 ? 0.0 : static_cast<double>(sum) / static_cast<double>(n),
            std::llabs(sum) == n};
}

} // namespace

std::pair<Trace, RunOutcome> run(const Graph& g, const OpinionState& x0,
                                 const RunOptions& options) {
    require_state(g, x0);
    if (options.max_steps < 2) throw std::invalid_argument("run: budget must be >= 2");
    if (options.weighted && !g.weighted())
        throw std::invalid_argument("run: weighted dynamics on an unweighted graph");
    const std::int64_t n = g.vertex_count();
    // unweighted dynamics ignores edge weights, so its potential does too
    const bool exact = !options.weighted;

    Trace trace;
    trace.flips2_per_vertex.assign(n, 0);

    std::vector<std::int8_t> bufs[3];
    std::uint64_t hashes[3] = {0, 0, 0};
    bufs[0] = x0.values;
    bufs[1].resize(n);
    bufs[2].resize(n);
    hashes[0] = state_hash(bufs[0]);

    auto record = [&](std::span<const std::int8_t> x, std::int64_t flips, double pot) {
        const auto row = summarize(x);
        trace.mean.push_back(row.mean);
        trace.flips2.push_back(flips);
        trace.potential.push_back(pot);
        trace.unanimous.push_back(row.unanimous ? 1 : 0);
    };

    record(bufs[0], 0, 0.0); // potential for row 0 is filled after step 1
    if (options.observer) options.observer(0, bufs[0]);

    auto do_step = [&](std::span<const std::int8_t> src, std::span<std::int8_t> dst) {
        if (options.weighted)
            weighted_step_into(g, src, dst, options.self_weight);
        else
            step_into(g, src, dst);
    };

    auto pot_of = [&](std::span<const std::int8_t> xt, std::span<const std::int8_t> xt1) {
        if (exact)
            return n == 0 ? 0.0
                          : static_cast<double>(potential_quarters(g, xt, xt1)) /
                                static_cast<double>(4 * n);
        OpinionState a, b;
        a.values.assign(xt.begin(), xt.end());
        b.values.assign(xt1.begin(), xt1.end());
        return potential(g, a, b, options.self_weight);
    };

    std::int64_t entry_time = -1;
    RunOutcome::Kind kind = RunOutcome::Kind::BudgetExhausted;
    std::int64_t prev_q = 0;        // exact path: 4n * L_{t-1}
    double prev_pot = 0.0;          // weighted path
    bool have_prev_pot = false;

    std::int64_t t = 0; // index of the newest computed state
    while (true) {
        const int cur = static_cast<int>(t % 3);
        const int nxt = static_cast<int>((t + 1) % 3);
        const int old = static_cast<int>((t + 2) % 3); // holds state(t-1) when t >= 1
        do_step(bufs[cur], bufs[nxt]);
        hashes[nxt] = state_hash(bufs[nxt]);
        ++t; // state(t) now lives in bufs[nxt]

        // potential row t-1 couples state(t-1) to state(t)
        std::int64_t q_now = 0;
        double pot_now;
        if (exact) {
            q_now = potential_quarters(g, bufs[cur], bufs[nxt]);
            pot_now = n == 0 ? 0.0 : static_cast<double>(q_now) / static_cast<double>(4 * n);
        } else {
            pot_now = pot_of(bufs[cur], bufs[nxt]);
        }
        trace.potential[t - 1] = pot_now;

        std::int64_t flips = 0;
        if (t >= 2) {
            auto& oldest = bufs[old];
            auto& newest = bufs[nxt];
            for (std::int64_t i = 0; i < n; ++i) {
                if (newest[i] != oldest[i]) {
                    ++flips;
                    ++trace.flips2_per_vertex[i];
                }
            }
            if (options.check_identity) {
                // identity and monotonicity of the potential
                if (exact) {
                    std::int64_t rhs2 = 0;
                    for (Vertex v = 0; v < n; ++v) {
                        const std::int64_t delta = bufs[nxt][v] - bufs[old][v];
                        if (delta == 0) continue;
                        auto nbrs = g.neighbors(v);
                        std::int64_t s = (nbrs.size() % 2 == 0) ? bufs[cur][v] : 0;
                        for (Vertex u : nbrs) s += bufs[cur][u];
                        rhs2 += delta * s;
                    }
                    if (q_now - prev_q != -2 * rhs2)
                        throw InvariantViolation(
                            "potential decrement identity violated at t=" + std::to_string(t));
                    if (q_now > prev_q)
                        throw InvariantViolation("potential increased at t=" + std::to_string(t));
                } else {
                    double rhs_sum = 0.0;
                    for (Vertex v = 0; v < n; ++v) {
                        const double delta = bufs[nxt][v] - bufs[old][v];
                        if (delta == 0.0) continue;
                        auto nbrs = g.neighbors(v);
                        auto ws = g.neighbor_weights(v);
                        double s = (nbrs.size() % 2 == 0)
                                       ? options.self_weight * bufs[cur][v]
                                       : 0.0;
                        for (std::size_t k = 0; k < nbrs.size(); ++k)
                            s += ws[k] * bufs[cur][nbrs[k]];
                        rhs_sum += delta * s;
                    }
                    const double lhs = pot_now - prev_pot;
                    const double rhs = -rhs_sum / static_cast<double>(2 * n);
                    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
                    if (std::abs(lhs - rhs) > 1e-12 * scale)
                        throw InvariantViolation(
                            "potential decrement identity violated at t=" + std::to_string(t));
                    if (have_prev_pot && pot_now > prev_pot + 1e-12 * std::max(1.0, prev_pot))
                        throw InvariantViolation("potential increased at t=" + std::to_string(t));
                }
            }
            if (entry_time < 0 && hashes[nxt] == hashes[old] &&
                std::memcmp(bufs[nxt].data(), bufs[old].data(), n) == 0) {
                entry_time = t;
                kind = (hashes[nxt] == hashes[cur] &&
                        std::memcmp(bufs[nxt].data(), bufs[cur].data(), n) == 0)
                           ? RunOutcome::Kind::FixedPoint
                           : RunOutcome::Kind::PeriodTwo;
            }
        }
        prev_q = q_now;
        prev_pot = pot_now;
        have_prev_pot = true;

        record(bufs[nxt], flips, 0.0);
        if (options.observer) options.observer(t, bufs[nxt]);

        if (entry_time >= 0 && t >= options.min_steps) break;
        if (t >= options.max_steps) break;
    }

    // final row's potential: the successor of the last state is known on
    // termination (period <= 2), otherwise computed as one untraced step
    const int last = static_cast<int>(t % 3);
    const int before = static_cast<int>((t + 2) % 3);
    if (entry_time >= 0) {
        trace.potential[t] = pot_of(bufs[last], bufs[before]);
    } else {
        std::vector<std::int8_t> extra(n);
        do_step(bufs[last], extra);
        trace.potential[t] = pot_of(bufs[last], extra);
    }

    RunOutcome outcome;
    outcome.kind = entry_time >= 0 ? kind : RunOutcome::Kind::BudgetExhausted;
    outcome.entry_time = entry_time;
    outcome.final_state.values.assign(bufs[last].begin(), bufs[last].end());
    outcome.final_state.time = t;
    outcome.previous_state.values.assign(bufs[before].begin(), bufs[before].end());
    outcome.previous_state.time = t - 1;

    if (options.check_flip_bound && n > 0) {
        double eps = 1.0, W = 0.0;
        bool have = false;
        if (options.regularity) {
            eps = options.regularity->epsilon;
            W = options.regularity->W;
            have = eps > 0.0;
        } else if (exact) {
            for (Vertex v = 0; v < n; ++v) {
                const auto deg = g.degree(v);
                W = std::max(W, static_cast<double>(deg + (deg % 2 == 0 ? 1 : 0)));
            }
            have = true;
        }
        if (have) {
            const double avg = trace.average_flips_per_vertex();
            if (avg > 2.0 * W / eps + 1e-9)
                throw InvariantViolation("flip-count bound exceeded: " + std::to_string(avg) +
                                         " > 2W/eps = " + std::to_string(2.0 * W / eps));
        }
    }

    return {std::move(trace), std::move(outcome)};
}

} // namespace majdyn
