#include "majdyn/graph.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "majdyn/errors.hpp"

namespace majdyn {

namespace {

std::string edge_str(std::int64_t i, std::int64_t j) {
    return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

} // namespace

Graph Graph::from_edges(std::int64_t n, std::span<const Edge> endpoints,
                        std::span<const double> weights) {
    if (n < 0) throw std::invalid_argument("vertex count must be non-negative");
    const bool weighted = !weights.empty();
    if (weighted && weights.size() != endpoints.size())
        throw std::invalid_argument("weight list length does not match edge list");

    std::vector<std::int64_t> offsets(n + 1, 0);
    for (std::size_t e = 0; e < endpoints.size(); ++e) {
        const auto [i, j] = endpoints[e];
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw std::invalid_argument("edge " + edge_str(i, j) + " out of range for n=" +
                                        std::to_string(n));
        if (i == j)
            throw std::invalid_argument("self-loop at edge " + edge_str(i, j));
        if (weighted && !(weights[e] >= 0.0))
            throw std::invalid_argument("negative weight on edge " + edge_str(i, j));
        ++offsets[i + 1];
        ++offsets[j + 1];
    }
    for (std::int64_t v = 0; v < n; ++v) offsets[v + 1] += offsets[v];

    std::vector<Vertex> adjacency(endpoints.size() * 2);
    std::vector<double> adj_weights;
    if (weighted) adj_weights.resize(endpoints.size() * 2);
    std::vector<std::int64_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::size_t e = 0; e < endpoints.size(); ++e) {
        const auto [i, j] = endpoints[e];
        adjacency[cursor[i]] = j;
        adjacency[cursor[j]] = i;
        if (weighted) {
            adj_weights[cursor[i]] = weights[e];
            adj_weights[cursor[j]] = weights[e];
        }
        ++cursor[i];
        ++cursor[j];
    }

    // sort each list, carrying weights along, then reject duplicates
    for (std::int64_t v = 0; v < n; ++v) {
        const auto begin = offsets[v], end = offsets[v + 1];
        if (weighted) {
            std::vector<std::pair<Vertex, double>> tmp;
            tmp.reserve(end - begin);
            for (auto k = begin; k < end; ++k) tmp.emplace_back(adjacency[k], adj_weights[k]);
            std::sort(tmp.begin(), tmp.end());
            for (auto k = begin; k < end; ++k) {
                adjacency[k] = tmp[k - begin].first;
                adj_weights[k] = tmp[k - begin].second;
            }
        } else {
            std::sort(adjacency.begin() + begin, adjacency.begin() + end);
        }
        for (auto k = begin + 1; k < end; ++k)
            if (adjacency[k] == adjacency[k - 1])
                throw std::invalid_argument("duplicate edge " + edge_str(v, adjacency[k]));
    }

    return from_sorted_csr(n, std::move(offsets), std::move(adjacency), std::move(adj_weights));
}

Graph Graph::from_sorted_csr(std::int64_t n, std::vector<std::int64_t> offsets,
                             std::vector<Vertex> adjacency,
                             std::vector<double> adjacency_weights) {
    assert(static_cast<std::int64_t>(offsets.size()) == n + 1);
    assert(adjacency_weights.empty() || adjacency_weights.size() == adjacency.size());
    Graph g;
    g.n_ = n;
    g.offsets_ = std::move(offsets);
    g.adjacency_ = std::move(adjacency);
    g.adjacency_weights_ = std::move(adjacency_weights);
    for (std::int64_t v = 0; v < n; ++v)
        g.max_degree_ = std::max(g.max_degree_, g.degree(static_cast<Vertex>(v)));
#ifndef NDEBUG
    for (std::int64_t v = 0; v < n; ++v) {
        auto nbrs = g.neighbors(static_cast<Vertex>(v));
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            assert(nbrs[k] != v);
            assert(k == 0 || nbrs[k] > nbrs[k - 1]);
            assert(g.has_edge(nbrs[k], static_cast<Vertex>(v)));
        }
    }
#endif
    return g;
}

bool Graph::has_edge(Vertex u, Vertex v) const {
    auto nbrs = neighbors(u);
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (Vertex v = 0; v < n_; ++v)
        for (Vertex u : neighbors(v))
            if (v < u) out.push_back({v, u});
    return out;
}

std::vector<double> Graph::edge_weights() const {
    std::vector<double> out;
    if (!weighted()) return out;
    out.reserve(edge_count());
    for (Vertex v = 0; v < n_; ++v) {
        auto nbrs = neighbors(v);
        auto ws = neighbor_weights(v);
        for (std::size_t k = 0; k < nbrs.size(); ++k)
            if (v < nbrs[k]) out.push_back(ws[k]);
    }
    return out;
}

bool Graph::connected() const {
    if (n_ <= 1) return true;
    std::vector<std::uint8_t> seen(n_, 0);
    std::vector<Vertex> stack{0};
    seen[0] = 1;
    std::int64_t visited = 1;
    while (!stack.empty()) {
        const Vertex v = stack.back();
        stack.pop_back();
        for (Vertex u : neighbors(v)) {
            if (!seen[u]) {
                seen[u] = 1;
                ++visited;
                stack.push_back(u);
            }
        }
    }
    return visited == n_;
}

double OpinionState::mean() const {
    std::int64_t sum = 0;
    for (auto v : values) sum += v;
    return values.empty() ? 0.0 : static_cast<double>(sum) / static_cast<double>(values.size());
}

std::int64_t OpinionState::plus_count() const {
    std::int64_t c = 0;
    for (auto v : values) c += (v > 0);
    return c;
}

bool OpinionState::unanimous() const {
    if (values.empty()) return true;
    const auto first = values.front();
    for (auto v : values)
        if (v != first) return false;
    return true;
}

OpinionState OpinionState::constant(std::int64_t n, std::int8_t value) {
    if (value != 1 && value != -1) throw std::invalid_argument("opinion must be +1 or -1");
    OpinionState s;
    s.values.assign(n, value);
    return s;
}

namespace {

void format_double(std::ostream& out, double w) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), w,
                                   std::chars_format::general, 17);
    out.write(buf, ptr - buf);
}

} // namespace

void write_edge_list(const Graph& g, std::ostream& out) {
    out << g.vertex_count() << ' ' << g.edge_count() << '\n';
    const bool weighted = g.weighted();
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        auto nbrs = g.neighbors(v);
        auto ws = g.neighbor_weights(v);
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            if (v >= nbrs[k]) continue;
            out << v << ' ' << nbrs[k];
            if (weighted) {
                out << ' ';
                format_double(out, ws[k]);
            }
            out << '\n';
        }
    }
}

Graph read_edge_list(std::istream& in) {
    std::string line;
    std::int64_t lineno = 0;
    std::int64_t n = -1, m = -1;
    std::vector<Edge> edges;
    std::vector<double> weights;
    bool any_weight = false;

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        if (n < 0) {
            if (!(ss >> n >> m)) {
                if (ss.eof() && line.find_first_not_of(" \t\r") == std::string::npos) {
                    n = -1; // blank/comment before header
                    continue;
                }
                throw ParseError(lineno, "expected header \"n m\" at line " +
                                             std::to_string(lineno));
            }
            if (n < 0 || m < 0)
                throw ParseError(lineno, "negative counts in header at line " +
                                             std::to_string(lineno));
            edges.reserve(m);
            continue;
        }
        std::int64_t i, j;
        if (!(ss >> i)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw ParseError(lineno, "expected edge line at line " + std::to_string(lineno));
        }
        if (!(ss >> j))
            throw ParseError(lineno, "expected \"i j\" at line " + std::to_string(lineno));
        if (i == j)
            throw ParseError(lineno, "self-loop " + edge_str(i, j) + " at line " +
                                         std::to_string(lineno));
        if (i > j)
            throw ParseError(lineno, "endpoints not in i < j order at line " +
                                         std::to_string(lineno));
        if (i < 0 || j >= n)
            throw ParseError(lineno, "vertex out of range at line " + std::to_string(lineno));
        double w;
        if (ss >> w) {
            any_weight = true;
            weights.resize(edges.size(), 1.0);
            weights.push_back(w);
        } else if (any_weight) {
            weights.push_back(1.0);
        }
        std::string trailing;
        ss.clear();
        if (ss >> trailing)
            throw ParseError(lineno, "trailing tokens at line " + std::to_string(lineno));
        edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>(j)});
    }
    if (n < 0) throw ParseError(0, "missing header line \"n m\"");
    if (static_cast<std::int64_t>(edges.size()) != m)
        throw ParseError(lineno, "header declared " + std::to_string(m) + " edges, found " +
                                     std::to_string(edges.size()));
    try {
        return Graph::from_edges(n, edges, weights);
    } catch (const std::invalid_argument& e) {
        throw ParseError(0, std::string("invalid edge list: ") + e.what());
    }
}

void write_edge_list_file(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_edge_list(g, out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

Graph read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return read_edge_list(in);
}

} // namespace majdyn
