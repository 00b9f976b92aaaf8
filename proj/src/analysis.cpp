#include "majdyn/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "majdyn/errors.hpp"

namespace majdyn {

FourierTable FourierTable::from_truth_table(std::span<const std::int8_t> table, int k) {
    if (k < 0 || k > kMaxArity)
        throw std::invalid_argument("fourier: arity must be in [0, " +
                                    std::to_string(kMaxArity) + "]");
    if (table.size() != (std::size_t{1} << k))
        throw std::invalid_argument("fourier: truth table length must be 2^k");
    FourierTable out;
    out.k_ = k;
    out.raw_.assign(table.begin(), table.end());
    for (auto v : out.raw_)
        if (v != 1 && v != -1)
            throw std::invalid_argument("fourier: truth table values must be +1/-1");
    // in-place Walsh-Hadamard; raw[S] = sum_x f(x) (-1)^{popcount(S & x)}
    auto& a = out.raw_;
    for (std::size_t len = 1; len < a.size(); len <<= 1) {
        for (std::size_t block = 0; block < a.size(); block += 2 * len) {
            for (std::size_t i = block; i < block + len; ++i) {
                const std::int64_t u = a[i], v = a[i + len];
                a[i] = u + v;
                a[i + len] = u - v;
            }
        }
    }
    return out;
}

double FourierTable::coefficient(std::uint32_t mask) const {
    return static_cast<double>(raw_[mask]) / static_cast<double>(std::int64_t{1} << k_);
}

std::vector<double> FourierTable::weight_by_degree() const {
    std::vector<double> w(k_ + 1, 0.0);
    for (std::size_t mask = 0; mask < raw_.size(); ++mask) {
        const double c = coefficient(static_cast<std::uint32_t>(mask));
        w[std::popcount(static_cast<std::uint32_t>(mask))] += c * c;
    }
    return w;
}

bool FourierTable::parseval_exact() const {
    unsigned __int128 sum = 0;
    for (auto v : raw_) sum += static_cast<unsigned __int128>(static_cast<__int128>(v) * v);
    const unsigned __int128 expect = static_cast<unsigned __int128>(1) << (2 * k_);
    return sum == expect;
}

double FourierTable::parseval_sum() const {
    double sum = 0.0;
    for (std::size_t mask = 0; mask < raw_.size(); ++mask) {
        const double c = coefficient(static_cast<std::uint32_t>(mask));
        sum += c * c;
    }
    return sum;
}

std::vector<std::int8_t> majority_truth_table(int k) {
    if (k < 1 || k > FourierTable::kMaxArity || k % 2 == 0)
        throw std::invalid_argument("majority table: k must be odd and in [1, 24]");
    std::vector<std::int8_t> table(std::size_t{1} << k);
    for (std::size_t mask = 0; mask < table.size(); ++mask) {
        const int minus = std::popcount(static_cast<std::uint32_t>(mask));
        table[mask] = (k - 2 * minus) > 0 ? std::int8_t{1} : std::int8_t{-1};
    }
    return table;
}

double maj_singleton_coeff(int k) {
    if (k < 1 || k % 2 == 0)
        throw std::invalid_argument("maj singleton: k must be odd and >= 1");
    // 2 C(k-1, (k-1)/2) / 2^k = prod_{i=1..m} (2i-1)/(2i) with m = (k-1)/2
    const int m = (k - 1) / 2;
    double acc = 1.0;
    for (int i = 1; i <= m; ++i)
        acc *= static_cast<double>(2 * i - 1) / static_cast<double>(2 * i);
    return acc;
}

std::int64_t maj_singleton_raw(int k) {
    if (k < 1 || k % 2 == 0 || k > 63)
        throw std::invalid_argument("maj singleton raw: k must be odd and in [1, 63]");
    const int m = (k - 1) / 2;
    unsigned __int128 c = 1;
    for (int i = 1; i <= m; ++i) c = c * static_cast<unsigned>(m + i) / static_cast<unsigned>(i);
    const unsigned __int128 result = 2 * c;
    if (result > static_cast<unsigned __int128>(INT64_MAX))
        throw std::invalid_argument("maj singleton raw: overflow");
    return static_cast<std::int64_t>(result);
}

double noise_stability(const FourierTable& table, double rho) {
    if (!(rho >= 0.0 && rho <= 1.0))
        throw std::invalid_argument("noise stability: rho must be in [0, 1]");
    const auto w = table.weight_by_degree();
    double stab = 0.0, r = 1.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        stab += r * w[j];
        r *= rho;
    }
    return stab;
}

namespace {

/// E[sgn(sigma + U_k)] with U_k a sum of k iid uniform +-1. Caller guarantees
/// sigma + U_k is never zero (odd total parity).
double conditional_sign_mean(int k, int sigma, const std::vector<double>& binom_over_2k) {
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) {
        const int value = sigma + k - 2 * j;
        acc += (value > 0 ? 1.0 : -1.0) * binom_over_2k[j];
    }
    return acc;
}

std::vector<double> binomial_row_scaled(int k) {
    // C(k, j) / 2^k, exact in doubles for k <= 24
    std::vector<double> row(k + 1);
    double c = 1.0;
    for (int j = 0; j <= k; ++j) {
        row[j] = c / std::ldexp(1.0, k);
        c = c * static_cast<double>(k - j) / static_cast<double>(j + 1);
    }
    return row;
}

} // namespace

double overlap_correlation(int n1, int n2, int m) {
    if (n1 < 1 || n2 < 1 || n1 % 2 == 0 || n2 % 2 == 0)
        throw std::invalid_argument("overlap: n1 and n2 must be odd and >= 1");
    if (n1 > FourierTable::kMaxArity || n2 > FourierTable::kMaxArity)
        throw std::invalid_argument("overlap: arities above the enumeration cap");
    if (m < 0 || m > std::min(n1, n2))
        throw std::invalid_argument("overlap: m must be in [0, min(n1, n2)]");

    const auto shared = binomial_row_scaled(m);
    const auto free1 = binomial_row_scaled(n1 - m);
    const auto free2 = binomial_row_scaled(n2 - m);
    double acc = 0.0;
    for (int s = 0; s <= m; ++s) {
        const int sigma = 2 * s - m;
        acc += shared[s] * conditional_sign_mean(n1 - m, sigma, free1) *
               conditional_sign_mean(n2 - m, sigma, free2);
    }
    return acc;
}

double one_sided_chebyshev(double mean, double second_moment, double tau) {
    if (!(mean != 0.0) || !(second_moment >= mean * mean))
        throw std::invalid_argument("one-sided chebyshev: need second_moment >= mean^2 > 0");
    if (!(tau >= 0.0 && tau < 1.0))
        throw std::invalid_argument("one-sided chebyshev: tau must be in [0, 1)");
    const double ratio = second_moment / (mean * mean);
    const double q = (1.0 - tau) * (1.0 - tau);
    return q / (ratio + q - 1.0);
}

namespace {

/// y = (A + D - Q) x, matrix-free.
void apply_centered(const Graph& g, const std::vector<std::uint8_t>& loops, double p,
                    const std::vector<double>& x, std::vector<double>& y) {
    const std::int64_t n = g.vertex_count();
    double total = 0.0;
    for (double v : x) total += v;
    const double shift = p * total;
    for (Vertex v = 0; v < n; ++v) {
        double acc = loops[v] ? x[v] : 0.0;
        for (Vertex u : g.neighbors(v)) acc += x[u];
        y[v] = acc - shift;
    }
}

double norm2(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

} // namespace

MixingEstimate estimate_lambda(const Graph& g, double p, Rng& rng,
                               std::int64_t max_iterations, double tolerance) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("estimate_lambda: p must be in [0, 1]");
    const std::int64_t n = g.vertex_count();
    MixingEstimate est;
    est.p = p;
    est.n = n;
    est.tolerance = tolerance;
    est.loops.resize(n);
    for (auto& l : est.loops) l = rng.bernoulli(p) ? 1 : 0;
    est.lambda = 0.0;
    est.iterations = 0;
    est.residual = 0.0;
    if (n == 0) return est;

    std::vector<double> v(n), z(n), w(n);
    for (auto& x : v) x = rng.next_double() - 0.5;
    const double v0 = norm2(v);
    if (v0 == 0.0) v[0] = 1.0;
    for (auto& x : v) x /= std::max(v0, 1e-300);

    double lambda_prev = -1.0;
    int stable = 0;
    for (std::int64_t it = 1; it <= max_iterations; ++it) {
        apply_centered(g, est.loops, p, v, z);
        const double zn = norm2(z);
        est.iterations = it;
        if (zn <= 1e-14) {
            est.lambda = 0.0;
            return est;
        }
        apply_centered(g, est.loops, p, z, w);
        const double lambda = zn; // v is unit, so |Mv| estimates the top |eigenvalue|
        const double wn = norm2(w);
        if (wn <= 1e-14) {
            // M z = 0 with z != 0: lambda estimate is exactly zn
            est.lambda = lambda;
            return est;
        }
        if (lambda_prev >= 0.0 &&
            std::abs(lambda - lambda_prev) <= tolerance * std::max(lambda, 1e-30)) {
            if (++stable >= 3) {
                est.lambda = lambda;
                // residual of the squared operator: |M^2 v - lambda^2 v| / lambda^2
                double r = 0.0;
                for (std::int64_t i = 0; i < n; ++i) {
                    const double d = w[i] - lambda * lambda * v[i];
                    r += d * d;
                }
                est.residual = std::sqrt(r) / (lambda * lambda);
                return est;
            }
        } else {
            stable = 0;
        }
        lambda_prev = lambda;
        for (std::int64_t i = 0; i < n; ++i) v[i] = w[i] / wn;
    }
    double r = 0.0;
    apply_centered(g, est.loops, p, v, z);
    const double zn = norm2(z);
    apply_centered(g, est.loops, p, z, w);
    for (std::int64_t i = 0; i < n; ++i) {
        const double d = w[i] - zn * zn * v[i];
        r += d * d;
    }
    throw ConvergenceError(std::sqrt(r) / std::max(zn * zn, 1e-300),
                           "estimate_lambda: no convergence within " +
                               std::to_string(max_iterations) + " iterations");
}

MixingCheckReport mixing_lemma_check(const Graph& g, const MixingEstimate& estimate,
                                     std::int64_t samples, Rng& rng) {
    const std::int64_t n = g.vertex_count();
    if (static_cast<std::int64_t>(estimate.loops.size()) != n)
        throw std::invalid_argument("mixing check: estimate does not match graph");
    MixingCheckReport report{};
    report.lambda = estimate.lambda;
    report.samples = samples;
    report.worst_discrepancy = 0.0;

    std::vector<Vertex> pool_a(n), pool_b(n);
    std::vector<std::int64_t> b_stamp(n, -1);
    for (Vertex i = 0; i < n; ++i) pool_a[i] = pool_b[i] = i;

    for (std::int64_t s = 0; s < samples; ++s) {
        const auto size_a = static_cast<std::int64_t>(rng.bounded(n + 1));
        const auto size_b = static_cast<std::int64_t>(rng.bounded(n + 1));
        for (std::int64_t t = 0; t < size_a; ++t) {
            const auto j = t + static_cast<std::int64_t>(rng.bounded(n - t));
            std::swap(pool_a[t], pool_a[j]);
        }
        for (std::int64_t t = 0; t < size_b; ++t) {
            const auto j = t + static_cast<std::int64_t>(rng.bounded(n - t));
            std::swap(pool_b[t], pool_b[j]);
        }
        if (size_a == 0 || size_b == 0) continue;
        for (std::int64_t t = 0; t < size_b; ++t) b_stamp[pool_b[t]] = s;

        std::int64_t count = 0;
        for (std::int64_t t = 0; t < size_a; ++t) {
            const Vertex u = pool_a[t];
            for (Vertex v : g.neighbors(u)) count += (b_stamp[v] == s);
            if (estimate.loops[u]) count += (b_stamp[u] == s);
        }
        const double expected = estimate.p * static_cast<double>(size_a) *
                                static_cast<double>(size_b);
        const double disc = std::abs(static_cast<double>(count) - expected) /
                            std::sqrt(static_cast<double>(size_a) * static_cast<double>(size_b));
        if (disc > report.worst_discrepancy) {
            report.worst_discrepancy = disc;
            report.worst_a_size = size_a;
            report.worst_b_size = size_b;
        }
    }
    report.pass = report.worst_discrepancy <= estimate.lambda + 1e-9;
    return report;
}

} // namespace majdyn
