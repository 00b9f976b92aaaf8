#include <doctest.h>

#include <cmath>
#include <numbers>

#include "majdyn/analysis.hpp"
#include "majdyn/errors.hpp"
#include "majdyn/generators.hpp"
#include "majdyn/rng.hpp"

using namespace majdyn;

namespace {

/// Brute-force spectrum entry: 2^{-k} sum_x f(x) chi_S(x), independent of the
/// transform used by FourierTable.
double brute_coefficient(const std::vector<std::int8_t>& table, int k, std::uint32_t S) {
    double acc = 0.0;
    for (std::uint32_t x = 0; x < (1u << k); ++x) {
        int sign = 1;
        for (int b = 0; b < k; ++b)
            if ((S >> b & 1) && (x >> b & 1)) sign = -sign;
        acc += sign * table[x];
    }
    return acc / std::ldexp(1.0, k);
}

} // namespace

TEST_SUITE("analysis") {

TEST_CASE("dictator spectrum") {
    // f(x) = x_1: coeff({1}) = 1, everything else 0
    const std::vector<std::int8_t> f{1, -1}; // index bit set means x = -1
    const auto table = FourierTable::from_truth_table(f, 1);
    CHECK(table.coefficient(0) == 0.0);
    CHECK(table.coefficient(1) == 1.0);
    CHECK(table.parseval_exact());
}

TEST_CASE("constant function spectrum") {
    const std::vector<std::int8_t> f(8, 1);
    const auto table = FourierTable::from_truth_table(f, 3);
    CHECK(table.coefficient(0) == 1.0);
    for (std::uint32_t mask = 1; mask < 8; ++mask) CHECK(table.coefficient(mask) == 0.0);
}

TEST_CASE("Maj3 spectrum from enumeration") {
    const auto table = FourierTable::from_truth_table(majority_truth_table(3), 3);
    for (std::uint32_t singleton : {1u, 2u, 4u}) CHECK(table.coefficient(singleton) == 0.5);
    CHECK(table.coefficient(7) == -0.5);
    for (std::uint32_t pair : {3u, 5u, 6u}) CHECK(table.coefficient(pair) == 0.0);
    CHECK(table.coefficient(0) == 0.0);
    CHECK(table.parseval_exact());
}

TEST_CASE("transform agrees with the brute-force definition") {
    Rng rng(41, 0);
    const int k = 6;
    std::vector<std::int8_t> f(1 << k);
    for (auto& v : f) v = rng.bernoulli(0.5) ? 1 : -1;
    const auto table = FourierTable::from_truth_table(f, k);
    for (std::uint32_t S : {0u, 1u, 5u, 21u, 63u, 32u})
        CHECK(table.coefficient(S) == doctest::Approx(brute_coefficient(f, k, S)).epsilon(1e-12));
    CHECK(table.parseval_exact());
    CHECK(table.parseval_sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("arity and value validation") {
    CHECK_THROWS_AS(FourierTable::from_truth_table(std::vector<std::int8_t>(4, 1), 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(FourierTable::from_truth_table(std::vector<std::int8_t>{1, 0}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(majority_truth_table(4), std::invalid_argument);
    CHECK_THROWS_AS(majority_truth_table(25), std::invalid_argument);
}

TEST_CASE("majority singleton coefficient, exact values") {
    CHECK(maj_singleton_coeff(1) == 1.0);
    CHECK(maj_singleton_coeff(3) == 0.5);
    CHECK(maj_singleton_coeff(5) == 0.375);
    CHECK_THROWS_AS(maj_singleton_coeff(4), std::invalid_argument);
    CHECK(maj_singleton_raw(5) == 12); // 2 C(4,2) = 12 = 0.375 * 2^5
}

TEST_CASE("singleton coefficient matches enumeration for odd k <= 15") {
    for (int k = 1; k <= 15; k += 2) {
        const auto table = FourierTable::from_truth_table(majority_truth_table(k), k);
        CHECK(table.raw(1) == maj_singleton_raw(k));
        CHECK(table.coefficient(1) == maj_singleton_coeff(k));
    }
}

TEST_CASE("singleton * sqrt(k) decreases toward sqrt(2/pi) and stays above it") {
    const double limit = std::sqrt(2.0 / std::numbers::pi);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 401; k += 2) {
        const double scaled = maj_singleton_coeff(k) * std::sqrt(static_cast<double>(k));
        CHECK(scaled >= limit);
        CHECK(scaled <= prev + 1e-15);
        prev = scaled;
    }
    CHECK(prev == doctest::Approx(limit).epsilon(2e-3)); // k = 401 is close to the limit
}

TEST_CASE("noise stability exact values and bounds") {
    const auto maj1 = FourierTable::from_truth_table(majority_truth_table(1), 1);
    const auto maj3 = FourierTable::from_truth_table(majority_truth_table(3), 3);
    CHECK(noise_stability(maj1, 0.37) == doctest::Approx(0.37).epsilon(1e-15));
    CHECK(noise_stability(maj3, 1.0) == doctest::Approx(1.0).epsilon(1e-12)); // Parseval
    // Stab_rho[Maj3] = (3 rho + rho^3) / 4
    CHECK(noise_stability(maj3, 0.5) == doctest::Approx(0.40625).epsilon(1e-12));
    CHECK_THROWS_AS(noise_stability(maj3, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(noise_stability(maj3, 1.1), std::invalid_argument);
}

TEST_CASE("Maj3 stability cross-checked by correlated sampling") {
    // rho-correlated pair: y_i = x_i with prob (1+rho)/2, else resampled
    Rng rng(42, 0);
    const double rho = 0.5;
    const auto maj3 = FourierTable::from_truth_table(majority_truth_table(3), 3);
    std::int64_t agree = 0;
    const std::int64_t samples = 400000;
    for (std::int64_t s = 0; s < samples; ++s) {
        int x[3], y[3];
        for (int i = 0; i < 3; ++i) {
            x[i] = rng.bernoulli(0.5) ? 1 : -1;
            y[i] = rng.bernoulli(rho) ? x[i] : (rng.bernoulli(0.5) ? 1 : -1);
        }
        const int fx = (x[0] + x[1] + x[2]) > 0 ? 1 : -1;
        const int fy = (y[0] + y[1] + y[2]) > 0 ? 1 : -1;
        agree += (fx == fy);
    }
    const double stab_mc =
        2.0 * static_cast<double>(agree) / static_cast<double>(samples) - 1.0;
    const double se = 2.0 / std::sqrt(static_cast<double>(samples));
    CHECK(std::abs(stab_mc - noise_stability(maj3, rho)) <= 5.0 * se);
}

TEST_CASE("arcsin curve approximation is tracked at n = 15") {
    // recorded-not-gated in the acceptance sense; here we allow a wide band
    const auto maj15 = FourierTable::from_truth_table(majority_truth_table(15), 15);
    for (double rho : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double arcsin_value = 2.0 / std::numbers::pi * std::asin(rho);
        const double envelope = 2.0 / std::sqrt(15.0);
        CHECK(std::abs(noise_stability(maj15, rho) - arcsin_value) <= envelope);
    }
}

TEST_CASE("overlap correlation endpoints") {
    CHECK(overlap_correlation(5, 5, 5) == 1.0);
    CHECK(overlap_correlation(5, 3, 0) == 0.0);
    CHECK_THROWS_AS(overlap_correlation(4, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(overlap_correlation(5, 3, 4), std::invalid_argument);
}

TEST_CASE("overlap correlation matches shared-prefix enumeration") {
    // n1 = 5, n2 = 3, m = 3: enumerate the 2^5 assignments; the second
    // majority reads the shared prefix only
    double acc = 0.0;
    for (std::uint32_t x = 0; x < 32; ++x) {
        int sum5 = 0, sum3 = 0;
        for (int b = 0; b < 5; ++b) {
            const int v = (x >> b & 1) ? -1 : 1;
            sum5 += v;
            if (b < 3) sum3 += v;
        }
        acc += (sum5 > 0 ? 1 : -1) * (sum3 > 0 ? 1 : -1);
    }
    const double oracle = acc / 32.0;
    CHECK(overlap_correlation(5, 3, 3) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(overlap_correlation(5, 3, 3) >=
          3.0 * maj_singleton_coeff(5) * maj_singleton_coeff(3) - 1e-12); // = 0.5625
}

TEST_CASE("overlap correlation dominates the product of means") {
    // the FKG direction: correlation >= 0 = product of the (zero) means,
    // and more sharply >= the singleton lower bound
    for (int n1 = 1; n1 <= 9; n1 += 2)
        for (int n2 = 1; n2 <= 9; n2 += 2)
            for (int m = 0; m <= std::min(n1, n2); ++m) {
                const double v = overlap_correlation(n1, n2, m);
                CHECK(v >= -1e-12);
                CHECK(v >= static_cast<double>(m) * maj_singleton_coeff(n1) *
                               maj_singleton_coeff(n2) -
                           1e-12);
            }
}

TEST_CASE("one-sided chebyshev values") {
    CHECK(one_sided_chebyshev(2.0, 4.0, 0.25) == doctest::Approx(1.0)); // deterministic
    const double pi_sq_4 = std::numbers::pi * std::numbers::pi / 4.0;
    CHECK(one_sided_chebyshev(1.0, pi_sq_4, 0.01) > 0.4004);
    CHECK(one_sided_chebyshev(1.0, 2.0, 0.01) ==
          doctest::Approx(0.9801 / (2.0 - 1.0 + 0.9801)).epsilon(1e-12));
    CHECK_THROWS_AS(one_sided_chebyshev(0.0, 1.0, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(one_sided_chebyshev(2.0, 1.0, 0.01), std::invalid_argument);
}

TEST_CASE("lambda estimate vanishes under exact cancellation") {
    Rng rng(43, 0);
    // p = 1 forces every self-loop: P is all-ones, Q is all-ones
    const Graph complete = complete_graph(100);
    const auto est1 = estimate_lambda(complete, 1.0, rng);
    CHECK(est1.lambda == 0.0);

    const Graph empty = Graph::from_edges(50, {});
    const auto est2 = estimate_lambda(empty, 0.0, rng);
    CHECK(est2.lambda == 0.0);
}

TEST_CASE("lambda estimate sits near the random matrix edge") {
    Rng graph_rng(44, 0), loop_rng(44, 3);
    const std::int64_t n = 800;
    const double p = 0.2;
    const Graph g = gen_gnp(n, p, graph_rng);
    const auto est = estimate_lambda(g, p, loop_rng);
    const double edge = 2.0 * std::sqrt(static_cast<double>(n) * p * (1.0 - p));
    CHECK(est.lambda > 0.8 * edge);
    CHECK(est.lambda < 1.5 * edge);
    CHECK(est.lambda < 4.0 * std::sqrt(static_cast<double>(n) * p));
    CHECK(est.iterations > 0);
}

TEST_CASE("mixing check accepts at the estimated lambda") {
    Rng graph_rng(45, 0), loop_rng(45, 3), subset_rng(45, 4);
    const Graph g = gen_gnp(600, 0.15, graph_rng);
    const auto est = estimate_lambda(g, 0.15, loop_rng);
    const auto report = mixing_lemma_check(g, est, 3000, subset_rng);
    CHECK(report.pass);
    CHECK(report.worst_discrepancy <= est.lambda);
    CHECK(report.samples == 3000);
}

TEST_CASE("full-set discrepancy is zero on the fully looped complete graph") {
    Rng loop_rng(46, 3);
    const Graph complete = complete_graph(64);
    const auto est = estimate_lambda(complete, 1.0, loop_rng);
    // A = B = V: E(A,B) = n^2 with all loops, p|A||B| = n^2 exactly
    MixingEstimate manual = est;
    Rng subset_rng(46, 4);
    const auto report = mixing_lemma_check(complete, manual, 500, subset_rng);
    CHECK(report.worst_discrepancy == 0.0);
    CHECK(report.pass);
}

} // TEST_SUITE
