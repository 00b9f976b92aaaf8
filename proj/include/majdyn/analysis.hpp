#ifndef MAJDYN_ANALYSIS_HPP
#define MAJDYN_ANALYSIS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "majdyn/graph.hpp"
#include "majdyn/rng.hpp"

namespace majdyn {

/// Exact Fourier spectrum of a ±1-valued Boolean function on k <= 24 bits.
///
/// Input convention: truth-table index `mask` encodes the point x with
/// x_b = -1 iff bit b of mask is set (index 0 is the all-(+1) point).
/// Coefficients are stored as integers raw(S) = sum_x f(x) chi_S(x), so
/// coefficient(S) = raw(S) / 2^k is a dyadic rational held exactly in a
/// double, and Parseval can be checked in integer arithmetic.
class FourierTable {
public:
    static constexpr int kMaxArity = 24;

    static FourierTable from_truth_table(std::span<const std::int8_t> table, int k);

    int arity() const { return k_; }
    std::int64_t raw(std::uint32_t mask) const { return raw_[mask]; }
    double coefficient(std::uint32_t mask) const;
    std::size_t size() const { return raw_.size(); }

    /// W_j = sum over |S| = j of coefficient(S)^2.
    std::vector<double> weight_by_degree() const;

    /// Integer Parseval: sum_S raw(S)^2 == 4^k.
    bool parseval_exact() const;
    double parseval_sum() const;

private:
    int k_ = 0;
    std::vector<std::int64_t> raw_;
};

/// Truth table of Maj_k (sign of the coordinate sum), odd k <= 24.
std::vector<std::int8_t> majority_truth_table(int k);

/// Singleton coefficient 2 * C(k-1, (k-1)/2) / 2^k of Maj_k, odd k >= 1.
/// Computed as the stable product prod_{i=1..(k-1)/2} (2i-1)/(2i); valid for
/// any odd k without overflow.
double maj_singleton_coeff(int k);

/// Exact integer numerator raw(S) = 2 * C(k-1, (k-1)/2) for |S| = 1, for the
/// rational cross-check against enumeration; odd k <= 63.
std::int64_t maj_singleton_raw(int k);

/// Stab_rho = sum_S rho^{|S|} coefficient(S)^2, rho in [0, 1].
double noise_stability(const FourierTable& table, double rho);

/// E[Maj_{n1}(x) Maj_{n2}(y)] where x and y share their first m coordinates
/// and the rest are independent uniform. Exact conditional-binomial
/// evaluation; n1, n2 odd and <= 24, 0 <= m <= min(n1, n2).
double overlap_correlation(int n1, int n2, int m);

/// Lower bound (1-tau)^2 / (ratio + (1-tau)^2 - 1) with
/// ratio = second_moment / mean^2, from the one-sided Chebyshev inequality
/// applied to P[X >= tau * E X]. Requires second_moment >= mean^2 > 0.
double one_sided_chebyshev(double mean, double second_moment, double tau);

/// Operator-norm estimate of P - Q, where P is the adjacency matrix plus a
/// Bernoulli(p) random diagonal of self-loops and Q is the all-p matrix.
struct MixingEstimate {
    double lambda;
    double p;
    std::int64_t n;
    std::vector<std::uint8_t> loops; // the sampled diagonal, reused by checks
    std::int64_t iterations;
    double tolerance;
    double residual;
};

/// Matrix-free power iteration on (P-Q)^T (P-Q); throws ConvergenceError
/// with the residual if the iteration cap is hit.
MixingEstimate estimate_lambda(const Graph& g, double p, Rng& rng,
                               std::int64_t max_iterations = 50000, double tolerance = 1e-6);

struct MixingCheckReport {
    double lambda;
    double worst_discrepancy; // max |E(A,B) - p|A||B|| / sqrt(|A||B|)
    std::int64_t worst_a_size;
    std::int64_t worst_b_size;
    std::int64_t samples;
    bool pass;
};

/// Samples random subset pairs and evaluates the mixing inequality at the
/// estimate's lambda. E(A,B) counts ordered pairs on the loop-augmented
/// graph: both orientations of each edge, self-loops once for u in both sets.
MixingCheckReport mixing_lemma_check(const Graph& g, const MixingEstimate& estimate,
                                     std::int64_t samples, Rng& rng);

} // namespace majdyn

#endif
