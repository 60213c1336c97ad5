#pragma once

// Linear dependence, linear gain and the self-canceling form of a variable set.

#include "multipole/dataset.hpp"

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace multipole {

// Strictly increasing member indices with one +1/-1 sign each. Canonical
// orientation: the lowest-index member carries +1.
struct SignedSet {
    std::vector<int> members;
    std::vector<int> signs;

    // Sorts by member, validates, and flips all signs if the first is -1.
    static SignedSet canonical(std::vector<int> members, std::vector<int> signs);
    static SignedSet all_positive(std::vector<int> members);

    std::size_t size() const noexcept { return members.size(); }

    friend auto operator<=>(const SignedSet&, const SignedSet&) = default;
};

// Least variant normalized linear combination: the smallest eigenpair of the
// member submatrix, eigenvector canonically oriented.
struct Lvnlc {
    double variance = 0.0;
    std::vector<double> weights;
};

struct CanonicalForm {
    SignedSet signed_set;
    double rho_s = 0.0;
    std::vector<double> weights;  // LVNLC weights after the sign flips, all >= -1e-10
};

struct MultipoleRecord {
    SignedSet set;
    double sigma = 0.0;
    double gain = 0.0;
    std::vector<double> weights;
    bool maximal = false;
    // Two smallest eigenvalues closer than 1e-8: the LVNLC direction is not unique.
    bool degenerate = false;
};

Lvnlc lvnlc(const CorrelationMatrix& a, std::span<const int> subset);

// 1 - lambda_min, clamped to [0, 1].
double linear_dependence(const CorrelationMatrix& a, std::span<const int> subset);

// sigma(S) - max_i sigma(S - {i}); defined for |S| >= 3.
double linear_gain(const CorrelationMatrix& a, std::span<const int> subset);

// Gain from an already known dependence and its single-deletion dependences.
double gain_from_dependences(double sigma, std::span<const double> deletion_sigmas);

// Signs from LVNLC weights: members with weight < -1e-10 are flipped.
SignedSet flip_negative_weights(std::span<const int> members, std::span<const double> weights);

CanonicalForm self_canceling_form(const CorrelationMatrix& a, std::span<const int> subset);

// Largest pairwise correlation after applying the signs.
double max_adjusted_correlation(const CorrelationMatrix& a, const SignedSet& s);

bool is_negative_clique(const CorrelationMatrix& a, const SignedSet& s, double rho);

inline constexpr std::size_t kMaxWitnessSize = 25;

// Exhaustive search over the 2^(k-1) canonical sign patterns, in increasing
// order of the flip bitmask. Throws ValidationError when |subset| > 25.
std::optional<SignedSet> negative_equivalent_witness(const CorrelationMatrix& a,
                                                     std::span<const int> subset, double rho);

// Full record for `subset` (sorted, size >= 3): sigma, gain, self-canceling signs and weights.
MultipoleRecord evaluate_multipole(const CorrelationMatrix& a, std::span<const int> subset);

// As evaluate_multipole with a gain the caller has already computed.
MultipoleRecord describe_multipole(const CorrelationMatrix& a, std::span<const int> subset,
                                   double gain);

}  // namespace multipole
