#include "multipole/measures.hpp"

#include "multipole/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace multipole {

SignedSet SignedSet::canonical(std::vector<int> members, std::vector<int> signs)
{
    if (members.size() != signs.size())
        throw ValidationError("signed set: members and signs differ in length");
    std::vector<std::size_t> order(members.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return members[x] < members[y]; });
    SignedSet out;
    out.members.reserve(members.size());
    out.signs.reserve(members.size());
    for (auto i : order) {
        if (!out.members.empty() && out.members.back() == members[i])
            throw ValidationError("signed set: duplicate member " + std::to_string(members[i]));
        if (signs[i] != 1 && signs[i] != -1)
            throw ValidationError("signed set: sign must be +1 or -1");
        out.members.push_back(members[i]);
        out.signs.push_back(signs[i]);
    }
    if (!out.signs.empty() && out.signs.front() == -1)
        for (int& s : out.signs)
            s = -s;
    return out;
}

SignedSet SignedSet::all_positive(std::vector<int> members)
{
    std::vector<int> signs(members.size(), 1);
    return canonical(std::move(members), std::move(signs));
}

namespace {

void require_size(std::span<const int> subset, std::size_t min, const char* what)
{
    if (subset.size() < min)
        throw ValidationError(std::string(what) + ": subset needs at least " + std::to_string(min) +
                              " members, got " + std::to_string(subset.size()));
}

double dependence_from_lambda(double lambda)
{
    return std::clamp(1.0 - lambda, 0.0, 1.0);
}

std::vector<int> without(std::span<const int> subset, std::size_t skip)
{
    std::vector<int> out;
    out.reserve(subset.size() - 1);
    for (std::size_t i = 0; i < subset.size(); ++i)
        if (i != skip)
            out.push_back(subset[i]);
    return out;
}

}  // namespace

Lvnlc lvnlc(const CorrelationMatrix& a, std::span<const int> subset)
{
    require_size(subset, 2, "lvnlc");
    for (int i : subset)
        if (i < 0 || static_cast<std::size_t>(i) >= a.dim())
            throw ValidationError("lvnlc: index " + std::to_string(i) + " out of range");
    auto pair = min_eigenpair(a.principal(subset));
    return {pair.lambda_min, std::move(pair.vector)};
}

double linear_dependence(const CorrelationMatrix& a, std::span<const int> subset)
{
    require_size(subset, 2, "linear_dependence");
    return dependence_from_lambda(min_eigenvalue(a.principal(subset)));
}

double gain_from_dependences(double sigma, std::span<const double> deletion_sigmas)
{
    if (deletion_sigmas.empty())
        throw ValidationError("gain: no deletion subsets");
    return sigma - *std::max_element(deletion_sigmas.begin(), deletion_sigmas.end());
}

double linear_gain(const CorrelationMatrix& a, std::span<const int> subset)
{
    require_size(subset, 3, "linear_gain");
    std::vector<double> deletions;
    deletions.reserve(subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i)
        deletions.push_back(linear_dependence(a, without(subset, i)));
    return gain_from_dependences(linear_dependence(a, subset), deletions);
}

SignedSet flip_negative_weights(std::span<const int> members, std::span<const double> weights)
{
    std::vector<int> signs(members.size());
    for (std::size_t i = 0; i < members.size(); ++i)
        signs[i] = weights[i] < -1e-10 ? -1 : 1;
    return SignedSet::canonical(std::vector<int>(members.begin(), members.end()), std::move(signs));
}

double max_adjusted_correlation(const CorrelationMatrix& a, const SignedSet& s)
{
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < s.size(); ++x)
        for (std::size_t y = x + 1; y < s.size(); ++y)
            best = std::max(best, s.signs[x] * s.signs[y] *
                                      a(static_cast<std::size_t>(s.members[x]),
                                        static_cast<std::size_t>(s.members[y])));
    return best;
}

CanonicalForm self_canceling_form(const CorrelationMatrix& a, std::span<const int> subset)
{
    auto l = lvnlc(a, subset);
    CanonicalForm out;
    out.weights = l.weights;
    for (double& w : out.weights)
        if (w < -1e-10)
            w = -w;
    out.signed_set = flip_negative_weights(subset, l.weights);
    out.rho_s = max_adjusted_correlation(a, out.signed_set);
    return out;
}

bool is_negative_clique(const CorrelationMatrix& a, const SignedSet& s, double rho)
{
    return s.size() < 2 || max_adjusted_correlation(a, s) <= rho;
}

std::optional<SignedSet> negative_equivalent_witness(const CorrelationMatrix& a,
                                                     std::span<const int> subset, double rho)
{
    require_size(subset, 2, "negative_equivalent_witness");
    if (subset.size() > kMaxWitnessSize)
        throw ValidationError("negative_equivalent_witness: subset of size " +
                              std::to_string(subset.size()) + " exceeds exhaustive limit " +
                              std::to_string(kMaxWitnessSize));
    const std::size_t k = subset.size();
    std::vector<int> signs(k, 1);
    auto corr = [&](std::size_t x, std::size_t y) {
        return a(static_cast<std::size_t>(subset[x]), static_cast<std::size_t>(subset[y]));
    };
    // Depth-first over signs of members 1..k-1 (member 0 fixed at +1), +1 tried
    // before -1, pruning as soon as an assigned pair exceeds rho.
    auto consistent = [&](std::size_t upto) {
        for (std::size_t x = 0; x < upto; ++x)
            if (signs[x] * signs[upto] * corr(x, upto) > rho)
                return false;
        return true;
    };
    std::size_t depth = 1;
    std::vector<int> tried(k, 0);
    if (k == 1)
        return SignedSet::canonical({subset.begin(), subset.end()}, signs);
    while (true) {
        if (depth == k)
            return SignedSet::canonical({subset.begin(), subset.end()}, signs);
        if (tried[depth] == 2) {
            tried[depth] = 0;
            if (--depth == 0)
                return std::nullopt;
            continue;
        }
        signs[depth] = tried[depth] == 0 ? 1 : -1;
        ++tried[depth];
        if (consistent(depth))
            ++depth;
    }
}

MultipoleRecord describe_multipole(const CorrelationMatrix& a, std::span<const int> subset,
                                   double gain)
{
    require_size(subset, 2, "describe_multipole");
    auto eig = eigen_symmetric(a.principal(subset));
    std::vector<double> v(subset.size());
    for (std::size_t r = 0; r < subset.size(); ++r)
        v[r] = eig.vectors(r, 0);

    MultipoleRecord rec;
    rec.sigma = dependence_from_lambda(eig.values[0]);
    rec.gain = gain;
    rec.set = flip_negative_weights(subset, v);
    rec.weights = v;
    for (double& w : rec.weights)
        if (w < -1e-10)
            w = -w;
    rec.degenerate = eig.values.size() > 1 && eig.values[1] - eig.values[0] < 1e-8;
    rec.maximal = false;
    return rec;
}

MultipoleRecord evaluate_multipole(const CorrelationMatrix& a, std::span<const int> subset)
{
    return describe_multipole(a, subset, linear_gain(a, subset));
}

}  // namespace multipole
