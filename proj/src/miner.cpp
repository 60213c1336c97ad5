#include "multipole/miner.hpp"

#include "multipole/bounds.hpp"
#include "multipole/error.hpp"
#include "multipole/graph.hpp"
#include "multipole/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace multipole {

void MinerConfig::validate() const
{
    if (!(sigma >= 0.0 && sigma <= 1.0))
        throw ValidationError("sigma must be in [0,1]");
    if (!(delta > 0.0 && delta <= 1.0))
        throw ValidationError("delta must be in (0,1]");
    if (!(rho >= -1.0 && rho <= 1.0))
        throw ValidationError("rho must be in [-1,1]");
    if (max_size != 0 && max_size < 3)
        throw ValidationError("max-size must be >= 3");
    if (clique_budget == 0)
        throw ValidationError("clique budget must be positive");
}

int MinerConfig::effective_max_size() const
{
    return max_size != 0 ? max_size : max_size_for_gain(delta);
}

namespace {

using Mask = std::uint64_t;

std::vector<int> expand_mask(Mask mask, std::span<const int> universe)
{
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(std::popcount(mask)));
    while (mask != 0) {
        const int bit = std::countr_zero(mask);
        out.push_back(universe[static_cast<std::size_t>(bit)]);
        mask &= mask - 1;
    }
    return out;
}

// Next integer with the same popcount (Gosper). Returns 0 past the last mask
// that fits in `width` bits.
Mask next_combination(Mask x, int width)
{
    const Mask c = x & (~x + 1);
    const Mask r = x + c;
    if (r == 0)
        return 0;
    const Mask next = (((r ^ x) >> 2) / c) | r;
    if (width < 64 && (next >> width) != 0)
        return 0;
    return next;
}

Mask first_combination(int size)
{
    return size >= 64 ? ~Mask{0} : (Mask{1} << size) - 1;
}

// Memoized dependence of subsets of a fixed universe, addressed by bitmask.
class SubsetEvaluator {
public:
    SubsetEvaluator(const CorrelationMatrix& a, std::span<const int> universe)
        : a_(a), universe_(universe)
    {
        if (universe.size() > 64)
            throw ValidationError("subset evaluation is limited to 64 variables, got " +
                                  std::to_string(universe.size()));
    }

    double sigma(Mask mask)
    {
        auto it = memo_.find(mask);
        if (it != memo_.end())
            return it->second;
        const double s = linear_dependence(a_, expand_mask(mask, universe_));
        memo_.emplace(mask, s);
        return s;
    }

    double gain(Mask mask)
    {
        double best = 0.0;
        for (Mask rest = mask; rest != 0; rest &= rest - 1) {
            const Mask bit = rest & (~rest + 1);
            best = std::max(best, sigma(mask & ~bit));
        }
        return sigma(mask) - best;
    }

    MultipoleRecord record(Mask mask, double gain)
    {
        return describe_multipole(a_, expand_mask(mask, universe_), gain);
    }

private:
    const CorrelationMatrix& a_;
    std::span<const int> universe_;
    std::unordered_map<Mask, double> memo_;
};

struct VectorHash {
    std::size_t operator()(const std::vector<int>& v) const noexcept
    {
        std::uint64_t h = 1469598103934665603ULL;
        for (int x : v) {
            h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(x));
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

std::uint64_t saturating_binomial(std::uint64_t n, std::uint64_t k)
{
    if (k > n)
        return 0;
    k = std::min(k, n - k);
    long double r = 1.0L;
    for (std::uint64_t i = 1; i <= k; ++i)
        r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (r >= 1.8e19L)
        return UINT64_MAX;
    return static_cast<std::uint64_t>(std::llround(r));
}

}  // namespace

std::vector<MultipoleRecord> extract_from_candidate(const CorrelationMatrix& a,
                                                    std::span<const int> candidate,
                                                    const MinerConfig& cfg)
{
    const int m = static_cast<int>(candidate.size());
    if (m < 3)
        throw ValidationError("extract_from_candidate: candidate needs at least 3 members");
    SubsetEvaluator eval(a, candidate);
    const Mask full = first_combination(m);
    const int max_size = cfg.effective_max_size();

    if (eval.sigma(full) < cfg.sigma)
        return {};
    if (m <= max_size) {
        const double g = eval.gain(full);
        if (g >= cfg.delta)
            return {eval.record(full, g)};
    }

    // Largest sizes first; any subset of a set with sigma below the threshold
    // is skipped without evaluation.
    std::vector<MultipoleRecord> out;
    std::unordered_set<Mask> dead;
    const int top = std::min(m, max_size);
    for (int size = top; size >= 3; --size) {
        for (Mask mask = first_combination(size); mask != 0; mask = next_combination(mask, m)) {
            bool pruned = false;
            if (size < m) {
                for (Mask rest = full & ~mask; rest != 0; rest &= rest - 1) {
                    if (dead.count(mask | (rest & (~rest + 1))) != 0) {
                        pruned = true;
                        break;
                    }
                }
            }
            if (pruned || eval.sigma(mask) < cfg.sigma) {
                dead.insert(mask);
                continue;
            }
            const double g = eval.gain(mask);
            if (g >= cfg.delta)
                out.push_back(eval.record(mask, g));
        }
    }
    return out;
}

void sort_records(std::vector<MultipoleRecord>& records)
{
    std::stable_sort(records.begin(), records.end(),
                     [](const MultipoleRecord& x, const MultipoleRecord& y) {
                         if (x.gain != y.gain)
                             return x.gain > y.gain;
                         if (x.sigma != y.sigma)
                             return x.sigma > y.sigma;
                         return x.set < y.set;
                     });
}

std::vector<MultipoleRecord> remove_non_maximal(std::vector<MultipoleRecord> records)
{
    std::stable_sort(records.begin(), records.end(),
                     [](const MultipoleRecord& x, const MultipoleRecord& y) {
                         if (x.set.size() != y.set.size())
                             return x.set.size() > y.set.size();
                         return x.set.members < y.set.members;
                     });

    constexpr std::size_t kExpandLimit = 20;
    std::unordered_set<std::vector<int>, VectorHash> included;
    std::vector<std::vector<int>> large;  // accepted sets too big to expand
    std::vector<MultipoleRecord> out;
    for (auto& rec : records) {
        const auto& members = rec.set.members;
        if (included.count(members) != 0)
            continue;
        const bool covered = std::any_of(large.begin(), large.end(), [&](const auto& big) {
            return std::includes(big.begin(), big.end(), members.begin(), members.end());
        });
        if (covered)
            continue;
        rec.maximal = true;
        out.push_back(std::move(rec));
        const auto& kept = out.back().set.members;
        if (kept.size() > kExpandLimit) {
            large.push_back(kept);
            included.insert(kept);
            continue;
        }
        const Mask full = first_combination(static_cast<int>(kept.size()));
        for (Mask sub = full; sub != 0; sub = (sub - 1) & full)
            included.insert(expand_mask(sub, kept));
    }
    return out;
}

MineResult mine(const CorrelationMatrix& a, const MinerConfig& cfg)
{
    cfg.validate();
    const auto graph = build_graph(a, cfg.rho);
    CliqueOptions opt;
    opt.min_size = 3;
    opt.budget = cfg.clique_budget;
    opt.threads = cfg.threads;
    opt.cancel = cfg.cancel;
    auto cliques = maximal_cliques(graph.graph(), opt);

    // Mirror cliques collapse to one signed set; extraction depends only on the
    // member set, so candidates sharing members are evaluated once.
    std::set<SignedSet> signed_sets;
    for (const auto& c : cliques.cliques)
        signed_sets.insert(clique_to_signed_set(graph, c));
    std::set<std::vector<int>> member_sets;
    for (const auto& s : signed_sets)
        member_sets.insert(s.members);
    const std::vector<std::vector<int>> candidates(member_sets.begin(), member_sets.end());

    std::vector<std::vector<MultipoleRecord>> found(candidates.size());
    parallel_for(candidates.size(), cfg.threads, [&](std::size_t i) {
        found[i] = extract_from_candidate(a, candidates[i], cfg);
    });

    std::vector<MultipoleRecord> all;
    for (auto& f : found)
        for (auto& r : f)
            all.push_back(std::move(r));

    MineResult out;
    out.records = remove_non_maximal(std::move(all));
    sort_records(out.records);
    out.partial = cliques.truncated;
    out.cliques = cliques.cliques.size();
    out.candidates = candidates.size();
    return out;
}

MineResult mine(const TimeSeriesDataset& d, const MinerConfig& cfg)
{
    cfg.validate();
    return mine(correlation_matrix(d, cfg.threads), cfg);
}

MineResult brute_force(const CorrelationMatrix& a, const MinerConfig& cfg,
                       std::uint64_t subset_budget)
{
    cfg.validate();
    const int n = static_cast<int>(a.dim());
    const int top = std::min(n, cfg.effective_max_size());
    std::uint64_t total = 0;
    for (int s = 3; s <= top; ++s) {
        const auto c = saturating_binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(s));
        total = c > UINT64_MAX - total ? UINT64_MAX : total + c;
    }
    if (total > subset_budget)
        throw BudgetExceeded("brute force needs " + std::to_string(total) +
                             " subsets, budget is " + std::to_string(subset_budget));

    std::vector<int> universe(static_cast<std::size_t>(n));
    std::iota(universe.begin(), universe.end(), 0);
    SubsetEvaluator eval(a, universe);
    std::vector<MultipoleRecord> all;
    for (int size = 3; size <= top; ++size) {
        for (Mask mask = first_combination(size); mask != 0; mask = next_combination(mask, n)) {
            if (eval.sigma(mask) < cfg.sigma)
                continue;
            const double g = eval.gain(mask);
            if (g >= cfg.delta)
                all.push_back(eval.record(mask, g));
        }
    }
    MineResult out;
    out.candidates = static_cast<std::size_t>(total);
    out.records = remove_non_maximal(std::move(all));
    sort_records(out.records);
    return out;
}

std::vector<MultipoleRecord> random_search(const CorrelationMatrix& a, const MinerConfig& cfg,
                                           std::uint64_t trials)
{
    cfg.validate();
    const int n = static_cast<int>(a.dim());
    const int top = std::min(n, cfg.effective_max_size());
    if (trials == 0 || top < 3)
        return {};

    std::vector<double> weights;
    for (int s = 3; s <= top; ++s)
        weights.push_back(std::exp(std::lgamma(n + 1.0) - std::lgamma(s + 1.0) -
                                   std::lgamma(n - s + 1.0)));

    constexpr std::uint64_t kChunk = 4096;
    const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
    std::vector<std::vector<MultipoleRecord>> found(static_cast<std::size_t>(chunks));
    parallel_for(static_cast<std::size_t>(chunks), cfg.threads, [&](std::size_t c) {
        auto rng = stream_rng(cfg.seed, c);
        std::discrete_distribution<int> pick_size(weights.begin(), weights.end());
        std::vector<int> pool(static_cast<std::size_t>(n));
        std::set<std::vector<int>> seen;
        const std::uint64_t begin = c * kChunk;
        const std::uint64_t end = std::min(trials, begin + kChunk);
        for (std::uint64_t t = begin; t < end; ++t) {
            const int size = 3 + pick_size(rng);
            std::iota(pool.begin(), pool.end(), 0);
            for (int i = 0; i < size; ++i) {
                std::uniform_int_distribution<int> pick(i, n - 1);
                std::swap(pool[static_cast<std::size_t>(i)],
                          pool[static_cast<std::size_t>(pick(rng))]);
            }
            std::vector<int> subset(pool.begin(), pool.begin() + size);
            std::sort(subset.begin(), subset.end());
            if (!seen.insert(subset).second)
                continue;
            if (linear_dependence(a, subset) < cfg.sigma)
                continue;
            const double g = linear_gain(a, subset);
            if (g >= cfg.delta)
                found[c].push_back(describe_multipole(a, subset, g));
        }
    });

    std::vector<MultipoleRecord> all;
    for (auto& f : found)
        for (auto& r : f)
            all.push_back(std::move(r));
    auto out = remove_non_maximal(std::move(all));
    sort_records(out);
    return out;
}

}  // namespace multipole
