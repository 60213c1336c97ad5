#include "multipole/stats.hpp"

#include "multipole/error.hpp"
#include "multipole/measures.hpp"
#include "multipole/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

namespace multipole {

namespace {

constexpr std::size_t kSampleChunk = 256;
constexpr std::size_t kDrawChunk = 1024;

std::uint64_t mix(std::uint64_t a, std::uint64_t b)
{
    return splitmix64(a ^ splitmix64(b));
}

CorrelationMatrix draw_psd(int k, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto n = static_cast<std::size_t>(k);
    while (true) {
        Matrix m = Matrix::identity(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double r = u(rng);
                m(i, j) = r;
                m(j, i) = r;
            }
        if (is_psd(m, 1e-10))
            return CorrelationMatrix(std::move(m), CorrelationMatrix::Unchecked{});
    }
}

// Matrices whose self-canceling form has every off-diagonal <= c < 0, drawn
// uniformly: the form itself is uniform on {a_ij in [-1, c], sum a_ij >= -k/2}
// (the all-ones vector bounds the sum for any PSD matrix), then a uniformly random
// canonical sign pattern is applied. Conditioned on the later filters this matches
// uniform sampling followed by rejection on rho_s, at a far higher acceptance rate.
std::optional<Matrix> draw_self_canceled(int k, double c, std::mt19937_64& rng)
{
    const auto n = static_cast<std::size_t>(k);
    const std::size_t pairs = n * (n - 1) / 2;
    const double room = 0.5 * static_cast<double>(k) + static_cast<double>(pairs) * c;
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> y(pairs + 1);
    double total = 0.0;
    for (auto& v : y) {
        v = expo(rng);
        total += v;
    }
    std::uniform_int_distribution<int> bit(0, 1);
    std::vector<double> sign(n, 1.0);
    for (std::size_t i = 1; i < n; ++i)
        sign[i] = bit(rng) ? -1.0 : 1.0;

    Matrix m = Matrix::identity(n);
    std::size_t t = 0;
    bool inside = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = c - room * y[t++] / total;
            inside = inside && a >= -1.0;
            m(i, j) = m(j, i) = sign[i] * sign[j] * a;
        }
    if (!inside)
        return std::nullopt;
    return m;
}

std::vector<int> iota_indices(std::size_t n)
{
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

void check_pool(std::span<const TimeSeriesDataset> pool, std::size_t length, std::size_t k)
{
    if (pool.size() < k)
        throw ValidationError("pool has " + std::to_string(pool.size()) + " datasets, need " +
                              std::to_string(k));
    for (const auto& d : pool) {
        if (!d.standardized())
            throw ValidationError("pool datasets must be standardized");
        if (d.length() != length)
            throw ValidationError("pool datasets must all have length " + std::to_string(length));
    }
}

double sigma_of_columns(std::span<const std::span<const double>> cols)
{
    const auto a = correlation_of(cols);
    return std::clamp(1.0 - min_eigenvalue(a.matrix()), 0.0, 1.0);
}

double add_one_p(std::size_t at_least, std::size_t total)
{
    return static_cast<double>(at_least + 1) / static_cast<double>(total + 1);
}

}  // namespace

std::vector<CorrelationMatrix> sample_correlation_matrices(int k, std::size_t count,
                                                           std::uint64_t seed, unsigned threads)
{
    if (k < 2 || k > 8)
        throw ValidationError("k must be in [2,8], got " + std::to_string(k));
    const std::size_t chunks = (count + kSampleChunk - 1) / kSampleChunk;
    std::vector<std::vector<CorrelationMatrix>> parts(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
        auto rng = stream_rng(mix(seed, static_cast<std::uint64_t>(k)), c);
        const std::size_t n = std::min(kSampleChunk, count - c * kSampleChunk);
        parts[c].reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            parts[c].push_back(draw_psd(k, rng));
    });
    std::vector<CorrelationMatrix> out;
    out.reserve(count);
    for (auto& p : parts)
        for (auto& m : p)
            out.push_back(std::move(m));
    return out;
}

ScatterSample scatter_point(const CorrelationMatrix& a)
{
    const auto all = iota_indices(a.dim());
    ScatterSample s;
    s.k = static_cast<int>(a.dim());
    s.gain = linear_gain(a, all);
    s.rho_s = self_canceling_form(a, all).rho_s;
    return s;
}

std::vector<ScatterSample> scatter(int k, std::size_t count, std::uint64_t seed, unsigned threads)
{
    if (k < 3)
        throw ValidationError("scatter needs k >= 3");
    const auto matrices = sample_correlation_matrices(k, count, seed, threads);
    std::vector<ScatterSample> out(matrices.size());
    parallel_for(matrices.size(), threads, [&](std::size_t i) { out[i] = scatter_point(matrices[i]); });
    return out;
}

std::size_t boundary_violations(std::span<const ScatterSample> samples, double delta)
{
    return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(), [&](const auto& s) {
        return s.gain >= delta && s.rho_s > 1.0 - 3.0 * delta;
    }));
}

BoundsValidation validate_bounds(std::span<const CorrelationMatrix> matrices, unsigned threads)
{
    BoundsValidation out;
    out.rows.resize(matrices.size());
    parallel_for(matrices.size(), threads, [&](std::size_t i) {
        auto& row = out.rows[i];
        const auto& a = matrices[i];
        row.k = static_cast<int>(a.dim());
        row.report = bound_report(a);
        row.gain = row.report.gain;
        row.rho_s = self_canceling_form(a, iota_indices(a.dim())).rho_s;
        row.violations = check_bounds(row.report);
    });
    for (const auto& row : out.rows) {
        auto has = [&](auto pred) { return std::any_of(row.violations.begin(), row.violations.end(), pred); };
        out.theorem1 += has([](const BoundViolation& v) {
            return v.kind == BoundKind::theorem1_norm2 || v.kind == BoundKind::theorem1_norm1;
        });
        out.corollary1 += has([](const BoundViolation& v) { return v.kind == BoundKind::corollary1; });
        out.corollary2 += has([](const BoundViolation& v) { return v.kind == BoundKind::corollary2; });
        out.size_cap += has([](const BoundViolation& v) { return v.kind == BoundKind::size_cap; });
    }
    return out;
}

std::vector<CorrelationMatrix> plant_multipoles(const PlantSpec& spec)
{
    if (spec.sizes.empty())
        throw ValidationError("plant: no sizes given");
    for (int k : spec.sizes)
        if (k < 3 || k > 8)
            throw ValidationError("plant: sizes must be in [3,8]");

    std::vector<std::size_t> needed(spec.sizes.size(), 0);
    for (std::size_t i = 0; i < spec.count; ++i)
        ++needed[i % spec.sizes.size()];

    std::vector<std::vector<CorrelationMatrix>> by_size(spec.sizes.size());
    for (std::size_t s = 0; s < spec.sizes.size(); ++s) {
        const int k = spec.sizes[s];
        const auto all = iota_indices(static_cast<std::size_t>(k));
        auto consider = [&](const CorrelationMatrix& m) {
            const double lambda = min_eigenvalue(m.matrix());
            if (lambda <= 1e-6 || 1.0 - lambda < spec.min_sigma)
                return;
            if (linear_gain(m, all) < spec.min_gain)
                return;
            if (self_canceling_form(m, all).rho_s > spec.max_rho_s)
                return;
            by_size[s].push_back(m);
        };
        const double room = 0.5 * k + 0.5 * k * (k - 1) * spec.max_rho_s;
        if (spec.max_rho_s < 0.0 && room <= 0.0)
            throw ValidationError("plant: no PSD matrix of size " + std::to_string(k) +
                                  " has every self-canceled correlation <= " +
                                  std::to_string(spec.max_rho_s));
        for (std::uint64_t batch = 0; by_size[s].size() < needed[s]; ++batch) {
            if (batch > 100000)
                throw ValidationError("plant: rejection sampling found too few matrices of size " +
                                      std::to_string(k));
            const std::uint64_t stream = mix(spec.seed, batch * 16 + s);
            if (spec.max_rho_s < 0.0) {
                auto rng = stream_rng(stream, 0);
                for (int i = 0; i < 4096 && by_size[s].size() < needed[s]; ++i)
                    if (auto m = draw_self_canceled(k, spec.max_rho_s, rng))
                        consider(CorrelationMatrix(std::move(*m), CorrelationMatrix::Unchecked{}));
                continue;
            }
            for (const auto& m : sample_correlation_matrices(k, 4096, stream)) {
                if (by_size[s].size() == needed[s])
                    break;
                consider(m);
            }
        }
    }
    std::vector<CorrelationMatrix> out;
    std::vector<std::size_t> next(spec.sizes.size(), 0);
    for (std::size_t i = 0; i < spec.count; ++i) {
        const auto s = i % spec.sizes.size();
        out.push_back(by_size[s][next[s]++]);
    }
    return out;
}

SynthOutput synth_dataset(std::span<const CorrelationMatrix> planted, std::size_t noise_count,
                          std::size_t length, std::uint64_t seed)
{
    std::size_t max_k = 0;
    std::vector<Matrix> factors;
    for (const auto& p : planted) {
        if (p.dim() > kMaxEigenDim || min_eigenvalue(p.matrix()) <= 1e-6)
            throw ValidationError("synth: planted matrices must be positive definite (lambda_min > 1e-6)");
        max_k = std::max(max_k, p.dim());
        factors.push_back(cholesky(p.matrix()));
    }
    if (length < std::max<std::size_t>(3, 50 * max_k))
        throw ValidationError("synth: length must be at least 50 times the largest planted size");

    std::vector<std::vector<double>> columns;
    std::vector<std::vector<int>> groups;
    std::uint64_t stream = 0;
    for (const auto& l : factors) {
        const std::size_t k = l.rows();
        auto rng = stream_rng(seed, stream++);
        std::normal_distribution<double> normal;
        std::vector<std::vector<double>> block(k, std::vector<double>(length));
        std::vector<double> x(k);
        for (std::size_t t = 0; t < length; ++t) {
            for (auto& v : x)
                v = normal(rng);
            for (std::size_t i = 0; i < k; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j <= i; ++j)
                    s += l(i, j) * x[j];
                block[i][t] = s;
            }
        }
        std::vector<int> group;
        for (auto& c : block) {
            group.push_back(static_cast<int>(columns.size()));
            columns.push_back(std::move(c));
        }
        groups.push_back(std::move(group));
    }
    for (std::size_t j = 0; j < noise_count; ++j) {
        auto rng = stream_rng(seed, stream++);
        std::normal_distribution<double> normal;
        std::vector<double> c(length);
        for (auto& v : c)
            v = normal(rng);
        columns.push_back(std::move(c));
    }

    const std::size_t n = columns.size();
    std::vector<std::size_t> perm(n);  // perm[new] = old
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    auto rng = stream_rng(seed, ~std::uint64_t{0});
    for (std::size_t i = n; i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(perm[i - 1], perm[pick(rng)]);
    }
    std::vector<std::size_t> where(n);
    for (std::size_t i = 0; i < n; ++i)
        where[perm[i]] = i;

    std::vector<std::vector<double>> shuffled(n);
    std::vector<std::string> names(n);
    const int digits = std::max(4, static_cast<int>(std::to_string(n).size()));
    for (std::size_t i = 0; i < n; ++i) {
        shuffled[i] = std::move(columns[perm[i]]);
        const std::string num = std::to_string(i + 1);
        names[i] = "x" + std::string(static_cast<std::size_t>(digits) - std::min(num.size(), static_cast<std::size_t>(digits)), '0') + num;
    }
    for (auto& g : groups) {
        for (int& m : g)
            m = static_cast<int>(where[static_cast<std::size_t>(m)]);
        std::sort(g.begin(), g.end());
    }
    return {TimeSeriesDataset(std::move(names), std::move(shuffled), false), std::move(groups)};
}

double NullDistribution::p_value(double sigma) const
{
    const auto first = std::lower_bound(sorted_sigmas.begin(), sorted_sigmas.end(), sigma);
    return add_one_p(static_cast<std::size_t>(sorted_sigmas.end() - first), sorted_sigmas.size());
}

NullDistribution null_distribution(std::size_t k, std::span<const TimeSeriesDataset> pool,
                                   std::size_t samples, std::uint64_t seed, unsigned threads)
{
    if (k < 2)
        throw ValidationError("null distribution needs k >= 2");
    if (samples < 999)
        throw ValidationError("null distribution needs at least 999 samples");
    if (pool.empty())
        throw ValidationError("pool is empty");
    check_pool(pool, pool.front().length(), k);

    NullDistribution out;
    out.set_size = k;
    out.sorted_sigmas.resize(samples);
    const std::size_t chunks = (samples + kDrawChunk - 1) / kDrawChunk;
    parallel_for(chunks, threads, [&](std::size_t c) {
        auto rng = stream_rng(mix(seed, 0x6e756c6cULL), c);
        std::vector<std::size_t> order(pool.size());
        std::vector<std::span<const double>> cols(k);
        const std::size_t end = std::min(samples, (c + 1) * kDrawChunk);
        for (std::size_t s = c * kDrawChunk; s < end; ++s) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            for (std::size_t i = 0; i < k; ++i) {
                std::uniform_int_distribution<std::size_t> pick_ds(i, order.size() - 1);
                std::swap(order[i], order[pick_ds(rng)]);
                const auto& d = pool[order[i]];
                std::uniform_int_distribution<std::size_t> pick_var(0, d.width() - 1);
                cols[i] = d.column(pick_var(rng));
            }
            out.sorted_sigmas[s] = sigma_of_columns(cols);
        }
    });
    std::sort(out.sorted_sigmas.begin(), out.sorted_sigmas.end());
    return out;
}

double significance_sigma(double sigma, std::size_t k, std::span<const TimeSeriesDataset> pool,
                          std::size_t samples, std::uint64_t seed, unsigned threads)
{
    return null_distribution(k, pool, samples, seed, threads).p_value(sigma);
}

double member_contribution(const TimeSeriesDataset& d, std::span<const int> members,
                           std::size_t position, std::span<const TimeSeriesDataset> pool,
                           std::size_t repeats, std::uint64_t seed, unsigned threads)
{
    if (repeats < 100)
        throw ValidationError("member contribution needs at least 100 repeats");
    if (pool.empty())
        throw ValidationError("pool is empty");
    if (position >= members.size())
        throw ValidationError("member position out of range");
    if (!d.standardized())
        throw ValidationError("dataset must be standardized");
    check_pool(pool, d.length(), 1);

    std::vector<std::span<const double>> base;
    for (int m : members)
        base.push_back(d.column(static_cast<std::size_t>(m)));
    const double original = sigma_of_columns(base);

    std::vector<char> at_least(repeats, 0);
    const std::size_t chunks = (repeats + kDrawChunk - 1) / kDrawChunk;
    parallel_for(chunks, threads, [&](std::size_t c) {
        auto rng = stream_rng(mix(seed, 0x6d656d62ULL + position), c);
        auto cols = base;
        std::uniform_int_distribution<std::size_t> pick_ds(0, pool.size() - 1);
        const std::size_t end = std::min(repeats, (c + 1) * kDrawChunk);
        for (std::size_t r = c * kDrawChunk; r < end; ++r) {
            const auto& src = pool[pick_ds(rng)];
            std::uniform_int_distribution<std::size_t> pick_var(0, src.width() - 1);
            cols[position] = src.column(pick_var(rng));
            at_least[r] = sigma_of_columns(cols) >= original ? 1 : 0;
        }
    });
    const auto hits = static_cast<std::size_t>(std::count(at_least.begin(), at_least.end(), 1));
    return add_one_p(hits, repeats);
}

SignificanceReport assess_significance(const TimeSeriesDataset& d,
                                       std::span<const std::string> members,
                                       std::span<const TimeSeriesDataset> pool,
                                       const SignificanceOptions& options)
{
    if (members.size() < 2)
        throw ValidationError("significance: multipole needs at least 2 members");
    std::vector<int> idx;
    for (const auto& name : members) {
        const int i = d.find(name);
        if (i < 0)
            throw ValidationError("significance: member '" + name + "' not found in dataset");
        idx.push_back(i);
    }
    SignificanceReport rep;
    rep.members.assign(members.begin(), members.end());
    std::vector<std::span<const double>> cols;
    for (int i : idx)
        cols.push_back(d.column(static_cast<std::size_t>(i)));
    rep.sigma = sigma_of_columns(cols);
    rep.p_sigma = significance_sigma(rep.sigma, idx.size(), pool, options.samples, options.seed,
                                     options.threads);
    bool all_members = true;
    for (std::size_t p = 0; p < idx.size(); ++p) {
        const double mp = member_contribution(d, idx, p, pool, options.repeats, options.seed,
                                              options.threads);
        rep.member_pvalues.push_back(mp);
        all_members = all_members && mp <= options.alpha;
    }
    rep.significant = rep.p_sigma <= options.alpha && all_members;
    return rep;
}

std::size_t reproducibility(std::span<const std::string> members,
                            std::span<const TimeSeriesDataset> datasets,
                            std::span<const TimeSeriesDataset> pool,
                            const SignificanceOptions& options)
{
    std::size_t count = 0;
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        auto opt = options;
        opt.seed = mix(options.seed, 0x7265707200ULL + i);
        count += assess_significance(datasets[i], members, pool, opt).significant ? 1 : 0;
    }
    return count;
}

}  // namespace multipole
