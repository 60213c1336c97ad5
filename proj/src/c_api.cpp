#include "multipole/multipole.h"

#include "multipole/bounds.hpp"
#include "multipole/dataset.hpp"
#include "multipole/error.hpp"
#include "multipole/io.hpp"
#include "multipole/measures.hpp"
#include "multipole/miner.hpp"
#include "multipole/stats.hpp"

#include <fstream>
#include <memory>
#include <new>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

struct mp_dataset {
    multipole::TimeSeriesDataset value;
};

struct mp_result {
    std::vector<multipole::NamedRecord> records;
    bool partial = false;
    std::size_t candidates = 0;
};

struct mp_scatter {
    std::vector<multipole::ScatterSample> samples;
};

struct mp_synth {
    multipole::SynthOutput output;
    mp_dataset dataset;
};

namespace {

thread_local std::string last_error;

mp_status fail(mp_status status, const std::string& message)
{
    last_error = message;
    return status;
}

template <class F>
mp_status guarded(F&& body)
{
    try {
        last_error.clear();
        return body();
    } catch (const multipole::Error& e) {
        switch (e.kind()) {
        case multipole::ErrorKind::validation: return fail(MP_ERR_VALIDATION, e.what());
        case multipole::ErrorKind::io: return fail(MP_ERR_IO, e.what());
        case multipole::ErrorKind::budget: return fail(MP_ERR_BUDGET, e.what());
        case multipole::ErrorKind::internal: return fail(MP_ERR_INTERNAL, e.what());
        }
        return fail(MP_ERR_INTERNAL, e.what());
    } catch (const std::bad_alloc&) {
        return fail(MP_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(MP_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(MP_ERR_INTERNAL, "unknown error");
    }
}

void require(bool ok, const char* what)
{
    if (!ok)
        throw multipole::ValidationError(what);
}

multipole::MinerConfig to_config(const mp_miner_config* c)
{
    multipole::MinerConfig cfg;
    cfg.sigma = c->sigma;
    cfg.delta = c->delta;
    cfg.rho = c->rho;
    cfg.max_size = c->max_size;
    cfg.seed = c->seed;
    cfg.clique_budget = c->clique_budget;
    cfg.threads = c->threads == 0 ? 1 : c->threads;
    cfg.validate();
    return cfg;
}

multipole::CorrelationMatrix raw_matrix(const double* corr, std::size_t k)
{
    require(corr != nullptr, "matrix pointer is null");
    multipole::Matrix m(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            m(i, j) = corr[i * k + j];
    return multipole::CorrelationMatrix(std::move(m));
}

std::vector<multipole::TimeSeriesDataset> collect(const mp_dataset* const* list, std::size_t n)
{
    std::vector<multipole::TimeSeriesDataset> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        require(list[i] != nullptr, "dataset handle is null");
        out.push_back(list[i]->value);
    }
    return out;
}

}  // namespace

extern "C" {

const char* mp_version(void)
{
    return MULTIPOLE_VERSION;
}

const char* mp_last_error(void)
{
    return last_error.c_str();
}

mp_status mp_dataset_load_csv(const char* path, mp_dataset** out)
{
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null argument");
        *out = new mp_dataset{multipole::load_csv(path)};
        return MP_OK;
    });
}

mp_status mp_dataset_standardize(const mp_dataset* d, int detrend, mp_dataset** out)
{
    return guarded([&] {
        require(d != nullptr && out != nullptr, "null argument");
        *out = new mp_dataset{multipole::standardize(d->value, detrend != 0)};
        return MP_OK;
    });
}

mp_status mp_dataset_write_csv(const mp_dataset* d, const char* path)
{
    return guarded([&] {
        require(d != nullptr && path != nullptr, "null argument");
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw multipole::IoError(std::string("cannot write '") + path + "'");
        multipole::write_csv(d->value, out);
        if (!out)
            throw multipole::IoError(std::string("write failed for '") + path + "'");
        return MP_OK;
    });
}

size_t mp_dataset_width(const mp_dataset* d)
{
    return d ? d->value.width() : 0;
}

size_t mp_dataset_length(const mp_dataset* d)
{
    return d ? d->value.length() : 0;
}

const char* mp_dataset_name(const mp_dataset* d, size_t column)
{
    if (!d || column >= d->value.width())
        return nullptr;
    return d->value.names()[column].c_str();
}

void mp_dataset_free(mp_dataset* d)
{
    delete d;
}

void mp_miner_config_init(mp_miner_config* cfg)
{
    if (!cfg)
        return;
    const multipole::MinerConfig defaults;
    cfg->sigma = defaults.sigma;
    cfg->delta = defaults.delta;
    cfg->rho = defaults.rho;
    cfg->max_size = defaults.max_size;
    cfg->seed = defaults.seed;
    cfg->clique_budget = defaults.clique_budget;
    cfg->threads = defaults.threads;
}

mp_status mp_mine(const mp_dataset* d, const mp_miner_config* c, mp_result** out)
{
    return guarded([&] {
        require(d != nullptr && c != nullptr && out != nullptr, "null argument");
        const auto cfg = to_config(c);
        auto res = multipole::mine(d->value, cfg);
        auto* r = new mp_result;
        r->records = multipole::name_records(res.records, d->value.names());
        r->partial = res.partial;
        r->candidates = res.candidates;
        *out = r;
        if (res.partial)
            return fail(MP_ERR_BUDGET, "clique budget exhausted after " +
                                           std::to_string(res.cliques) +
                                           " cliques; results are partial");
        return MP_OK;
    });
}

mp_status mp_brute_force(const mp_dataset* d, const mp_miner_config* c, uint64_t subset_budget,
                         mp_result** out)
{
    return guarded([&] {
        require(d != nullptr && c != nullptr && out != nullptr, "null argument");
        const auto cfg = to_config(c);
        const auto a = multipole::correlation_matrix(d->value, cfg.threads);
        auto res = multipole::brute_force(a, cfg, subset_budget);
        auto* r = new mp_result;
        r->records = multipole::name_records(res.records, d->value.names());
        r->candidates = res.candidates;
        *out = r;
        return MP_OK;
    });
}

mp_status mp_random_search(const mp_dataset* d, const mp_miner_config* c, uint64_t trials,
                           mp_result** out)
{
    return guarded([&] {
        require(d != nullptr && c != nullptr && out != nullptr, "null argument");
        const auto cfg = to_config(c);
        const auto a = multipole::correlation_matrix(d->value, cfg.threads);
        auto recs = multipole::random_search(a, cfg, trials);
        auto* r = new mp_result;
        r->records = multipole::name_records(recs, d->value.names());
        r->candidates = static_cast<std::size_t>(trials);
        *out = r;
        return MP_OK;
    });
}

mp_status mp_result_read_json(const char* path, mp_result** out)
{
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null argument");
        auto* r = new mp_result;
        try {
            r->records = multipole::records_from_json(multipole::read_text_file(path));
        } catch (...) {
            delete r;
            throw;
        }
        *out = r;
        return MP_OK;
    });
}

mp_status mp_result_merge(const mp_result* const* parts, size_t count, mp_result** out)
{
    return guarded([&] {
        require(out != nullptr && (parts != nullptr || count == 0), "null argument");
        std::vector<std::vector<multipole::NamedRecord>> lists;
        bool partial = false;
        for (std::size_t i = 0; i < count; ++i) {
            require(parts[i] != nullptr, "result handle is null");
            lists.push_back(parts[i]->records);
            partial = partial || parts[i]->partial;
        }
        auto* r = new mp_result;
        r->records = multipole::merge_records(lists);
        r->partial = partial;
        *out = r;
        return MP_OK;
    });
}

mp_status mp_result_write_json(const mp_result* r, const char* path)
{
    return guarded([&] {
        require(r != nullptr && path != nullptr, "null argument");
        multipole::write_text_file(path, multipole::records_to_json(r->records));
        return MP_OK;
    });
}

mp_status mp_result_write_csv(const mp_result* r, const char* path)
{
    return guarded([&] {
        require(r != nullptr && path != nullptr, "null argument");
        multipole::write_text_file(path, multipole::records_to_csv(r->records));
        return MP_OK;
    });
}

size_t mp_result_count(const mp_result* r)
{
    return r ? r->records.size() : 0;
}

int mp_result_partial(const mp_result* r)
{
    return r && r->partial ? 1 : 0;
}

size_t mp_result_candidates(const mp_result* r)
{
    return r ? r->candidates : 0;
}

size_t mp_result_size(const mp_result* r, size_t i)
{
    return r && i < r->records.size() ? r->records[i].members.size() : 0;
}

const char* mp_result_member(const mp_result* r, size_t i, size_t j)
{
    if (!r || i >= r->records.size() || j >= r->records[i].members.size())
        return nullptr;
    return r->records[i].members[j].c_str();
}

int mp_result_sign(const mp_result* r, size_t i, size_t j)
{
    if (!r || i >= r->records.size() || j >= r->records[i].signs.size())
        return 0;
    return r->records[i].signs[j];
}

double mp_result_weight(const mp_result* r, size_t i, size_t j)
{
    if (!r || i >= r->records.size() || j >= r->records[i].weights.size())
        return 0.0;
    return r->records[i].weights[j];
}

double mp_result_sigma(const mp_result* r, size_t i)
{
    return r && i < r->records.size() ? r->records[i].sigma : 0.0;
}

double mp_result_gain(const mp_result* r, size_t i)
{
    return r && i < r->records.size() ? r->records[i].gain : 0.0;
}

void mp_result_free(mp_result* r)
{
    delete r;
}

mp_status mp_linear_dependence(const double* corr, size_t k, double* out)
{
    return guarded([&] {
        require(out != nullptr, "null argument");
        const auto a = raw_matrix(corr, k);
        std::vector<int> all(k);
        std::iota(all.begin(), all.end(), 0);
        *out = multipole::linear_dependence(a, all);
        return MP_OK;
    });
}

mp_status mp_linear_gain(const double* corr, size_t k, double* out)
{
    return guarded([&] {
        require(out != nullptr, "null argument");
        const auto a = raw_matrix(corr, k);
        std::vector<int> all(k);
        std::iota(all.begin(), all.end(), 0);
        *out = multipole::linear_gain(a, all);
        return MP_OK;
    });
}

mp_status mp_max_size_for_gain(double delta, int* out)
{
    return guarded([&] {
        require(out != nullptr, "null argument");
        *out = multipole::max_size_for_gain(delta);
        return MP_OK;
    });
}

mp_status mp_scatter_run(int k, uint64_t count, uint64_t seed, unsigned threads, mp_scatter** out)
{
    return guarded([&] {
        require(out != nullptr, "null argument");
        auto* s = new mp_scatter;
        try {
            s->samples = multipole::scatter(k, static_cast<std::size_t>(count), seed,
                                            threads == 0 ? 1 : threads);
        } catch (...) {
            delete s;
            throw;
        }
        *out = s;
        return MP_OK;
    });
}

size_t mp_scatter_count(const mp_scatter* s)
{
    return s ? s->samples.size() : 0;
}

double mp_scatter_gain(const mp_scatter* s, size_t i)
{
    return s && i < s->samples.size() ? s->samples[i].gain : 0.0;
}

double mp_scatter_rho_s(const mp_scatter* s, size_t i)
{
    return s && i < s->samples.size() ? s->samples[i].rho_s : 0.0;
}

double mp_scatter_max_gain(const mp_scatter* s)
{
    double best = 0.0;
    if (s)
        for (const auto& x : s->samples)
            best = std::max(best, x.gain);
    return best;
}

size_t mp_scatter_boundary_violations(const mp_scatter* s, double delta)
{
    return s ? multipole::boundary_violations(s->samples, delta) : 0;
}

mp_status mp_scatter_write_csv(const mp_scatter* s, const char* path)
{
    return guarded([&] {
        require(s != nullptr && path != nullptr, "null argument");
        multipole::write_text_file(path, multipole::scatter_to_csv(s->samples));
        return MP_OK;
    });
}

void mp_scatter_free(mp_scatter* s)
{
    delete s;
}

mp_status mp_bounds_validate(int k, uint64_t count, uint64_t seed, unsigned threads,
                             const char* csv_path, mp_bounds_summary* out)
{
    return guarded([&] {
        require(out != nullptr, "null argument");
        require(k >= 3, "bounds need k >= 3");
        const unsigned t = threads == 0 ? 1 : threads;
        const auto mats = multipole::sample_correlation_matrices(k, static_cast<std::size_t>(count), seed, t);
        const auto v = multipole::validate_bounds(mats, t);
        if (csv_path != nullptr)
            multipole::write_text_file(csv_path, multipole::bounds_to_csv(v));
        out->matrices = v.rows.size();
        out->theorem1_violations = v.theorem1;
        out->corollary1_violations = v.corollary1;
        out->corollary2_violations = v.corollary2;
        out->size_cap_violations = v.size_cap;
        out->max_gain = 0.0;
        for (const auto& row : v.rows)
            out->max_gain = std::max(out->max_gain, row.gain);
        return MP_OK;
    });
}

void mp_synth_params_init(mp_synth_params* p)
{
    if (!p)
        return;
    static const int default_sizes[] = {3, 4, 5};
    p->plant_count = 66;
    p->sizes = default_sizes;
    p->size_count = 3;
    p->total_width = 2000;
    p->length = 1000;
    p->seed = 0;
    p->min_sigma = 0.7;
    p->min_gain = 0.1;
    p->max_rho_s = 1.0;
}

mp_status mp_synth_run(const mp_synth_params* p, mp_synth** out)
{
    return guarded([&] {
        require(p != nullptr && out != nullptr, "null argument");
        require(p->sizes != nullptr && p->size_count > 0, "synth: sizes are required");
        multipole::PlantSpec spec;
        spec.count = p->plant_count;
        spec.sizes.assign(p->sizes, p->sizes + p->size_count);
        spec.min_sigma = p->min_sigma;
        spec.min_gain = p->min_gain;
        spec.max_rho_s = p->max_rho_s;
        spec.seed = p->seed;
        const auto planted = multipole::plant_multipoles(spec);
        std::size_t used = 0;
        for (const auto& m : planted)
            used += m.dim();
        if (p->total_width < used)
            throw multipole::ValidationError("synth: total width " + std::to_string(p->total_width) +
                                             " is smaller than the " + std::to_string(used) +
                                             " planted columns");
        auto output = multipole::synth_dataset(planted, p->total_width - used, p->length, p->seed);
        auto dataset = output.dataset;
        *out = new mp_synth{std::move(output), mp_dataset{std::move(dataset)}};
        return MP_OK;
    });
}

const mp_dataset* mp_synth_dataset(const mp_synth* s)
{
    return s ? &s->dataset : nullptr;
}

size_t mp_synth_truth_count(const mp_synth* s)
{
    return s ? s->output.truth.size() : 0;
}

mp_status mp_synth_write_truth_json(const mp_synth* s, const char* path)
{
    return guarded([&] {
        require(s != nullptr && path != nullptr, "null argument");
        multipole::write_text_file(path, multipole::truth_to_json(s->output));
        return MP_OK;
    });
}

void mp_synth_free(mp_synth* s)
{
    delete s;
}

void mp_signif_params_init(mp_signif_params* p)
{
    if (!p)
        return;
    const multipole::SignificanceOptions defaults;
    p->samples = defaults.samples;
    p->repeats = defaults.repeats;
    p->alpha = defaults.alpha;
    p->seed = defaults.seed;
    p->threads = defaults.threads;
}

mp_status mp_significance(const mp_dataset* d, const char* const* members, size_t member_count,
                          const mp_dataset* const* pool, size_t pool_count,
                          const mp_dataset* const* windows, size_t window_count,
                          const mp_signif_params* params, double* member_p, mp_signif_report* out)
{
    return guarded([&] {
        require(d != nullptr && members != nullptr && params != nullptr && out != nullptr &&
                    member_p != nullptr,
                "null argument");
        require(pool != nullptr || pool_count == 0, "null pool");
        require(windows != nullptr || window_count == 0, "null windows");
        std::vector<std::string> names;
        for (std::size_t i = 0; i < member_count; ++i) {
            require(members[i] != nullptr, "null member name");
            names.emplace_back(members[i]);
        }
        const auto pool_sets = collect(pool, pool_count);
        const auto window_sets = collect(windows, window_count);
        multipole::SignificanceOptions opt;
        opt.samples = params->samples;
        opt.repeats = params->repeats;
        opt.alpha = params->alpha;
        opt.seed = params->seed;
        opt.threads = params->threads == 0 ? 1 : params->threads;

        const auto rep = multipole::assess_significance(d->value, names, pool_sets, opt);
        for (std::size_t i = 0; i < rep.member_pvalues.size(); ++i)
            member_p[i] = rep.member_pvalues[i];
        out->sigma = rep.sigma;
        out->p_sigma = rep.p_sigma;
        out->significant = rep.significant ? 1 : 0;
        out->reproducible_count =
            window_count > 0 ? multipole::reproducibility(names, window_sets, pool_sets, opt) : 0;
        return MP_OK;
    });
}

}  // extern "C"
