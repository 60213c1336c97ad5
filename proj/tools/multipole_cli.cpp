// multipole: command-line front end over the C API.

#include "multipole/multipole.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

enum Exit { kOk = 0, kInternal = 1, kValidation = 2, kBudget = 3 };

struct Failure {
    int code;
    std::string message;
};

int exit_for(mp_status s)
{
    switch (s) {
    case MP_OK: return kOk;
    case MP_ERR_VALIDATION:
    case MP_ERR_IO: return kValidation;
    case MP_ERR_BUDGET: return kBudget;
    default: return kInternal;
    }
}

void check(mp_status s, const std::string& context = {})
{
    if (s == MP_OK)
        return;
    std::string msg = mp_last_error();
    if (!context.empty())
        msg = context + ": " + msg;
    throw Failure{exit_for(s), msg};
}

struct DatasetDeleter {
    void operator()(mp_dataset* d) const { mp_dataset_free(d); }
};
struct ResultDeleter {
    void operator()(mp_result* r) const { mp_result_free(r); }
};
using DatasetPtr = std::unique_ptr<mp_dataset, DatasetDeleter>;
using ResultPtr = std::unique_ptr<mp_result, ResultDeleter>;

DatasetPtr load(const std::string& path, bool detrend)
{
    mp_dataset* raw = nullptr;
    check(mp_dataset_load_csv(path.c_str(), &raw), path);
    DatasetPtr d(raw);
    mp_dataset* std_ = nullptr;
    check(mp_dataset_standardize(d.get(), detrend ? 1 : 0, &std_), path);
    return DatasetPtr(std_);
}

std::string stem_of(const std::string& out)
{
    const auto slash = out.find_last_of('/');
    const auto dot = out.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return out;
    return out.substr(0, dot);
}

std::string utc_now()
{
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

unsigned default_threads()
{
    if (const char* env = std::getenv("MULTIPOLE_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 1024)
            return static_cast<unsigned>(v);
    }
    return 1;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        if (!cur.empty())
            out.push_back(cur);
    return out;
}

// Shared state filled in by whichever subcommand runs.
struct Run {
    std::vector<std::string> argv;
    std::string command;
    json config = json::object();
    std::vector<std::string> outputs;
    std::string manifest_path;
    bool partial = false;
    std::string started;
};

void write_manifest(const Run& run)
{
    json m;
    m["command"] = run.command;
    m["argv"] = run.argv;
    m["config"] = run.config;
    m["version"] = mp_version();
    m["started"] = run.started;
    m["finished"] = utc_now();
    m["outputs"] = run.outputs;
    m["partial"] = run.partial;
    std::ofstream out(run.manifest_path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Failure{kValidation, "cannot write manifest '" + run.manifest_path + "'"};
    out << m.dump(2) << '\n';
}

struct MinerFlags {
    std::string input;
    std::string out;
    double sigma = 0.5;
    double delta = 0.15;
    double rho = 0.0;
    int max_size = 0;
    std::uint64_t seed = 0;
    std::uint64_t budget = 10'000'000;
    std::uint64_t trials = 100'000;
    bool detrend = false;
};

void add_miner_flags(CLI::App* app, MinerFlags& f, const char* budget_help)
{
    app->add_option("--input", f.input, "Input CSV, header of names, one column per variable (path, required)")
        ->required();
    app->add_option("--out", f.out, "Result JSON path; CSV and manifest are written beside it (path, required)")
        ->required();
    app->add_option("--sigma", f.sigma, "Minimum linear dependence (real, default 0.5, range [0,1])");
    app->add_option("--delta", f.delta, "Minimum linear gain (real, default 0.15, range (0,1])");
    app->add_option("--rho", f.rho, "Graph threshold (real, default 0, range [-1,1])");
    app->add_option("--max-size", f.max_size,
                    "Largest multipole size (int, default 0 = floor((1+delta)/delta), range >= 0)");
    app->add_option("--seed", f.seed, "RNG seed (uint64, default 0)");
    app->add_option("--budget", f.budget, budget_help);
    app->add_flag("--detrend", f.detrend, "Remove a linear trend before standardizing (flag, default off)");
}

mp_miner_config to_config(const MinerFlags& f, unsigned threads)
{
    mp_miner_config c;
    mp_miner_config_init(&c);
    c.sigma = f.sigma;
    c.delta = f.delta;
    c.rho = f.rho;
    c.max_size = f.max_size;
    c.seed = f.seed;
    c.clique_budget = f.budget;
    c.threads = threads;
    return c;
}

void describe(Run& run, const MinerFlags& f, unsigned threads)
{
    run.config = {{"input", f.input},   {"sigma", f.sigma},     {"delta", f.delta},
                  {"rho", f.rho},       {"max_size", f.max_size}, {"seed", f.seed},
                  {"budget", f.budget}, {"detrend", f.detrend}, {"threads", threads}};
}

void write_result(Run& run, const mp_result* r, const std::string& out)
{
    const std::string csv = stem_of(out) + ".csv";
    check(mp_result_write_json(r, out.c_str()));
    check(mp_result_write_csv(r, csv.c_str()));
    run.outputs = {out, csv};
    run.manifest_path = stem_of(out) + ".manifest.json";
    run.partial = mp_result_partial(r) != 0;
}

int run_command(const std::vector<std::string>& args, bool allow_replay);

int dispatch(const std::vector<std::string>& args, bool allow_replay)
{
    CLI::App app{"Mine multipoles (sets of variables with strong joint linear dependence) from "
                 "multivariate time series."};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(mp_version()));

    unsigned threads = default_threads();
    auto add_threads = [&](CLI::App* sub) {
        sub->add_option("--threads", threads,
                        "Worker threads (int, default $MULTIPOLE_THREADS or 1, range [1,1024]); "
                        "output does not depend on it")
            ->check(CLI::Range(1u, 1024u));
    };

    Run run;
    run.argv = args;
    run.started = utc_now();

    MinerFlags mine_f;
    auto* mine_cmd = app.add_subcommand("mine", "Clique-based multipole search");
    add_miner_flags(mine_cmd, mine_f,
                    "Maximal-clique budget (uint64, default 10000000); exhausting it exits 3 "
                    "with partial results");

    MinerFlags brute_f;
    brute_f.budget = 100'000'000;
    auto* brute_cmd = app.add_subcommand("brute", "Exhaustive search over every subset of sizes 3..max-size");
    add_miner_flags(brute_cmd, brute_f,
                    "Subset budget (uint64, default 100000000); a larger search space exits 3");

    MinerFlags random_f;
    auto* random_cmd = app.add_subcommand("random", "Random subset search");
    add_miner_flags(random_cmd, random_f, "Unused (uint64, default 10000000)");
    random_cmd->add_option("--trials", random_f.trials, "Random subsets drawn (uint64, default 100000)");

    std::vector<std::string> merge_inputs;
    std::string merge_out;
    auto* merge_cmd = app.add_subcommand("merge", "Union result files, dropping duplicate and non-maximal sets");
    merge_cmd->add_option("--inputs", merge_inputs, "Result JSON files (paths, one or more, required)")
        ->required();
    merge_cmd->add_option("--out", merge_out, "Merged result JSON (path, required)")->required();

    int k = 3;
    std::uint64_t count = 100'000;
    std::uint64_t seed = 0;
    std::string out;
    double report_delta = 0.15;
    auto* sample_cmd = app.add_subcommand("sample", "Gain versus self-canceling correlation of random matrices");
    sample_cmd->add_option("--k", k, "Matrix size (int, default 3, range [2,8])")->check(CLI::Range(2, 8));
    sample_cmd->add_option("--count", count, "Accepted matrices (uint64, default 100000)");
    sample_cmd->add_option("--seed", seed, "RNG seed (uint64, default 0)");
    sample_cmd->add_option("--delta", report_delta,
                           "Gain level for the boundary check rho_s <= 1 - 3 delta (real, default 0.15, range (0,1])");
    sample_cmd->add_option("--out", out, "CSV k,gain,rho_s (path, required)")->required();

    auto* bounds_cmd = app.add_subcommand("bounds", "Check the eigenvalue perturbation bounds on random matrices");
    bounds_cmd->add_option("--k", k, "Matrix size (int, default 3, range [3,8])")->check(CLI::Range(3, 8));
    bounds_cmd->add_option("--count", count, "Accepted matrices (uint64, default 100000)");
    bounds_cmd->add_option("--seed", seed, "RNG seed (uint64, default 0)");
    bounds_cmd->add_option("--out", out, "Per-matrix CSV report (path, required)")->required();

    std::size_t plant = 66;
    std::string sizes = "3,4,5";
    std::size_t noise_to = 2000;
    std::size_t length = 1000;
    double min_sigma = 0.7;
    double min_gain = 0.1;
    double max_rho_s = 1.0;
    auto* synth_cmd = app.add_subcommand("synth", "Synthetic dataset with planted multipoles");
    synth_cmd->add_option("--plant", plant, "Planted multipoles (int, default 66, range >= 0)");
    synth_cmd->add_option("--sizes", sizes, "Comma-separated sizes cycled over planted sets (list, default 3,4,5, each in [3,8])");
    synth_cmd->add_option("--noise-to", noise_to, "Total column count including noise (int, default 2000)");
    synth_cmd->add_option("--T", length, "Series length (int, default 1000, range >= 50 * largest size)");
    synth_cmd->add_option("--seed", seed, "RNG seed (uint64, default 0)");
    synth_cmd->add_option("--min-sigma", min_sigma, "Minimum planted dependence (real, default 0.7, range [0,1])");
    synth_cmd->add_option("--min-gain", min_gain, "Minimum planted gain (real, default 0.1, range [0,1])");
    synth_cmd->add_option("--max-rho-s", max_rho_s,
                          "Maximum planted self-canceling correlation (real, default 1 = off, range [-1,1])");
    synth_cmd->add_option("--out", out, "Dataset CSV; ground truth goes to <stem>.truth.json (path, required)")
        ->required();

    std::string signif_input;
    std::string members;
    std::vector<std::string> pool;
    std::vector<std::string> windows;
    std::size_t samples = 10000;
    std::size_t repeats = 1000;
    double alpha = 0.01;
    bool detrend = false;
    auto* signif_cmd = app.add_subcommand("signif", "Empirical significance and reproducibility of one multipole");
    signif_cmd->add_option("--input", signif_input, "Dataset CSV holding the multipole (path, required)")->required();
    signif_cmd->add_option("--members", members, "Comma-separated member names (list, required, size >= 2)")
        ->required();
    signif_cmd->add_option("--pool", pool, "Independent datasets for the null (paths, required, count >= members)")
        ->required();
    signif_cmd->add_option("--windows", windows, "Datasets to re-test the multipole on (paths, default none)");
    signif_cmd->add_option("--samples", samples, "Null sets (int, default 10000, range >= 999)");
    signif_cmd->add_option("--repeats", repeats, "Replacements per member (int, default 1000, range >= 100)");
    signif_cmd->add_option("--alpha", alpha, "Significance level (real, default 0.01, range (0,1))");
    signif_cmd->add_option("--seed", seed, "RNG seed (uint64, default 0)");
    signif_cmd->add_flag("--detrend", detrend, "Remove a linear trend before standardizing (flag, default off)");
    signif_cmd->add_option("--out", out, "Report JSON (path, required)")->required();

    std::string manifest;
    CLI::App* replay_cmd = nullptr;
    if (allow_replay) {
        replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
        replay_cmd->add_option("--manifest", manifest, "Manifest JSON (path, required)")->required();
    }

    for (auto* sub : {mine_cmd, brute_cmd, random_cmd, sample_cmd, bounds_cmd, signif_cmd})
        add_threads(sub);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kValidation;
    }

    if (replay_cmd && replay_cmd->parsed()) {
        std::ifstream in(manifest);
        if (!in)
            throw Failure{kValidation, "cannot open manifest '" + manifest + "'"};
        json m;
        try {
            in >> m;
            return run_command(m.at("argv").get<std::vector<std::string>>(), false);
        } catch (const json::exception& e) {
            throw Failure{kValidation, "manifest '" + manifest + "': " + e.what()};
        }
    }

    int code = kOk;
    auto miner = [&](const char* name, const MinerFlags& f, auto&& call) {
        run.command = name;
        describe(run, f, threads);
        const auto d = load(f.input, f.detrend);
        const auto cfg = to_config(f, threads);
        mp_result* raw = nullptr;
        const mp_status s = call(d.get(), &cfg, &raw);
        ResultPtr r(raw);
        if (s != MP_OK && !(s == MP_ERR_BUDGET && r))
            check(s);
        write_result(run, r.get(), f.out);
        if (s == MP_ERR_BUDGET) {
            run.partial = true;
            std::cerr << "multipole: " << mp_last_error() << '\n';
            code = kBudget;
        }
        std::cout << mp_result_count(r.get()) << " multipoles written to " << f.out << '\n';
    };

    if (mine_cmd->parsed()) {
        miner("mine", mine_f, [](const mp_dataset* d, const mp_miner_config* c, mp_result** r) {
            return mp_mine(d, c, r);
        });
    } else if (brute_cmd->parsed()) {
        miner("brute", brute_f, [&](const mp_dataset* d, const mp_miner_config* c, mp_result** r) {
            return mp_brute_force(d, c, brute_f.budget, r);
        });
    } else if (random_cmd->parsed()) {
        miner("random", random_f, [&](const mp_dataset* d, const mp_miner_config* c, mp_result** r) {
            return mp_random_search(d, c, random_f.trials, r);
        });
        run.config["trials"] = random_f.trials;
    } else if (merge_cmd->parsed()) {
        run.command = "merge";
        run.config = {{"inputs", merge_inputs}};
        std::vector<ResultPtr> parts;
        std::vector<const mp_result*> raw;
        for (const auto& p : merge_inputs) {
            mp_result* r = nullptr;
            check(mp_result_read_json(p.c_str(), &r), p);
            parts.emplace_back(r);
            raw.push_back(r);
        }
        mp_result* merged = nullptr;
        check(mp_result_merge(raw.data(), raw.size(), &merged));
        ResultPtr m(merged);
        write_result(run, m.get(), merge_out);
        std::cout << mp_result_count(m.get()) << " multipoles written to " << merge_out << '\n';
    } else if (sample_cmd->parsed()) {
        run.command = "sample";
        run.config = {{"k", k}, {"count", count}, {"seed", seed}, {"delta", report_delta}, {"threads", threads}};
        if (!(report_delta > 0.0 && report_delta <= 1.0))
            throw Failure{kValidation, "--delta: delta must be in (0,1]"};
        mp_scatter* s = nullptr;
        check(mp_scatter_run(k, count, seed, threads, &s));
        std::unique_ptr<mp_scatter, void (*)(mp_scatter*)> guard(s, mp_scatter_free);
        check(mp_scatter_write_csv(s, out.c_str()), out);
        run.outputs = {out};
        run.manifest_path = stem_of(out) + ".manifest.json";
        std::printf("k=%d samples=%zu max_gain=%.12g boundary_violations(delta=%g)=%zu\n", k,
                    mp_scatter_count(s), mp_scatter_max_gain(s), report_delta,
                    mp_scatter_boundary_violations(s, report_delta));
    } else if (bounds_cmd->parsed()) {
        run.command = "bounds";
        run.config = {{"k", k}, {"count", count}, {"seed", seed}, {"threads", threads}};
        mp_bounds_summary sum{};
        check(mp_bounds_validate(k, count, seed, threads, out.c_str(), &sum));
        run.outputs = {out};
        run.manifest_path = stem_of(out) + ".manifest.json";
        std::printf("k=%d matrices=%llu theorem1=%llu corollary1=%llu corollary2=%llu size_cap=%llu "
                    "max_gain=%.12g\n",
                    k, static_cast<unsigned long long>(sum.matrices),
                    static_cast<unsigned long long>(sum.theorem1_violations),
                    static_cast<unsigned long long>(sum.corollary1_violations),
                    static_cast<unsigned long long>(sum.corollary2_violations),
                    static_cast<unsigned long long>(sum.size_cap_violations), sum.max_gain);
        if (sum.theorem1_violations || sum.corollary1_violations || sum.corollary2_violations)
            code = kInternal;
    } else if (synth_cmd->parsed()) {
        run.command = "synth";
        std::vector<int> size_list;
        for (const auto& s : split(sizes, ',')) {
            try {
                size_list.push_back(std::stoi(s));
            } catch (const std::exception&) {
                throw Failure{kValidation, "--sizes: '" + s + "' is not an integer"};
            }
        }
        run.config = {{"plant", plant},       {"sizes", size_list}, {"noise_to", noise_to},
                      {"T", length},          {"seed", seed},       {"min_sigma", min_sigma},
                      {"min_gain", min_gain}, {"max_rho_s", max_rho_s}};
        mp_synth_params p;
        mp_synth_params_init(&p);
        p.plant_count = plant;
        p.sizes = size_list.data();
        p.size_count = size_list.size();
        p.total_width = noise_to;
        p.length = length;
        p.seed = seed;
        p.min_sigma = min_sigma;
        p.min_gain = min_gain;
        p.max_rho_s = max_rho_s;
        mp_synth* s = nullptr;
        check(mp_synth_run(&p, &s));
        std::unique_ptr<mp_synth, void (*)(mp_synth*)> guard(s, mp_synth_free);
        const std::string truth = stem_of(out) + ".truth.json";
        check(mp_dataset_write_csv(mp_synth_dataset(s), out.c_str()), out);
        check(mp_synth_write_truth_json(s, truth.c_str()), truth);
        run.outputs = {out, truth};
        run.manifest_path = stem_of(out) + ".manifest.json";
        std::cout << mp_synth_truth_count(s) << " planted multipoles in "
                  << mp_dataset_width(mp_synth_dataset(s)) << " columns written to " << out << '\n';
    } else if (signif_cmd->parsed()) {
        run.command = "signif";
        const auto names = split(members, ',');
        run.config = {{"input", signif_input}, {"members", names},   {"pool", pool},
                      {"windows", windows},    {"samples", samples}, {"repeats", repeats},
                      {"alpha", alpha},        {"seed", seed},       {"detrend", detrend},
                      {"threads", threads}};
        const auto d = load(signif_input, detrend);
        std::vector<DatasetPtr> owned;
        std::vector<const mp_dataset*> pool_raw;
        std::vector<const mp_dataset*> window_raw;
        for (const auto& p : pool) {
            owned.push_back(load(p, detrend));
            pool_raw.push_back(owned.back().get());
        }
        for (const auto& w : windows) {
            owned.push_back(load(w, detrend));
            window_raw.push_back(owned.back().get());
        }
        std::vector<const char*> cnames;
        for (const auto& n : names)
            cnames.push_back(n.c_str());
        mp_signif_params params;
        mp_signif_params_init(&params);
        params.samples = samples;
        params.repeats = repeats;
        params.alpha = alpha;
        params.seed = seed;
        params.threads = threads;
        std::vector<double> member_p(names.size());
        mp_signif_report rep{};
        check(mp_significance(d.get(), cnames.data(), cnames.size(), pool_raw.data(), pool_raw.size(),
                              window_raw.data(), window_raw.size(), &params, member_p.data(), &rep));
        json report = {{"multipole", names},
                       {"linear_dependence", rep.sigma},
                       {"p_sigma", rep.p_sigma},
                       {"member_pvalues", member_p},
                       {"significant", rep.significant != 0},
                       {"reproducible_count", rep.reproducible_count},
                       {"windows", windows.size()}};
        std::ofstream f(out, std::ios::binary | std::ios::trunc);
        if (!f)
            throw Failure{kValidation, "cannot write '" + out + "'"};
        f << report.dump(2) << '\n';
        run.outputs = {out};
        run.manifest_path = stem_of(out) + ".manifest.json";
        std::cout << "p_sigma=" << rep.p_sigma << " significant=" << rep.significant
                  << " reproducible=" << rep.reproducible_count << "/" << windows.size() << '\n';
    }

    write_manifest(run);
    return code;
}

int run_command(const std::vector<std::string>& args, bool allow_replay)
{
    try {
        return dispatch(args, allow_replay);
    } catch (const Failure& f) {
        std::cerr << "multipole: error: " << f.message << '\n';
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "multipole: internal error: " << e.what() << '\n';
        return kInternal;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_command(args, true);
}
