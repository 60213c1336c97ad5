#pragma once

#include "multipole/dataset.hpp"
#include "multipole/measures.hpp"

#include <atomic>
#include <cstdint>
#include <span>
#include <vector>

namespace multipole {

struct MinerConfig {
    double sigma = 0.5;     // minimum linear dependence
    double delta = 0.15;    // minimum linear gain
    double rho = 0.0;       // graph threshold; 0 gives plain CoMEt, 1 exhaustive search
    int max_size = 0;       // 0: derive floor((1 + delta) / delta)
    std::uint64_t seed = 0;
    std::uint64_t clique_budget = 10'000'000;
    unsigned threads = 1;
    const std::atomic<bool>* cancel = nullptr;

    // Throws ValidationError naming the offending field.
    void validate() const;
    int effective_max_size() const;
};

struct MineResult {
    std::vector<MultipoleRecord> records;
    bool partial = false;
    std::size_t cliques = 0;
    std::size_t candidates = 0;
};

// Full pipeline on a standardized dataset.
MineResult mine(const TimeSeriesDataset& d, const MinerConfig& cfg);
MineResult mine(const CorrelationMatrix& a, const MinerConfig& cfg);

// Multipoles contained in one promising candidate (members ascending, size >= 3).
std::vector<MultipoleRecord> extract_from_candidate(const CorrelationMatrix& a,
                                                    std::span<const int> candidate,
                                                    const MinerConfig& cfg);

// Keeps the first occurrence of each member set and drops strict subsets of
// accepted sets, scanning larger sets first. Survivors are flagged maximal.
std::vector<MultipoleRecord> remove_non_maximal(std::vector<MultipoleRecord> records);

// Descending gain, descending sigma, then member order.
void sort_records(std::vector<MultipoleRecord>& records);

// Every subset of sizes [3, max_size]. Throws BudgetExceeded when the number of
// subsets exceeds `subset_budget`.
MineResult brute_force(const CorrelationMatrix& a, const MinerConfig& cfg,
                       std::uint64_t subset_budget);

// Draws `trials` subsets uniformly from all subsets of sizes [3, max_size], seeded
// by cfg.seed. Keeps threshold-satisfying sets, deduplicated and maximal.
std::vector<MultipoleRecord> random_search(const CorrelationMatrix& a, const MinerConfig& cfg,
                                           std::uint64_t trials);

}  // namespace multipole
