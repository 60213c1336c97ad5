#pragma once

// Random correlation matrices, planted-multipole synthetic data and the
// empirical significance tests used to vet mined multipoles.

#include "multipole/bounds.hpp"
#include "multipole/dataset.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace multipole {

// Off-diagonals i.i.d. uniform on [-1, 1], kept iff PSD within 1e-10. Exactly
// `count` matrices; the stream is a function of (k, seed) only.
std::vector<CorrelationMatrix> sample_correlation_matrices(int k, std::size_t count,
                                                           std::uint64_t seed,
                                                           unsigned threads = 1);

struct ScatterSample {
    int k = 0;
    double gain = 0.0;
    double rho_s = 0.0;
};

ScatterSample scatter_point(const CorrelationMatrix& a);
std::vector<ScatterSample> scatter(int k, std::size_t count, std::uint64_t seed,
                                   unsigned threads = 1);

// Samples with gain >= delta whose rho_s exceeds 1 - 3 delta.
std::size_t boundary_violations(std::span<const ScatterSample> samples, double delta);

struct BoundsRow {
    int k = 0;
    double gain = 0.0;
    double rho_s = 0.0;
    BoundReport report;
    std::vector<BoundViolation> violations;
};

struct BoundsValidation {
    std::vector<BoundsRow> rows;
    std::size_t theorem1 = 0;  // matrices with at least one theorem-1 violation
    std::size_t corollary1 = 0;
    std::size_t corollary2 = 0;
    std::size_t size_cap = 0;
};

BoundsValidation validate_bounds(std::span<const CorrelationMatrix> matrices, unsigned threads = 1);

struct PlantSpec {
    std::size_t count = 66;
    std::vector<int> sizes{3, 4, 5};  // cycled over the planted sets
    double min_sigma = 0.7;
    double min_gain = 0.1;
    // Upper limit on rho_s of the planted matrix; 1 disables the filter.
    double max_rho_s = 1.0;
    std::uint64_t seed = 0;
};

// Rejection sampling from sample_correlation_matrices. Also rejects matrices with
// lambda_min <= 1e-6 so every planted matrix has a Cholesky factor. A negative
// max_rho_s switches to a proposal confined to that region with the same
// conditional distribution.
std::vector<CorrelationMatrix> plant_multipoles(const PlantSpec& spec);

struct SynthOutput {
    TimeSeriesDataset dataset;
    std::vector<std::vector<int>> truth;  // planted member indices after shuffling, ascending
};

// Each planted matrix S = L L^T contributes the columns of X L^T for a T x k
// standard normal X; `noise_count` independent standard normal columns follow and
// the column order is shuffled. Names are x0001, x0002, ... by final position.
SynthOutput synth_dataset(std::span<const CorrelationMatrix> planted, std::size_t noise_count,
                          std::size_t length, std::uint64_t seed);

struct NullDistribution {
    std::size_t set_size = 0;
    std::vector<double> sorted_sigmas;

    std::size_t sample_count() const noexcept { return sorted_sigmas.size(); }
    // (1 + #{null >= sigma}) / (n + 1)
    double p_value(double sigma) const;
};

// Random k-sets, each member a uniformly chosen variable of a distinct randomly
// chosen pool dataset. Pool datasets must be standardized with equal length.
NullDistribution null_distribution(std::size_t k, std::span<const TimeSeriesDataset> pool,
                                   std::size_t samples, std::uint64_t seed, unsigned threads = 1);

double significance_sigma(double sigma, std::size_t k, std::span<const TimeSeriesDataset> pool,
                          std::size_t samples, std::uint64_t seed, unsigned threads = 1);

// Replaces members[position] by random pool series `repeats` times:
// p = (1 + #{replaced sigma >= original sigma}) / (repeats + 1).
double member_contribution(const TimeSeriesDataset& d, std::span<const int> members,
                           std::size_t position, std::span<const TimeSeriesDataset> pool,
                           std::size_t repeats, std::uint64_t seed, unsigned threads = 1);

struct SignificanceOptions {
    std::size_t samples = 10000;
    std::size_t repeats = 1000;
    double alpha = 0.01;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct SignificanceReport {
    std::vector<std::string> members;
    double sigma = 0.0;
    double p_sigma = 1.0;
    std::vector<double> member_pvalues;
    bool significant = false;  // p_sigma <= alpha and every member p <= alpha
};

// Tests the named multipole on dataset `d`.
SignificanceReport assess_significance(const TimeSeriesDataset& d,
                                       std::span<const std::string> members,
                                       std::span<const TimeSeriesDataset> pool,
                                       const SignificanceOptions& options);

// Number of `datasets` in which the multipole is significant.
std::size_t reproducibility(std::span<const std::string> members,
                            std::span<const TimeSeriesDataset> datasets,
                            std::span<const TimeSeriesDataset> pool,
                            const SignificanceOptions& options);

}  // namespace multipole
