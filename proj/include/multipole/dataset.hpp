#pragma once

#include "multipole/linalg.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace multipole {

// T x N observations stored column-wise. Constructing one validates the shape
// invariants (T >= 3, N >= 2, unique names, finite values).
class TimeSeriesDataset {
public:
    TimeSeriesDataset(std::vector<std::string> names, std::vector<std::vector<double>> columns,
                      bool standardized = false);

    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::vector<std::vector<double>>& columns() const noexcept { return columns_; }
    std::span<const double> column(std::size_t j) const { return columns_.at(j); }

    std::size_t length() const noexcept { return columns_.front().size(); }
    std::size_t width() const noexcept { return columns_.size(); }
    bool standardized() const noexcept { return standardized_; }

    // Index of `name`, or -1.
    int find(const std::string& name) const;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
    bool standardized_;
};

TimeSeriesDataset parse_csv(std::istream& in, const std::string& source = "<stream>");
TimeSeriesDataset load_csv(const std::filesystem::path& path);
void write_csv(const TimeSeriesDataset& d, std::ostream& out);

// Zero mean, unit sample variance per column; `detrend` first subtracts the
// least-squares line over the timestamp index.
TimeSeriesDataset standardize(const TimeSeriesDataset& d, bool detrend);

// Symmetric, unit diagonal, entries in [-1, 1]. The PSD invariant is verified at
// construction for dim <= kMaxEigenDim; larger matrices are trusted.
class CorrelationMatrix {
public:
    struct Unchecked {};

    explicit CorrelationMatrix(Matrix m);
    CorrelationMatrix(Matrix m, Unchecked) : m_(std::move(m)) {}

    std::size_t dim() const noexcept { return m_.rows(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
    const Matrix& matrix() const noexcept { return m_; }
    Matrix principal(std::span<const int> index) const { return m_.principal(index); }

    static CorrelationMatrix equicorrelated(std::size_t k, double r);

private:
    Matrix m_;
};

// Requires a standardized dataset. Entry (i, j) = <x_i, x_j> / (T - 1).
CorrelationMatrix correlation_matrix(const TimeSeriesDataset& d, unsigned threads = 1);

// Correlation of an explicit list of standardized columns (used by the significance tests).
CorrelationMatrix correlation_of(std::span<const std::span<const double>> columns);

}  // namespace multipole
