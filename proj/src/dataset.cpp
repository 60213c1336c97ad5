#include "multipole/dataset.hpp"

#include "multipole/error.hpp"
#include "multipole/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace multipole {

TimeSeriesDataset::TimeSeriesDataset(std::vector<std::string> names,
                                     std::vector<std::vector<double>> columns, bool standardized)
    : names_(std::move(names)), columns_(std::move(columns)), standardized_(standardized)
{
    if (names_.size() != columns_.size())
        throw ValidationError("dataset: " + std::to_string(names_.size()) + " names for " +
                              std::to_string(columns_.size()) + " columns");
    if (columns_.size() < 2)
        throw ValidationError("dataset: need at least 2 variables, got " +
                              std::to_string(columns_.size()));
    const std::size_t t = columns_.front().size();
    if (t < 3)
        throw ValidationError("dataset: need at least 3 timestamps, got " + std::to_string(t));
    std::unordered_set<std::string> seen;
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        if (!seen.insert(names_[j]).second)
            throw ValidationError("dataset: duplicate variable name '" + names_[j] + "'");
        if (columns_[j].size() != t)
            throw ValidationError("dataset: column '" + names_[j] + "' has " +
                                  std::to_string(columns_[j].size()) + " rows, expected " +
                                  std::to_string(t));
        for (std::size_t i = 0; i < t; ++i)
            if (!std::isfinite(columns_[j][i]))
                throw ValidationError("dataset: non-finite value at row " + std::to_string(i + 1) +
                                      ", column " + std::to_string(j + 1));
    }
}

int TimeSeriesDataset::find(const std::string& name) const
{
    auto it = std::find(names_.begin(), names_.end(), name);
    return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

namespace {

std::string trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
        s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(trim(std::string_view(line).substr(start)));
            return out;
        }
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        start = comma + 1;
    }
}

}  // namespace

TimeSeriesDataset parse_csv(std::istream& in, const std::string& source)
{
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError(source + ": empty file");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
        line.erase(0, 3);
    auto names = split_fields(line);
    {
        std::unordered_set<std::string> seen;
        for (const auto& n : names) {
            if (n.empty())
                throw ValidationError(source + ": empty column name in header");
            if (!seen.insert(n).second)
                throw ValidationError(source + ": duplicate column name '" + n + "'");
        }
    }

    std::vector<std::vector<double>> columns(names.size());
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        ++row;
        const auto fields = split_fields(line);
        if (fields.size() != names.size())
            throw ValidationError(source + ": row " + std::to_string(row) + " has " +
                                  std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(names.size()));
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const auto& f = fields[j];
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
            if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(value))
                throw ValidationError(source + ": invalid or non-finite value '" + f + "' at row " +
                                      std::to_string(row) + ", column " + std::to_string(j + 1));
            columns[j].push_back(value);
        }
    }
    return TimeSeriesDataset(std::move(names), std::move(columns), false);
}

TimeSeriesDataset load_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    return parse_csv(in, path.string());
}

void write_csv(const TimeSeriesDataset& d, std::ostream& out)
{
    for (std::size_t j = 0; j < d.width(); ++j)
        out << (j ? "," : "") << d.names()[j];
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < d.length(); ++i) {
        for (std::size_t j = 0; j < d.width(); ++j) {
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d.columns()[j][i]);
            if (j)
                out << ',';
            out.write(buf, ptr - buf);
        }
        out << '\n';
    }
}

TimeSeriesDataset standardize(const TimeSeriesDataset& d, bool detrend)
{
    const std::size_t t = d.length();
    const double n = static_cast<double>(t);
    std::vector<std::vector<double>> out;
    out.reserve(d.width());
    for (std::size_t j = 0; j < d.width(); ++j) {
        std::vector<double> x(d.column(j).begin(), d.column(j).end());
        double mean = 0.0;
        for (double v : x)
            mean += v;
        mean /= n;
        for (double& v : x)
            v -= mean;

        if (detrend) {
            // Residual of the least-squares line a + b*i; x is already centred.
            const double tbar = (n - 1.0) / 2.0;
            double sxy = 0.0;
            double sxx = 0.0;
            for (std::size_t i = 0; i < t; ++i) {
                const double u = static_cast<double>(i) - tbar;
                sxy += u * x[i];
                sxx += u * u;
            }
            const double slope = sxy / sxx;
            double resid_mean = 0.0;
            for (std::size_t i = 0; i < t; ++i) {
                x[i] -= slope * (static_cast<double>(i) - tbar);
                resid_mean += x[i];
            }
            resid_mean /= n;
            for (double& v : x)
                v -= resid_mean;
        }

        double ss = 0.0;
        for (double v : x)
            ss += v * v;
        const double var = ss / (n - 1.0);
        if (!(var > 1e-12))
            throw ValidationError("standardize: column '" + d.names()[j] +
                                  "' is near-constant (variance " + std::to_string(var) + ")");
        const double inv_sd = 1.0 / std::sqrt(var);
        for (double& v : x)
            v *= inv_sd;
        out.push_back(std::move(x));
    }
    return TimeSeriesDataset(d.names(), std::move(out), true);
}

CorrelationMatrix::CorrelationMatrix(Matrix m) : m_(std::move(m))
{
    if (m_.rows() != m_.cols())
        throw ValidationError("correlation matrix is not square");
    const std::size_t k = m_.rows();
    for (std::size_t i = 0; i < k; ++i) {
        if (m_(i, i) != 1.0)
            throw ValidationError("correlation matrix diagonal entry " + std::to_string(i) +
                                  " is not 1");
        for (std::size_t j = i + 1; j < k; ++j) {
            if (!(std::abs(m_(i, j) - m_(j, i)) <= 1e-12))
                throw ValidationError("correlation matrix is not symmetric");
            if (!(m_(i, j) >= -1.0 && m_(i, j) <= 1.0))
                throw ValidationError("correlation entry outside [-1, 1]");
        }
    }
    if (k <= kMaxEigenDim && !is_psd(m_, 1e-9))
        throw ValidationError("correlation matrix is not positive semi-definite");
}

CorrelationMatrix CorrelationMatrix::equicorrelated(std::size_t k, double r)
{
    Matrix m(k, k, r);
    for (std::size_t i = 0; i < k; ++i)
        m(i, i) = 1.0;
    return CorrelationMatrix(std::move(m));
}

namespace {

double dot(const double* a, const double* b, std::size_t n)
{
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i)
        s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

double clamp_unit(double r)
{
    return std::clamp(r, -1.0, 1.0);
}

}  // namespace

CorrelationMatrix correlation_matrix(const TimeSeriesDataset& d, unsigned threads)
{
    if (!d.standardized())
        throw ValidationError("correlation_matrix: dataset is not standardized");
    const std::size_t k = d.width();
    const std::size_t t = d.length();
    const double scale = 1.0 / (static_cast<double>(t) - 1.0);
    Matrix m(k, k);

    // Tiles of columns keep both operands cache resident.
    constexpr std::size_t kTile = 32;
    const std::size_t tiles = (k + kTile - 1) / kTile;
    parallel_for(tiles, threads, [&](std::size_t ti) {
        const std::size_t i0 = ti * kTile;
        const std::size_t i1 = std::min(k, i0 + kTile);
        for (std::size_t j0 = i0; j0 < k; j0 += kTile) {
            const std::size_t j1 = std::min(k, j0 + kTile);
            for (std::size_t i = i0; i < i1; ++i) {
                const double* xi = d.columns()[i].data();
                for (std::size_t j = std::max(j0, i + 1); j < j1; ++j)
                    m(i, j) = clamp_unit(dot(xi, d.columns()[j].data(), t) * scale);
            }
        }
    });
    for (std::size_t i = 0; i < k; ++i) {
        m(i, i) = 1.0;
        for (std::size_t j = i + 1; j < k; ++j)
            m(j, i) = m(i, j);
    }
    return CorrelationMatrix(std::move(m), CorrelationMatrix::Unchecked{});
}

CorrelationMatrix correlation_of(std::span<const std::span<const double>> columns)
{
    const std::size_t k = columns.size();
    Matrix m = Matrix::identity(k);
    if (k == 0)
        return CorrelationMatrix(std::move(m), CorrelationMatrix::Unchecked{});
    const std::size_t t = columns.front().size();
    const double scale = 1.0 / (static_cast<double>(t) - 1.0);
    for (std::size_t i = 0; i < k; ++i) {
        if (columns[i].size() != t)
            throw ValidationError("correlation_of: columns differ in length");
        for (std::size_t j = i + 1; j < k; ++j) {
            const double r = clamp_unit(dot(columns[i].data(), columns[j].data(), t) * scale);
            m(i, j) = r;
            m(j, i) = r;
        }
    }
    return CorrelationMatrix(std::move(m), CorrelationMatrix::Unchecked{});
}

}  // namespace multipole
