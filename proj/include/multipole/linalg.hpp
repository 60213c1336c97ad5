#pragma once

// Dense kernels for the small symmetric matrices that appear during mining
// (k <= 64). Eigen-decomposition is cyclic Jacobi with a fixed rotation order,
// so results are bit-reproducible for identical inputs.

#include <cstddef>
#include <span>
#include <vector>

namespace multipole {

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<const double> data() const noexcept { return data_; }

    // Rows and columns listed in `index`, in that order.
    Matrix principal(std::span<const int> index) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline constexpr std::size_t kMaxEigenDim = 64;

// Ascending eigenvalues; column i of `vectors` is the unit eigenvector for values[i].
struct EigenDecomposition {
    std::vector<double> values;
    Matrix vectors;
};

struct EigenResult {
    double lambda_min = 0.0;
    std::vector<double> vector;
};

// Throws ValidationError for non-square, oversized, or asymmetric (> 1e-9) input.
EigenDecomposition eigen_symmetric(const Matrix& a);

// Same iteration as eigen_symmetric without accumulating eigenvectors.
std::vector<double> eigenvalues_symmetric(const Matrix& a);

EigenResult min_eigenpair(const Matrix& a);

// Smallest eigenvalue only.
double min_eigenvalue(const Matrix& a);

// Lower-triangular L with a = L L^T. Throws NotPositiveDefinite when a pivot is <= 1e-12.
Matrix cholesky(const Matrix& a);

bool is_psd(const Matrix& a, double tol);

// Flips v so that its first component with |value| > 1e-10 is positive.
void orient_canonically(std::span<double> v);

}  // namespace multipole
