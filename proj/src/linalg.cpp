#include "multipole/linalg.hpp"

#include "multipole/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace multipole {

Matrix Matrix::identity(std::size_t n)
{
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

Matrix Matrix::principal(std::span<const int> index) const
{
    const std::size_t k = index.size();
    Matrix out(k, k);
    for (std::size_t a = 0; a < k; ++a) {
        const auto row = static_cast<std::size_t>(index[a]);
        for (std::size_t b = 0; b < k; ++b)
            out(a, b) = (*this)(row, static_cast<std::size_t>(index[b]));
    }
    return out;
}

namespace {

constexpr double kSymmetryTol = 1e-9;
constexpr double kOffDiagonalTol = 1e-13;
constexpr int kMaxSweeps = 100;

void check_symmetric(const Matrix& a)
{
    if (a.rows() != a.cols())
        throw ValidationError("eigen: matrix is not square");
    if (a.rows() == 0)
        throw ValidationError("eigen: empty matrix");
    if (a.rows() > kMaxEigenDim)
        throw ValidationError("eigen: dimension " + std::to_string(a.rows()) + " exceeds " +
                              std::to_string(kMaxEigenDim));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            if (!(std::abs(a(i, j) - a(j, i)) <= kSymmetryTol))
                throw ValidationError("eigen: matrix is not symmetric at (" + std::to_string(i) +
                                      "," + std::to_string(j) + ")");
}

double off_diagonal_norm(const Matrix& a)
{
    double sum = 0.0;
    const std::size_t n = a.rows();
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q)
            sum += a(p, q) * a(p, q);
    return std::sqrt(2.0 * sum);
}

// Cyclic Jacobi over the upper triangle in row-major order. `v`, when given,
// accumulates the rotations so its columns become eigenvectors.
void jacobi(Matrix& a, Matrix* v)
{
    const std::size_t n = a.rows();
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a) <= kOffDiagonalTol)
            return;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0)
                    continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q)
                        continue;
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    const double np = c * arp - s * arq;
                    const double nq = s * arp + c * arq;
                    a(r, p) = np;
                    a(p, r) = np;
                    a(r, q) = nq;
                    a(q, r) = nq;
                }
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                if (v != nullptr) {
                    for (std::size_t r = 0; r < n; ++r) {
                        const double vrp = (*v)(r, p);
                        const double vrq = (*v)(r, q);
                        (*v)(r, p) = c * vrp - s * vrq;
                        (*v)(r, q) = s * vrp + c * vrq;
                    }
                }
            }
        }
    }
}

Matrix symmetrized(const Matrix& a)
{
    Matrix s = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) {
            const double m = 0.5 * (a(i, j) + a(j, i));
            s(i, j) = m;
            s(j, i) = m;
        }
    return s;
}

std::vector<std::size_t> ascending_order(const Matrix& diag)
{
    std::vector<std::size_t> order(diag.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return diag(x, x) < diag(y, y); });
    return order;
}

}  // namespace

void orient_canonically(std::span<double> v)
{
    for (double x : v) {
        if (std::abs(x) > 1e-10) {
            if (x < 0.0)
                for (double& y : v)
                    y = -y;
            return;
        }
    }
}

EigenDecomposition eigen_symmetric(const Matrix& a)
{
    check_symmetric(a);
    Matrix work = symmetrized(a);
    Matrix v = Matrix::identity(a.rows());
    jacobi(work, &v);

    const std::size_t n = a.rows();
    const auto order = ascending_order(work);
    EigenDecomposition out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t c = 0; c < n; ++c) {
        out.values[c] = work(order[c], order[c]);
        std::vector<double> col(n);
        for (std::size_t r = 0; r < n; ++r)
            col[r] = v(r, order[c]);
        orient_canonically(col);
        for (std::size_t r = 0; r < n; ++r)
            out.vectors(r, c) = col[r];
    }
    return out;
}

std::vector<double> eigenvalues_symmetric(const Matrix& a)
{
    check_symmetric(a);
    Matrix work = symmetrized(a);
    jacobi(work, nullptr);
    std::vector<double> values(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        values[i] = work(i, i);
    std::sort(values.begin(), values.end());
    return values;
}

EigenResult min_eigenpair(const Matrix& a)
{
    auto full = eigen_symmetric(a);
    EigenResult out;
    out.lambda_min = full.values.front();
    out.vector.resize(a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        out.vector[r] = full.vectors(r, 0);
    return out;
}

double min_eigenvalue(const Matrix& a)
{
    return eigenvalues_symmetric(a).front();
}

Matrix cholesky(const Matrix& a)
{
    if (a.rows() != a.cols())
        throw ValidationError("cholesky: matrix is not square");
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = a(j, j);
        for (std::size_t k = 0; k < j; ++k)
            pivot -= l(j, k) * l(j, k);
        if (!(pivot > 1e-12))
            throw NotPositiveDefinite(j, pivot);
        const double d = std::sqrt(pivot);
        l(j, j) = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k)
                s -= l(i, k) * l(j, k);
            l(i, j) = s / d;
        }
    }
    return l;
}

bool is_psd(const Matrix& a, double tol)
{
    return min_eigenvalue(a) >= -tol;
}

}  // namespace multipole
