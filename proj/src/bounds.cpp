#include "multipole/bounds.hpp"

#include "multipole/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace multipole {

std::string to_string(BoundKind kind)
{
    switch (kind) {
    case BoundKind::theorem1_norm2: return "theorem1_norm2";
    case BoundKind::theorem1_norm1: return "theorem1_norm1";
    case BoundKind::corollary1: return "corollary1";
    case BoundKind::corollary2: return "corollary2";
    case BoundKind::size_cap: return "size_cap";
    }
    return "unknown";
}

BoundReport bound_report(const CorrelationMatrix& a)
{
    const std::size_t k = a.dim();
    if (k < 3)
        throw ValidationError("bound_report: need k >= 3, got " + std::to_string(k));

    const double lambda = min_eigenvalue(a.matrix());
    BoundReport r;
    r.columns.reserve(k);
    double off_sum_sq = 0.0;
    double cor2 = std::numeric_limits<double>::infinity();
    std::vector<int> rest;
    rest.reserve(k - 1);
    for (std::size_t j = 0; j < k; ++j) {
        rest.clear();
        double norm2_sq = 0.0;
        double norm1 = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            if (i == j)
                continue;
            rest.push_back(static_cast<int>(i));
            norm2_sq += a(i, j) * a(i, j);
            norm1 += std::abs(a(i, j));
        }
        const double mu = min_eigenvalue(a.principal(rest));
        r.columns.push_back({j, std::sqrt(norm2_sq), norm1, mu - lambda});
        off_sum_sq += norm2_sq;
        // sum_i A_ij^2 - 1 is the off-diagonal sum since A_jj = 1.
        cor2 = std::min(cor2, std::sqrt(norm2_sq / static_cast<double>(k - 1)));
    }
    r.gain = std::min_element(r.columns.begin(), r.columns.end(),
                              [](const ColumnBound& x, const ColumnBound& y) {
                                  return x.delta_lambda < y.delta_lambda;
                              })
                 ->delta_lambda;
    r.corollary1_bound = std::sqrt(off_sum_sq / static_cast<double>(k));
    r.corollary2_bound = cor2;
    r.size_cap_bound = 1.0 / static_cast<double>(k - 1);
    return r;
}

std::vector<BoundViolation> check_bounds(const BoundReport& r)
{
    constexpr double tol = 1e-9;
    std::vector<BoundViolation> out;
    for (const auto& c : r.columns) {
        if (c.delta_lambda > c.c_norm2 + tol)
            out.push_back({BoundKind::theorem1_norm2, c.column, c.delta_lambda, c.c_norm2});
        if (c.c_norm2 > c.c_norm1 + tol)
            out.push_back({BoundKind::theorem1_norm1, c.column, c.c_norm2, c.c_norm1});
    }
    if (r.gain > r.corollary1_bound + tol)
        out.push_back({BoundKind::corollary1, 0, r.gain, r.corollary1_bound});
    if (r.gain > r.corollary2_bound + tol)
        out.push_back({BoundKind::corollary2, 0, r.gain, r.corollary2_bound});
    if (r.gain > r.size_cap_bound + tol)
        out.push_back({BoundKind::size_cap, 0, r.gain, r.size_cap_bound});
    return out;
}

std::vector<BoundViolation> check_bounds(const CorrelationMatrix& a)
{
    return check_bounds(bound_report(a));
}

int max_size_for_gain(double delta)
{
    if (!(delta > 0.0 && delta <= 1.0))
        throw ValidationError("delta must be in (0,1]");
    // The epsilon keeps exact quotients such as 1.2 / 0.2 from rounding down.
    return static_cast<int>(std::floor((1.0 + delta) / delta + 1e-9));
}

}  // namespace multipole
