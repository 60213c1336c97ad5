#pragma once

// Upper bounds on the eigengap created by deleting one variable from a
// correlation matrix, evaluated against direct eigen-decomposition.
//
// For column j with off-diagonal part C_j, mu_j is the smallest eigenvalue of
// the matrix with row/column j removed and lambda that of the full matrix:
//   delta_lambda_j = mu_j - lambda <= ||C_j||_2 <= ||C_j||_1
//   gain = min_j delta_lambda_j <= sqrt(sum_{i != j} A_ij^2 / k)
//   gain <= min_j sqrt((sum_i A_ij^2 - 1) / (k - 1))
// and, observed empirically rather than proved, gain <= 1 / (k - 1).

#include "multipole/dataset.hpp"

#include <string>
#include <vector>

namespace multipole {

struct ColumnBound {
    std::size_t column = 0;
    double c_norm2 = 0.0;
    double c_norm1 = 0.0;
    double delta_lambda = 0.0;
};

struct BoundReport {
    std::vector<ColumnBound> columns;
    double gain = 0.0;
    double corollary1_bound = 0.0;
    double corollary2_bound = 0.0;
    double size_cap_bound = 0.0;
};

enum class BoundKind { theorem1_norm2, theorem1_norm1, corollary1, corollary2, size_cap };

struct BoundViolation {
    BoundKind kind;
    std::size_t column;  // meaningful for the theorem1_* kinds
    double lhs;
    double rhs;
};

std::string to_string(BoundKind kind);

// Throws ValidationError when k < 3.
BoundReport bound_report(const CorrelationMatrix& a);

// Empty iff every bound holds within 1e-9.
std::vector<BoundViolation> check_bounds(const CorrelationMatrix& a);
std::vector<BoundViolation> check_bounds(const BoundReport& report);

// floor((1 + delta) / delta): sets larger than this cannot reach gain delta.
int max_size_for_gain(double delta);

}  // namespace multipole
