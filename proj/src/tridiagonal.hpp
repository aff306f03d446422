#pragma once

#include <vector>

namespace lzeros::detail {

// Implicit QL on a symmetric tridiagonal matrix. d holds the diagonal,
// e the subdiagonal (e[i] = T(i+1, i), size n-1). On return d holds the
// eigenvalues (unsorted). `row` (size n, may be empty) is multiplied from
// the right by the eigenvector matrix, so row_j becomes y_j . row.
void tridiagonal_ql(std::vector<double>& d, std::vector<double> e, std::vector<double>& row);

// Eigenvector of T for an eigenvalue lambda (lowest end of the spectrum)
// by inverse iteration.
std::vector<double> tridiagonal_lowest_vector(const std::vector<double>& d,
                                              const std::vector<double>& e, double lambda);

}  // namespace lzeros::detail
