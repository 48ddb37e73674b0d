#pragma once

#include <vector>

namespace henon::spectral::detail {

/// Number of eigenvalues below sigma of the symmetric tridiagonal matrix
/// (diag d, off-diagonal e), by the LDL^T inertia recursion.
int sturm_count(const std::vector<double>& d, const std::vector<double>& e, double sigma);

/// Gershgorin interval containing the whole spectrum.
std::pair<double, double> gershgorin(const std::vector<double>& d, const std::vector<double>& e);

/// i-th smallest eigenvalue (0-based) by bisection inside [lo, hi].
double bisect_eigenvalue(const std::vector<double>& d, const std::vector<double>& e, int index,
                         double lo, double hi);

/// Eigenvector for the (accurately known) eigenvalue lambda, unit Euclidean norm,
/// by inverse iteration with a pivoted tridiagonal LU.
std::vector<double> inverse_iteration(const std::vector<double>& d, const std::vector<double>& e,
                                      double lambda, int iterations = 3);

} // namespace henon::spectral::detail
