#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dpptest/kernel.hpp"
#include "dpptest/subset.hpp"

// Brute-force reference implementations. Nothing here calls into the kernel
// module's determinant or subset-iteration code; matrices are copied into
// plain row-major storage first.
namespace dpptest::oracle {

struct DistanceReport {
  double l1 = 0.0;    // total variation, (1/2) sum |q - p|
  double chi2 = 0.0;  // sum (q - p)^2 / p, +inf if p vanishes where q does not
  std::size_t infinite_terms = 0;  // atoms with p = 0 < q
};

DistanceReport distances(const DiscreteDistribution& q, const DiscreteDistribution& p);

/// Cofactor (Laplace) expansion along the first row. k <= 8.
double det_naive(std::span<const double> row_major, int k);

/// Pr[J] = sum over T ⊆ J̄ of (-1)^|T| det(K_{J ∪ T}). n <= 12.
double atom_probability_ie(const MarginalKernel& kernel, Subset subset);

/// Whole table by inclusion-exclusion with every principal minor computed
/// once by cofactor expansion. n <= 8.
std::vector<double> distribution_ie(const MarginalKernel& kernel);

/// det(K_A) by cofactor expansion.
double principal_minor_naive(const MarginalKernel& kernel, Subset subset);

}  // namespace dpptest::oracle
