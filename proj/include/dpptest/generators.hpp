#pragma once

#include <span>

#include <Eigen/Dense>

#include "dpptest/kernel.hpp"
#include "dpptest/rng.hpp"

namespace dpptest {

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
Eigen::MatrixXd random_orthogonal(int n, Rng& rng);

/// V diag(lambda) V^T with V Haar and lambda_k i.i.d. uniform on [lo, hi].
/// With 0 <= lo <= hi <= 1 the result is a valid kernel, (0, lo)-normal when
/// hi <= 1 - lo.
MarginalKernel random_kernel(int n, Rng& rng, double lo = 0.0, double hi = 1.0);

/// Kernel with the given spectrum and Haar eigenvectors.
MarginalKernel kernel_with_spectrum(std::span<const double> eigenvalues, Rng& rng);

/// Symmetric matrix with i.i.d. N(0, scale^2) entries on and above the diagonal.
Eigen::MatrixXd random_symmetric(int n, Rng& rng, double scale = 1.0);

/// project_box(0.5 I + random_symmetric(scale)): valid kernels that can sit on
/// the boundary of the spectral box.
MarginalKernel random_projected_kernel(int n, Rng& rng, double scale = 0.5);

/// Product measure with inclusion probabilities lambda_i.
DiscreteDistribution product_measure(std::span<const double> inclusion);

/// Product measure with inclusion probabilities uniform on [lo, hi].
DiscreteDistribution random_product_measure(int n, Rng& rng, double lo = 0.05, double hi = 0.95);

}  // namespace dpptest
