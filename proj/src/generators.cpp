#include "dpptest/generators.hpp"

#include <vector>

#include "dpptest/error.hpp"

namespace dpptest {

Eigen::MatrixXd random_orthogonal(int n, Rng& rng) {
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

MarginalKernel kernel_with_spectrum(std::span<const double> eigenvalues, Rng& rng) {
  const int n = static_cast<int>(eigenvalues.size());
  check_ground_set(n, kMaxGroundSet);
  const Eigen::MatrixXd v = random_orthogonal(n, rng);
  Eigen::VectorXd lambda(n);
  for (int k = 0; k < n; ++k) lambda(k) = eigenvalues[k];
  Eigen::MatrixXd k = v * lambda.asDiagonal() * v.transpose();
  k = 0.5 * (k + k.transpose()).eval();
  return project_box(k, 0.0);
}

MarginalKernel random_kernel(int n, Rng& rng, double lo, double hi) {
  if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "spectrum range must satisfy 0 <= lo <= hi <= 1");
  }
  std::vector<double> lambda(static_cast<std::size_t>(n));
  for (double& l : lambda) l = rng.uniform(lo, hi);
  return kernel_with_spectrum(lambda, rng);
}

Eigen::MatrixXd random_symmetric(int n, Rng& rng, double scale) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      m(i, j) = scale * rng.normal();
      m(j, i) = m(i, j);
    }
  }
  return m;
}

MarginalKernel random_projected_kernel(int n, Rng& rng, double scale) {
  Eigen::MatrixXd m = 0.5 * Eigen::MatrixXd::Identity(n, n) + random_symmetric(n, rng, scale);
  return project_box(m, 0.0);
}

DiscreteDistribution product_measure(std::span<const double> inclusion) {
  const int n = static_cast<int>(inclusion.size());
  check_ground_set(n, kDefaultGroundSetCap);
  std::vector<double> table(power_set_size(n));
  for (std::size_t mask = 0; mask < table.size(); ++mask) {
    double p = 1.0;
    for (int i = 0; i < n; ++i) p *= ((mask >> i) & 1U) ? inclusion[i] : 1.0 - inclusion[i];
    table[mask] = p;
  }
  return DiscreteDistribution(n, std::move(table));
}

DiscreteDistribution random_product_measure(int n, Rng& rng, double lo, double hi) {
  std::vector<double> inclusion(static_cast<std::size_t>(n));
  for (double& l : inclusion) l = rng.uniform(lo, hi);
  return product_measure(inclusion);
}

}  // namespace dpptest
