#include "dpptest/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "dpptest/error.hpp"

namespace dpptest {

namespace {

using Solver = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>;

void require_square(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "matrix must be square and nonempty");
  }
}

void require_symmetric(const Eigen::MatrixXd& m) {
  require_square(m);
  if (!is_symmetric(m)) throw Error(ErrorCode::NotSymmetric, "matrix is not symmetric");
}

Eigen::VectorXd eigenvalues_of(const Eigen::MatrixXd& m) {
  Solver solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

}  // namespace

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      if (!(std::abs(m(i, j) - m(j, i)) <= tol)) return false;
    }
  }
  return true;
}

MarginalKernel::MarginalKernel(Eigen::MatrixXd matrix, Eigen::VectorXd eigenvalues,
                               Eigen::MatrixXd eigenvectors)
    : matrix_(std::move(matrix)),
      eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)) {}

MarginalKernel MarginalKernel::validate(const Eigen::MatrixXd& input) {
  require_symmetric(input);
  if (input.rows() > kMaxGroundSet) {
    throw Error(ErrorCode::GroundSetTooLarge, "kernel larger than the mask representation");
  }
  Eigen::MatrixXd sym = 0.5 * (input + input.transpose());
  Solver solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::SpectrumOutOfRange, "eigendecomposition failed");
  }
  Eigen::VectorXd lambda = solver.eigenvalues();
  bool clamped = false;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda(k) < -kSpectrumTol || lambda(k) > 1.0 + kSpectrumTol) {
      throw Error(ErrorCode::SpectrumOutOfRange,
                  "eigenvalue " + std::to_string(lambda(k)) + " outside [0, 1]");
    }
    if (lambda(k) < 0.0 || lambda(k) > 1.0) {
      lambda(k) = std::clamp(lambda(k), 0.0, 1.0);
      clamped = true;
    }
  }
  if (clamped) {
    sym = solver.eigenvectors() * lambda.asDiagonal() * solver.eigenvectors().transpose();
    sym = 0.5 * (sym + sym.transpose()).eval();
  }
  return MarginalKernel(std::move(sym), std::move(lambda), solver.eigenvectors());
}

bool MarginalKernel::is_normal(NormalityBounds bounds, double tol) const {
  for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) {
    if (eigenvalues_(k) < bounds.zeta - tol || eigenvalues_(k) > 1.0 - bounds.zeta + tol) {
      return false;
    }
  }
  for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix_.cols(); ++j) {
      const double a = std::abs(matrix_(i, j));
      if (a != 0.0 && a < bounds.alpha - tol) return false;
    }
  }
  return true;
}

MarginalKernel MarginalKernel::with_normality(NormalityBounds bounds) const {
  if (bounds.alpha < 0.0 || bounds.alpha > 1.0 || bounds.zeta < 0.0 || bounds.zeta > 0.5) {
    throw Error(ErrorCode::InvalidArgument, "normality bounds need alpha in [0,1], zeta in [0,0.5]");
  }
  if (!is_normal(bounds)) {
    throw Error(ErrorCode::NormalityViolated, "kernel is not (alpha, zeta)-normal");
  }
  MarginalKernel copy = *this;
  copy.normality_ = bounds;
  return copy;
}

Eigen::MatrixXd shifted_complement(const Eigen::MatrixXd& kernel, Subset subset) {
  Eigen::MatrixXd out = kernel;
  for (Eigen::Index i = 0; i < kernel.rows(); ++i) {
    if (!subset.contains(static_cast<int>(i))) out(i, i) -= 1.0;
  }
  return out;
}

double symmetric_abs_det(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() == 0) return 1.0;
  const Eigen::VectorXd lambda = eigenvalues_of(matrix);
  double det = 1.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) det *= std::abs(lambda(k));
  return det;
}

double lu_abs_det(std::span<double> a, int k) {
  double det = 1.0;
  for (int col = 0; col < k; ++col) {
    int pivot = col;
    double best = std::abs(a[col * k + col]);
    for (int r = col + 1; r < k; ++r) {
      const double v = std::abs(a[r * k + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != col) {
      for (int c = col; c < k; ++c) std::swap(a[col * k + c], a[pivot * k + c]);
    }
    const double diag = a[col * k + col];
    det *= diag;
    const double inv = 1.0 / diag;
    for (int r = col + 1; r < k; ++r) {
      const double factor = a[r * k + col] * inv;
      if (factor == 0.0) continue;
      for (int c = col + 1; c < k; ++c) a[r * k + c] -= factor * a[col * k + c];
    }
  }
  return std::abs(det);
}

double atom_probability(const MarginalKernel& kernel, Subset subset, DetMethod method) {
  const int n = kernel.n();
  if (!subset.fits(n)) throw Error(ErrorCode::InvalidArgument, "subset outside ground set");
  double value = 0.0;
  if (method == DetMethod::Eigen) {
    value = symmetric_abs_det(shifted_complement(kernel.matrix(), subset));
  } else {
    std::array<double, kMaxGroundSet * kMaxGroundSet> scratch{};
    const Eigen::MatrixXd& k = kernel.matrix();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) scratch[i * n + j] = k(i, j);
      if (!subset.contains(i)) scratch[i * n + i] -= 1.0;
    }
    value = lu_abs_det(std::span<double>(scratch.data(), static_cast<std::size_t>(n * n)), n);
  }
  return std::max(0.0, value);
}

void atom_table_lu(const Eigen::MatrixXd& kernel, std::span<double> out) {
  const int n = static_cast<int>(kernel.rows());
  const std::size_t size = power_set_size(n);
  if (out.size() != size) throw Error(ErrorCode::DimensionMismatch, "atom table size");
  std::array<double, kDefaultGroundSetCap * kDefaultGroundSetCap> base{};
  std::array<double, kDefaultGroundSetCap * kDefaultGroundSetCap> scratch{};
  if (n > kDefaultGroundSetCap) throw Error(ErrorCode::GroundSetTooLarge, "atom table");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) base[i * n + j] = kernel(i, j);
  }
  const auto nn = static_cast<std::size_t>(n * n);
  for (std::size_t mask = 0; mask < size; ++mask) {
    std::copy_n(base.begin(), nn, scratch.begin());
    for (int i = 0; i < n; ++i) {
      if (!((mask >> i) & 1U)) scratch[i * n + i] -= 1.0;
    }
    out[mask] = lu_abs_det(std::span<double>(scratch.data(), nn), n);
  }
}

DiscreteDistribution exact_distribution(const MarginalKernel& kernel, DetMethod method, int cap) {
  const int n = kernel.n();
  check_ground_set(n, cap);
  std::vector<double> table(power_set_size(n));
  if (method == DetMethod::LU) {
    atom_table_lu(kernel.matrix(), table);
  } else {
    for (std::size_t mask = 0; mask < table.size(); ++mask) {
      table[mask] = atom_probability(kernel, Subset(static_cast<std::uint32_t>(mask)), method);
    }
  }
  return DiscreteDistribution(n, std::move(table));
}

Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& matrix, Subset subset) {
  const std::vector<int> idx = subset.elements();
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) out(r, c) = matrix(idx[r], idx[c]);
  }
  return out;
}

double marginal(const MarginalKernel& kernel, Subset subset) {
  if (!subset.fits(kernel.n())) throw Error(ErrorCode::InvalidArgument, "subset outside ground set");
  if (subset.empty()) return 1.0;
  // K_A is PSD, so the product of eigenvalues is the determinant itself.
  return symmetric_abs_det(principal_submatrix(kernel.matrix(), subset));
}

MarginalKernel project_box(const Eigen::MatrixXd& matrix, double z) {
  require_symmetric(matrix);
  if (!(z >= 0.0 && z < 0.5)) throw Error(ErrorCode::InvalidArgument, "z must lie in [0, 0.5)");
  if (matrix.rows() > kMaxGroundSet) throw Error(ErrorCode::GroundSetTooLarge, "project_box");
  Eigen::MatrixXd sym = 0.5 * (matrix + matrix.transpose());
  Solver solver(sym);
  Eigen::VectorXd lambda = solver.eigenvalues();
  bool changed = false;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    const double clamped = std::clamp(lambda(k), z, 1.0 - z);
    if (clamped != lambda(k)) {
      lambda(k) = clamped;
      changed = true;
    }
  }
  if (!changed) return MarginalKernel(matrix, std::move(lambda), solver.eigenvectors());
  Eigen::MatrixXd out = solver.eigenvectors() * lambda.asDiagonal() * solver.eigenvectors().transpose();
  out = 0.5 * (out + out.transpose()).eval();
  return MarginalKernel(std::move(out), std::move(lambda), solver.eigenvectors());
}

SingularValueReport min_singular_check(const MarginalKernel& kernel, double zeta, int cap) {
  const int n = kernel.n();
  check_ground_set(n, cap);
  if (!(zeta >= 0.0 && zeta <= 0.5)) throw Error(ErrorCode::InvalidArgument, "zeta in [0, 0.5]");
  for (Eigen::Index k = 0; k < kernel.eigenvalues().size(); ++k) {
    const double l = kernel.eigenvalues()(k);
    if (l < zeta - kSpectrumTol || l > 1.0 - zeta + kSpectrumTol) {
      throw Error(ErrorCode::NormalityViolated, "spectrum leaves [zeta, 1 - zeta]");
    }
  }
  SingularValueReport report;
  report.bound = zeta * (1.0 - zeta) / std::sqrt(2.0);
  report.worst_sigma = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 0; mask < power_set_size(n); ++mask) {
    const Subset j(static_cast<std::uint32_t>(mask));
    // Symmetric: singular values are the absolute eigenvalues.
    const Eigen::VectorXd lambda = eigenvalues_of(shifted_complement(kernel.matrix(), j));
    const double sigma = lambda.cwiseAbs().minCoeff();
    if (sigma < report.worst_sigma) {
      report.worst_sigma = sigma;
      report.worst_subset = j;
    }
  }
  report.holds = report.worst_sigma >= report.bound - kSpectrumTol;
  return report;
}

PerturbationReport det_perturbation_bound(const Eigen::MatrixXd& b, const Eigen::MatrixXd& e) {
  require_symmetric(b);
  require_symmetric(e);
  if (b.rows() != e.rows()) throw Error(ErrorCode::DimensionMismatch, "B and E differ in size");
  const Eigen::VectorXd lambda_b = eigenvalues_of(b);
  const double sigma = lambda_b.cwiseAbs().minCoeff();
  if (!(sigma > 0.0)) throw Error(ErrorCode::SingularMatrix, "B is singular");
  const double norm_e = eigenvalues_of(e).cwiseAbs().maxCoeff();
  double det_b = 1.0;
  for (Eigen::Index k = 0; k < lambda_b.size(); ++k) det_b *= std::abs(lambda_b(k));
  const double det_be = symmetric_abs_det(b + e);
  const auto n = static_cast<double>(b.rows());
  const double ratio = norm_e / sigma;

  PerturbationReport report;
  report.lhs = std::abs(det_be - det_b);
  report.rhs = det_b * n * ratio * std::pow(ratio + 1.0, n - 1.0);
  report.holds = report.lhs <= report.rhs + 1e-9;
  return report;
}

}  // namespace dpptest
