#pragma once

#include <optional>
#include <span>

#include <Eigen/Dense>

#include "dpptest/subset.hpp"

namespace dpptest {

/// Entrywise symmetry tolerance for kernels.
inline constexpr double kSymmetryTol = 1e-12;
/// Eigenvalues within this distance outside [0, 1] are treated as rounding
/// noise and clamped; anything further out is rejected.
inline constexpr double kSpectrumTol = 1e-9;

/// (alpha, zeta)-normality: spectrum inside [zeta, 1 - zeta] and every
/// nonzero entry at least alpha in magnitude.
struct NormalityBounds {
  double alpha = 0.0;
  double zeta = 0.0;
};

/// Symmetric matrix with spectrum in [0, 1]; the parameter of a DPP.
/// Immutable once constructed, so it can be shared across threads.
class MarginalKernel {
 public:
  static MarginalKernel validate(const Eigen::MatrixXd& matrix);

  int n() const { return static_cast<int>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  double operator()(int i, int j) const { return matrix_(i, j); }

  /// Ascending eigenvalues, clamped into [0, 1].
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  /// Orthonormal eigenvectors, column k pairs with eigenvalues()[k].
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }

  const std::optional<NormalityBounds>& normality() const { return normality_; }

  /// Attaches normality bounds after checking them; throws NormalityViolated.
  MarginalKernel with_normality(NormalityBounds bounds) const;

  bool is_normal(NormalityBounds bounds, double tol = kSpectrumTol) const;

 private:
  friend MarginalKernel project_box(const Eigen::MatrixXd& matrix, double z);
  MarginalKernel(Eigen::MatrixXd matrix, Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors);

  Eigen::MatrixXd matrix_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  std::optional<NormalityBounds> normality_;
};

inline MarginalKernel validate(const Eigen::MatrixXd& matrix) {
  return MarginalKernel::validate(matrix);
}

/// How determinants of K - I_{J̄} are evaluated. Eigen multiplies the
/// eigenvalues of the symmetric matrix; LU is the pivoted-factorization
/// cross-check and the fast path used inside the tester.
enum class DetMethod { Eigen, LU };

/// K - I_{J̄}: subtract one from the diagonal outside J.
Eigen::MatrixXd shifted_complement(const Eigen::MatrixXd& kernel, Subset subset);

/// |det| of a symmetric matrix as the product of absolute eigenvalues.
double symmetric_abs_det(const Eigen::MatrixXd& matrix);

/// |det| by LU with partial pivoting. `scratch` holds k*k entries row-major and
/// is overwritten.
double lu_abs_det(std::span<double> scratch, int k);

/// Pr[J] = |det(K - I_{J̄})|, floored at zero.
double atom_probability(const MarginalKernel& kernel, Subset subset,
                        DetMethod method = DetMethod::Eigen);

/// Atom table of a raw symmetric matrix by LU, written into `out` (2^n
/// entries). No validation; used on already-projected candidates.
void atom_table_lu(const Eigen::MatrixXd& kernel, std::span<double> out);

/// All 2^n atom probabilities.
DiscreteDistribution exact_distribution(const MarginalKernel& kernel,
                                        DetMethod method = DetMethod::Eigen,
                                        int cap = kDefaultGroundSetCap);

/// Pr[A ⊆ J] = det(K_A); one for the empty set.
double marginal(const MarginalKernel& kernel, Subset subset);

/// Principal submatrix K_A.
Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& matrix, Subset subset);

/// Frobenius projection onto {A : z I <= A <= (1 - z) I}. Eigenvectors are
/// kept and eigenvalues clamped into [z, 1 - z]. Inputs already inside the box
/// are returned bit-for-bit.
MarginalKernel project_box(const Eigen::MatrixXd& matrix, double z = 0.0);

struct SingularValueReport {
  double worst_sigma = 0.0;
  Subset worst_subset;
  double bound = 0.0;
  bool holds = false;
};

/// Minimum over all J of the smallest singular value of K - I_{J̄}, compared
/// against zeta (1 - zeta) / sqrt(2). Requires spectrum in [zeta, 1 - zeta].
SingularValueReport min_singular_check(const MarginalKernel& kernel, double zeta,
                                       int cap = kDefaultGroundSetCap);

struct PerturbationReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// | |det(B+E)| - |det(B)| | against
/// |det B| (n ||E|| / s) (||E|| / s + 1)^(n-1), s the smallest singular value
/// of B.
PerturbationReport det_perturbation_bound(const Eigen::MatrixXd& b, const Eigen::MatrixXd& e);

bool is_symmetric(const Eigen::MatrixXd& matrix, double tol = kSymmetryTol);

}  // namespace dpptest
