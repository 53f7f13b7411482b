#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Dense>

#include "dpptest/kernel.hpp"
#include "dpptest/subset.hpp"

namespace dpptest {

using BigCount = boost::multiprecision::cpp_int;

/// Empirical singleton and pair inclusion frequencies.
struct EmpiricalMarginals {
  int n = 0;
  std::size_t m = 0;
  Eigen::VectorXd diag;  // K̂_ii
  Eigen::MatrixXd pair;  // û_ij, with û_ii = K̂_ii
};

EmpiricalMarginals empirical_marginals(int n, std::span<const Subset> samples);

/// K̂⁺_ij = sqrt(max(K̂_ii K̂_jj - û_ij, 0)); K̂⁻ = -K̂⁺. Zero diagonal.
Eigen::MatrixXd magnitude_estimates(const EmpiricalMarginals& em);

struct BracketingParams {
  int n = 0;
  double eps = 0.0;
  double delta = 0.0;
  double alpha = 0.0;
  double zeta = 0.0;
  std::uint64_t m = 0;          // learning sample size
  double xi = 0.0;              // N^{-1/4} sqrt(ln n + 1)
  double granularity = 0.0;     // eps zeta / (100 n^2), the target accuracy per entry
  std::uint64_t varsigma = 0;   // subintervals per sign
  double half_width = 0.0;      // off-diagonal bracket half-width
  std::uint64_t diagonal_count = 0;
};

/// Throws DegenerateZeta for zeta = 0. alpha = 0 drops the 2 xi / alpha branch.
BracketingParams bracketing_params(int n, double eps, double delta, double alpha, double zeta);

inline constexpr std::uint64_t kDefaultCandidateCap = 1'000'000;

struct GridOptions {
  std::optional<std::uint64_t> varsigma;        // replaces the computed count
  std::optional<std::uint64_t> diagonal_count;  // replaces the computed count
  std::uint64_t candidate_cap = kDefaultCandidateCap;
  bool allow_over_cap = false;
};

/// Per-entry candidate values for the upper triangle (diagonal included),
/// entries in row-major order. Off-diagonal lists hold the varsigma positive
/// midpoints, then 0, then their negations in the same order.
class CandidateGrid {
 public:
  CandidateGrid(int n, std::vector<std::vector<double>> lists, std::uint64_t varsigma);

  int n() const { return n_; }
  std::uint64_t varsigma() const { return varsigma_; }
  const BigCount& size() const { return size_; }
  /// |M| as a machine integer; throws TooLarge if it does not fit.
  std::uint64_t size_u64() const;

  std::size_t entry_count() const { return lists_.size(); }
  std::pair<int, int> entry(std::size_t e) const { return entries_[e]; }
  const std::vector<double>& list(std::size_t e) const { return lists_[e]; }
  std::size_t entry_index(int i, int j) const;

  /// Mixed-radix digits of `index`, first entry most significant.
  std::vector<std::uint32_t> digits(std::uint64_t index) const;
  Eigen::MatrixXd raw_matrix(std::uint64_t index) const;
  /// project_box(raw_matrix(index), 0).
  MarginalKernel candidate(std::uint64_t index) const;

 private:
  int n_;
  std::uint64_t varsigma_;
  std::vector<std::vector<double>> lists_;
  std::vector<std::pair<int, int>> entries_;
  BigCount size_;
};

CandidateGrid candidate_grid(const EmpiricalMarginals& em, const BracketingParams& bp,
                             const GridOptions& options = {});

/// Lazy, index-ordered stream over [begin, end) of the candidate set.
class CandidateStream {
 public:
  explicit CandidateStream(const CandidateGrid& grid);
  CandidateStream(const CandidateGrid& grid, std::uint64_t begin, std::uint64_t end);

  std::optional<MarginalKernel> next();
  std::uint64_t position() const { return position_; }
  std::uint64_t end() const { return end_; }

 private:
  const CandidateGrid* grid_;
  std::uint64_t position_;
  std::uint64_t end_;
};

/// Throws CandidateBudgetExceeded when |M| exceeds the cap without override.
CandidateStream enumerate_candidates(const CandidateGrid& grid, const GridOptions& options = {});

}  // namespace dpptest
