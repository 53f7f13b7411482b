#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dpptest/estimator.hpp"
#include "dpptest/kernel.hpp"
#include "dpptest/subset.hpp"

namespace dpptest {

/// Dense histogram N(J) over all 2^n subsets.
class SubsetCounts {
 public:
  explicit SubsetCounts(int n);
  static SubsetCounts from(int n, std::span<const Subset> samples);

  void add(Subset s, std::uint64_t times = 1);
  std::uint64_t count(Subset s) const { return counts_[s.mask()]; }
  int n() const { return n_; }
  std::uint64_t m() const { return m_; }
  std::span<const std::uint64_t> table() const { return counts_; }

 private:
  int n_;
  std::uint64_t m_ = 0;
  std::vector<std::uint64_t> counts_;
};

/// Atoms below this mass are left out of the statistic.
double statistic_cutoff(int n, double eps);

/// Z = sum over p(J) >= eps / (50 N) of ((N(J) - m p(J))^2 - N(J)) / (m p(J)).
double chi2_l1_statistic(const SubsetCounts& counts, const DiscreteDistribution& p, double eps);
double chi2_l1_statistic(const SubsetCounts& counts, std::span<const double> p, double eps);

struct TestVerdict {
  bool accept = false;
  double z = 0.0;          // accepting statistic, or the smallest one seen on rejection
  double threshold = 0.0;  // C = m eps^2 / 10
  std::optional<std::uint64_t> candidate_index;
  std::uint64_t m = 0;
};

/// Accept iff Z < m eps^2 / 10; a tie rejects.
TestVerdict chi2_l1_test(const SubsetCounts& counts, const DiscreteDistribution& p, double eps);

/// ceil(ceil(base) * max(1, ceil(ln(1 + |M|))) * c_test), base the learning
/// sample size (ln(1/delta) + 1) sqrt(N) / eps^2.
std::uint64_t required_samples(int n, double eps, double delta, const BigCount& candidate_count,
                               double c_test = 1.0);

struct GeneralParams {
  double c_factor = 0.0;  // ln^2 N (ln N + ln(1/eps))
  std::uint64_t m_star = 0;
  double z_bar = 0.0;     // 0.005 / (2 m* n)
};

/// Throws DegenerateZ when z_bar >= 0.5.
GeneralParams general_mode_params(int n, double eps, double c2);

/// c1 max{23, 2 ln c1 + 23}.
double c2_lower_bound(double c1);

enum class TesterMode { Normal, General };

struct TesterConfig {
  double eps = 0.1;
  double delta = 0.1;
  TesterMode mode = TesterMode::Normal;
  double alpha = 0.0;  // normal mode only
  double zeta = 0.5;   // normal mode only
  double c_test = 1.0;
  double c1 = 1.0;
  double c2 = 23.0;
  GridOptions grid;
  int threads = 1;
  bool enforce_sample_size = true;
  /// Evaluate one candidate per sign-gauge orbit (D K D with D = diag(+-1)
  /// defines the same DPP). Off means a plain walk over the whole stream.
  bool reduce_symmetry = true;
};

struct TesterReport {
  TestVerdict verdict;
  TesterMode mode = TesterMode::Normal;
  double alpha = 0.0;  // effective parameters
  double zeta = 0.0;
  std::optional<GeneralParams> general;
  BracketingParams bracketing;
  BigCount candidate_count;
  std::uint64_t evaluated = 0;  // candidates actually scored
  std::uint64_t m_total = 0;
  std::uint64_t m_learn = 0;
  std::uint64_t m_test = 0;
  std::uint64_t m_required = 0;  // for the testing half
  /// Smallest l1 from `audit` to any candidate scored up to the decision.
  std::optional<double> audit_min_l1;
};

/// Algorithm: learn the grid from the first half of the samples, then test
/// every candidate against the second half and accept at the first candidate
/// that passes. General mode runs the normal procedure with alpha = 0 and
/// zeta = z_bar.
TesterReport dpp_tester(int n, std::span<const Subset> samples, const TesterConfig& config,
                        const DiscreteDistribution* audit = nullptr);

struct CandidateScore {
  std::uint64_t index = 0;
  double z = 0.0;
};

/// Candidate with the smallest statistic against `counts`, lowest index on
/// ties.
CandidateScore best_candidate(const CandidateGrid& grid, const SubsetCounts& counts, double eps,
                              int threads = 1);

/// Indices of the lexicographically smallest member of every gauge orbit,
/// ascending. Tuples whose raw matrix repeats an earlier tuple are dropped.
std::vector<std::uint64_t> gauge_representatives(const CandidateGrid& grid);

}  // namespace dpptest
