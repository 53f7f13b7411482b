#include "dpptest/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dpptest/error.hpp"

namespace dpptest {

namespace {

// Lists longer than this are never materialized, override or not.
constexpr double kMaxListLength = 1e7;

std::uint64_t checked_count(double value, const char* what) {
  if (!(value < kMaxListLength)) {
    throw Error(ErrorCode::TooLarge, std::string(what) + " is too large to materialize");
  }
  return static_cast<std::uint64_t>(value);
}

void check_budget(const BigCount& size, const GridOptions& options) {
  if (!options.allow_over_cap && size > options.candidate_cap) {
    throw Error(ErrorCode::CandidateBudgetExceeded,
                "candidate set has " + size.str() + " members, cap is " +
                    std::to_string(options.candidate_cap));
  }
}

}  // namespace

EmpiricalMarginals empirical_marginals(int n, std::span<const Subset> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptyBatch, "no samples");
  check_ground_set(n, kMaxGroundSet);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n);
  for (Subset s : samples) {
    if (!s.fits(n)) throw Error(ErrorCode::InvalidArgument, "sample outside ground set");
    const std::vector<int> e = s.elements();
    for (std::size_t a = 0; a < e.size(); ++a) {
      for (std::size_t b = a; b < e.size(); ++b) counts(e[a], e[b]) += 1.0;
    }
  }
  const auto m = static_cast<double>(samples.size());
  EmpiricalMarginals em;
  em.n = n;
  em.m = samples.size();
  em.pair = Eigen::MatrixXd(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      em.pair(i, j) = counts(i, j) / m;
      em.pair(j, i) = em.pair(i, j);
    }
  }
  em.diag = em.pair.diagonal();
  return em;
}

Eigen::MatrixXd magnitude_estimates(const EmpiricalMarginals& em) {
  const int n = em.n;
  Eigen::MatrixXd plus = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double gap = em.diag(i) * em.diag(j) - em.pair(i, j);
      plus(i, j) = std::sqrt(std::max(gap, 0.0));
      plus(j, i) = plus(i, j);
    }
  }
  return plus;
}

BracketingParams bracketing_params(int n, double eps, double delta, double alpha, double zeta) {
  check_ground_set(n, kMaxGroundSet);
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "eps must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
  }
  if (zeta == 0.0) throw Error(ErrorCode::DegenerateZeta, "zeta = 0 leaves varsigma undefined");
  if (!(zeta > 0.0 && zeta <= 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "zeta must lie in (0, 0.5]");
  }
  const double nn = static_cast<double>(n);
  const double big_n = std::ldexp(1.0, n);

  BracketingParams bp;
  bp.n = n;
  bp.eps = eps;
  bp.delta = delta;
  bp.alpha = alpha;
  bp.zeta = zeta;
  bp.m = static_cast<std::uint64_t>(
      std::ceil((std::log(1.0 / delta) + 1.0) * std::sqrt(big_n) / (eps * eps)));
  bp.xi = std::pow(big_n, -0.25) * std::sqrt(std::log(nn) + 1.0);
  bp.granularity = eps * zeta / (100.0 * nn * nn);
  const double alpha_branch =
      alpha > 0.0 ? 2.0 * bp.xi / alpha : std::numeric_limits<double>::infinity();
  const double spread = std::min(alpha_branch, std::sqrt(bp.xi / eps));
  const double varsigma = std::ceil(200.0 * nn * nn / zeta * spread);
  bp.varsigma = varsigma >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max()
                                   : std::max<std::uint64_t>(1, static_cast<std::uint64_t>(varsigma));
  bp.half_width = 2.0 * eps * spread;
  const double diagonal = std::ceil(2.0 * bp.xi * eps / bp.granularity);
  bp.diagonal_count = diagonal >= 1.8e19
                          ? std::numeric_limits<std::uint64_t>::max()
                          : std::max<std::uint64_t>(1, static_cast<std::uint64_t>(diagonal));
  return bp;
}

CandidateGrid::CandidateGrid(int n, std::vector<std::vector<double>> lists, std::uint64_t varsigma)
    : n_(n), varsigma_(varsigma), lists_(std::move(lists)) {
  const auto expected = static_cast<std::size_t>(n * (n + 1) / 2);
  if (lists_.size() != expected) {
    throw Error(ErrorCode::DimensionMismatch, "grid needs one list per upper-triangular entry");
  }
  size_ = 1;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) entries_.emplace_back(i, j);
  }
  for (const auto& list : lists_) {
    if (list.empty()) throw Error(ErrorCode::InvalidArgument, "empty candidate list");
    size_ *= list.size();
  }
}

std::uint64_t CandidateGrid::size_u64() const {
  if (size_ > std::numeric_limits<std::uint64_t>::max()) {
    throw Error(ErrorCode::TooLarge, "candidate count exceeds 64 bits");
  }
  return size_.convert_to<std::uint64_t>();
}

std::size_t CandidateGrid::entry_index(int i, int j) const {
  if (i > j) std::swap(i, j);
  // Row i starts after rows 0..i-1, which hold n, n-1, ..., n-i+1 entries.
  return static_cast<std::size_t>(i * n_ - i * (i - 1) / 2 + (j - i));
}

std::vector<std::uint32_t> CandidateGrid::digits(std::uint64_t index) const {
  std::vector<std::uint32_t> out(lists_.size());
  for (std::size_t e = lists_.size(); e-- > 0;) {
    const auto radix = static_cast<std::uint64_t>(lists_[e].size());
    out[e] = static_cast<std::uint32_t>(index % radix);
    index /= radix;
  }
  if (index != 0) throw Error(ErrorCode::InvalidArgument, "candidate index out of range");
  return out;
}

Eigen::MatrixXd CandidateGrid::raw_matrix(std::uint64_t index) const {
  const std::vector<std::uint32_t> d = digits(index);
  Eigen::MatrixXd k(n_, n_);
  for (std::size_t e = 0; e < entries_.size(); ++e) {
    const auto [i, j] = entries_[e];
    k(i, j) = lists_[e][d[e]];
    k(j, i) = k(i, j);
  }
  return k;
}

MarginalKernel CandidateGrid::candidate(std::uint64_t index) const {
  return project_box(raw_matrix(index), 0.0);
}

CandidateGrid candidate_grid(const EmpiricalMarginals& em, const BracketingParams& bp,
                             const GridOptions& options) {
  const int n = em.n;
  if (bp.n != n) throw Error(ErrorCode::DimensionMismatch, "params and marginals differ in n");
  const std::uint64_t varsigma = options.varsigma.value_or(bp.varsigma);
  const std::uint64_t diag_count = options.diagonal_count.value_or(bp.diagonal_count);
  if (varsigma == 0 || diag_count == 0) {
    throw Error(ErrorCode::InvalidArgument, "subinterval counts must be positive");
  }

  // Every diagonal list keeps at least one value, so the off-diagonal
  // product is a lower bound on |M|. Checked before anything is allocated.
  {
    BigCount lower = 1;
    for (int e = 0; e < n * (n - 1) / 2; ++e) lower *= BigCount(varsigma) * 2 + 1;
    check_budget(lower, options);
  }
  checked_count(static_cast<double>(varsigma) * 2.0 + 1.0, "off-diagonal candidate list");
  checked_count(static_cast<double>(diag_count), "diagonal candidate list");

  const Eigen::MatrixXd plus = magnitude_estimates(em);
  const double w = bp.half_width;
  const double r = bp.xi * bp.eps;
  std::vector<std::vector<double>> lists;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      std::vector<double> list;
      if (i == j) {
        const double lo = em.diag(i) - r;
        const double step = 2.0 * r / static_cast<double>(diag_count);
        for (std::uint64_t k = 0; k < diag_count; ++k) {
          const double mid = lo + (static_cast<double>(k) + 0.5) * step;
          if (mid >= 0.0 && mid <= 1.0) list.push_back(mid);
        }
        if (list.empty()) list.push_back(std::clamp(em.diag(i), 0.0, 1.0));
      } else {
        const double lo = plus(i, j) - w;
        const double step = 2.0 * w / static_cast<double>(varsigma);
        list.reserve(2 * varsigma + 1);
        for (std::uint64_t k = 0; k < varsigma; ++k) {
          list.push_back(lo + (static_cast<double>(k) + 0.5) * step);
        }
        list.push_back(0.0);
        for (std::uint64_t k = 0; k < varsigma; ++k) list.push_back(-list[k]);
      }
      lists.push_back(std::move(list));
    }
  }
  CandidateGrid grid(n, std::move(lists), varsigma);
  check_budget(grid.size(), options);
  return grid;
}

CandidateStream::CandidateStream(const CandidateGrid& grid)
    : CandidateStream(grid, 0, grid.size_u64()) {}

CandidateStream::CandidateStream(const CandidateGrid& grid, std::uint64_t begin, std::uint64_t end)
    : grid_(&grid), position_(begin), end_(std::min(end, grid.size_u64())) {}

std::optional<MarginalKernel> CandidateStream::next() {
  if (position_ >= end_) return std::nullopt;
  return grid_->candidate(position_++);
}

CandidateStream enumerate_candidates(const CandidateGrid& grid, const GridOptions& options) {
  check_budget(grid.size(), options);
  return CandidateStream(grid);
}

}  // namespace dpptest
