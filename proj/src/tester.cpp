#include "dpptest/tester.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "dpptest/error.hpp"
#include "dpptest/parallel.hpp"

namespace dpptest {

SubsetCounts::SubsetCounts(int n) : n_(n) {
  check_ground_set(n);
  counts_.assign(power_set_size(n), 0);
}

SubsetCounts SubsetCounts::from(int n, std::span<const Subset> samples) {
  SubsetCounts counts(n);
  for (Subset s : samples) counts.add(s);
  return counts;
}

void SubsetCounts::add(Subset s, std::uint64_t times) {
  if (!s.fits(n_)) throw Error(ErrorCode::InvalidArgument, "subset outside ground set");
  counts_[s.mask()] += times;
  m_ += times;
}

double statistic_cutoff(int n, double eps) { return eps / (50.0 * std::ldexp(1.0, n)); }

double chi2_l1_statistic(const SubsetCounts& counts, std::span<const double> p, double eps) {
  if (p.size() != counts.table().size()) {
    throw Error(ErrorCode::DimensionMismatch, "counts and table differ in n");
  }
  if (counts.m() == 0) throw Error(ErrorCode::EmptyBatch, "no samples");
  const double cutoff = statistic_cutoff(counts.n(), eps);
  const auto m = static_cast<double>(counts.m());
  double z = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (!(p[s] >= cutoff)) continue;
    const double expected = m * p[s];
    const auto observed = static_cast<double>(counts.table()[s]);
    const double diff = observed - expected;
    z += (diff * diff - observed) / expected;
  }
  return z;
}

double chi2_l1_statistic(const SubsetCounts& counts, const DiscreteDistribution& p, double eps) {
  if (p.n() != counts.n()) throw Error(ErrorCode::DimensionMismatch, "counts and table differ in n");
  return chi2_l1_statistic(counts, p.probs(), eps);
}

TestVerdict chi2_l1_test(const SubsetCounts& counts, const DiscreteDistribution& p, double eps) {
  TestVerdict v;
  v.z = chi2_l1_statistic(counts, p, eps);
  v.m = counts.m();
  v.threshold = static_cast<double>(counts.m()) * eps * eps / 10.0;
  v.accept = v.z < v.threshold;
  return v;
}

std::uint64_t required_samples(int n, double eps, double delta, const BigCount& candidate_count,
                               double c_test) {
  if (candidate_count < 1) throw Error(ErrorCode::InvalidArgument, "candidate count must be >= 1");
  if (!(c_test > 0.0)) throw Error(ErrorCode::InvalidArgument, "c_test must be positive");
  if (!(eps > 0.0) || !(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "eps > 0 and delta in (0, 1) required");
  }
  const double base =
      std::ceil((std::log(1.0 / delta) + 1.0) * std::sqrt(std::ldexp(1.0, n)) / (eps * eps));
  // ln(1 + |M|) through the double conversion is accurate far beyond what
  // the ceiling can resolve.
  const double count = candidate_count.convert_to<double>();
  const double amplification = std::max(1.0, std::ceil(std::log1p(count)));
  return static_cast<std::uint64_t>(std::ceil(base * amplification * c_test));
}

GeneralParams general_mode_params(int n, double eps, double c2) {
  if (!(c2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "c2 must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "eps must lie in (0, 1)");
  check_ground_set(n, kMaxGroundSet);
  const double big_n = std::ldexp(1.0, n);
  const double ln_n = std::log(big_n);
  GeneralParams g;
  g.c_factor = ln_n * ln_n * (ln_n + std::log(1.0 / eps));
  g.m_star = static_cast<std::uint64_t>(std::ceil(c2 * g.c_factor * std::sqrt(big_n) / (eps * eps)));
  g.z_bar = 0.005 / (2.0 * static_cast<double>(g.m_star) * n);
  if (!(g.z_bar < 0.5)) throw Error(ErrorCode::DegenerateZ, "z_bar >= 0.5");
  return g;
}

double c2_lower_bound(double c1) {
  if (!(c1 > 0.0)) throw Error(ErrorCode::InvalidArgument, "c1 must be positive");
  return c1 * std::max(23.0, 2.0 * std::log(c1) + 23.0);
}

std::vector<std::uint64_t> gauge_representatives(const CandidateGrid& grid) {
  const int n = grid.n();
  const std::size_t entries = grid.entry_count();
  // For each entry and list position: the lowest position holding the same
  // value, and the lowest position holding its negation.
  std::vector<std::vector<std::uint32_t>> first(entries);
  std::vector<std::vector<std::uint32_t>> negated(entries);
  for (std::size_t e = 0; e < entries; ++e) {
    const auto& list = grid.list(e);
    const auto len = static_cast<std::uint32_t>(list.size());
    first[e].assign(len, 0);
    negated[e].assign(len, std::numeric_limits<std::uint32_t>::max());
    for (std::uint32_t k = 0; k < len; ++k) {
      for (std::uint32_t q = 0; q <= k; ++q) {
        if (list[q] == list[k]) {
          first[e][k] = q;
          break;
        }
      }
      for (std::uint32_t q = 0; q < len; ++q) {
        if (list[q] == -list[k]) {
          negated[e][k] = q;
          break;
        }
      }
    }
  }

  std::vector<std::uint64_t> out;
  // comp[d] holds component labels after deciding entries 0..d-1.
  std::vector<std::array<int, kMaxGroundSet>> comp(entries + 1);
  for (int i = 0; i < n; ++i) comp[0][i] = i;

  auto recurse = [&](auto&& self, std::size_t e, std::uint64_t index) -> void {
    if (e == entries) {
      out.push_back(index);
      return;
    }
    const auto& list = grid.list(e);
    const auto [i, j] = grid.entry(e);
    const auto radix = static_cast<std::uint64_t>(list.size());
    for (std::uint32_t k = 0; k < list.size(); ++k) {
      if (first[e][k] != k) continue;
      comp[e + 1] = comp[e];
      if (i != j && list[k] != 0.0) {
        const int a = comp[e][i];
        const int b = comp[e][j];
        if (a != b) {
          // Edge joins two components: the gauge fixes its sign freely, so
          // keep only the orientation listed first.
          if (negated[e][k] < k) continue;
          for (int v = 0; v < n; ++v) {
            if (comp[e + 1][v] == b) comp[e + 1][v] = a;
          }
        }
      }
      self(self, e + 1, index * radix + k);
    }
  };
  recurse(recurse, 0, 0);
  return out;
}

namespace {

constexpr int kCap = kDefaultGroundSetCap;
using Small = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kCap, kCap>;

// Pivots smaller than this send the candidate to the pivoted LU path.
constexpr double kPivotFloor = 1e-6;

// All 2^n values |det(K - I_{J̄})| by Gaussian elimination shared across a
// binary tree: the choice for element k only shifts the k-th pivot, so the
// Schur complement after k steps depends only on the first k choices.
class SchurTable {
 public:
  explicit SchurTable(int n) : n_(n) {}

  // Returns false when a pivot is too small for unpivoted elimination.
  bool run(const Small& k, double* out) {
    for (int r = 0; r < n_; ++r) {
      for (int c = 0; c < n_; ++c) level_[0][r * n_ + c] = k(r, c);
    }
    out_ = out;
    return descend(0, 1.0, 0);
  }

 private:
  bool descend(int depth, double det, std::uint32_t mask) {
    if (depth == n_) {
      out_[mask] = std::abs(det);
      return true;
    }
    const int d = n_ - depth;
    const double* s = level_[depth].data();
    double* next = level_[depth + 1].data();
    for (int inside = 0; inside < 2; ++inside) {
      const double pivot = inside ? s[0] : s[0] - 1.0;
      if (std::abs(pivot) < kPivotFloor) return false;
      const double inv = 1.0 / pivot;
      for (int r = 1; r < d; ++r) {
        const double f = s[r * d] * inv;
        for (int c = 1; c < d; ++c) next[(r - 1) * (d - 1) + (c - 1)] = s[r * d + c] - f * s[c];
      }
      const std::uint32_t bit = inside ? (1U << depth) : 0U;
      if (!descend(depth + 1, det * pivot, mask | bit)) return false;
    }
    return true;
  }

  int n_;
  double* out_ = nullptr;
  std::array<std::array<double, kCap * kCap>, kCap + 1> level_{};
};

// Scores one candidate against the fixed testing counts.
class Scorer {
 public:
  Scorer(const CandidateGrid& grid, const SubsetCounts& counts, double eps,
         const DiscreteDistribution* audit)
      : grid_(grid),
        counts_(counts),
        eps_(eps),
        audit_(audit),
        n_(grid.n()),
        table_(power_set_size(grid.n())),
        schur_(grid.n()) {}

  struct Result {
    double z = 0.0;
    double l1 = 0.0;
  };

  Result score(std::uint64_t index) {
    Small k(n_, n_);
    std::uint64_t rest = index;
    for (std::size_t e = grid_.entry_count(); e-- > 0;) {
      const auto& list = grid_.list(e);
      const auto radix = static_cast<std::uint64_t>(list.size());
      const auto [i, j] = grid_.entry(e);
      k(i, j) = list[rest % radix];
      k(j, i) = k(i, j);
      rest /= radix;
    }
    // Strictly inside the box: both K and I - K admit a Cholesky factor, and
    // the projection leaves K alone.
    Small complement = Small::Identity(n_, n_) - k;
    const bool inside = Eigen::LLT<Small>(k).info() == Eigen::Success &&
                        Eigen::LLT<Small>(complement).info() == Eigen::Success;
    if (!inside) k = project_box(Eigen::MatrixXd(k), 0.0).matrix();
    if (!schur_.run(k, table_.data())) atom_table_lu(Eigen::MatrixXd(k), table_);
    Result r;
    r.z = chi2_l1_statistic(counts_, table_, eps_);
    if (audit_ != nullptr) {
      double sum = 0.0;
      for (std::size_t s = 0; s < table_.size(); ++s) sum += std::abs((*audit_)[s] - table_[s]);
      r.l1 = 0.5 * sum;
    }
    return r;
  }

 private:
  const CandidateGrid& grid_;
  const SubsetCounts& counts_;
  double eps_;
  const DiscreteDistribution* audit_;
  int n_;
  std::vector<double> table_;
  SchurTable schur_;
};

constexpr std::size_t kChunk = 2048;

}  // namespace

CandidateScore best_candidate(const CandidateGrid& grid, const SubsetCounts& counts, double eps,
                              int threads) {
  if (counts.n() != grid.n()) throw Error(ErrorCode::DimensionMismatch, "counts and grid differ in n");
  const std::vector<std::uint64_t> order = gauge_representatives(grid);
  const int workers = std::max(1, threads);
  std::vector<Scorer> scorers;
  for (int w = 0; w < workers; ++w) scorers.emplace_back(grid, counts, eps, nullptr);
  std::vector<double> z(order.size());
  const std::size_t per = (order.size() + static_cast<std::size_t>(workers) - 1) / workers;
  parallel_for(order.size(), workers, [&](std::size_t lo, std::size_t hi) {
    auto& scorer = scorers[std::min<std::size_t>(lo / std::max<std::size_t>(per, 1), workers - 1)];
    for (std::size_t t = lo; t < hi; ++t) z[t] = scorer.score(order[t]).z;
  });
  CandidateScore best{order.front(), z.front()};
  for (std::size_t t = 1; t < order.size(); ++t) {
    if (z[t] < best.z) best = {order[t], z[t]};
  }
  return best;
}

TesterReport dpp_tester(int n, std::span<const Subset> samples, const TesterConfig& config,
                        const DiscreteDistribution* audit) {
  check_ground_set(n);
  if (samples.size() < 2) throw Error(ErrorCode::InsufficientSamples, "need at least two samples");
  if (audit != nullptr && audit->n() != n) {
    throw Error(ErrorCode::DimensionMismatch, "audit distribution differs in n");
  }
  TesterReport report;
  report.mode = config.mode;
  report.m_total = samples.size();
  if (config.mode == TesterMode::General) {
    report.general = general_mode_params(n, config.eps, config.c2);
    report.alpha = 0.0;
    report.zeta = report.general->z_bar;
    if (config.enforce_sample_size && report.m_total < report.general->m_star) {
      throw Error(ErrorCode::InsufficientSamples,
                  "general mode needs " + std::to_string(report.general->m_star) + " samples");
    }
  } else {
    report.alpha = config.alpha;
    report.zeta = config.zeta;
  }
  report.bracketing = bracketing_params(n, config.eps, config.delta, report.alpha, report.zeta);

  report.m_learn = report.m_total / 2;
  report.m_test = report.m_total - report.m_learn;
  const auto learn = samples.first(report.m_learn);
  const auto test = samples.subspan(report.m_learn);

  const EmpiricalMarginals em = empirical_marginals(n, learn);
  const CandidateGrid grid = candidate_grid(em, report.bracketing, config.grid);
  report.candidate_count = grid.size();
  report.m_required =
      required_samples(n, config.eps, config.delta, grid.size(), config.c_test);
  if (config.enforce_sample_size &&
      (report.m_learn < report.bracketing.m || report.m_test < report.m_required)) {
    throw Error(ErrorCode::InsufficientSamples,
                "have " + std::to_string(report.m_learn) + "/" + std::to_string(report.m_test) +
                    " learning/testing samples, need " + std::to_string(report.bracketing.m) +
                    "/" + std::to_string(report.m_required));
  }

  const SubsetCounts counts = SubsetCounts::from(n, test);
  TestVerdict& verdict = report.verdict;
  verdict.m = counts.m();
  verdict.threshold = static_cast<double>(counts.m()) * config.eps * config.eps / 10.0;
  verdict.z = std::numeric_limits<double>::infinity();

  std::vector<std::uint64_t> order;
  if (config.reduce_symmetry) {
    order = gauge_representatives(grid);
  } else {
    order.resize(grid.size_u64());
    for (std::uint64_t i = 0; i < order.size(); ++i) order[i] = i;
  }

  const int workers = std::max(1, config.threads);
  std::vector<Scorer> scorers;
  if (config.reduce_symmetry) {
    for (int w = 0; w < workers; ++w) scorers.emplace_back(grid, counts, config.eps, audit);
  }
  std::vector<double> z(kChunk);
  std::vector<double> l1(kChunk);
  std::optional<double> audit_min;

  for (std::size_t begin = 0; begin < order.size(); begin += kChunk) {
    const std::size_t len = std::min(kChunk, order.size() - begin);
    const std::size_t per = (len + static_cast<std::size_t>(workers) - 1) / workers;
    parallel_for(len, workers, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t t = lo; t < hi; ++t) {
        const std::uint64_t index = order[begin + t];
        if (config.reduce_symmetry) {
          const auto slot = std::min<std::size_t>(lo / std::max<std::size_t>(per, 1), workers - 1);
          const auto r = scorers[slot].score(index);
          z[t] = r.z;
          l1[t] = r.l1;
        } else {
          const MarginalKernel candidate = grid.candidate(index);
          const DiscreteDistribution p = exact_distribution(candidate);
          z[t] = chi2_l1_statistic(counts, p, config.eps);
          if (audit != nullptr) {
            double sum = 0.0;
            for (std::size_t s = 0; s < p.size(); ++s) sum += std::abs((*audit)[s] - p[s]);
            l1[t] = 0.5 * sum;
          }
        }
      }
    });
    // Serial reduction in index order keeps the verdict independent of the
    // thread count.
    for (std::size_t t = 0; t < len; ++t) {
      ++report.evaluated;
      if (audit != nullptr) audit_min = std::min(audit_min.value_or(l1[t]), l1[t]);
      if (z[t] < verdict.threshold) {
        verdict.accept = true;
        verdict.z = z[t];
        verdict.candidate_index = order[begin + t];
        break;
      }
      verdict.z = std::min(verdict.z, z[t]);
    }
    if (verdict.accept) break;
  }
  report.audit_min_l1 = audit_min;
  return report;
}

}  // namespace dpptest
