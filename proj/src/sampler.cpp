#include "dpptest/sampler.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "dpptest/error.hpp"
#include "dpptest/parallel.hpp"
#include "dpptest/rng.hpp"

namespace dpptest {

namespace {

// Cumulative atom tables of the elementary DPPs K^{V'} = sum_{v in V'} v v^T,
// built on first use. Atoms with |J| != |V'| vanish, so only those of the
// right size are evaluated.
class ElementaryCache {
 public:
  explicit ElementaryCache(const MarginalKernel& kernel) : kernel_(kernel) {}

  std::shared_ptr<const std::vector<double>> cdf(std::uint32_t selection) {
    {
      std::lock_guard lock(mutex_);
      auto it = tables_.find(selection);
      if (it != tables_.end()) return it->second;
    }
    auto table = build(selection);
    std::lock_guard lock(mutex_);
    return tables_.emplace(selection, std::move(table)).first->second;
  }

 private:
  std::shared_ptr<const std::vector<double>> build(std::uint32_t selection) const {
    const int n = kernel_.n();
    const Eigen::MatrixXd& v = kernel_.eigenvectors();
    Eigen::MatrixXd projection = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
      if ((selection >> k) & 1U) projection += v.col(k) * v.col(k).transpose();
    }
    projection = 0.5 * (projection + projection.transpose()).eval();
    const int rank = std::popcount(selection);
    auto cdf = std::make_shared<std::vector<double>>(power_set_size(n));
    double running = 0.0;
    for (std::size_t mask = 0; mask < cdf->size(); ++mask) {
      const Subset j(static_cast<std::uint32_t>(mask));
      if (j.size() == rank) running += symmetric_abs_det(shifted_complement(projection, j));
      (*cdf)[mask] = running;
    }
    return cdf;
  }

  const MarginalKernel& kernel_;
  std::mutex mutex_;
  std::unordered_map<std::uint32_t, std::shared_ptr<const std::vector<double>>> tables_;
};

Subset invert(const std::vector<double>& cdf, double u) {
  const double target = u * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  if (it == cdf.end()) --it;
  // Skip zero-width cells left behind by floating-point dust.
  while (it != cdf.begin() && *it == *(it - 1)) --it;
  return Subset(static_cast<std::uint32_t>(it - cdf.begin()));
}

void require_count(std::size_t m) {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
}

}  // namespace

SampleBatch sample_dpp(const MarginalKernel& kernel, std::size_t m, std::uint64_t seed,
                       int threads) {
  require_count(m);
  const int n = kernel.n();
  check_ground_set(n);
  ElementaryCache cache(kernel);
  const Eigen::VectorXd& lambda = kernel.eigenvalues();
  SampleBatch batch{n, seed, std::vector<Subset>(m)};
  parallel_for(m, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng = Rng::child(seed, t);
      std::uint32_t selection = 0;
      for (int k = 0; k < n; ++k) {
        if (rng.uniform() < lambda(k)) selection |= 1U << k;
      }
      batch.samples[t] = invert(*cache.cdf(selection), rng.uniform());
    }
  });
  return batch;
}

CoupledBatch sample_coupled(const MarginalKernel& kernel, double z, std::size_t m,
                            std::uint64_t seed, int threads) {
  require_count(m);
  if (!(z >= 0.0 && z < 0.5)) throw Error(ErrorCode::InvalidArgument, "z must lie in [0, 0.5)");
  const int n = kernel.n();
  check_ground_set(n);
  // Pi_z(K) keeps the eigenvectors, so one cache serves both coordinates.
  ElementaryCache cache(kernel);
  const Eigen::VectorXd& lambda = kernel.eigenvalues();
  Eigen::VectorXd clamped = lambda;
  for (int k = 0; k < n; ++k) clamped(k) = std::clamp(lambda(k), z, 1.0 - z);

  CoupledBatch batch;
  batch.n = n;
  batch.z = z;
  batch.seed = seed;
  batch.pairs.resize(m);
  parallel_for(m, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng = Rng::child(seed, t);
      std::uint32_t first = 0;
      std::uint32_t second = 0;
      for (int k = 0; k < n; ++k) {
        const double x = rng.uniform();
        if (x < lambda(k)) first |= 1U << k;
        if (x < clamped(k)) second |= 1U << k;
      }
      const Subset a = invert(*cache.cdf(first), rng.uniform());
      const Subset b = first == second ? a : invert(*cache.cdf(second), rng.uniform());
      batch.pairs[t] = {a, b};
    }
  });
  batch.equal_count = static_cast<std::size_t>(std::count_if(
      batch.pairs.begin(), batch.pairs.end(), [](const auto& p) { return p.first == p.second; }));
  return batch;
}

SampleBatch sample_table(const DiscreteDistribution& table, std::size_t m, std::uint64_t seed,
                         int threads) {
  require_count(m);
  std::vector<double> cdf(table.size());
  double running = 0.0;
  for (std::size_t s = 0; s < cdf.size(); ++s) {
    running += table[s];
    cdf[s] = running;
  }
  SampleBatch batch{table.n(), seed, std::vector<Subset>(m)};
  parallel_for(m, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng = Rng::child(seed, t);
      batch.samples[t] = invert(cdf, rng.uniform());
    }
  });
  return batch;
}

DiscreteDistribution empirical_distribution(int n, std::span<const Subset> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptyBatch, "no samples");
  check_ground_set(n);
  std::vector<double> counts(power_set_size(n), 0.0);
  for (Subset s : samples) {
    if (!s.fits(n)) throw Error(ErrorCode::InvalidArgument, "sample outside ground set");
    counts[s.mask()] += 1.0;
  }
  const auto total = static_cast<double>(samples.size());
  for (double& c : counts) c /= total;
  return DiscreteDistribution::normalized(n, std::move(counts));
}

}  // namespace dpptest
