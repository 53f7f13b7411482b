#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dpptest/kernel.hpp"
#include "dpptest/subset.hpp"

namespace dpptest {

struct SampleBatch {
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<Subset> samples;

  std::size_t size() const { return samples.size(); }
};

struct CoupledBatch {
  int n = 0;
  double z = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::pair<Subset, Subset>> pairs;  // (J_K, J_{Pi_z(K)})
  std::size_t equal_count = 0;

  std::size_t size() const { return pairs.size(); }
  bool all_equal() const { return equal_count == pairs.size(); }
};

/// m draws from DPP(K) via the elementary mixture: keep eigenvector v with
/// probability lambda_v, then sample the projection DPP on the kept vectors.
/// Draw t uses the child stream child_seed(seed, t), so the batch does not
/// depend on `threads`.
SampleBatch sample_dpp(const MarginalKernel& kernel, std::size_t m, std::uint64_t seed,
                       int threads = 1);

/// Coupled draws from DPP(K) and DPP(project_box(K, z)). Both selections
/// share the uniforms x_v; when they pick the same eigenvectors the
/// elementary draw is shared as well. The first coordinates coincide with
/// sample_dpp(K, m, seed).
CoupledBatch sample_coupled(const MarginalKernel& kernel, double z, std::size_t m,
                            std::uint64_t seed, int threads = 1);

/// i.i.d. inverse-CDF draws from an explicit table.
SampleBatch sample_table(const DiscreteDistribution& table, std::size_t m, std::uint64_t seed,
                         int threads = 1);

/// Empirical distribution of a list of subsets.
DiscreteDistribution empirical_distribution(int n, std::span<const Subset> samples);

}  // namespace dpptest
