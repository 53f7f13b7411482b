#include "dpptest/subset.hpp"

#include <cmath>
#include <numeric>

#include "dpptest/error.hpp"

namespace dpptest {

Subset Subset::of(std::initializer_list<int> elements) {
  return of(std::span<const int>(elements.begin(), elements.size()));
}

Subset Subset::of(std::span<const int> elements) {
  std::uint32_t mask = 0;
  for (int e : elements) {
    if (e < 0 || e >= kMaxGroundSet) {
      throw Error(ErrorCode::InvalidArgument, "subset element out of range: " + std::to_string(e));
    }
    mask |= std::uint32_t{1} << e;
  }
  return Subset(mask);
}

std::vector<int> Subset::elements() const {
  std::vector<int> out;
  for (std::uint32_t m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

std::string Subset::to_string() const {
  std::string s = "{";
  bool first = true;
  for (int e : elements()) {
    if (!first) s += ",";
    s += std::to_string(e + 1);
    first = false;
  }
  return s + "}";
}

void check_ground_set(int n, int cap) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "ground set size must be positive");
  if (n > cap || n > kMaxGroundSet) {
    throw Error(ErrorCode::GroundSetTooLarge,
                "n = " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
  }
}

DiscreteDistribution::DiscreteDistribution(int n, std::vector<double> probs)
    : n_(n), probs_(std::move(probs)) {
  check_ground_set(n, kMaxGroundSet);
  if (probs_.size() != power_set_size(n)) {
    throw Error(ErrorCode::DimensionMismatch, "table has " + std::to_string(probs_.size()) +
                                                  " entries, expected 2^" + std::to_string(n));
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::InvalidArgument, "probabilities must be finite and nonnegative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-8) {
    throw Error(ErrorCode::InvalidArgument, "probabilities sum to " + std::to_string(total));
  }
}

DiscreteDistribution DiscreteDistribution::normalized(int n, std::vector<double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "weights must have positive mass");
  for (double& w : weights) w /= total;
  return DiscreteDistribution(n, std::move(weights));
}

DiscreteDistribution DiscreteDistribution::uniform(int n) {
  check_ground_set(n, kMaxGroundSet);
  const std::size_t size = power_set_size(n);
  return DiscreteDistribution(n, std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

DiscreteDistribution DiscreteDistribution::point_mass(int n, Subset s) {
  check_ground_set(n, kMaxGroundSet);
  if (!s.fits(n)) throw Error(ErrorCode::InvalidArgument, "subset outside ground set");
  std::vector<double> probs(power_set_size(n), 0.0);
  probs[s.mask()] = 1.0;
  return DiscreteDistribution(n, std::move(probs));
}

}  // namespace dpptest
