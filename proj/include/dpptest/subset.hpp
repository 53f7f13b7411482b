#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace dpptest {

/// Largest ground set for which full 2^n tables are built.
inline constexpr int kDefaultGroundSetCap = 16;

/// Hard limit imposed by the 32-bit mask representation.
inline constexpr int kMaxGroundSet = 30;

/// A subset of the ground set {0, ..., n-1}, stored as a bitmask. Element i
/// is printed as i+1 in every user-facing format.
class Subset {
 public:
  constexpr Subset() = default;
  constexpr explicit Subset(std::uint32_t mask) : mask_(mask) {}

  static Subset of(std::initializer_list<int> elements);
  static Subset of(std::span<const int> elements);
  static constexpr Subset full(int n) {
    return Subset(n >= 32 ? ~std::uint32_t{0} : ((std::uint32_t{1} << n) - 1));
  }

  constexpr std::uint32_t mask() const { return mask_; }
  constexpr bool contains(int i) const { return (mask_ >> i) & 1U; }
  constexpr int size() const { return std::popcount(mask_); }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr Subset with(int i) const { return Subset(mask_ | (std::uint32_t{1} << i)); }
  constexpr Subset without(int i) const { return Subset(mask_ & ~(std::uint32_t{1} << i)); }
  constexpr Subset complement(int n) const { return Subset(full(n).mask_ & ~mask_); }
  constexpr bool is_subset_of(Subset other) const { return (mask_ & ~other.mask_) == 0; }
  constexpr bool fits(int n) const { return (mask_ & ~full(n).mask_) == 0; }

  std::vector<int> elements() const;

  /// "{1,3}" style, 1-based.
  std::string to_string() const;

  constexpr auto operator<=>(const Subset&) const = default;

 private:
  std::uint32_t mask_ = 0;
};

/// Number of subsets of an n-element ground set.
constexpr std::size_t power_set_size(int n) { return std::size_t{1} << n; }

/// Throws GroundSetTooLarge when n exceeds `cap`, InvalidArgument when n < 1.
void check_ground_set(int n, int cap = kDefaultGroundSetCap);

/// A probability mass function over all 2^n subsets, indexed by mask.
class DiscreteDistribution {
 public:
  /// Validates nonnegativity and that the entries sum to one within 1e-8.
  DiscreteDistribution(int n, std::vector<double> probs);

  /// Rescales nonnegative weights to sum to one.
  static DiscreteDistribution normalized(int n, std::vector<double> weights);
  static DiscreteDistribution uniform(int n);
  static DiscreteDistribution point_mass(int n, Subset s);

  int n() const { return n_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](Subset s) const { return probs_[s.mask()]; }
  double operator[](std::size_t mask) const { return probs_[mask]; }
  std::span<const double> probs() const { return probs_; }

 private:
  int n_;
  std::vector<double> probs_;
};

}  // namespace dpptest
