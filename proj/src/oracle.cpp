#include "dpptest/oracle.hpp"

#include <cmath>
#include <limits>

#include "dpptest/error.hpp"

namespace dpptest::oracle {

namespace {

constexpr int kMaxCofactor = 8;
constexpr int kMaxInclusionExclusion = 12;

// Determinant of the submatrix on rows [row, k) and the columns in `cols`.
double cofactor(const double* a, int k, int row, unsigned cols) {
  if (row == k) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int c = 0; c < k; ++c) {
    if (!(cols & (1U << c))) continue;
    const double entry = a[row * k + c];
    if (entry != 0.0) sum += sign * entry * cofactor(a, k, row + 1, cols & ~(1U << c));
    sign = -sign;
  }
  return sum;
}

std::vector<int> members(unsigned mask, int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (mask & (1U << i)) out.push_back(i);
  }
  return out;
}

double minor_of(const MarginalKernel& kernel, unsigned mask) {
  const std::vector<int> idx = members(mask, kernel.n());
  const int k = static_cast<int>(idx.size());
  if (k == 0) return 1.0;
  std::vector<double> a(static_cast<std::size_t>(k * k));
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) a[r * k + c] = kernel(idx[r], idx[c]);
  }
  return cofactor(a.data(), k, 0, (1U << k) - 1U);
}

}  // namespace

DistanceReport distances(const DiscreteDistribution& q, const DiscreteDistribution& p) {
  if (q.n() != p.n()) throw Error(ErrorCode::DimensionMismatch, "distributions differ in n");
  DistanceReport report;
  double abs_sum = 0.0;
  double chi = 0.0;
  for (std::size_t s = 0; s < q.size(); ++s) {
    const double diff = q[s] - p[s];
    abs_sum += std::abs(diff);
    if (p[s] > 0.0) {
      chi += diff * diff / p[s];
    } else if (q[s] > 0.0) {
      ++report.infinite_terms;
    }
  }
  report.l1 = 0.5 * abs_sum;
  report.chi2 = report.infinite_terms > 0 ? std::numeric_limits<double>::infinity() : chi;
  return report;
}

double det_naive(std::span<const double> row_major, int k) {
  if (k > kMaxCofactor) throw Error(ErrorCode::TooLarge, "cofactor expansion limited to k <= 8");
  if (k < 0 || row_major.size() != static_cast<std::size_t>(k * k)) {
    throw Error(ErrorCode::DimensionMismatch, "det_naive expects k*k entries");
  }
  if (k == 0) return 1.0;
  return cofactor(row_major.data(), k, 0, (1U << k) - 1U);
}

double principal_minor_naive(const MarginalKernel& kernel, Subset subset) {
  if (subset.size() > kMaxCofactor) throw Error(ErrorCode::TooLarge, "minor larger than 8");
  return minor_of(kernel, subset.mask());
}

double atom_probability_ie(const MarginalKernel& kernel, Subset subset) {
  const int n = kernel.n();
  if (n > kMaxInclusionExclusion) {
    throw Error(ErrorCode::GroundSetTooLarge, "inclusion-exclusion limited to n <= 12");
  }
  const unsigned all = (1U << n) - 1U;
  const unsigned j = subset.mask();
  const unsigned rest = all & ~j;
  double total = 0.0;
  // Walk every T ⊆ rest, including the empty set.
  unsigned t = 0;
  do {
    const unsigned s = j | t;
    int bits = 0;
    for (unsigned x = t; x != 0; x >>= 1) bits += static_cast<int>(x & 1U);
    double minor = 0.0;
    const std::vector<int> idx = members(s, n);
    if (idx.size() <= static_cast<std::size_t>(kMaxCofactor)) {
      minor = minor_of(kernel, s);
    } else {
      // Larger minors: plain Gaussian elimination, still independent of the
      // kernel module.
      const int k = static_cast<int>(idx.size());
      std::vector<double> a(static_cast<std::size_t>(k * k));
      for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c) a[r * k + c] = kernel(idx[r], idx[c]);
      }
      minor = 1.0;
      for (int c = 0; c < k; ++c) {
        int p = c;
        for (int r = c + 1; r < k; ++r) {
          if (std::abs(a[r * k + c]) > std::abs(a[p * k + c])) p = r;
        }
        if (a[p * k + c] == 0.0) {
          minor = 0.0;
          break;
        }
        if (p != c) {
          for (int x = 0; x < k; ++x) std::swap(a[p * k + x], a[c * k + x]);
          minor = -minor;
        }
        minor *= a[c * k + c];
        for (int r = c + 1; r < k; ++r) {
          const double f = a[r * k + c] / a[c * k + c];
          for (int x = c; x < k; ++x) a[r * k + x] -= f * a[c * k + x];
        }
      }
    }
    total += (bits % 2 == 0 ? 1.0 : -1.0) * minor;
    t = (t - rest) & rest;
  } while (t != 0);
  return total;
}

std::vector<double> distribution_ie(const MarginalKernel& kernel) {
  const int n = kernel.n();
  if (n > kMaxCofactor) throw Error(ErrorCode::GroundSetTooLarge, "distribution_ie limited to n <= 8");
  const unsigned size = 1U << n;
  std::vector<double> minors(size);
  for (unsigned s = 0; s < size; ++s) minors[s] = minor_of(kernel, s);
  std::vector<double> table(size);
  for (unsigned j = 0; j < size; ++j) {
    const unsigned rest = (size - 1U) & ~j;
    double total = 0.0;
    unsigned t = 0;
    do {
      int bits = 0;
      for (unsigned x = t; x != 0; x >>= 1) bits += static_cast<int>(x & 1U);
      total += (bits % 2 == 0 ? 1.0 : -1.0) * minors[j | t];
      t = (t - rest) & rest;
    } while (t != 0);
    table[j] = total;
  }
  return table;
}

}  // namespace dpptest::oracle
