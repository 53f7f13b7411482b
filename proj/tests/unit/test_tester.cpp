#include <doctest.h>

#include <cmath>

#include "dpptest/error.hpp"
#include "dpptest/generators.hpp"
#include "dpptest/hardness.hpp"
#include "dpptest/sampler.hpp"
#include "dpptest/tester.hpp"

using namespace dpptest;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

SubsetCounts counts_of(int n, std::initializer_list<std::uint64_t> values) {
  SubsetCounts c(n);
  std::uint32_t mask = 0;
  for (auto v : values) c.add(Subset(mask++), v);
  return c;
}

TesterConfig small_grid(double eps, double zeta) {
  TesterConfig tc;
  tc.eps = eps;
  tc.delta = 0.1;
  tc.alpha = 0.0;
  tc.zeta = zeta;
  tc.grid.varsigma = 1;
  tc.grid.diagonal_count = 1;
  tc.grid.allow_over_cap = true;
  return tc;
}

}  // namespace

TEST_CASE("proportional counts give minus the cutoff-set size") {
  const auto p = DiscreteDistribution::uniform(3);
  const auto counts = counts_of(3, {10, 10, 10, 10, 10, 10, 10, 10});
  CHECK(chi2_l1_statistic(counts, p, 0.1) == -8.0);
  const auto v = chi2_l1_test(counts, p, 0.1);
  CHECK(v.accept);
  CHECK(v.threshold == doctest::Approx(80 * 0.01 / 10));

  // Half the atoms fall below eps / (50 N) = 0.0025.
  const auto q = DiscreteDistribution(2, {0.499, 0.001, 0.499, 0.001});
  const auto c2 = counts_of(2, {499, 1, 499, 1});
  CHECK(chi2_l1_statistic(c2, q, 0.5) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("single sample at n = 1") {
  const auto p = DiscreteDistribution(1, {0.3, 0.7});
  const auto c = counts_of(1, {0, 1});
  // J0 = {1}: ((1 - 0.7)^2 - 1) / 0.7, plus (0.3^2 - 0) / 0.3 for the empty set.
  const double expected = ((1 - 0.7) * (1 - 0.7) - 1) / 0.7 + 0.3;
  CHECK(chi2_l1_statistic(c, p, 0.1) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("hand-computed n = 2 statistic") {
  const auto p = DiscreteDistribution::uniform(2);
  CHECK(chi2_l1_statistic(counts_of(2, {3, 1, 0, 0}), p, 0.01) == 2.0);
}

TEST_CASE("observed atoms below the cutoff do not count") {
  const auto p = DiscreteDistribution(2, {0.5, 0.4999, 0.0001, 0.0});
  auto c = counts_of(2, {50, 48, 0, 0});
  c.add(Subset(3), 2);
  c.add(Subset(2), 5);
  const double z = chi2_l1_statistic(c, p, 0.25);
  CHECK(std::isfinite(z));
  const double m = 105;
  const double hand = ((50 - m * 0.5) * (50 - m * 0.5) - 50) / (m * 0.5) +
                      ((48 - m * 0.4999) * (48 - m * 0.4999) - 48) / (m * 0.4999);
  CHECK(z == doctest::Approx(hand).epsilon(1e-12));
}

TEST_CASE("a tie rejects") {
  // Z = (25 - 15 + 25 - 5 - 10 - 10) / 10 = 1 and C = 40 * 0.25 / 10 = 1.
  const auto p = DiscreteDistribution::uniform(2);
  const auto v = chi2_l1_test(counts_of(2, {15, 5, 10, 10}), p, 0.5);
  CHECK(v.z == 1.0);
  CHECK(v.threshold == 1.0);
  CHECK_FALSE(v.accept);
}

TEST_CASE("statistic argument checks") {
  CHECK(code_of([] { chi2_l1_statistic(SubsetCounts(2), DiscreteDistribution::uniform(3), 0.1); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(code_of([] { chi2_l1_statistic(SubsetCounts(2), DiscreteDistribution::uniform(2), 0.1); }) ==
        ErrorCode::EmptyBatch);
}

TEST_CASE("required samples") {
  CHECK(required_samples(2, 1.0, std::exp(-1.0), 1) == 4);
  const auto one = required_samples(6, 0.25, 0.1, 1);
  const auto million = required_samples(6, 0.25, 0.1, 1000000);
  CHECK(million == 14 * one);
  const auto coarse = required_samples(8, 0.2, 0.1, 1);
  const auto fine = required_samples(8, 0.1, 0.1, 1);
  CHECK(std::abs(static_cast<double>(fine) / coarse - 4.0) < 0.01);
  CHECK(required_samples(6, 0.25, 0.1, 1, 2.5) == static_cast<std::uint64_t>(std::ceil(one * 2.5)));
  CHECK(code_of([] { required_samples(2, 0.1, 0.1, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("general-mode parameters") {
  const auto g = general_mode_params(2, 0.5, 1.0);
  CHECK(g.c_factor == doctest::Approx(3.9965).epsilon(1e-4));
  CHECK(g.m_star == 32);
  CHECK(g.z_bar == doctest::Approx(0.005 / 128));
  const auto bigger = general_mode_params(2, 0.5, 10.0);
  CHECK(bigger.m_star > g.m_star);
  CHECK(bigger.z_bar < g.z_bar);
  CHECK(c2_lower_bound(1.0) == 23.0);
  CHECK(c2_lower_bound(std::exp(2.0)) == doctest::Approx(std::exp(2.0) * 27.0));
}

TEST_CASE("gauge representatives of a triangle") {
  // Three edges with values {a, 0, -a}: 1 + 3 + 3 patterns with at most two
  // edges, and two sign classes for the triangle.
  std::vector<std::vector<double>> lists{{0.5}, {0.2, 0.0, -0.2}, {0.1, 0.0, -0.1},
                                         {0.5}, {0.3, 0.0, -0.3}, {0.5}};
  const CandidateGrid grid(3, lists, 1);
  const auto reps = gauge_representatives(grid);
  CHECK(reps.size() == 9);
  CHECK(std::is_sorted(reps.begin(), reps.end()));
  CHECK(reps.front() == 0);
}

TEST_CASE("gauge representatives at n = 6") {
  // Orbit count: sum over edge subsets of 2^(cycle rank).
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < 6; ++i) {
    for (int j = i + 1; j < 6; ++j) edges.emplace_back(i, j);
  }
  std::uint64_t expected = 0;
  for (std::uint32_t s = 0; s < (1U << 15); ++s) {
    int parent[6] = {0, 1, 2, 3, 4, 5};
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x];
      return x;
    };
    int cycles = 0;
    for (int e = 0; e < 15; ++e) {
      if (!((s >> e) & 1U)) continue;
      const int a = find(edges[e].first);
      const int b = find(edges[e].second);
      if (a == b) {
        ++cycles;
      } else {
        parent[a] = b;
      }
    }
    expected += std::uint64_t{1} << cycles;
  }
  std::vector<std::vector<double>> lists;
  for (int i = 0; i < 6; ++i) {
    for (int j = i; j < 6; ++j) {
      lists.push_back(i == j ? std::vector<double>{0.5} : std::vector<double>{0.1 + 0.01 * j, 0.0, -0.1 - 0.01 * j});
    }
  }
  const CandidateGrid grid(6, lists, 1);
  CHECK(gauge_representatives(grid).size() == expected);
  CHECK(expected == 460728);
}

TEST_CASE("duplicate values are scored once") {
  std::vector<std::vector<double>> lists{{0.5}, {0.0, 0.0, 0.0}, {0.5}};
  const CandidateGrid grid(2, lists, 1);
  CHECK(gauge_representatives(grid) == std::vector<std::uint64_t>{0});
}

TEST_CASE("any Bernoulli is a one-element DPP") {
  for (double q1 : {0.03, 0.5, 0.93}) {
    const auto q = DiscreteDistribution(1, {1.0 - q1, q1});
    TesterConfig tc;
    tc.eps = 0.2;
    tc.delta = 0.1;
    tc.zeta = 0.02;
    const auto batch = sample_table(q, 20000, 8);
    const auto report = dpp_tester(1, batch.samples, tc);
    CHECK(report.verdict.accept);
  }
}

TEST_CASE("uniform input is accepted and a hard instance rejected") {
  const int n = 6;
  auto tc = small_grid(0.25, 0.4);
  tc.c_test = 2.0;
  const std::uint64_t need = required_samples(n, 0.25, 0.1, BigCount(14348907), 2.0);
  int accepted = 0;
  int rejected = 0;
  for (int t = 0; t < 10; ++t) {
    const auto uniform = sample_table(DiscreteDistribution::uniform(n), 2 * need, 300 + t);
    accepted += dpp_tester(n, uniform.samples, tc).verdict.accept;
    const auto hard = hard_instance(n, 0.6, 400 + t);
    const auto far = sample_table(hard.h, 2 * need, 500 + t);
    rejected += !dpp_tester(n, far.samples, tc).verdict.accept;
  }
  CHECK(accepted >= 9);
  CHECK(rejected >= 9);
}

TEST_CASE("too few samples") {
  const auto batch = sample_table(DiscreteDistribution::uniform(4), 100, 1);
  CHECK(code_of([&] { dpp_tester(4, batch.samples, small_grid(0.25, 0.4)); }) == ErrorCode::InsufficientSamples);
  auto relaxed = small_grid(0.25, 0.4);
  relaxed.enforce_sample_size = false;
  CHECK_NOTHROW(dpp_tester(4, batch.samples, relaxed));
}

TEST_CASE("candidate budget is enforced") {
  const auto batch = sample_table(DiscreteDistribution::uniform(4), 100000, 1);
  TesterConfig tc;
  tc.eps = 0.25;
  tc.zeta = 0.4;
  CHECK(code_of([&] { dpp_tester(4, batch.samples, tc); }) == ErrorCode::CandidateBudgetExceeded);
}

TEST_CASE("gauge reduction, threads and the plain walk agree") {
  Rng rng(77);
  for (int t = 0; t < 6; ++t) {
    const int n = 3;
    const auto k = random_kernel(n, rng, 0.05, 0.95);
    DiscreteDistribution q = exact_distribution(k);
    if (t % 2 == 1) q = hard_instance(n, 0.6, 90 + t).h;
    auto tc = small_grid(0.3, 0.05);
    tc.enforce_sample_size = false;
    const auto batch = sample_table(q, 4000, 60 + t);
    const auto fast = dpp_tester(n, batch.samples, tc, &q);
    tc.threads = 3;
    const auto threaded = dpp_tester(n, batch.samples, tc, &q);
    tc.threads = 1;
    tc.reduce_symmetry = false;
    const auto plain = dpp_tester(n, batch.samples, tc, &q);
    CHECK(fast.verdict.accept == plain.verdict.accept);
    CHECK(fast.verdict.candidate_index == plain.verdict.candidate_index);
    CHECK(fast.verdict.z == doctest::Approx(plain.verdict.z).epsilon(1e-8));
    CHECK(fast.evaluated <= plain.evaluated);
    CHECK(threaded.verdict.z == fast.verdict.z);
    CHECK(threaded.verdict.candidate_index == fast.verdict.candidate_index);
    CHECK(threaded.audit_min_l1 == fast.audit_min_l1);
  }
}

TEST_CASE("general mode is normal mode at (0, z_bar)") {
  const int n = 3;
  const double eps = 0.3;
  const auto g = general_mode_params(n, eps, 23.0);
  Rng rng(5);
  const auto batch = sample_dpp(random_kernel(n, rng), g.m_star + 10, 3);
  TesterConfig general = small_grid(eps, 0.25);
  general.mode = TesterMode::General;
  general.enforce_sample_size = false;
  TesterConfig normal = small_grid(eps, g.z_bar);
  normal.enforce_sample_size = false;
  const auto a = dpp_tester(n, batch.samples, general);
  const auto b = dpp_tester(n, batch.samples, normal);
  CHECK(a.verdict.accept == b.verdict.accept);
  CHECK(a.verdict.z == b.verdict.z);
  CHECK(a.verdict.candidate_index == b.verdict.candidate_index);
  CHECK(a.zeta == g.z_bar);
  CHECK(a.alpha == 0.0);
  general.enforce_sample_size = true;
  const auto few = sample_dpp(random_kernel(n, rng), g.m_star - 1, 3);
  CHECK(code_of([&] { dpp_tester(n, few.samples, general); }) == ErrorCode::InsufficientSamples);
}

TEST_CASE("best candidate picks the smallest statistic") {
  std::vector<std::vector<double>> lists{{0.5}, {0.3, 0.0, -0.3}, {0.5}};
  const CandidateGrid grid(2, lists, 1);
  Eigen::MatrixXd k(2, 2);
  k << 0.5, -0.3, -0.3, 0.5;
  const auto batch = sample_dpp(validate(k), 20000, 4);
  const auto counts = SubsetCounts::from(2, batch.samples);
  const auto best = best_candidate(grid, counts, 0.2);
  // +0.3 and -0.3 give the same DPP; the lower index wins.
  CHECK(best.index == 0);
  const auto independent = sample_dpp(validate(0.5 * Eigen::MatrixXd::Identity(2, 2)), 20000, 4);
  CHECK(best_candidate(grid, SubsetCounts::from(2, independent.samples), 0.2).index == 1);
}
