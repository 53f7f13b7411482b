#include <doctest.h>

#include <cmath>
#include <set>

#include "dpptest/error.hpp"
#include "dpptest/estimator.hpp"
#include "dpptest/generators.hpp"
#include "dpptest/sampler.hpp"

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

EmpiricalMarginals marginals_2x2(double d1, double d2, double u) {
  EmpiricalMarginals em;
  em.n = 2;
  em.m = 1;
  em.diag = Eigen::Vector2d(d1, d2);
  em.pair = Eigen::MatrixXd(2, 2);
  em.pair << d1, u, u, d2;
  return em;
}

}  // namespace

TEST_CASE("empirical marginals by counting") {
  const std::vector<Subset> batch{Subset::of({0}), Subset::of({0, 1})};
  const auto em = empirical_marginals(2, batch);
  CHECK(em.diag(0) == 1.0);
  CHECK(em.diag(1) == 0.5);
  CHECK(em.pair(0, 1) == 0.5);
  CHECK(em.pair(1, 0) == 0.5);
  CHECK(em.pair(0, 0) == em.diag(0));

  const std::vector<Subset> empty_sets(10);
  const auto zero = empirical_marginals(3, empty_sets);
  CHECK(zero.pair.isZero());

  CHECK(code_of([] { empirical_marginals(2, std::vector<Subset>{}); }) == ErrorCode::EmptyBatch);
}

TEST_CASE("empirical marginals converge") {
  Eigen::MatrixXd k(2, 2);
  k << 0.5, 0.3, 0.3, 0.5;
  const auto batch = sample_dpp(validate(k), 1000000, 5);
  const auto em = empirical_marginals(2, batch.samples);
  CHECK(std::abs(em.diag(0) - 0.5) <= 0.005);
  CHECK(std::abs(em.diag(1) - 0.5) <= 0.005);
  CHECK(std::abs(em.pair(0, 1) - 0.16) <= 0.005);
  CHECK(em.pair(0, 1) <= std::min(em.diag(0), em.diag(1)) + 1e-12);
}

TEST_CASE("magnitude estimates") {
  const auto plus = magnitude_estimates(marginals_2x2(0.5, 0.5, 0.16));
  CHECK(plus(0, 1) == doctest::Approx(0.3));
  CHECK(plus(0, 0) == 0.0);
  CHECK(magnitude_estimates(marginals_2x2(0.5, 0.5, 0.3))(0, 1) == 0.0);
  CHECK(magnitude_estimates(marginals_2x2(1.0, 1.0, 1.0))(0, 1) == 0.0);
}

TEST_CASE("bracketing parameters") {
  const auto bp = bracketing_params(4, 0.1, 0.05, 0.0, 0.25);
  CHECK(bp.m == 1599);
  CHECK(bp.granularity == doctest::Approx(1.5625e-5));
  CHECK(bp.xi == doctest::Approx(0.5 * std::sqrt(std::log(4.0) + 1.0)).epsilon(1e-15));
  CHECK(bp.xi == doctest::Approx(0.772382).epsilon(1e-6));
  // alpha = 0 selects sqrt(xi / eps).
  const double spread = std::sqrt(bp.xi / 0.1);
  CHECK(bp.varsigma == static_cast<std::uint64_t>(std::ceil(200.0 * 16 / 0.25 * spread)));
  CHECK(bp.half_width == doctest::Approx(0.2 * spread));

  // A large alpha makes the alpha branch the smaller one.
  const auto bp2 = bracketing_params(4, 0.1, 0.05, 1.0, 0.25);
  CHECK(bp2.half_width == doctest::Approx(0.2 * 2.0 * bp2.xi));

  CHECK(code_of([] { bracketing_params(4, 0.1, 0.05, 0.1, 0.0); }) == ErrorCode::DegenerateZeta);
  CHECK(code_of([] { bracketing_params(4, 1.0, 0.05, 0.1, 0.2); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { bracketing_params(4, 0.1, 0.0, 0.1, 0.2); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { bracketing_params(4, 0.1, 0.1, 0.1, 0.6); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("single subinterval grids") {
  const auto em = marginals_2x2(0.5, 0.5, 0.16);
  const auto bp = bracketing_params(2, 0.2, 0.1, 0.0, 0.3);
  GridOptions opt;
  opt.varsigma = 1;
  opt.diagonal_count = 1;
  const auto grid = candidate_grid(em, bp, opt);
  CHECK(grid.size() == 3);
  const auto& off = grid.list(grid.entry_index(0, 1));
  REQUIRE(off.size() == 3);
  CHECK(off[0] == doctest::Approx(0.3));
  CHECK(off[1] == 0.0);
  CHECK(off[2] == doctest::Approx(-0.3));
  CHECK(grid.list(grid.entry_index(0, 0)) == std::vector<double>{0.5});

  auto stream = enumerate_candidates(grid);
  int count = 0;
  while (auto k = stream.next()) {
    ++count;
    CHECK(k->eigenvalues().minCoeff() >= 0.0);
    CHECK(k->matrix() == grid.raw_matrix(static_cast<std::uint64_t>(count - 1)));
  }
  CHECK(count == 3);
}

TEST_CASE("singleton lists yield the projected estimate") {
  EmpiricalMarginals em = marginals_2x2(0.9, 0.9, 0.0);
  const auto bp = bracketing_params(2, 0.2, 0.1, 0.0, 0.3);
  std::vector<std::vector<double>> lists{{0.9}, {0.9}, {0.9}};
  const CandidateGrid grid(2, lists, 1);
  CHECK(grid.size() == 1);
  auto stream = enumerate_candidates(grid);
  const auto k = stream.next();
  REQUIRE(k);
  Eigen::MatrixXd raw(2, 2);
  raw << 0.9, 0.9, 0.9, 0.9;
  CHECK((k->matrix() - project_box(raw).matrix()).norm() < 1e-15);
  CHECK_FALSE(stream.next());
}

TEST_CASE("grid structure with the natural counts") {
  Rng rng(3);
  const auto k = random_kernel(3, rng, 0.3, 0.7);
  const auto batch = sample_dpp(k, 2000, 7);
  const auto em = empirical_marginals(3, batch.samples);
  const auto bp = bracketing_params(3, 0.3, 0.1, 0.2, 0.3);
  GridOptions opt;
  opt.allow_over_cap = true;
  const auto grid = candidate_grid(em, bp, opt);
  BigCount product = 1;
  for (std::size_t e = 0; e < grid.entry_count(); ++e) {
    const auto [i, j] = grid.entry(e);
    const auto& list = grid.list(e);
    product *= list.size();
    if (i == j) {
      CHECK_FALSE(list.empty());
      for (double v : list) CHECK((v >= 0.0 && v <= 1.0));
    } else {
      CHECK(list.size() == 2 * bp.varsigma + 1);
      CHECK(list.size() % 2 == 1);
      CHECK(std::count(list.begin(), list.end(), 0.0) >= 1);
    }
  }
  CHECK(grid.size() == product);
  CHECK(code_of([&] { candidate_grid(em, bp); }) == ErrorCode::CandidateBudgetExceeded);
  CHECK(code_of([&] { enumerate_candidates(grid); }) == ErrorCode::CandidateBudgetExceeded);
}

TEST_CASE("mixed-radix order and sharding") {
  std::vector<std::vector<double>> lists{{0.4, 0.5}, {0.1, 0.0, -0.1}, {0.6}};
  const CandidateGrid grid(2, lists, 1);
  CHECK(grid.size_u64() == 6);
  CHECK(grid.digits(0) == std::vector<std::uint32_t>{0, 0, 0});
  CHECK(grid.digits(1) == std::vector<std::uint32_t>{0, 1, 0});
  CHECK(grid.digits(3) == std::vector<std::uint32_t>{1, 0, 0});
  CHECK(grid.raw_matrix(5)(0, 0) == 0.5);
  CHECK(grid.raw_matrix(5)(1, 0) == -0.1);

  std::vector<Eigen::MatrixXd> whole;
  auto all = CandidateStream(grid);
  while (auto k = all.next()) whole.push_back(k->matrix());
  std::vector<Eigen::MatrixXd> parts;
  for (std::uint64_t b = 0; b < 6; b += 4) {
    CandidateStream shard(grid, b, b + 4);
    while (auto k = shard.next()) parts.push_back(k->matrix());
  }
  REQUIRE(whole.size() == 6);
  REQUIRE(parts.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(whole[i] == parts[i]);
  CHECK_THROWS_AS(grid.digits(6), Error);
}

TEST_CASE("planted truth lies within granularity of the grid") {
  // Per-entry containment is a product property, so it is checked entry by
  // entry instead of enumerating the full set.
  const int n = 2;
  const double eps = 0.3;
  const double delta = 0.1;
  const double alpha = 0.2;
  const double zeta = 0.3;
  const auto bp = bracketing_params(n, eps, delta, alpha, zeta);
  GridOptions opt;
  opt.allow_over_cap = true;
  int failures = 0;
  const int runs = 60;
  for (int t = 0; t < runs; ++t) {
    Rng rng(1000 + t);
    Eigen::MatrixXd truth(2, 2);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    truth << 0.5, sign * 0.2, sign * 0.2, 0.5;
    const auto k = validate(truth).with_normality({alpha, zeta});
    const auto batch = sample_dpp(k, bp.m, 50 + t);
    const auto em = empirical_marginals(n, batch.samples);
    const auto grid = candidate_grid(em, bp, opt);
    Eigen::MatrixXd nearest(n, n);
    bool ok = true;
    for (std::size_t e = 0; e < grid.entry_count(); ++e) {
      const auto [i, j] = grid.entry(e);
      double best = 1e9;
      for (double v : grid.list(e)) {
        if (std::abs(v - truth(i, j)) < std::abs(best - truth(i, j))) best = v;
      }
      nearest(i, j) = nearest(j, i) = best;
      ok = ok && std::abs(best - truth(i, j)) <= bp.granularity;
      ok = ok && ((best > 0) == (truth(i, j) > 0)) && ((best < 0) == (truth(i, j) < 0));
    }
    if (!ok) {
      ++failures;
      continue;
    }
    const auto projected = project_box(nearest);
    CHECK((projected.matrix() - truth).norm() <= n * bp.granularity + 1e-12);
    CHECK(projected.eigenvalues().minCoeff() >= 0.99 * zeta);
    CHECK(projected.eigenvalues().maxCoeff() <= 1.0 - 0.99 * zeta);
  }
  // delta plus three binomial standard deviations.
  CHECK(failures <= runs * delta + 3.0 * std::sqrt(runs * delta * (1 - delta)));
}
