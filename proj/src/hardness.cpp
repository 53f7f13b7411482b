#include "dpptest/hardness.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dpptest/error.hpp"
#include "dpptest/oracle.hpp"
#include "dpptest/rng.hpp"

namespace dpptest {

namespace {

constexpr double kRelTol = 1e-12;
// Absolute slack per unit of mass: atoms carry rounding of about 1e-16, and
// a product picks it up once per factor.
constexpr double kAbsTol = 1e-15;

void check_eps_prime(double eps_prime) {
  if (!(eps_prime > 0.0 && eps_prime <= 2.0 / 3.0)) {
    throw Error(ErrorCode::EpsilonPrimeOutOfRange, "eps' must lie in (0, 2/3]");
  }
}

}  // namespace

HardInstance hard_instance_from_signs(int n, double eps_prime, std::vector<std::int8_t> r,
                                      std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "hard instances need n >= 2");
  check_ground_set(n);
  check_eps_prime(eps_prime);
  const std::size_t size = power_set_size(n);
  if (r.size() != size) throw Error(ErrorCode::DimensionMismatch, "one sign per subset required");
  const double big_n = static_cast<double>(size);
  std::vector<double> hbar(size);
  double total = 0.0;
  for (std::size_t s = 0; s < size; ++s) {
    if (r[s] != 1 && r[s] != -1) throw Error(ErrorCode::InvalidArgument, "signs must be +-1");
    hbar[s] = (1.0 + r[s] * eps_prime) / big_n;
    total += hbar[s];
  }
  std::vector<double> h(size);
  for (std::size_t s = 0; s < size; ++s) h[s] = hbar[s] / total;
  return HardInstance{n,     eps_prime, seed, std::move(r), total, std::move(hbar),
                      DiscreteDistribution(n, std::move(h))};
}

HardInstance hard_instance(int n, double eps_prime, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "hard instances need n >= 2");
  check_ground_set(n);
  check_eps_prime(eps_prime);
  Rng rng(seed);
  std::vector<std::int8_t> r(power_set_size(n));
  for (auto& sign : r) sign = (rng() >> 63) ? 1 : -1;
  return hard_instance_from_signs(n, eps_prime, std::move(r), seed);
}

std::vector<Subset> witness_set(const HardInstance& inst) {
  std::vector<Subset> out;
  const std::size_t size = power_set_size(inst.n);
  for (std::size_t s = 0; s < size; s += 4) {
    // Masks with bits 0 and 1 clear are exactly the multiples of four.
    if (inst.r[s | 3U] == 1 && inst.r[s | 2U] == -1 && inst.r[s | 1U] == -1) {
      out.emplace_back(static_cast<std::uint32_t>(s));
    }
  }
  return out;
}

HardnessEvents hardness_events(const HardInstance& inst) {
  HardnessEvents ev;
  const double big_n = std::ldexp(1.0, inst.n);
  ev.witnesses = witness_set(inst).size();
  ev.q1 = static_cast<double>(ev.witnesses) >= big_n / 64.0;
  ev.q2 = std::abs(inst.normalizer - 1.0) <= 4.0 * inst.eps_prime / std::sqrt(big_n);
  return ev;
}

double helper_rho(double eps_prime) { return (1.0 + eps_prime) / (1.0 - 0.75 * eps_prime); }

HelperReport helper_inequality(double a, double b, double eps_prime) {
  check_eps_prime(eps_prime);
  if (!(a >= 0.0 && b >= 0.0)) throw Error(ErrorCode::PreconditionViolated, "a, b must be >= 0");
  if (b == 0.0 ? a != 0.0 : a / b > helper_rho(eps_prime)) {
    throw Error(ErrorCode::PreconditionViolated, "a / b exceeds rho");
  }
  HelperReport rep;
  rep.lhs = std::abs(1.0 + eps_prime - a) + std::abs(1.0 - eps_prime - b);
  rep.holds = rep.lhs >= eps_prime / 4.0 - 1e-12;
  return rep;
}

ContributionReport vs_contribution(const DiscreteDistribution& f, const HardInstance& inst,
                                   Subset s) {
  if (f.n() != inst.n) throw Error(ErrorCode::DimensionMismatch, "f and instance differ in n");
  const std::uint32_t base = s.mask();
  const bool witness = (base & 3U) == 0 && s.fits(inst.n) && inst.r[base | 3U] == 1 &&
                       inst.r[base | 2U] == -1 && inst.r[base | 1U] == -1;
  if (!witness) throw Error(ErrorCode::NotWitness, s.to_string() + " is not a witness");
  ContributionReport rep;
  for (std::uint32_t low = 0; low < 4; ++low) {
    rep.v_s += 0.5 * std::abs(inst.hbar[base | low] - f[static_cast<std::size_t>(base | low)]);
  }
  rep.bound = inst.eps_prime / (8.0 * std::ldexp(1.0, inst.n));
  rep.bound_holds = rep.v_s >= rep.bound - 1e-12;
  return rep;
}

bool is_log_submodular(const DiscreteDistribution& f) {
  const int n = f.n();
  const std::size_t size = f.size();
  for (std::size_t s = 0; s < size; ++s) {
    for (int i = 0; i < n; ++i) {
      if ((s >> i) & 1U) continue;
      for (int j = i + 1; j < n; ++j) {
        if ((s >> j) & 1U) continue;
        const double fs = f[s];
        const double fi = f[s | (std::size_t{1} << i)];
        const double fj = f[s | (std::size_t{1} << j)];
        const double fij = f[s | (std::size_t{1} << i) | (std::size_t{1} << j)];
        const double lhs = fij * fs;
        const double rhs = fi * fj;
        const double slack = kRelTol * std::max(lhs, rhs) + kAbsTol * (fs + fi + fj + fij);
        if (lhs > rhs + slack) return false;
      }
    }
  }
  return true;
}

double l1_to_log_submodular_lb(const HardInstance& inst,
                               std::span<const DiscreteDistribution> family) {
  if (family.empty()) throw Error(ErrorCode::InvalidArgument, "empty family");
  double best = 1.0;
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (!is_log_submodular(family[k])) {
      throw Error(ErrorCode::FamilyMemberNotLogSubmodular,
                  "family member " + std::to_string(k) + " is not log-submodular");
    }
    best = std::min(best, oracle::distances(inst.h, family[k]).l1);
  }
  return best;
}

ProofChainReport proof_chain(const HardInstance& inst, const DiscreteDistribution& f) {
  const double big_n = std::ldexp(1.0, inst.n);
  ProofChainReport rep;
  const std::vector<Subset> witnesses = witness_set(inst);
  for (Subset s : witnesses) rep.witness_sum += vs_contribution(f, inst, s).v_s;
  rep.witness_floor = static_cast<double>(witnesses.size()) * inst.eps_prime / (8.0 * big_n);
  rep.two_l1 = 2.0 * oracle::distances(inst.h, f).l1;
  rep.chain_floor = inst.eps_prime / 256.0 - 4.0 * inst.eps_prime / std::sqrt(big_n);
  rep.holds = rep.witness_sum >= rep.witness_floor - 1e-12 && rep.two_l1 >= rep.chain_floor - 1e-12;
  return rep;
}

}  // namespace dpptest
