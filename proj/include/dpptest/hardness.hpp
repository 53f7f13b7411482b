#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dpptest/subset.hpp"

namespace dpptest {

/// Uniform measure over 2^[n] with every atom pushed up or down by eps'/N.
struct HardInstance {
  int n = 0;
  double eps_prime = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::int8_t> r;  // +-1 per subset mask
  double normalizer = 0.0;     // L_r = sum of hbar
  std::vector<double> hbar;    // (1 + r_S eps') / N
  DiscreteDistribution h;      // hbar / L_r
};

/// Signs r_S are i.i.d. Rademacher drawn in mask order from Rng(seed).
HardInstance hard_instance(int n, double eps_prime, std::uint64_t seed);

/// Same construction from explicit signs.
HardInstance hard_instance_from_signs(int n, double eps_prime, std::vector<std::int8_t> r,
                                      std::uint64_t seed = 0);

/// Subsets S avoiding elements 1 and 2 (bits 0 and 1) with
/// r(S+{1,2}) = +1 and r(S+{1}) = r(S+{2}) = -1.
std::vector<Subset> witness_set(const HardInstance& inst);

struct HardnessEvents {
  std::size_t witnesses = 0;
  bool q1 = false;  // |S_r| >= N / 64
  bool q2 = false;  // |L_r - 1| <= 4 eps' / sqrt(N)
};

HardnessEvents hardness_events(const HardInstance& inst);

/// (1 + eps') / (1 - 3 eps' / 4).
double helper_rho(double eps_prime);

struct HelperReport {
  double lhs = 0.0;
  bool holds = false;
};

/// |1 + eps' - a| + |1 - eps' - b| against eps'/4, for a / b <= rho.
HelperReport helper_inequality(double a, double b, double eps_prime);

struct ContributionReport {
  double v_s = 0.0;
  double bound = 0.0;  // eps' / (8 N)
  bool bound_holds = false;
};

/// Half the l1 gap between hbar and f over S, S+{1}, S+{2}, S+{1,2}.
/// Throws NotWitness unless S is in the witness set.
ContributionReport vs_contribution(const DiscreteDistribution& f, const HardInstance& inst,
                                   Subset s);

/// Pairwise test f(S+i+j) f(S) <= f(S+i) f(S+j) for all S and i, j outside S.
bool is_log_submodular(const DiscreteDistribution& f);

/// Smallest l1 from h_r to the family. Every member must be log-submodular
/// (FamilyMemberNotLogSubmodular otherwise).
double l1_to_log_submodular_lb(const HardInstance& inst,
                               std::span<const DiscreteDistribution> family);

struct ProofChainReport {
  double witness_sum = 0.0;    // sum of V_S over the witness set
  double witness_floor = 0.0;  // |S_r| eps' / (8 N)
  double two_l1 = 0.0;         // 2 l1(h_r, f)
  double chain_floor = 0.0;    // eps'/256 - 4 eps'/sqrt(N)
  bool holds = false;
};

/// The chain from per-witness contributions to the distance of h_r from f.
ProofChainReport proof_chain(const HardInstance& inst, const DiscreteDistribution& f);

}  // namespace dpptest
