#pragma once

// Desk-scale invariant suites behind `kdim verify`: concentration-tail
// ordering, covering-bound soundness against enumerable nets, encoder
// agreement with a brute-force grid oracle, and gap-experiment soundness.

#include <cstdint>
#include <string>
#include <vector>

#include "kdim/scheme.hpp"

namespace kdim {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string details;
};

bool all_passed(const std::vector<CheckResult>& results);

// bennett_tail <= bernstein_tail over a random grid with n <= 10^4,
// eps <= B, V <= B^2 (equality up to rounding counts as satisfied).
std::vector<CheckResult> tails_suite(int grid_points = 10000, std::uint64_t seed = 1);

// Enumerates the width-xi grid net, evaluates its loss rows on n random
// draws, and checks ln(empirical cover size) against the closed-form bound
// at xi_prime = lipschitz_xi_factor * xi. Runs a general (l2-ball codebook)
// variant and a k-means variant. Throws std::invalid_argument when the net
// would exceed the enumeration guard.
std::vector<CheckResult> cover_suite(int m, int k, double xi, double r, double c, int n,
                                     std::uint64_t seed);

// Random encode instances per scheme at m, k <= 2 checked against
// brute_force_encode within 5 * grid_step * (1 + ||x|| + c*k),
// grid_step = 1e-3 (1e-4 when k = 1).
std::vector<CheckResult> encoder_suite(int instances_per_scheme = 200, std::uint64_t seed = 1);

// Gap experiment against the covering Hoeffding bound with default
// candidates {zero, random feasible, trained on a fresh sample}.
std::vector<CheckResult> gap_suite(const SchemeSpec& spec, const DistributionSpec& dist, int n,
                                   int trials, std::uint64_t seed, double delta, int jobs = 0);

}  // namespace kdim
