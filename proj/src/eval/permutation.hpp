#pragma once

#include <cstdint>
#include <span>

namespace gradphon {

enum class PermutationMethod { Auto, Exact, MonteCarlo };

/// Two-sided paired-permutation test on the mean of per-item differences
/// a_i - b_i, permuting by sign flips. Auto enumerates all 2^n flips when
/// n <= 20 and otherwise draws `permutations` random flips (at least 1000).
double paired_permutation_test(std::span<const double> a, std::span<const double> b, std::size_t permutations,
                               std::uint64_t seed, PermutationMethod method = PermutationMethod::Auto);

}  // namespace gradphon
