#include "eval/permutation.hpp"

#include <cmath>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace gradphon {

double paired_permutation_test(std::span<const double> a, std::span<const double> b, std::size_t permutations,
                               std::uint64_t seed, PermutationMethod method) {
  if (a.size() != b.size()) {
    fail(ErrorKind::Data, "paired test needs equal-length vectors, got " + std::to_string(a.size()) + " and " +
                              std::to_string(b.size()));
  }
  const std::size_t n = a.size();
  if (n == 0) return 1.0;
  std::vector<double> diff(n);
  double observed = 0, scale = 0;
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = a[i] - b[i];
    observed += diff[i];
    scale += std::abs(diff[i]);
  }
  // Sums equal up to rounding count as "at least as extreme".
  const double threshold = std::abs(observed) - 1e-12 * std::max(scale, 1.0);

  if (method == PermutationMethod::Auto) method = n <= 20 ? PermutationMethod::Exact : PermutationMethod::MonteCarlo;
  if (method == PermutationMethod::Exact) {
    if (n > 30) fail(ErrorKind::Config, "exact enumeration is limited to 30 pairs");
    const std::uint64_t total = std::uint64_t{1} << n;
    std::uint64_t extreme = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += (mask >> i & 1U) ? -diff[i] : diff[i];
      if (std::abs(s) >= threshold) ++extreme;
    }
    return static_cast<double>(extreme) / static_cast<double>(total);
  }

  if (permutations < 1000) fail(ErrorKind::Config, "Monte Carlo permutation test needs at least 1000 permutations");
  Rng rng(seed);
  std::uint64_t extreme = 0;
  for (std::size_t p = 0; p < permutations; ++p) {
    double s = 0;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng.next_u64();
      s += (bits & 1U) ? -diff[i] : diff[i];
      bits >>= 1;
    }
    if (std::abs(s) >= threshold) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(permutations);
}

}  // namespace gradphon
