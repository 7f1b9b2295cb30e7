#pragma once

#include <array>
#include <span>
#include <vector>

#include "autodiff/tensor.hpp"

namespace gradphon {

/// Projects the rows of an n x d row-major table onto its top-2 principal
/// components after mean-centering. Each axis is sign-normalized so that its
/// largest-magnitude loading is positive. Needs n >= 2.
std::vector<std::array<double, 2>> pca2(std::span<const double> table, std::size_t rows, std::size_t cols);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace gradphon
