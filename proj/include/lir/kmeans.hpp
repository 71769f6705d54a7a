#pragma once

#include <cstdint>
#include <span>

#include "lir/types.hpp"

namespace lir {

// Lloyd's k-means over unit vectors with k-means++ seeding. Centroids are
// renormalized after every mean update so assignment by max dot product stays
// a cosine argmax. Empty clusters steal the point farthest from its centroid.
// Deterministic for a fixed seed, independent of the thread count.
CentroidSet train_centroids(std::span<const float> points, std::size_t dim, std::size_t k,
                            std::size_t iters, std::uint64_t seed, int threads = 0);

} // namespace lir
