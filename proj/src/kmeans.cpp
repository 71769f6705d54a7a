#include "lir/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lir/parallel.hpp"
#include "lir/rng.hpp"

namespace lir {

namespace {

// Assignment by max dot product, ties to the lowest centroid index. Also
// records the winning dot product for empty-cluster repair.
void assign_points(std::span<const float> points, std::size_t n, std::size_t dim,
                   const std::vector<float>& centroids, std::size_t k,
                   std::vector<std::uint32_t>& best, std::vector<float>& best_dot, int threads) {
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            const float* p = points.data() + j * dim;
            std::uint32_t arg = 0;
            float top = dot(p, centroids.data(), dim);
            for (std::size_t c = 1; c < k; ++c) {
                float s = dot(p, centroids.data() + c * dim, dim);
                if (s > top) {
                    top = s;
                    arg = static_cast<std::uint32_t>(c);
                }
            }
            best[j] = arg;
            best_dot[j] = top;
        }
    });
}

// Reassigns one point to each empty cluster: the unstolen point farthest from
// its current centroid (smallest winning dot; ties to the lowest point index).
// Returns false when no further repair is possible (every point coincides
// with some centroid).
bool repair_empty_clusters(std::span<const float> points, std::size_t n, std::size_t dim,
                           std::vector<float>& centroids, std::size_t k,
                           std::vector<std::uint32_t>& best, std::vector<float>& best_dot,
                           std::vector<std::uint8_t>& stolen) {
    std::vector<std::uint32_t> counts(k, 0);
    for (std::size_t j = 0; j < n; ++j) counts[best[j]]++;
    bool all_repaired = true;
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] != 0) continue;
        std::size_t victim = n;
        float victim_dot = std::numeric_limits<float>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (stolen[j]) continue;
            if (counts[best[j]] <= 1) continue; // do not empty another cluster
            if (best_dot[j] < victim_dot) {
                victim_dot = best_dot[j];
                victim = j;
            }
        }
        if (victim == n || victim_dot >= 1.0f - 1e-12f) {
            all_repaired = false; // duplicates everywhere, nothing to steal
            continue;
        }
        counts[best[victim]]--;
        std::copy_n(points.data() + victim * dim, dim, centroids.data() + c * dim);
        best[victim] = static_cast<std::uint32_t>(c);
        best_dot[victim] = 1.0f;
        stolen[victim] = 1;
        counts[c] = 1;
    }
    return all_repaired;
}

} // namespace

CentroidSet train_centroids(std::span<const float> points, std::size_t dim, std::size_t k,
                            std::size_t iters, std::uint64_t seed, int threads) {
    if (dim == 0 || points.size() % dim != 0) {
        throw_error(ErrorCode::DimensionMismatch, "point data size not divisible by dim");
    }
    const std::size_t n = points.size() / dim;
    if (k < 1) throw_error(ErrorCode::InvalidParams, "k must be >= 1");
    if (iters < 1) throw_error(ErrorCode::InvalidParams, "iters must be >= 1");
    if (n < k) {
        throw_error(ErrorCode::TooFewPoints,
                    std::to_string(n) + " training points for k = " + std::to_string(k));
    }

    std::vector<float> centroids(k * dim);
    SplitMix64 rng(seed);

    // k-means++ seeding. d^2 on the unit sphere is 2 - 2 cos, computed from
    // the running best dot product against chosen seeds.
    {
        std::size_t first = rng.next_below(n);
        std::copy_n(points.data() + first * dim, dim, centroids.data());
        std::vector<float> best_dot(n);
        parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t j = begin; j < end; ++j) {
                best_dot[j] = dot(points.data() + j * dim, centroids.data(), dim);
            }
        });
        for (std::size_t c = 1; c < k; ++c) {
            double total = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                total += std::max(0.0, 2.0 - 2.0 * double(best_dot[j]));
            }
            std::size_t pick;
            if (total <= 0.0) {
                pick = rng.next_below(n);
            } else {
                double r = rng.next_unit() * total;
                double cum = 0.0;
                pick = n - 1;
                for (std::size_t j = 0; j < n; ++j) {
                    cum += std::max(0.0, 2.0 - 2.0 * double(best_dot[j]));
                    if (cum > r) {
                        pick = j;
                        break;
                    }
                }
            }
            float* dst = centroids.data() + c * dim;
            std::copy_n(points.data() + pick * dim, dim, dst);
            parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
                for (std::size_t j = begin; j < end; ++j) {
                    float s = dot(points.data() + j * dim, dst, dim);
                    if (s > best_dot[j]) best_dot[j] = s;
                }
            });
        }
    }

    std::vector<std::uint32_t> best(n);
    std::vector<float> best_dot(n);
    std::vector<double> sums(k * dim);
    std::vector<std::uint32_t> counts(k);

    for (std::size_t it = 0; it <= iters; ++it) {
        assign_points(points, n, dim, centroids, k, best, best_dot, threads);
        std::vector<std::uint8_t> stolen(n, 0);
        for (int round = 0; round < 16; ++round) {
            if (repair_empty_clusters(points, n, dim, centroids, k, best, best_dot, stolen)) break;
        }
        if (it == iters) break; // final pass fixes assignments/empties only

        // Mean update runs sequentially so sums are independent of threading.
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t j = 0; j < n; ++j) {
            const float* p = points.data() + j * dim;
            double* s = sums.data() + std::size_t(best[j]) * dim;
            for (std::size_t i = 0; i < dim; ++i) s[i] += p[i];
            counts[best[j]]++;
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue; // keep repaired/stolen centroid as-is
            double norm_sq = 0.0;
            const double* s = sums.data() + c * dim;
            for (std::size_t i = 0; i < dim; ++i) norm_sq += s[i] * s[i];
            if (norm_sq <= 1e-24) continue; // degenerate mean, keep previous centroid
            double inv = 1.0 / std::sqrt(norm_sq);
            float* dst = centroids.data() + c * dim;
            for (std::size_t i = 0; i < dim; ++i) dst[i] = static_cast<float>(s[i] * inv);
        }
    }

    CentroidSet result;
    result.num_centroids = k;
    result.dim = dim;
    result.data = std::move(centroids);
    return result;
}

} // namespace lir
