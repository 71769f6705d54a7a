#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "lir/index.hpp"
#include "lir/types.hpp"

namespace lir {

struct IndexConfig {
    std::uint32_t nbits = 2;          // residual bits per dimension, {1,2,4}
    std::size_t num_centroids = 0;    // 0 = auto from the embedding count
    std::size_t kmeans_iters = 20;
    std::optional<double> sample_fraction; // unset = min(1, 2^20 / num_embeddings)
    std::uint64_t rng_seed = 42;
};

// Number of centroids when unspecified: 2^ceil(log2(sqrt(N))), clamped to
// [1, N].
std::size_t auto_num_centroids(std::size_t num_embeddings);

// Nearest-centroid id per token (max cosine, ties to the lowest index).
std::vector<std::uint32_t> assign_codes(const CorpusEmbeddings& corpus,
                                        const CentroidSet& centroids, int threads = 0);

// Trains bucket cutoffs and weights on the pooled distribution of residual
// components v - centroid[code(v)]. Cutoffs sit at the i/2^b quantiles,
// weights at the per-bucket means. The pool is uniformly subsampled to at
// most 2^20 components for large corpora.
QuantizerSpec train_quantizer(const CorpusEmbeddings& corpus, const CentroidSet& centroids,
                              std::span<const std::uint32_t> codes, std::uint32_t nbits,
                              std::uint64_t seed = 0);

InvertedList build_inverted_list(std::span<const std::uint32_t> codes,
                                 std::span<const std::uint32_t> doclens,
                                 std::size_t num_centroids);

// Full offline build: centroids, per-token codes, packed residuals, inverted
// list, quantizer. Deterministic for a fixed (corpus, config) at any thread
// count.
CompressedIndex build_index(const CorpusEmbeddings& corpus, const IndexConfig& config,
                            int threads = 0);

} // namespace lir
