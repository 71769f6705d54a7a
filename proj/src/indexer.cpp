#include "lir/indexer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lir/kmeans.hpp"
#include "lir/parallel.hpp"
#include "lir/rng.hpp"

namespace lir {

namespace {

constexpr std::size_t kQuantizerPoolCap = std::size_t(1) << 20; // residual components
constexpr std::size_t kKmeansSampleCap = std::size_t(1) << 20;  // training rows

// Cutoff at quantile position pos = q * n over the sorted pool: the midpoint
// of the two neighboring order statistics when pos lands exactly on a
// boundary, the nearest-rank element otherwise.
float quantile_cutoff(const std::vector<float>& sorted, double q) {
    const std::size_t n = sorted.size();
    double pos = q * double(n);
    auto rank = static_cast<std::size_t>(std::ceil(pos));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    if (pos == std::floor(pos)) {
        std::size_t lo = static_cast<std::size_t>(pos);
        if (lo >= 1 && lo < n) return 0.5f * (sorted[lo - 1] + sorted[lo]);
    }
    return sorted[rank - 1];
}

} // namespace

std::size_t auto_num_centroids(std::size_t num_embeddings) {
    if (num_embeddings < 1) throw_error(ErrorCode::EmptyCorpus, "no embeddings");
    double target = std::log2(double(num_embeddings)) / 2.0;
    auto exponent = static_cast<std::size_t>(std::ceil(target));
    std::size_t k = std::size_t(1) << exponent;
    return std::clamp<std::size_t>(k, 1, num_embeddings);
}

std::vector<std::uint32_t> assign_codes(const CorpusEmbeddings& corpus,
                                        const CentroidSet& centroids, int threads) {
    if (corpus.dim != centroids.dim) {
        throw_error(ErrorCode::DimensionMismatch,
                    "corpus dim " + std::to_string(corpus.dim) + " vs centroid dim " +
                        std::to_string(centroids.dim));
    }
    const std::size_t n = corpus.num_embeddings();
    const std::size_t k = centroids.num_centroids;
    const std::size_t dim = corpus.dim;
    std::vector<std::uint32_t> codes(n);
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const float* v = corpus.token(t);
            std::uint32_t arg = 0;
            float top = dot(v, centroids.row(0), dim);
            for (std::size_t c = 1; c < k; ++c) {
                float s = dot(v, centroids.row(c), dim);
                if (s > top) {
                    top = s;
                    arg = static_cast<std::uint32_t>(c);
                }
            }
            codes[t] = arg;
        }
    });
    return codes;
}

QuantizerSpec train_quantizer(const CorpusEmbeddings& corpus, const CentroidSet& centroids,
                              std::span<const std::uint32_t> codes, std::uint32_t nbits,
                              std::uint64_t seed) {
    if (!nbits_supported(nbits)) {
        throw_error(ErrorCode::PackingUnsupported, "nbits must be one of {1,2,4}");
    }
    if (codes.size() != corpus.num_embeddings()) {
        throw_error(ErrorCode::LengthMismatch, "codes length does not match corpus tokens");
    }
    const std::size_t dim = corpus.dim;
    const std::size_t num_tokens = codes.size();

    // Token subset whose residual components form the training pool.
    std::vector<std::uint64_t> token_ids;
    std::size_t max_tokens = std::max<std::size_t>(1, kQuantizerPoolCap / std::max<std::size_t>(dim, 1));
    if (num_tokens <= max_tokens) {
        token_ids.resize(num_tokens);
        std::iota(token_ids.begin(), token_ids.end(), 0);
    } else {
        // Seeded partial Fisher-Yates over token indices.
        std::vector<std::uint64_t> all(num_tokens);
        std::iota(all.begin(), all.end(), 0);
        SplitMix64 rng(mix_seed(seed, 0x71D67FFFEDA60000ULL));
        token_ids.reserve(max_tokens);
        for (std::size_t i = 0; i < max_tokens; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.next_below(num_tokens - i));
            std::swap(all[i], all[j]);
            token_ids.push_back(all[i]);
        }
        std::sort(token_ids.begin(), token_ids.end());
    }

    std::vector<float> pool(token_ids.size() * dim);
    parallel_for(token_ids.size(), 0, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const float* v = corpus.token(token_ids[i]);
            const float* c = centroids.row(codes[token_ids[i]]);
            float* out = pool.data() + i * dim;
            for (std::size_t d = 0; d < dim; ++d) out[d] = v[d] - c[d];
        }
    });

    std::vector<float> sorted = pool;
    std::sort(sorted.begin(), sorted.end());

    QuantizerSpec quant;
    quant.nbits = nbits;
    const std::size_t buckets = std::size_t(1) << nbits;
    quant.bucket_cutoffs.resize(buckets - 1);
    for (std::size_t i = 1; i < buckets; ++i) {
        quant.bucket_cutoffs[i - 1] = quantile_cutoff(sorted, double(i) / double(buckets));
    }

    // Per-bucket means; sequential accumulation keeps builds bit-identical.
    std::vector<double> sums(buckets, 0.0);
    std::vector<std::uint64_t> counts(buckets, 0);
    for (float x : pool) {
        std::uint32_t b = quant.bucket_for(x);
        sums[b] += x;
        counts[b]++;
    }
    quant.bucket_weights.resize(buckets);
    for (std::size_t b = 0; b < buckets; ++b) {
        if (counts[b] > 0) {
            quant.bucket_weights[b] = static_cast<float>(sums[b] / double(counts[b]));
        } else {
            // Empty bucket (constant or heavily tied residuals): fall back to
            // the nearest cutoff so the weight stays inside the interval.
            quant.bucket_weights[b] =
                b == 0 ? quant.bucket_cutoffs.front() : quant.bucket_cutoffs[b - 1];
        }
    }
    return quant;
}

InvertedList build_inverted_list(std::span<const std::uint32_t> codes,
                                 std::span<const std::uint32_t> doclens,
                                 std::size_t num_centroids) {
    std::uint64_t total = 0;
    for (std::uint32_t len : doclens) total += len;
    if (total != codes.size()) {
        throw_error(ErrorCode::LengthMismatch, "doclens total does not match codes length");
    }

    // Pass 1: per-centroid posting counts with per-passage dedup.
    std::vector<std::uint64_t> counts(num_centroids, 0);
    std::vector<std::uint32_t> seen_marker(num_centroids, UINT32_MAX);
    std::uint64_t cursor = 0;
    for (std::size_t p = 0; p < doclens.size(); ++p) {
        for (std::uint32_t t = 0; t < doclens[p]; ++t) {
            std::uint32_t c = codes[cursor++];
            if (c >= num_centroids) {
                throw_error(ErrorCode::IndexOutOfRange, "token code exceeds centroid count");
            }
            if (seen_marker[c] != p) {
                seen_marker[c] = static_cast<std::uint32_t>(p);
                counts[c]++;
            }
        }
    }

    InvertedList ivf;
    ivf.offsets.resize(num_centroids + 1, 0);
    for (std::size_t c = 0; c < num_centroids; ++c) ivf.offsets[c + 1] = ivf.offsets[c] + counts[c];
    ivf.postings.resize(ivf.offsets.back());

    // Pass 2: fill; passages visited in ascending order so slices come out
    // sorted and deduplicated.
    std::vector<std::uint64_t> fill(ivf.offsets.begin(), ivf.offsets.end() - 1);
    std::fill(seen_marker.begin(), seen_marker.end(), UINT32_MAX);
    cursor = 0;
    for (std::size_t p = 0; p < doclens.size(); ++p) {
        for (std::uint32_t t = 0; t < doclens[p]; ++t) {
            std::uint32_t c = codes[cursor++];
            if (seen_marker[c] != p) {
                seen_marker[c] = static_cast<std::uint32_t>(p);
                ivf.postings[fill[c]++] = static_cast<std::uint32_t>(p);
            }
        }
    }
    return ivf;
}

CompressedIndex build_index(const CorpusEmbeddings& corpus, const IndexConfig& config,
                            int threads) {
    if (corpus.num_passages == 0 || corpus.num_embeddings() == 0) {
        throw_error(ErrorCode::EmptyCorpus, "cannot index an empty corpus");
    }
    if (!nbits_supported(config.nbits)) {
        throw_error(ErrorCode::PackingUnsupported, "nbits must be one of {1,2,4}");
    }
    const std::size_t dim = corpus.dim;
    const std::uint32_t per_byte = 8 / config.nbits;
    if (dim % per_byte != 0) {
        throw_error(ErrorCode::PackingUnsupported,
                    "dim " + std::to_string(dim) + " not divisible by " + std::to_string(per_byte) +
                        " for nbits " + std::to_string(config.nbits));
    }
    if (corpus.num_passages > std::size_t(UINT32_MAX)) {
        throw_error(ErrorCode::InvalidParams, "corpora above 2^32 passages are not supported");
    }
    const std::size_t num_tokens = corpus.num_embeddings();
    const std::size_t k =
        config.num_centroids > 0 ? config.num_centroids : auto_num_centroids(num_tokens);

    // Training sample: uniform over tokens, at least K rows, capped at 2^20.
    double fraction = config.sample_fraction
                          ? *config.sample_fraction
                          : std::min(1.0, double(kKmeansSampleCap) / double(num_tokens));
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw_error(ErrorCode::InvalidParams, "sample_fraction must lie in (0, 1]");
    }
    auto sample_size = static_cast<std::size_t>(std::ceil(fraction * double(num_tokens)));
    sample_size = std::clamp(sample_size, std::min(num_tokens, k), num_tokens);

    std::vector<float> sample_storage;
    std::span<const float> sample(corpus.data);
    if (sample_size < num_tokens) {
        std::vector<std::uint64_t> all(num_tokens);
        std::iota(all.begin(), all.end(), 0);
        SplitMix64 rng(mix_seed(config.rng_seed, 0x5A75A75A75A75A75ULL));
        std::vector<std::uint64_t> picked(sample_size);
        for (std::size_t i = 0; i < sample_size; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.next_below(num_tokens - i));
            std::swap(all[i], all[j]);
            picked[i] = all[i];
        }
        std::sort(picked.begin(), picked.end());
        sample_storage.resize(sample_size * dim);
        for (std::size_t i = 0; i < sample_size; ++i) {
            std::copy_n(corpus.token(picked[i]), dim, sample_storage.data() + i * dim);
        }
        sample = sample_storage;
    }

    CompressedIndex index;
    index.dim = static_cast<std::uint32_t>(dim);
    index.nbits = config.nbits;
    index.rng_seed = config.rng_seed;
    index.centroids =
        train_centroids(sample, dim, k, config.kmeans_iters, config.rng_seed, threads);
    index.codes = assign_codes(corpus, index.centroids, threads);
    index.quantizer =
        train_quantizer(corpus, index.centroids, index.codes, config.nbits, config.rng_seed);
    index.doclens = corpus.doclens;
    index.ivf = build_inverted_list(index.codes, index.doclens, k);
    finalize_derived(index);

    // Quantize and pack every token's residual.
    const std::size_t bytes_per_token = index.residual_bytes_per_token();
    std::vector<std::uint8_t> residuals(num_tokens * bytes_per_token, 0);
    const std::uint32_t nbits = config.nbits;
    parallel_for(num_tokens, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<std::uint8_t> buckets(dim);
        for (std::size_t t = begin; t < end; ++t) {
            const float* v = corpus.token(t);
            const float* c = index.centroids.row(index.codes[t]);
            for (std::size_t d = 0; d < dim; ++d) {
                buckets[d] = static_cast<std::uint8_t>(index.quantizer.bucket_for(v[d] - c[d]));
            }
            std::uint8_t* out = residuals.data() + t * bytes_per_token;
            for (std::size_t d = 0; d < dim; ++d) {
                out[d / per_byte] |= static_cast<std::uint8_t>(buckets[d] << (nbits * (d % per_byte)));
            }
        }
    });
    index.residuals = ResidualStore::from_vector(std::move(residuals));
    return index;
}

} // namespace lir
