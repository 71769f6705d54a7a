#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lir/error.hpp"

namespace lir {

// Tolerance for "rows arrive unit-normalized" validation. The engine rejects
// rather than renormalizing, so every dot product downstream is a cosine.
inline constexpr float kUnitNormTolerance = 1e-3f;

inline float dot(const float* a, const float* b, std::size_t dim) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < dim; ++i) acc += a[i] * b[i];
    return acc;
}

inline double l2_norm(const float* v, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) acc += double(v[i]) * double(v[i]);
    return std::sqrt(acc);
}

// Token-level embeddings of a single query, |Q| x d row-major, rows unit-norm.
struct QueryMatrix {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<float> data;

    const float* row(std::size_t i) const { return data.data() + i * dim; }
};

// Token-level embeddings of the whole corpus packed row-major in passage
// order; passage_offsets are prefix sums of doclens.
struct CorpusEmbeddings {
    std::size_t num_passages = 0;
    std::size_t dim = 0;
    std::vector<std::uint32_t> doclens;
    std::vector<std::uint64_t> passage_offsets;
    std::vector<float> data;

    // Validates row norms and doclens/data consistency and builds offsets.
    static CorpusEmbeddings create(std::size_t dim, std::vector<std::uint32_t> doclens,
                                   std::vector<float> data);

    std::size_t num_embeddings() const { return passage_offsets.empty() ? 0 : passage_offsets.back(); }
    const float* token(std::size_t t) const { return data.data() + t * dim; }
    const float* passage(std::size_t p) const { return data.data() + passage_offsets[p] * dim; }
};

struct CentroidSet {
    std::size_t num_centroids = 0;
    std::size_t dim = 0;
    std::vector<float> data;

    const float* row(std::size_t c) const { return data.data() + c * dim; }
};

void validate_centroids(const CentroidSet& centroids);

// Map from centroid id to the sorted unique passage ids owning at least one
// token assigned to that centroid.
struct InvertedList {
    std::vector<std::uint64_t> offsets;   // K + 1 prefix array
    std::vector<std::uint32_t> postings;  // concatenated sorted unique passage ids

    std::size_t num_centroids() const { return offsets.empty() ? 0 : offsets.size() - 1; }
    std::span<const std::uint32_t> postings_for(std::size_t c) const {
        return {postings.data() + offsets[c], postings.data() + offsets[c + 1]};
    }
};

struct SearchParams {
    std::size_t k = 10;      // final result depth
    std::size_t nprobe = 1;  // centroids probed per query token
    float t_cs = 0.5f;       // centroid-pruning threshold, cosine units
    std::size_t ndocs = 256; // stage-2 output width
};

// Engine defaults per result depth; every field is overridable from the CLI.
SearchParams default_params_for_k(std::size_t k);

void validate_params(const SearchParams& params, std::size_t num_centroids);

// Passage ids surviving a pipeline stage, optionally with scores parallel to
// the ids.
struct CandidateSet {
    std::vector<std::uint32_t> passage_ids;
    std::optional<std::vector<float>> scores;

    std::size_t size() const { return passage_ids.size(); }
    bool empty() const { return passage_ids.empty(); }
};

void validate_query(const QueryMatrix& q, std::size_t index_dim);

// Prefix-offset helper shared by ragged layouts: monotone non-decreasing,
// first entry 0, last entry equal to the total element count.
std::vector<std::uint64_t> prefix_offsets(std::span<const std::uint32_t> lengths);

} // namespace lir
