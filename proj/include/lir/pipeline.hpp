#pragma once

#include <cstdint>
#include <vector>

#include "lir/index.hpp"
#include "lir/types.hpp"

namespace lir {

// Query-centroid relevance scores, computed once per query and reused by all
// later stages.
struct CentroidScoreTable {
    std::size_t num_centroids = 0;
    std::size_t num_query_tokens = 0;
    std::vector<float> scores;           // K x |Q| row-major
    std::vector<float> per_centroid_max; // row maxima, length K

    const float* row(std::size_t c) const { return scores.data() + c * num_query_tokens; }
};

// Per-query stage counters and timings.
struct StageTrace {
    std::size_t stage1_candidates = 0;
    std::size_t stage2_out = 0;
    std::size_t stage3_out = 0;
    std::size_t final_out = 0;

    double candidate_generation_ms = 0;
    double stage2_ms = 0;
    double stage3_ms = 0;
    double lookup_ms = 0;
    double decompression_ms = 0;
    double scoring_ms = 0;
    double total_ms = 0;

    std::size_t centroid_matmul_count = 0;
    std::uint64_t stage2_rows_gathered = 0;
    std::uint64_t stage3_rows_gathered = 0;
    std::size_t decompressed_passages = 0;

    double filtering_ms() const { return stage2_ms + stage3_ms; }
};

struct SearchOptions {
    int threads = 0;            // 0 = machine parallelism
    bool disable_filter = false; // skip stages 2-3 and decompress every stage-1 candidate
};

struct SearchResult {
    CandidateSet topk;
    StageTrace trace;
};

CentroidScoreTable compute_centroid_scores(const QueryMatrix& q, const CentroidSet& centroids,
                                           int threads = 0);

// Union of postings of the nprobe best centroids per query token (ties to the
// lower centroid index); ids sorted ascending, unscored, uncapped.
CandidateSet generate_candidates(const CentroidScoreTable& table, const InvertedList& ivf,
                                 std::size_t nprobe, std::size_t num_passages);

// keep[c] = per_centroid_max[c] >= t_cs.
std::vector<std::uint8_t> prune_centroids(const CentroidScoreTable& table, float t_cs);

// Approximate MaxSim with each token replaced by its centroid's score row.
// With a mask, tokens on pruned centroids are skipped; a passage with every
// token masked keeps score 0. rows_gathered counts score rows folded in.
CandidateSet centroid_interaction(const CandidateSet& candidates, const CompressedIndex& index,
                                  const CentroidScoreTable& table,
                                  const std::vector<std::uint8_t>* mask, int threads = 0,
                                  std::uint64_t* rows_gathered = nullptr);

// n best by (score desc, id asc); all of them when n >= size.
CandidateSet select_top(const CandidateSet& scored, std::size_t n);

// Exact stage: decompress only the candidates, score with MaxSim over the
// reconstructed embeddings, return the top k. Lookup, decompression and
// scoring timings land in the trace when given.
CandidateSet rank_final(const CandidateSet& candidates, const CompressedIndex& index,
                        const QueryMatrix& q, std::size_t k, int threads = 0,
                        StageTrace* trace = nullptr);

// The full multi-stage pipeline: candidate generation, pruned centroid
// interaction, full centroid interaction, exact re-ranking.
SearchResult search(const CompressedIndex& index, const QueryMatrix& q,
                    const SearchParams& params, const SearchOptions& options = {});

// Stage-3 output width for a given stage-2 width.
std::size_t stage3_width(const SearchParams& params);

} // namespace lir
