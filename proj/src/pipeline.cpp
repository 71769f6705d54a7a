#include "lir/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <limits>
#include <numeric>

#include "lir/maxsim.hpp"
#include "lir/parallel.hpp"
#include "lir/residual_codec.hpp"

namespace lir {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

} // namespace

CentroidScoreTable compute_centroid_scores(const QueryMatrix& q, const CentroidSet& centroids,
                                           int threads) {
    if (q.dim != centroids.dim) {
        throw_error(ErrorCode::DimensionMismatch, "query dim does not match centroid dim");
    }
    CentroidScoreTable table;
    table.num_centroids = centroids.num_centroids;
    table.num_query_tokens = q.rows;
    table.scores.resize(table.num_centroids * q.rows);
    table.per_centroid_max.resize(table.num_centroids);
    parallel_for(table.num_centroids, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
            const float* cent = centroids.row(c);
            float* out = table.scores.data() + c * q.rows;
            float row_max = -std::numeric_limits<float>::infinity();
            for (std::size_t i = 0; i < q.rows; ++i) {
                float s = dot(cent, q.row(i), q.dim);
                out[i] = s;
                if (s > row_max) row_max = s;
            }
            table.per_centroid_max[c] = row_max;
        }
    });
    return table;
}

CandidateSet generate_candidates(const CentroidScoreTable& table, const InvertedList& ivf,
                                 std::size_t nprobe, std::size_t num_passages) {
    const std::size_t k = table.num_centroids;
    if (nprobe < 1 || nprobe > k) {
        throw_error(ErrorCode::InvalidParams, "nprobe outside [1, K]");
    }
    if (ivf.num_centroids() != k) {
        throw_error(ErrorCode::DimensionMismatch, "inverted list size does not match centroids");
    }

    std::vector<std::uint8_t> seen(num_passages, 0);
    std::vector<std::uint32_t> ids;
    std::vector<std::uint32_t> order(k);
    for (std::size_t i = 0; i < table.num_query_tokens; ++i) {
        std::iota(order.begin(), order.end(), 0);
        auto better = [&](std::uint32_t a, std::uint32_t b) {
            float sa = table.scores[std::size_t(a) * table.num_query_tokens + i];
            float sb = table.scores[std::size_t(b) * table.num_query_tokens + i];
            if (sa != sb) return sa > sb;
            return a < b;
        };
        std::partial_sort(order.begin(), order.begin() + nprobe, order.end(), better);
        for (std::size_t t = 0; t < nprobe; ++t) {
            for (std::uint32_t pid : ivf.postings_for(order[t])) {
                if (!seen[pid]) {
                    seen[pid] = 1;
                    ids.push_back(pid);
                }
            }
        }
    }
    std::sort(ids.begin(), ids.end());
    CandidateSet out;
    out.passage_ids = std::move(ids);
    return out;
}

std::vector<std::uint8_t> prune_centroids(const CentroidScoreTable& table, float t_cs) {
    std::vector<std::uint8_t> keep(table.num_centroids);
    for (std::size_t c = 0; c < table.num_centroids; ++c) {
        keep[c] = table.per_centroid_max[c] >= t_cs ? 1 : 0;
    }
    return keep;
}

CandidateSet centroid_interaction(const CandidateSet& candidates, const CompressedIndex& index,
                                  const CentroidScoreTable& table,
                                  const std::vector<std::uint8_t>* mask, int threads,
                                  std::uint64_t* rows_gathered) {
    if (candidates.empty()) {
        throw_error(ErrorCode::InvalidParams, "centroid interaction requires candidates");
    }
    const std::size_t nq = table.num_query_tokens;
    CandidateSet out;
    out.passage_ids = candidates.passage_ids;
    out.scores.emplace(candidates.size(), 0.0f);
    std::atomic<std::uint64_t> gathered{0};

    parallel_for(candidates.size(), threads, [&](std::size_t begin, std::size_t end) {
        std::vector<float> acc(nq);
        std::uint64_t local_rows = 0;
        for (std::size_t i = begin; i < end; ++i) {
            const std::uint32_t pid = candidates.passage_ids[i];
            auto codes = index.passage_codes(pid);
            std::fill(acc.begin(), acc.end(), -std::numeric_limits<float>::infinity());
            std::size_t used = 0;
            for (std::uint32_t code : codes) {
                if (mask && !(*mask)[code]) continue;
                const float* row = table.row(code);
                for (std::size_t j = 0; j < nq; ++j) {
                    if (row[j] > acc[j]) acc[j] = row[j];
                }
                ++used;
            }
            local_rows += used;
            float total = 0.0f;
            if (used > 0) {
                for (std::size_t j = 0; j < nq; ++j) total += acc[j];
            }
            (*out.scores)[i] = total;
        }
        gathered.fetch_add(local_rows, std::memory_order_relaxed);
    });
    if (rows_gathered) *rows_gathered = gathered.load();
    return out;
}

CandidateSet select_top(const CandidateSet& scored, std::size_t n) {
    if (n < 1) throw_error(ErrorCode::InvalidParams, "selection width must be >= 1");
    if (!scored.scores) {
        throw_error(ErrorCode::InvalidParams, "select_top requires scored candidates");
    }
    const auto& scores = *scored.scores;
    std::vector<std::uint32_t> order(scored.size());
    std::iota(order.begin(), order.end(), 0);
    auto better = [&](std::uint32_t a, std::uint32_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return scored.passage_ids[a] < scored.passage_ids[b];
    };
    std::size_t keep = std::min(n, order.size());
    std::partial_sort(order.begin(), order.begin() + keep, order.end(), better);

    CandidateSet out;
    out.passage_ids.reserve(keep);
    out.scores.emplace();
    out.scores->reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        out.passage_ids.push_back(scored.passage_ids[order[i]]);
        out.scores->push_back(scores[order[i]]);
    }
    return out;
}

CandidateSet rank_final(const CandidateSet& candidates, const CompressedIndex& index,
                        const QueryMatrix& q, std::size_t k, int threads, StageTrace* trace) {
    if (candidates.empty()) {
        throw_error(ErrorCode::InvalidParams, "final ranking requires candidates");
    }
    const std::size_t dim = index.dim;
    const std::size_t stride = index.residual_bytes_per_token();
    const std::size_t n = candidates.size();

    // Lookup: gather each candidate's compressed rows into packed buffers.
    auto t_lookup = Clock::now();
    std::vector<std::uint32_t> lens(n);
    for (std::size_t i = 0; i < n; ++i) lens[i] = index.doclens[candidates.passage_ids[i]];
    std::vector<std::uint64_t> offsets = prefix_offsets(lens);
    const std::size_t total_tokens = offsets.back();
    std::vector<std::uint32_t> packed_codes(total_tokens);
    std::vector<std::uint8_t> packed_residuals(total_tokens * stride);
    auto residual_view = index.residuals.view();
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::uint32_t pid = candidates.passage_ids[i];
            const std::uint64_t src = index.passage_offsets[pid];
            std::memcpy(packed_codes.data() + offsets[i], index.codes.data() + src,
                        lens[i] * sizeof(std::uint32_t));
            std::memcpy(packed_residuals.data() + offsets[i] * stride,
                        residual_view.data() + src * stride, std::size_t(lens[i]) * stride);
        }
    });
    double lookup_ms = ms_since(t_lookup);

    // Decompression: parallel at passage granularity.
    auto t_decompress = Clock::now();
    std::vector<float> embeddings(total_tokens * dim);
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            std::span<const std::uint32_t> codes(packed_codes.data() + offsets[i], lens[i]);
            std::span<const std::uint8_t> res(packed_residuals.data() + offsets[i] * stride,
                                              std::size_t(lens[i]) * stride);
            std::span<float> out(embeddings.data() + offsets[i] * dim, std::size_t(lens[i]) * dim);
            reconstruct(codes, res, index.centroids, index.quantizer, index.lut, out, 1);
        }
    });
    double decompression_ms = ms_since(t_decompress);

    // Scoring: padding-free MaxSim over the reconstructed rows.
    auto t_score = Clock::now();
    std::vector<float> scores = maxsim_embeddings(q, embeddings, offsets, threads);
    CandidateSet scored;
    scored.passage_ids = candidates.passage_ids;
    scored.scores = std::move(scores);
    CandidateSet top = select_top(scored, k);
    double scoring_ms = ms_since(t_score);

    if (trace) {
        trace->lookup_ms += lookup_ms;
        trace->decompression_ms += decompression_ms;
        trace->scoring_ms += scoring_ms;
        trace->decompressed_passages += n;
    }
    return top;
}

std::size_t stage3_width(const SearchParams& params) {
    std::size_t quarter = (params.ndocs + 3) / 4;
    return std::max(quarter, params.k);
}

SearchResult search(const CompressedIndex& index, const QueryMatrix& q,
                    const SearchParams& params, const SearchOptions& options) {
    validate_query(q, index.dim);
    validate_params(params, index.centroids.num_centroids);

    SearchResult result;
    StageTrace& trace = result.trace;
    auto t_total = Clock::now();

    // Stage 1: centroid scores (computed once) and candidate generation.
    auto t_stage1 = Clock::now();
    CentroidScoreTable table = compute_centroid_scores(q, index.centroids, options.threads);
    trace.centroid_matmul_count = 1;
    CandidateSet candidates =
        generate_candidates(table, index.ivf, params.nprobe, index.num_passages());
    trace.candidate_generation_ms = ms_since(t_stage1);
    trace.stage1_candidates = candidates.size();
    if (candidates.empty()) {
        trace.total_ms = ms_since(t_total);
        return result;
    }

    CandidateSet finalists;
    if (options.disable_filter) {
        finalists = std::move(candidates);
        trace.stage2_out = finalists.size();
        trace.stage3_out = finalists.size();
    } else {
        // Stage 2: pruned centroid interaction, keep ndocs.
        auto t_stage2 = Clock::now();
        std::vector<std::uint8_t> mask = prune_centroids(table, params.t_cs);
        CandidateSet scored2 = centroid_interaction(candidates, index, table, &mask,
                                                    options.threads, &trace.stage2_rows_gathered);
        CandidateSet kept2 = select_top(scored2, params.ndocs);
        trace.stage2_ms = ms_since(t_stage2);
        trace.stage2_out = kept2.size();

        // Stage 3: full centroid interaction, keep ndocs/4 (at least k).
        auto t_stage3 = Clock::now();
        CandidateSet scored3 = centroid_interaction(kept2, index, table, nullptr, options.threads,
                                                    &trace.stage3_rows_gathered);
        finalists = select_top(scored3, stage3_width(params));
        trace.stage3_ms = ms_since(t_stage3);
        trace.stage3_out = finalists.size();
    }

    // Stage 4: exact re-ranking over reconstructed embeddings.
    result.topk = rank_final(finalists, index, q, params.k, options.threads, &trace);
    trace.final_out = result.topk.size();
    trace.total_ms = ms_since(t_total);
    return result;
}

} // namespace lir
