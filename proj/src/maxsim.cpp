#include "lir/maxsim.hpp"

#include <string>

#include "lir/parallel.hpp"

namespace lir {

namespace {

void check_offsets(std::span<const std::uint64_t> offsets, std::size_t total_rows) {
    if (offsets.empty() || offsets.front() != 0) {
        throw_error(ErrorCode::InvalidParams, "offsets must start at 0");
    }
    for (std::size_t p = 0; p + 1 < offsets.size(); ++p) {
        if (offsets[p + 1] < offsets[p]) {
            throw_error(ErrorCode::InvalidParams, "offsets must be monotone");
        }
        if (offsets[p + 1] == offsets[p]) {
            throw_error(ErrorCode::EmptyPassageRange,
                        "passage " + std::to_string(p) + " has no token rows");
        }
    }
    if (offsets.back() != total_rows) {
        throw_error(ErrorCode::LengthMismatch, "last offset does not match row count");
    }
}

} // namespace

std::vector<float> maxsim_packed(const PackedScores& scores, int threads, KernelStats* stats) {
    const std::size_t nq = scores.num_query_tokens;
    if (nq == 0) throw_error(ErrorCode::InvalidParams, "need at least one query token");
    const std::size_t num_passages = scores.num_passages();
    if (scores.data.size() != scores.num_rows() * nq) {
        throw_error(ErrorCode::LengthMismatch, "score data size does not match rows x |Q|");
    }
    check_offsets(scores.offsets, scores.num_rows());

    std::vector<float> out(num_passages, 0.0f);
    if (stats) {
        stats->scratch_floats_per_worker = nq;
        stats->workers = static_cast<unsigned>(
            std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(num_passages, 1)));
    }
    parallel_for(num_passages, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<float> acc(nq); // the single per-worker accumulator
        for (std::size_t p = begin; p < end; ++p) {
            const float* row = scores.data.data() + scores.offsets[p] * nq;
            for (std::size_t i = 0; i < nq; ++i) acc[i] = row[i];
            const std::size_t len = scores.offsets[p + 1] - scores.offsets[p];
            for (std::size_t t = 1; t < len; ++t) {
                row += nq;
                for (std::size_t i = 0; i < nq; ++i) {
                    if (row[i] > acc[i]) acc[i] = row[i];
                }
            }
            float total = 0.0f;
            for (std::size_t i = 0; i < nq; ++i) total += acc[i];
            out[p] = total;
        }
    });
    return out;
}

std::vector<float> maxsim_embeddings(const QueryMatrix& q, std::span<const float> embeddings,
                                     std::span<const std::uint64_t> offsets, int threads,
                                     KernelStats* stats) {
    const std::size_t nq = q.rows;
    const std::size_t dim = q.dim;
    if (nq == 0 || dim == 0) throw_error(ErrorCode::InvalidParams, "empty query matrix");
    if (embeddings.size() % dim != 0) {
        throw_error(ErrorCode::DimensionMismatch, "embedding data size not divisible by dim");
    }
    const std::size_t total_rows = embeddings.size() / dim;
    check_offsets(offsets, total_rows);
    const std::size_t num_passages = offsets.size() - 1;

    std::vector<float> out(num_passages, 0.0f);
    if (stats) {
        stats->scratch_floats_per_worker = nq;
        stats->workers = static_cast<unsigned>(
            std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(num_passages, 1)));
    }
    parallel_for(num_passages, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<float> acc(nq);
        for (std::size_t p = begin; p < end; ++p) {
            const float* tok = embeddings.data() + offsets[p] * dim;
            for (std::size_t i = 0; i < nq; ++i) acc[i] = dot(q.row(i), tok, dim);
            const std::size_t len = offsets[p + 1] - offsets[p];
            for (std::size_t t = 1; t < len; ++t) {
                tok += dim;
                for (std::size_t i = 0; i < nq; ++i) {
                    float s = dot(q.row(i), tok, dim);
                    if (s > acc[i]) acc[i] = s;
                }
            }
            float total = 0.0f;
            for (std::size_t i = 0; i < nq; ++i) total += acc[i];
            out[p] = total;
        }
    });
    return out;
}

} // namespace lir
