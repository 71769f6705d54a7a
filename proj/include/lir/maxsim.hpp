#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lir/types.hpp"

namespace lir {

// Token x query score rows for many passages concatenated along the token
// dimension; offsets delimit each passage's token range.
struct PackedScores {
    std::size_t num_query_tokens = 0;
    std::vector<float> data;                // T x |Q| row-major
    std::vector<std::uint64_t> offsets;     // per-passage token ranges, P + 1

    std::size_t num_passages() const { return offsets.empty() ? 0 : offsets.size() - 1; }
    std::size_t num_rows() const { return offsets.empty() ? 0 : offsets.back(); }
};

struct KernelStats {
    std::size_t scratch_floats_per_worker = 0;
    unsigned workers = 0;
};

// Padding-free MaxSim over packed rows: out[p] = sum_i max_{t in p} scores[t][i].
// Each worker keeps one length-|Q| accumulator reused across its passages;
// no padded 3D tensor is ever materialized.
std::vector<float> maxsim_packed(const PackedScores& scores, int threads = 1,
                                 KernelStats* stats = nullptr);

// Same reduction computed from embeddings directly:
// out[p] = sum_i max_{t in p} q_i . emb_t over the packed ragged layout.
std::vector<float> maxsim_embeddings(const QueryMatrix& q, std::span<const float> embeddings,
                                     std::span<const std::uint64_t> offsets, int threads = 1,
                                     KernelStats* stats = nullptr);

} // namespace lir
