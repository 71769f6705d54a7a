#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lir/mmap_file.hpp"
#include "lir/residual_codec.hpp"
#include "lir/types.hpp"

namespace lir {

// Residual bytes either owned on the heap or backed by a read-only file
// mapping (lazy-loaded indexes).
class ResidualStore {
public:
    ResidualStore() = default;

    static ResidualStore from_vector(std::vector<std::uint8_t> bytes) {
        ResidualStore store;
        store.owned_ = std::move(bytes);
        store.view_ = store.owned_;
        return store;
    }

    static ResidualStore from_mmap(MmapFile file) {
        ResidualStore store;
        store.mapped_ = std::move(file);
        store.view_ = store.mapped_.view();
        return store;
    }

    ResidualStore(ResidualStore&& other) noexcept { move_from(std::move(other)); }
    ResidualStore& operator=(ResidualStore&& other) noexcept {
        if (this != &other) move_from(std::move(other));
        return *this;
    }
    ResidualStore(const ResidualStore&) = delete;
    ResidualStore& operator=(const ResidualStore&) = delete;

    std::span<const std::uint8_t> view() const { return view_; }
    std::size_t size() const { return view_.size(); }

private:
    void move_from(ResidualStore&& other) {
        owned_ = std::move(other.owned_);
        mapped_ = std::move(other.mapped_);
        view_ = mapped_.valid() ? mapped_.view() : std::span<const std::uint8_t>(owned_);
        other.view_ = {};
    }

    std::vector<std::uint8_t> owned_;
    MmapFile mapped_;
    std::span<const std::uint8_t> view_;
};

// The immutable search artifact: centroids, per-token centroid codes, packed
// residuals, per-passage lengths, the passage-id inverted list, and the
// residual quantizer. Safe to share across concurrent searchers.
struct CompressedIndex {
    std::uint32_t dim = 0;
    std::uint32_t nbits = 0;
    std::uint64_t rng_seed = 0;

    CentroidSet centroids;
    std::vector<std::uint32_t> codes;        // per-token nearest-centroid ids
    ResidualStore residuals;                 // per-token packed b-bit buckets
    std::vector<std::uint32_t> doclens;
    std::vector<std::uint64_t> passage_offsets; // derived from doclens
    InvertedList ivf;
    QuantizerSpec quantizer;
    DecompressionLUT lut;                    // derived from nbits

    std::size_t num_passages() const { return doclens.size(); }
    std::size_t num_embeddings() const { return codes.size(); }
    std::size_t residual_bytes_per_token() const { return std::size_t(nbits) * dim / 8; }

    std::span<const std::uint8_t> passage_residuals(std::size_t p) const {
        const std::size_t stride = residual_bytes_per_token();
        return residuals.view().subspan(passage_offsets[p] * stride, doclens[p] * stride);
    }
    std::span<const std::uint32_t> passage_codes(std::size_t p) const {
        return {codes.data() + passage_offsets[p], doclens[p]};
    }
};

// Rebuilds the derived members (passage offsets, LUT) after the persisted
// arrays are in place.
void finalize_derived(CompressedIndex& index);

// Re-checks every structural invariant; throws InvariantViolation naming the
// first one that fails.
void validate_index(const CompressedIndex& index);

} // namespace lir
