#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lir/types.hpp"

namespace lir {

// Residual quantizer: 2^b - 1 ascending cutoffs split the pooled residual
// component distribution into 2^b buckets; each bucket reconstructs to its
// training-time mean.
struct QuantizerSpec {
    std::uint32_t nbits = 2;
    std::vector<float> bucket_cutoffs; // 2^b - 1, ascending
    std::vector<float> bucket_weights; // 2^b

    std::size_t num_buckets() const { return bucket_weights.size(); }

    // Bucket of a residual component: number of cutoffs <= x, so a component
    // equal to a cutoff lands in the bucket above it.
    std::uint32_t bucket_for(float x) const {
        std::uint32_t lo = 0, hi = static_cast<std::uint32_t>(bucket_cutoffs.size());
        while (lo < hi) {
            std::uint32_t mid = (lo + hi) / 2;
            if (bucket_cutoffs[mid] <= x) lo = mid + 1; else hi = mid;
        }
        return lo;
    }
};

void validate_quantizer(const QuantizerSpec& quant);

// Precomputed table mapping each of the 256 byte values to the 8/b bucket
// indices it packs, LSB-first.
struct DecompressionLUT {
    std::uint32_t nbits = 0;
    std::uint32_t indices_per_byte = 0;
    std::vector<std::uint8_t> table; // 256 x indices_per_byte

    static DecompressionLUT build(std::uint32_t nbits);

    const std::uint8_t* row(std::uint8_t byte) const {
        return table.data() + std::size_t(byte) * indices_per_byte;
    }
};

bool nbits_supported(std::uint32_t nbits); // {1, 2, 4}

// Packs b-bit bucket indices into bytes, LSB-first within each byte.
std::vector<std::uint8_t> pack_residual(std::span<const std::uint8_t> bucket_indices,
                                        std::uint32_t nbits);

// Unpacks via table lookup; identical output to direct bit-shift unpacking.
std::vector<std::uint8_t> unpack_via_lut(std::span<const std::uint8_t> packed,
                                         const DecompressionLUT& lut);

// Reconstructs the approximate embeddings of a compressed token run:
// v_hat = normalize(centroid[code] + bucket_weight per dimension).
// codes has one entry per token; residuals holds nbits*dim/8 bytes per token;
// out receives codes.size() x dim floats.
void reconstruct(std::span<const std::uint32_t> codes, std::span<const std::uint8_t> residuals,
                 const CentroidSet& centroids, const QuantizerSpec& quant,
                 const DecompressionLUT& lut, std::span<float> out, int threads = 1);

} // namespace lir
