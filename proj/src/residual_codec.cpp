#include "lir/residual_codec.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lir/parallel.hpp"

namespace lir {

bool nbits_supported(std::uint32_t nbits) {
    return nbits == 1 || nbits == 2 || nbits == 4;
}

void validate_quantizer(const QuantizerSpec& quant) {
    if (!nbits_supported(quant.nbits)) {
        throw_error(ErrorCode::InvariantViolation,
                    "quantizer nbits " + std::to_string(quant.nbits) + " not in {1,2,4}");
    }
    std::size_t buckets = std::size_t(1) << quant.nbits;
    if (quant.bucket_weights.size() != buckets || quant.bucket_cutoffs.size() != buckets - 1) {
        throw_error(ErrorCode::InvariantViolation, "quantizer cutoff/weight counts mismatch nbits");
    }
    // Strictly ascending in the regular case; equal cutoffs are allowed so a
    // degenerate (zero-width) spec from constant residuals stays loadable.
    for (std::size_t i = 1; i < quant.bucket_cutoffs.size(); ++i) {
        if (quant.bucket_cutoffs[i] < quant.bucket_cutoffs[i - 1]) {
            throw_error(ErrorCode::InvariantViolation, "quantizer cutoffs not ascending");
        }
    }
    for (std::size_t i = 0; i < buckets; ++i) {
        float lo = i == 0 ? -std::numeric_limits<float>::infinity() : quant.bucket_cutoffs[i - 1];
        float hi = i + 1 == buckets ? std::numeric_limits<float>::infinity() : quant.bucket_cutoffs[i];
        float w = quant.bucket_weights[i];
        if (!(w >= lo && w <= hi)) {
            throw_error(ErrorCode::InvariantViolation,
                        "quantizer weight " + std::to_string(i) + " outside its bucket interval");
        }
    }
}

DecompressionLUT DecompressionLUT::build(std::uint32_t nbits) {
    if (!nbits_supported(nbits)) {
        throw_error(ErrorCode::PackingUnsupported,
                    "nbits " + std::to_string(nbits) + " not in {1,2,4}");
    }
    DecompressionLUT lut;
    lut.nbits = nbits;
    lut.indices_per_byte = 8 / nbits;
    lut.table.resize(std::size_t(256) * lut.indices_per_byte);
    std::uint8_t mask = static_cast<std::uint8_t>((1u << nbits) - 1);
    for (unsigned v = 0; v < 256; ++v) {
        for (std::uint32_t j = 0; j < lut.indices_per_byte; ++j) {
            lut.table[std::size_t(v) * lut.indices_per_byte + j] =
                static_cast<std::uint8_t>((v >> (nbits * j)) & mask);
        }
    }
    return lut;
}

std::vector<std::uint8_t> pack_residual(std::span<const std::uint8_t> bucket_indices,
                                        std::uint32_t nbits) {
    if (!nbits_supported(nbits)) {
        throw_error(ErrorCode::PackingUnsupported,
                    "nbits " + std::to_string(nbits) + " not in {1,2,4}");
    }
    std::uint32_t per_byte = 8 / nbits;
    if (bucket_indices.size() % per_byte != 0) {
        throw_error(ErrorCode::LengthNotPackable,
                    std::to_string(bucket_indices.size()) + " indices not divisible by " +
                        std::to_string(per_byte));
    }
    std::uint32_t limit = 1u << nbits;
    std::vector<std::uint8_t> packed(bucket_indices.size() / per_byte, 0);
    for (std::size_t i = 0; i < bucket_indices.size(); ++i) {
        std::uint8_t idx = bucket_indices[i];
        if (idx >= limit) {
            throw_error(ErrorCode::IndexOutOfRange,
                        "bucket index " + std::to_string(idx) + " >= " + std::to_string(limit));
        }
        packed[i / per_byte] |= static_cast<std::uint8_t>(idx << (nbits * (i % per_byte)));
    }
    return packed;
}

std::vector<std::uint8_t> unpack_via_lut(std::span<const std::uint8_t> packed,
                                         const DecompressionLUT& lut) {
    std::vector<std::uint8_t> indices(packed.size() * lut.indices_per_byte);
    std::uint8_t* out = indices.data();
    for (std::uint8_t byte : packed) {
        const std::uint8_t* row = lut.row(byte);
        for (std::uint32_t j = 0; j < lut.indices_per_byte; ++j) *out++ = row[j];
    }
    return indices;
}

void reconstruct(std::span<const std::uint32_t> codes, std::span<const std::uint8_t> residuals,
                 const CentroidSet& centroids, const QuantizerSpec& quant,
                 const DecompressionLUT& lut, std::span<float> out, int threads) {
    const std::size_t dim = centroids.dim;
    const std::size_t bytes_per_token = std::size_t(quant.nbits) * dim / 8;
    if (quant.nbits != lut.nbits) {
        throw_error(ErrorCode::DimensionMismatch, "quantizer nbits does not match LUT nbits");
    }
    if (residuals.size() != codes.size() * bytes_per_token) {
        throw_error(ErrorCode::LengthMismatch, "residual byte count does not match codes x dim");
    }
    if (out.size() != codes.size() * dim) {
        throw_error(ErrorCode::LengthMismatch, "output size does not match codes x dim");
    }
    const float* weights = quant.bucket_weights.data();
    parallel_for(codes.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const float* centroid = centroids.row(codes[t]);
            const std::uint8_t* bytes = residuals.data() + t * bytes_per_token;
            float* v = out.data() + t * dim;
            std::size_t d = 0;
            for (std::size_t b = 0; b < bytes_per_token; ++b) {
                const std::uint8_t* row = lut.row(bytes[b]);
                for (std::uint32_t j = 0; j < lut.indices_per_byte; ++j, ++d) {
                    v[d] = centroid[d] + weights[row[j]];
                }
            }
            double norm_sq = 0.0;
            for (std::size_t i = 0; i < dim; ++i) norm_sq += double(v[i]) * double(v[i]);
            if (norm_sq > 0.0) {
                float inv = static_cast<float>(1.0 / std::sqrt(norm_sq));
                for (std::size_t i = 0; i < dim; ++i) v[i] *= inv;
            }
        }
    });
}

} // namespace lir
