#include "lir/index.hpp"

#include <string>

namespace lir {

void finalize_derived(CompressedIndex& index) {
    index.passage_offsets = prefix_offsets(index.doclens);
    index.lut = DecompressionLUT::build(index.nbits);
}

void validate_index(const CompressedIndex& index) {
    auto fail = [](const std::string& invariant) {
        throw_error(ErrorCode::InvariantViolation, invariant);
    };
    if (!nbits_supported(index.nbits)) fail("nbits must be one of {1,2,4}");
    if (index.dim == 0 || index.dim % (8 / index.nbits) != 0) {
        fail("dim must be positive and divisible by 8/nbits");
    }
    const std::size_t k = index.centroids.num_centroids;
    if (k == 0) fail("index must contain at least one centroid");
    if (index.centroids.dim != index.dim) fail("centroid dim must equal index dim");
    validate_centroids(index.centroids);

    if (index.doclens.empty()) fail("index must contain at least one passage");
    if (index.passage_offsets.size() != index.doclens.size() + 1) {
        fail("passage offsets must be a doclens prefix array");
    }
    std::uint64_t total = 0;
    for (std::size_t p = 0; p < index.doclens.size(); ++p) {
        if (index.passage_offsets[p] != total) fail("passage offsets must prefix-sum doclens");
        total += index.doclens[p];
    }
    if (index.passage_offsets.back() != total) fail("last passage offset must equal token total");
    if (index.codes.size() != total) fail("codes length must equal the doclens total");
    for (std::size_t t = 0; t < index.codes.size(); ++t) {
        if (index.codes[t] >= k) fail("token code " + std::to_string(t) + " out of centroid range");
    }
    if (index.residuals.size() != total * index.residual_bytes_per_token()) {
        fail("residual byte count must equal tokens x nbits*dim/8");
    }

    validate_quantizer(index.quantizer);
    if (index.quantizer.nbits != index.nbits) fail("quantizer nbits must equal index nbits");

    if (index.ivf.offsets.size() != k + 1) fail("inverted list must have K+1 offsets");
    if (index.ivf.offsets.front() != 0) fail("inverted list offsets must start at 0");
    for (std::size_t c = 0; c < k; ++c) {
        if (index.ivf.offsets[c + 1] < index.ivf.offsets[c]) {
            fail("inverted list offsets must be monotone");
        }
        auto postings = index.ivf.postings_for(c);
        for (std::size_t i = 0; i < postings.size(); ++i) {
            if (postings[i] >= index.num_passages()) fail("posting references unknown passage");
            if (i > 0 && postings[i] <= postings[i - 1]) {
                fail("postings must be strictly increasing within a centroid");
            }
        }
    }
    if (index.ivf.offsets.back() != index.ivf.postings.size()) {
        fail("last inverted-list offset must equal postings size");
    }

    // Content check: passage p listed under centroid c iff some token of p
    // has code c.
    std::vector<std::uint64_t> cursor(index.ivf.offsets.begin(), index.ivf.offsets.end() - 1);
    std::vector<std::uint32_t> seen_marker(k, UINT32_MAX);
    for (std::size_t p = 0; p < index.num_passages(); ++p) {
        for (std::uint32_t code : index.passage_codes(p)) {
            if (seen_marker[code] == p) continue;
            seen_marker[code] = static_cast<std::uint32_t>(p);
            std::uint64_t& pos = cursor[code];
            if (pos >= index.ivf.offsets[code + 1] || index.ivf.postings[pos] != p) {
                fail("inverted list does not match token codes");
            }
            ++pos;
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (cursor[c] != index.ivf.offsets[c + 1]) {
            fail("inverted list contains postings with no matching token code");
        }
    }
}

} // namespace lir
