#include "lir/types.hpp"

#include <cmath>
#include <string>

namespace lir {

namespace {

void check_unit_rows(const float* data, std::size_t rows, std::size_t dim,
                     ErrorCode code, const char* what) {
    for (std::size_t r = 0; r < rows; ++r) {
        double norm = l2_norm(data + r * dim, dim);
        if (std::abs(norm - 1.0) > kUnitNormTolerance) {
            throw_error(code, std::string(what) + " row " + std::to_string(r) +
                                  " has L2 norm " + std::to_string(norm));
        }
    }
}

} // namespace

std::vector<std::uint64_t> prefix_offsets(std::span<const std::uint32_t> lengths) {
    std::vector<std::uint64_t> offsets(lengths.size() + 1, 0);
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        offsets[i + 1] = offsets[i] + lengths[i];
    }
    return offsets;
}

CorpusEmbeddings CorpusEmbeddings::create(std::size_t dim, std::vector<std::uint32_t> doclens,
                                          std::vector<float> data) {
    if (dim == 0) throw_error(ErrorCode::DimensionMismatch, "embedding dimension must be positive");
    CorpusEmbeddings corpus;
    corpus.dim = dim;
    corpus.num_passages = doclens.size();
    corpus.passage_offsets = prefix_offsets(doclens);
    std::uint64_t total = corpus.passage_offsets.back();
    if (data.size() != total * dim) {
        throw_error(ErrorCode::LengthMismatch,
                    "doclens sum to " + std::to_string(total) + " tokens but data holds " +
                        std::to_string(data.size() / (dim ? dim : 1)) + " rows");
    }
    check_unit_rows(data.data(), total, dim, ErrorCode::NotNormalized, "corpus");
    corpus.doclens = std::move(doclens);
    corpus.data = std::move(data);
    return corpus;
}

void validate_centroids(const CentroidSet& centroids) {
    if (centroids.num_centroids == 0) {
        throw_error(ErrorCode::InvalidParams, "centroid set must contain at least one centroid");
    }
    if (centroids.data.size() != centroids.num_centroids * centroids.dim) {
        throw_error(ErrorCode::DimensionMismatch, "centroid data size does not match K x dim");
    }
    check_unit_rows(centroids.data.data(), centroids.num_centroids, centroids.dim,
                    ErrorCode::NotNormalized, "centroid");
}

void validate_query(const QueryMatrix& q, std::size_t index_dim) {
    if (q.rows == 0) throw_error(ErrorCode::InvalidParams, "query must contain at least one token");
    if (q.dim != index_dim) {
        throw_error(ErrorCode::DimensionMismatch,
                    "query dim " + std::to_string(q.dim) + " does not match index dim " +
                        std::to_string(index_dim));
    }
    if (q.data.size() != q.rows * q.dim) {
        throw_error(ErrorCode::DimensionMismatch, "query data size does not match rows x dim");
    }
    check_unit_rows(q.data.data(), q.rows, q.dim, ErrorCode::NotNormalized, "query");
}

SearchParams default_params_for_k(std::size_t k) {
    SearchParams params;
    params.k = k;
    if (k <= 10) {
        params.nprobe = 1; params.t_cs = 0.5f; params.ndocs = 256;
    } else if (k <= 100) {
        params.nprobe = 2; params.t_cs = 0.45f; params.ndocs = 1024;
    } else {
        params.nprobe = 4; params.t_cs = 0.4f; params.ndocs = 4096;
    }
    if (params.ndocs < k) params.ndocs = k;
    return params;
}

void validate_params(const SearchParams& params, std::size_t num_centroids) {
    if (params.k < 1) throw_error(ErrorCode::InvalidParams, "k must be >= 1");
    if (params.nprobe < 1 || params.nprobe > num_centroids) {
        throw_error(ErrorCode::InvalidParams,
                    "nprobe " + std::to_string(params.nprobe) + " outside [1, " +
                        std::to_string(num_centroids) + "]");
    }
    if (params.ndocs < params.k) throw_error(ErrorCode::InvalidParams, "ndocs must be >= k");
    if (!(params.t_cs >= -1.0f && params.t_cs <= 1.0f)) {
        throw_error(ErrorCode::InvalidParams, "t_cs must lie in [-1, 1]");
    }
}

} // namespace lir
