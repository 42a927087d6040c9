#pragma once

#include <filesystem>

#include "mcca/baselines.hpp"

namespace mcca {

/// On-disk model container, shared by all four methods.
///
/// Layout (little-endian): magic "MCCA1", u32 method tag, u32 M, u32 G,
/// u32 ranks[M], u32 shapes[M], then the V^(k) matrices (column-major f64,
/// k ascending), then the Lambda_(g)^(k) matrices (g outer, k inner, full
/// R_k x R_k column-major f64). G = 0 when the method stores no latent
/// covariances (pca, mpca).
struct StoredModel {
    Method tag = Method::Mcca;
    std::vector<std::size_t> shape;
    std::vector<std::size_t> ranks;
    std::vector<DenseMatrix> basis;
    std::vector<std::vector<SymmetricMatrix>> latent;

    std::size_t basis_element_count() const;

    bool operator==(const StoredModel&) const = default;
};

StoredModel to_stored(const MccaModel& model, const std::vector<std::size_t>& shape);
StoredModel to_stored(const LinearModel& model);
StoredModel to_stored(const MpcaModel& model);

void write_model(const std::filesystem::path& path, const StoredModel& model);
StoredModel read_model(const std::filesystem::path& path);

/// Native tensor container: magic "MCTN1", u32 mode count, u32 extents,
/// little-endian f64 payload.
void write_tensor(const std::filesystem::path& path, const DenseTensor& t);
DenseTensor read_tensor(const std::filesystem::path& path);

} // namespace mcca
