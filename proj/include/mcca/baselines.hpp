#pragma once

#include <string>
#include <utility>

#include "mcca/solver.hpp"

namespace mcca {

enum class Method { Mcca, Pca, Cca, Mpca };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

/// Vector-space model: one orthonormal basis over the vectorized samples.
struct LinearModel {
    Method tag = Method::Pca;
    std::size_t dim = 0; // P = prod P_k
    DenseMatrix basis;   // P x R
};

/// Mode-wise bases without group structure (classical MPCA).
struct MpcaModel {
    std::vector<DenseMatrix> basis; // U^(k), P_k x R_k
};

/// PCA on the pooled vectorized dataset: top-R eigenvectors of the sample
/// covariance of all samples across groups.
LinearModel pca_fit(const GroupedDataset& data, std::size_t rank, std::size_t dim_cap = 4096);

/// CCA as the M = 1 configuration of the MCCA solver on per-group
/// vectorized covariances.
std::pair<LinearModel, FitReport> cca_fit(const GroupedDataset& data, std::size_t rank,
                                          const FitConfig& config, std::size_t dim_cap = 4096);

/// Classical MPCA on the aggregated (group-blind) dataset: alternating
/// full-projection truncation over modes, globally centered samples.
MpcaModel mpca_fit(const GroupedDataset& data, const std::vector<std::size_t>& ranks,
                   const FitConfig& config);

} // namespace mcca
