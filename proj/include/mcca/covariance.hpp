#pragma once

#include <cstddef>
#include <vector>

#include "mcca/tensor.hpp"

namespace mcca {

/// Symmetric matrix, stored full but built from one triangle so symmetry is
/// exact by construction.
struct SymmetricMatrix {
    std::size_t dim = 0;
    std::vector<double> data; // column-major full storage

    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t n) : dim(n), data(n * n, 0.0) {}

    double operator()(std::size_t i, std::size_t j) const { return data[i + j * dim]; }

    /// Sets entry (i,j) and mirrors it to (j,i).
    void set(std::size_t i, std::size_t j, double v) {
        data[i + j * dim] = v;
        data[j + i * dim] = v;
    }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < dim; ++i) t += (*this)(i, i);
        return t;
    }

    DenseMatrix as_matrix() const;
    /// Builds from an arbitrary square matrix by averaging with its transpose.
    static SymmetricMatrix symmetrize(const DenseMatrix& m);
    /// Builds from the lower triangle of m; upper triangle of m is ignored.
    static SymmetricMatrix from_lower(const DenseMatrix& m);

    bool operator==(const SymmetricMatrix&) const = default;
};

/// G groups of equal-shape tensor samples.
struct GroupedDataset {
    std::vector<std::vector<DenseTensor>> groups;

    std::size_t group_count() const { return groups.size(); }
    const std::vector<std::size_t>& shape() const { return groups.front().front().shape; }
    std::size_t total_samples() const;

    /// Checks G >= 1, all N_g >= 1, and a single common sample shape.
    void validate() const;
};

/// Per-group, per-mode sample covariances S_(g)^(k); covs[g][k] has dim P_k.
struct ModeCovariances {
    std::vector<std::size_t> shape;
    std::vector<std::vector<SymmetricMatrix>> covs;

    std::size_t group_count() const { return covs.size(); }
    std::size_t mode_count() const { return shape.size(); }
};

DenseTensor mean_tensor(const std::vector<DenseTensor>& group);

/// Mode-k sample covariance with the 1/(N_g prod_{j!=k} P_j) normalizer,
/// accumulated from centered unfoldings sample by sample.
SymmetricMatrix mode_covariance(const std::vector<DenseTensor>& group, std::size_t k);

ModeCovariances mode_covariances(const GroupedDataset& data);

/// Full Kronecker covariance S* = S^(1) x S^(2) x ... x S^(M), mode 1
/// leftmost. Guarded: refuses to materialize beyond `cap` rows.
SymmetricMatrix full_covariance(const ModeCovariances& cov, std::size_t g, std::size_t cap = 4096);

} // namespace mcca
