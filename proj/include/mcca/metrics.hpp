#pragma once

#include <iosfwd>

#include "mcca/baselines.hpp"

namespace mcca {

struct CompressionRecord {
    Method method = Method::Mcca;
    std::vector<std::size_t> ranks;
    std::size_t params = 0;
    double cr = 0.0;
    double rer = 0.0;

    bool operator==(const CompressionRecord&) const = default;
};

/// Projection reconstruction X~ = X x_1 V_1 V_1^T ... x_M V_M V_M^T.
DenseTensor reconstruct(const std::vector<DenseMatrix>& bases, const DenseTensor& sample);
DenseTensor reconstruct(const MccaModel& model, const DenseTensor& sample);
DenseTensor reconstruct(const MpcaModel& model, const DenseTensor& sample);
/// Vector-space reconstruction X~ = vec^-1(V V^T vec(X)).
DenseTensor reconstruct(const LinearModel& model, const DenseTensor& sample);

/// Reconstruction error rate over the aggregated dataset:
/// sum ||X - X~||_F^2 / sum ||X||_F^2, all groups pooled.
double rer(const GroupedDataset& data, const MccaModel& model);
double rer(const GroupedDataset& data, const MpcaModel& model);
double rer(const GroupedDataset& data, const LinearModel& model);

/// Stored parameter count. Multilinear methods (mcca, mpca):
/// sum P_k R_k + N prod R_k. Vector methods (pca, cca): R prod P_k + N R,
/// with ranks = {R}.
std::size_t param_count(Method method, const std::vector<std::size_t>& shape,
                        const std::vector<std::size_t>& ranks, std::size_t n_samples);

/// Compression ratio: param_count / (N prod P_k). May exceed 1 at full rank.
double cr(Method method, const std::vector<std::size_t>& shape,
          const std::vector<std::size_t>& ranks, std::size_t n_samples);

/// Residual E = S - V Lambda V^T.
SymmetricMatrix residual(const SymmetricMatrix& s, const DenseMatrix& v,
                         const SymmetricMatrix& lambda);

/// Principal angles between the column spaces of A and B (orthonormal
/// columns), ascending, in radians.
std::vector<double> principal_angles(const DenseMatrix& a, const DenseMatrix& b);

/// CSV: header `method,ranks,params,cr,rer`, ranks joined with 'x',
/// reals printed with 17 significant digits.
void write_records_csv(std::ostream& os, const std::vector<CompressionRecord>& records);
std::vector<CompressionRecord> read_records_csv(std::istream& is);

std::string ranks_to_string(const std::vector<std::size_t>& ranks);
std::vector<std::size_t> ranks_from_string(const std::string& text);

} // namespace mcca
