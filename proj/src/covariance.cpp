#include "mcca/covariance.hpp"

#include <cmath>
#include <string>

#include "mcca/errors.hpp"

namespace mcca {

DenseMatrix SymmetricMatrix::as_matrix() const {
    DenseMatrix m(dim, dim);
    m.data = data;
    return m;
}

SymmetricMatrix SymmetricMatrix::symmetrize(const DenseMatrix& m) {
    if (m.rows != m.cols) throw InvalidInput("symmetrize: matrix not square");
    SymmetricMatrix s(m.rows);
    for (std::size_t j = 0; j < m.cols; ++j)
        for (std::size_t i = j; i < m.rows; ++i)
            s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
    return s;
}

SymmetricMatrix SymmetricMatrix::from_lower(const DenseMatrix& m) {
    if (m.rows != m.cols) throw InvalidInput("from_lower: matrix not square");
    SymmetricMatrix s(m.rows);
    for (std::size_t j = 0; j < m.cols; ++j)
        for (std::size_t i = j; i < m.rows; ++i) s.set(i, j, m(i, j));
    return s;
}

std::size_t GroupedDataset::total_samples() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.size();
    return n;
}

void GroupedDataset::validate() const {
    if (groups.empty()) throw InvalidInput("dataset needs at least one group");
    for (const auto& g : groups)
        if (g.empty()) throw InvalidInput("every group needs at least one sample");
    const auto& s0 = groups.front().front().shape;
    for (const auto& g : groups)
        for (const auto& t : g)
            if (t.shape != s0) throw InvalidInput("samples do not share a common shape");
}

DenseTensor mean_tensor(const std::vector<DenseTensor>& group) {
    if (group.empty()) throw InvalidInput("mean_tensor: empty group");
    DenseTensor mean(group.front().shape);
    for (const auto& t : group) {
        if (t.shape != mean.shape) throw InvalidInput("mean_tensor: shape mismatch");
        for (std::size_t i = 0; i < t.size(); ++i) mean.data[i] += t.data[i];
    }
    const double inv = 1.0 / static_cast<double>(group.size());
    for (double& x : mean.data) x *= inv;
    return mean;
}

SymmetricMatrix mode_covariance(const std::vector<DenseTensor>& group, std::size_t k) {
    if (group.empty()) throw InvalidInput("mode_covariance: empty group");
    const auto& shape = group.front().shape;
    if (k >= shape.size()) throw InvalidInput("mode_covariance: mode index out of range");

    const DenseTensor mean = mean_tensor(group);
    const std::size_t pk = shape[k];
    DenseMatrix acc(pk, pk);
    for (const auto& t : group) {
        DenseTensor centered = t;
        for (std::size_t i = 0; i < centered.size(); ++i) centered.data[i] -= mean.data[i];
        const DenseMatrix u = unfold(centered, k);
        // acc += u u^T, lower triangle only
        for (std::size_t c = 0; c < u.cols; ++c)
            for (std::size_t j = 0; j < pk; ++j) {
                const double ujc = u(j, c);
                if (ujc == 0.0) continue;
                for (std::size_t i = j; i < pk; ++i) acc(i, j) += u(i, c) * ujc;
            }
    }
    const double norm =
        1.0 / (static_cast<double>(group.size()) * static_cast<double>(shape_product(shape) / pk));
    for (double& x : acc.data) x *= norm;
    return SymmetricMatrix::from_lower(acc);
}

ModeCovariances mode_covariances(const GroupedDataset& data) {
    data.validate();
    ModeCovariances out;
    out.shape = data.shape();
    out.covs.resize(data.group_count());
    for (std::size_t g = 0; g < data.group_count(); ++g) {
        out.covs[g].reserve(out.shape.size());
        for (std::size_t k = 0; k < out.shape.size(); ++k)
            out.covs[g].push_back(mode_covariance(data.groups[g], k));
    }
    return out;
}

SymmetricMatrix full_covariance(const ModeCovariances& cov, std::size_t g, std::size_t cap) {
    if (g >= cov.group_count()) throw InvalidInput("full_covariance: group index out of range");
    if (shape_product(cov.shape) > cap)
        throw InvalidInput("full_covariance: product of extents exceeds cap");
    DenseMatrix acc = cov.covs[g][0].as_matrix();
    for (std::size_t k = 1; k < cov.mode_count(); ++k)
        acc = kronecker(acc, cov.covs[g][k].as_matrix());
    return SymmetricMatrix::from_lower(acc);
}

} // namespace mcca
