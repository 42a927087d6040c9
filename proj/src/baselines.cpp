#include "mcca/baselines.hpp"

#include <cmath>
#include <string>

#include "mcca/errors.hpp"

namespace mcca {

std::string method_name(Method m) {
    switch (m) {
    case Method::Mcca: return "mcca";
    case Method::Pca: return "pca";
    case Method::Cca: return "cca";
    case Method::Mpca: return "mpca";
    }
    return "unknown";
}

Method method_from_name(const std::string& name) {
    if (name == "mcca") return Method::Mcca;
    if (name == "pca") return Method::Pca;
    if (name == "cca") return Method::Cca;
    if (name == "mpca") return Method::Mpca;
    throw InvalidInput("unknown method: " + name);
}

namespace {

DenseTensor vectorize(const DenseTensor& t) {
    return DenseTensor({t.size()}, t.data);
}

std::vector<DenseTensor> pooled_vectors(const GroupedDataset& data) {
    std::vector<DenseTensor> out;
    out.reserve(data.total_samples());
    for (const auto& g : data.groups)
        for (const auto& t : g) out.push_back(vectorize(t));
    return out;
}

} // namespace

LinearModel pca_fit(const GroupedDataset& data, std::size_t rank, std::size_t dim_cap) {
    data.validate();
    const std::size_t dim = shape_product(data.shape());
    if (dim > dim_cap) throw InvalidInput("pca_fit: vectorized dimension exceeds cap");
    if (rank == 0 || rank > dim) throw InvalidInput("pca_fit: rank out of range");

    const SymmetricMatrix cov = mode_covariance(pooled_vectors(data), 0);
    const auto eig = sym_eig(cov);

    LinearModel model;
    model.tag = Method::Pca;
    model.dim = dim;
    model.basis = DenseMatrix(dim, rank);
    for (std::size_t j = 0; j < rank; ++j)
        for (std::size_t i = 0; i < dim; ++i) model.basis(i, j) = eig.vectors(i, j);
    return model;
}

std::pair<LinearModel, FitReport> cca_fit(const GroupedDataset& data, std::size_t rank,
                                          const FitConfig& config, std::size_t dim_cap) {
    data.validate();
    const std::size_t dim = shape_product(data.shape());
    if (dim > dim_cap) throw InvalidInput("cca_fit: vectorized dimension exceeds cap");
    if (rank == 0 || rank > dim) throw InvalidInput("cca_fit: rank out of range");

    GroupedDataset vec;
    vec.groups.reserve(data.group_count());
    for (const auto& g : data.groups) {
        std::vector<DenseTensor> samples;
        samples.reserve(g.size());
        for (const auto& t : g) samples.push_back(vectorize(t));
        vec.groups.push_back(std::move(samples));
    }

    FitConfig cfg = config;
    cfg.ranks = {rank};
    auto [model, report] = fit(vec, cfg);

    LinearModel out;
    out.tag = Method::Cca;
    out.dim = dim;
    out.basis = model.basis[0];
    return {std::move(out), std::move(report)};
}

MpcaModel mpca_fit(const GroupedDataset& data, const std::vector<std::size_t>& ranks,
                   const FitConfig& config) {
    data.validate();
    const auto& shape = data.shape();
    const std::size_t modes = shape.size();
    if (ranks.size() != modes) throw InvalidInput("mpca_fit: rank list length mismatch");
    for (std::size_t k = 0; k < modes; ++k)
        if (ranks[k] == 0 || ranks[k] > shape[k])
            throw InvalidInput("mpca_fit: rank out of range for mode " + std::to_string(k + 1));

    // Globally centered aggregated samples.
    std::vector<DenseTensor> samples;
    samples.reserve(data.total_samples());
    for (const auto& g : data.groups)
        for (const auto& t : g) samples.push_back(t);
    const DenseTensor mean = mean_tensor(samples);
    for (auto& t : samples)
        for (std::size_t i = 0; i < t.size(); ++i) t.data[i] -= mean.data[i];

    MpcaModel model;
    model.basis.resize(modes);

    // Initialization: full-projection truncation (other modes at identity).
    for (std::size_t k = 0; k < modes; ++k) {
        DenseMatrix acc(shape[k], shape[k]);
        for (const auto& t : samples) {
            const DenseMatrix u = unfold(t, k);
            for (std::size_t c = 0; c < u.cols; ++c)
                for (std::size_t j = 0; j < shape[k]; ++j) {
                    const double ujc = u(j, c);
                    if (ujc == 0.0) continue;
                    for (std::size_t i = j; i < shape[k]; ++i) acc(i, j) += u(i, c) * ujc;
                }
        }
        const auto eig = sym_eig(SymmetricMatrix::from_lower(acc), config.eig_tol);
        model.basis[k] = DenseMatrix(shape[k], ranks[k]);
        for (std::size_t j = 0; j < ranks[k]; ++j)
            for (std::size_t i = 0; i < shape[k]; ++i) model.basis[k](i, j) = eig.vectors(i, j);
    }

    auto projected_scatter = [&]() {
        double total = 0.0;
        for (const auto& t : samples) {
            DenseTensor core = t;
            for (std::size_t j = 0; j < modes; ++j)
                core = mode_product(core, model.basis[j].transposed(), j);
            const double n = frobenius_norm(core);
            total += n * n;
        }
        return total;
    };

    double prev = projected_scatter();
    for (int sweep = 0; sweep < config.max_iter; ++sweep) {
        for (std::size_t k = 0; k < modes; ++k) {
            // Phi^(k) = sum_i X_i^(k) (U_-k U_-k^T) X_i^(k)^T via partial projection
            DenseMatrix acc(shape[k], shape[k]);
            for (const auto& t : samples) {
                DenseTensor proj = t;
                for (std::size_t j = 0; j < modes; ++j) {
                    if (j == k) continue;
                    proj = mode_product(proj, model.basis[j].transposed(), j);
                    proj = mode_product(proj, model.basis[j], j);
                }
                const DenseMatrix up = unfold(proj, k);
                const DenseMatrix ux = unfold(t, k);
                for (std::size_t c = 0; c < up.cols; ++c)
                    for (std::size_t j = 0; j < shape[k]; ++j)
                        for (std::size_t i = 0; i < shape[k]; ++i)
                            acc(i, j) += up(i, c) * ux(j, c);
            }
            const auto eig = sym_eig(SymmetricMatrix::symmetrize(acc), config.eig_tol);
            model.basis[k] = DenseMatrix(shape[k], ranks[k]);
            for (std::size_t j = 0; j < ranks[k]; ++j)
                for (std::size_t i = 0; i < shape[k]; ++i)
                    model.basis[k](i, j) = eig.vectors(i, j);
        }
        const double cur = projected_scatter();
        const double change = std::fabs(cur - prev);
        prev = cur;
        if (change < config.tol * std::max(std::fabs(cur), 1e-300)) break;
    }
    return model;
}

} // namespace mcca
