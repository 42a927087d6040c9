#include "mcca/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "mcca/errors.hpp"

namespace mcca {

namespace {

void check_ranks(const ModeCovariances& cov, const std::vector<std::size_t>& ranks) {
    if (cov.group_count() == 0) throw InvalidInput("solver: no groups");
    if (ranks.size() != cov.mode_count())
        throw InvalidInput("solver: rank list length does not match mode count");
    for (std::size_t k = 0; k < ranks.size(); ++k)
        if (ranks[k] == 0 || ranks[k] > cov.shape[k])
            throw InvalidInput("solver: rank out of range for mode " + std::to_string(k + 1));
}

// Eigenvalues of S^(j) S^(j) as squares of the eigenvalues of S^(j),
// sorted descending.
std::vector<double> squared_spectrum(const SymmetricMatrix& s, double eig_tol) {
    auto eig = sym_eig(s, eig_tol);
    for (double& v : eig.values) v = v * v;
    std::sort(eig.values.begin(), eig.values.end(), std::greater<>());
    return eig.values;
}

DenseMatrix leading_columns(const DenseMatrix& m, std::size_t r) {
    DenseMatrix out(m.rows, r);
    std::copy(m.data.begin(), m.data.begin() + static_cast<std::ptrdiff_t>(m.rows * r),
              out.data.begin());
    return out;
}

// tr{(V^T S V)^2} for one (g, j) factor.
double trace_factor(const DenseMatrix& v, const SymmetricMatrix& s) {
    const DenseMatrix t = matmul(matmul(v.transposed(), s.as_matrix()), v);
    double acc = 0.0;
    for (std::size_t j = 0; j < t.cols; ++j)
        for (std::size_t i = 0; i < t.rows; ++i) acc += t(i, j) * t(j, i);
    return acc;
}

void refresh_latent(MccaModel& model, const ModeCovariances& cov, std::size_t k) {
    for (std::size_t g = 0; g < cov.group_count(); ++g) {
        const DenseMatrix lam =
            matmul(matmul(model.basis[k].transposed(), cov.covs[g][k].as_matrix()),
                   model.basis[k]);
        model.latent[g][k] = SymmetricMatrix::symmetrize(lam);
    }
}

bool near_degenerate_boundary(const std::vector<double>& eigvals, std::size_t r) {
    if (r >= eigvals.size()) return false;
    const double scale = std::max(std::fabs(eigvals.front()), 1.0);
    return std::fabs(eigvals[r - 1] - eigvals[r]) <= 1e-10 * scale;
}

} // namespace

double init_weight_tilde(const ModeCovariances& cov, std::size_t k,
                         const std::vector<std::size_t>& ranks, std::size_t g, double eig_tol) {
    check_ranks(cov, ranks);
    if (k >= cov.mode_count()) throw InvalidInput("init_weight_tilde: mode out of range");
    double w = 1.0;
    for (std::size_t j = 0; j < cov.mode_count(); ++j) {
        if (j == k) continue;
        const auto sq = squared_spectrum(cov.covs[g][j], eig_tol);
        double sum = 0.0;
        for (std::size_t i = 0; i < ranks[j]; ++i) sum += sq[i];
        w *= sum;
    }
    return w;
}

InitBasis init_basis(const ModeCovariances& cov, std::size_t k,
                     const std::vector<std::size_t>& ranks, double eig_tol) {
    check_ranks(cov, ranks);
    if (k >= cov.mode_count()) throw InvalidInput("init_basis: mode out of range");

    const std::size_t pk = cov.shape[k];
    DenseMatrix acc(pk, pk);
    for (std::size_t g = 0; g < cov.group_count(); ++g) {
        const double w = init_weight_tilde(cov, k, ranks, g, eig_tol);
        const DenseMatrix s = cov.covs[g][k].as_matrix();
        const DenseMatrix ss = matmul(s, s);
        for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += w * ss.data[i];
    }
    const SymmetricMatrix m_tilde = SymmetricMatrix::symmetrize(acc);

    const auto eig = sym_eig(m_tilde, eig_tol);
    InitBasis out;
    out.v0 = leading_columns(eig.vectors, ranks[k]);
    out.f_tilde_max = 0.0;
    for (std::size_t i = 0; i < ranks[k]; ++i) out.f_tilde_max += eig.values[i];

    const double total = m_tilde.trace();
    out.alpha = (total > 0.0) ? out.f_tilde_max / total : 1.0;
    out.alpha = std::min(std::max(out.alpha, 0.0), 1.0);
    if (ranks[k] == pk) out.alpha = 1.0;
    return out;
}

double weight(const MccaModel& model, const ModeCovariances& cov, std::size_t g, std::size_t k) {
    double w = 1.0;
    for (std::size_t j = 0; j < cov.mode_count(); ++j) {
        if (j == k) continue;
        w *= trace_factor(model.basis[j], cov.covs[g][j]);
    }
    return w;
}

SymmetricMatrix m_matrix(const MccaModel& model, const ModeCovariances& cov, std::size_t k) {
    const std::size_t pk = cov.shape[k];
    DenseMatrix acc(pk, pk);
    for (std::size_t g = 0; g < cov.group_count(); ++g) {
        const double w = weight(model, cov, g, k);
        // S V V^T S = (S V)(S V)^T
        const DenseMatrix b = matmul(cov.covs[g][k].as_matrix(), model.basis[k]);
        for (std::size_t c = 0; c < b.cols; ++c)
            for (std::size_t j = 0; j < pk; ++j) {
                const double bjc = b(j, c);
                for (std::size_t i = j; i < pk; ++i) acc(i, j) += w * b(i, c) * bjc;
            }
    }
    return SymmetricMatrix::from_lower(acc);
}

double objective_mode(const MccaModel& model, const ModeCovariances& cov, std::size_t k) {
    const SymmetricMatrix m = m_matrix(model, cov, k);
    const DenseMatrix t =
        matmul(matmul(model.basis[k].transposed(), m.as_matrix()), model.basis[k]);
    double tr = 0.0;
    for (std::size_t i = 0; i < t.rows; ++i) tr += t(i, i);
    return tr;
}

double objective_total(const MccaModel& model, const ModeCovariances& cov) {
    double total = 0.0;
    for (std::size_t g = 0; g < cov.group_count(); ++g) {
        double prod = 1.0;
        for (std::size_t k = 0; k < cov.mode_count(); ++k)
            prod *= trace_factor(model.basis[k], cov.covs[g][k]);
        total += prod;
    }
    return total;
}

void update_step(MccaModel& model, const ModeCovariances& cov, std::size_t k, double eig_tol) {
    const SymmetricMatrix m = m_matrix(model, cov, k);
    const auto eig = sym_eig(m, eig_tol);
    model.basis[k] = leading_columns(eig.vectors, model.ranks[k]);
    refresh_latent(model, cov, k);
}

std::pair<MccaModel, FitReport> fit(const ModeCovariances& cov, const FitConfig& config) {
    check_ranks(cov, config.ranks);
    if (config.tol <= 0.0) throw InvalidInput("fit: tolerance must be positive");
    if (config.max_iter < 1) throw InvalidInput("fit: max iterations must be >= 1");
    for (const auto& per_group : cov.covs)
        for (const auto& s : per_group)
            for (double x : s.data)
                if (!std::isfinite(x)) throw NumericalError("fit: non-finite covariance input");

    const std::size_t modes = cov.mode_count();
    MccaModel model;
    model.ranks = config.ranks;
    model.basis.resize(modes);
    model.alpha.resize(modes);
    model.latent.assign(cov.group_count(), std::vector<SymmetricMatrix>(modes));

    FitReport report;
    report.alpha.resize(modes);
    report.lower_bound.resize(modes);
    report.upper_bound.resize(modes);

    for (std::size_t k = 0; k < modes; ++k) {
        const InitBasis init = init_basis(cov, k, config.ranks, config.eig_tol);
        model.basis[k] = init.v0;
        model.alpha[k] = init.alpha;
        report.alpha[k] = init.alpha;
        report.upper_bound[k] = init.f_tilde_max;
        report.lower_bound[k] = init.alpha * init.f_tilde_max;
    }
    for (std::size_t k = 0; k < modes; ++k) refresh_latent(model, cov, k);

    report.objective.push_back(objective_total(model, cov));
    for (int iter = 1; iter <= config.max_iter; ++iter) {
        for (std::size_t k = 0; k < modes; ++k) {
            const SymmetricMatrix m = m_matrix(model, cov, k);
            const auto eig = sym_eig(m, config.eig_tol);
            if (near_degenerate_boundary(eig.values, model.ranks[k]))
                report.degenerate_spectrum = true;
            model.basis[k] = leading_columns(eig.vectors, model.ranks[k]);
            refresh_latent(model, cov, k);
        }
        const double prev = report.objective.back();
        const double cur = objective_total(model, cov);
        report.objective.push_back(cur);
        report.iterations = iter;
        if (std::fabs(cur - prev) < config.tol * std::max(std::fabs(prev), 1e-300)) {
            report.converged = true;
            break;
        }
    }
    return {std::move(model), std::move(report)};
}

std::pair<MccaModel, FitReport> fit(const GroupedDataset& data, const FitConfig& config) {
    return fit(mode_covariances(data), config);
}

std::vector<double> contraction_ratios(const ModeCovariances& cov,
                                       const std::vector<std::size_t>& ranks, double eig_tol) {
    check_ranks(cov, ranks);
    std::vector<double> out(cov.mode_count());
    for (std::size_t k = 0; k < cov.mode_count(); ++k)
        out[k] = init_basis(cov, k, ranks, eig_tol).alpha;
    return out;
}

} // namespace mcca
