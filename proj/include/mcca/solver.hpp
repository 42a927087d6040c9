#pragma once

#include "mcca/covariance.hpp"
#include "mcca/eig.hpp"

namespace mcca {

struct FitConfig {
    std::vector<std::size_t> ranks; // R_k per mode
    double tol = 1e-8;              // relative objective change
    int max_iter = 100;
    double eig_tol = 1e-12;
};

/// Shared mode-wise bases with per-group latent covariances.
struct MccaModel {
    std::vector<DenseMatrix> basis;                   // V^(k), P_k x R_k
    std::vector<std::vector<SymmetricMatrix>> latent; // latent[g][k] = V^T S V
    std::vector<std::size_t> ranks;
    std::vector<double> alpha; // contraction ratio per mode, set at init

    std::size_t mode_count() const { return basis.size(); }
};

struct FitReport {
    std::vector<double> objective; // total objective per iteration, entry 0 at init
    std::vector<double> alpha;
    std::vector<double> lower_bound; // alpha^(k) * f~'max per mode
    std::vector<double> upper_bound; // f~'max per mode
    bool converged = false;
    int iterations = 0;
    bool degenerate_spectrum = false; // rank boundary hit a (near-)tied eigenvalue
};

/// Initialization weight w~_(g)^(-k): product over j != k of the top-R_j
/// sums of eigenvalues of S^(j) S^(j). Empty product (M = 1) is 1.
double init_weight_tilde(const ModeCovariances& cov, std::size_t k,
                         const std::vector<std::size_t>& ranks, std::size_t g,
                         double eig_tol = 1e-12);

struct InitBasis {
    DenseMatrix v0;
    double f_tilde_max = 0.0;
    double alpha = 0.0;
};

/// Surrogate initialization for mode k: top-R_k eigenvectors of
/// M~(I) = sum_g w~ S S, with f~'max and the contraction ratio alpha.
InitBasis init_basis(const ModeCovariances& cov, std::size_t k,
                     const std::vector<std::size_t>& ranks, double eig_tol = 1e-12);

/// Iteration weight w_(g)^(-k): product over j != k of tr{(V^T S V)^2}.
double weight(const MccaModel& model, const ModeCovariances& cov, std::size_t g, std::size_t k);

/// M(V^(k)) = sum_g w_(g)^(-k) S V V^T S.
SymmetricMatrix m_matrix(const MccaModel& model, const ModeCovariances& cov, std::size_t k);

/// Per-mode objective tr{V^T M(V) V}; equals the total for every k.
double objective_mode(const MccaModel& model, const ModeCovariances& cov, std::size_t k);

/// Total objective: sum_g prod_k tr{(V^(k)T S_(g)^(k) V^(k))^2}.
double objective_total(const MccaModel& model, const ModeCovariances& cov);

/// One surrogate step for mode k: replaces V^(k) with the top-R_k
/// eigenvectors of M(V^(k)) and refreshes the mode-k latent covariances.
void update_step(MccaModel& model, const ModeCovariances& cov, std::size_t k,
                 double eig_tol = 1e-12);

std::pair<MccaModel, FitReport> fit(const ModeCovariances& cov, const FitConfig& config);
std::pair<MccaModel, FitReport> fit(const GroupedDataset& data, const FitConfig& config);

/// Contraction ratios alpha^(k) for every mode, without fitting.
std::vector<double> contraction_ratios(const ModeCovariances& cov,
                                       const std::vector<std::size_t>& ranks,
                                       double eig_tol = 1e-12);

} // namespace mcca
