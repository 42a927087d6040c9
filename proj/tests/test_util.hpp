#pragma once

#include <cmath>
#include <vector>

#include "mcca/covariance.hpp"
#include "mcca/synth.hpp"
#include "mcca/tensor.hpp"

namespace test_util {

inline mcca::DenseTensor random_tensor(mcca::Rng& rng, std::vector<std::size_t> shape) {
    mcca::DenseTensor t(std::move(shape));
    for (double& x : t.data) x = rng.normal();
    return t;
}

inline mcca::DenseMatrix random_matrix(mcca::Rng& rng, std::size_t rows, std::size_t cols) {
    mcca::DenseMatrix m(rows, cols);
    for (double& x : m.data) x = rng.normal();
    return m;
}

// Random PSD matrix A A^T / n.
inline mcca::SymmetricMatrix random_psd(mcca::Rng& rng, std::size_t n) {
    const auto a = random_matrix(rng, n, n);
    mcca::DenseMatrix g = mcca::matmul(a, a.transposed());
    for (double& x : g.data) x /= static_cast<double>(n);
    return mcca::SymmetricMatrix::from_lower(g);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

// max |V^T V - I|
inline double orthonormality_defect(const mcca::DenseMatrix& v) {
    const mcca::DenseMatrix g = mcca::matmul(v.transposed(), v);
    double m = 0.0;
    for (std::size_t j = 0; j < g.cols; ++j)
        for (std::size_t i = 0; i < g.rows; ++i)
            m = std::max(m, std::fabs(g(i, j) - (i == j ? 1.0 : 0.0)));
    return m;
}

inline double matrix_trace(const mcca::DenseMatrix& m) {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(m.rows, m.cols); ++i) t += m(i, i);
    return t;
}

} // namespace test_util
