#pragma once

#include "mcca/covariance.hpp"

namespace mcca {

struct EigResult {
    std::vector<double> values; // sorted descending
    DenseMatrix vectors;        // orthonormal columns, same order as values
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps stop once the off-diagonal Frobenius norm drops below
/// tol * ||A||_F. Eigenvalues are returned descending; each eigenvector is
/// signed so its largest-magnitude entry (first on ties) is positive, which
/// makes the output deterministic.
EigResult sym_eig(const SymmetricMatrix& s, double tol = 1e-12);

} // namespace mcca
