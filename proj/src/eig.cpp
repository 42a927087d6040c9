#include "mcca/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mcca/errors.hpp"

namespace mcca {

namespace {

double off_diagonal_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j)
        for (std::size_t i = 0; i < a.rows; ++i)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

double frobenius(const DenseMatrix& a) {
    double s = 0.0;
    for (double x : a.data) s += x * x;
    return std::sqrt(s);
}

} // namespace

EigResult sym_eig(const SymmetricMatrix& s, double tol) {
    const std::size_t n = s.dim;
    for (double x : s.data)
        if (!std::isfinite(x)) throw NumericalError("sym_eig: non-finite input");

    DenseMatrix a = s.as_matrix();
    DenseMatrix v = DenseMatrix::identity(n);
    const double scale = frobenius(a);
    const double threshold = tol * scale;

    constexpr int kMaxSweeps = 100;
    if (scale > 0.0) {
        int sweep = 0;
        while (off_diagonal_norm(a) > threshold) {
            if (++sweep > kMaxSweeps)
                throw NumericalError("sym_eig: Jacobi iteration did not converge");
            for (std::size_t p = 0; p + 1 < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q) {
                    const double apq = a(p, q);
                    if (apq == 0.0) continue;
                    // Jacobi rotation zeroing a(p,q)
                    const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                    const double t = (theta >= 0.0)
                                         ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                         : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
                    const double c = 1.0 / std::sqrt(1.0 + t * t);
                    const double sn = t * c;
                    for (std::size_t i = 0; i < n; ++i) {
                        const double aip = a(i, p), aiq = a(i, q);
                        a(i, p) = c * aip - sn * aiq;
                        a(i, q) = sn * aip + c * aiq;
                    }
                    for (std::size_t j = 0; j < n; ++j) {
                        const double apj = a(p, j), aqj = a(q, j);
                        a(p, j) = c * apj - sn * aqj;
                        a(q, j) = sn * apj + c * aqj;
                    }
                    for (std::size_t i = 0; i < n; ++i) {
                        const double vip = v(i, p), viq = v(i, q);
                        v(i, p) = c * vip - sn * viq;
                        v(i, q) = sn * vip + c * viq;
                    }
                }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    EigResult out;
    out.values.resize(n);
    out.vectors = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.values[j] = a(src, src);
        // sign convention: largest-magnitude entry positive, first on ties
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double m = std::fabs(v(i, src));
            if (m > best) {
                best = m;
                arg = i;
            }
        }
        const double sign = (v(arg, src) < 0.0) ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = sign * v(i, src);
    }
    return out;
}

} // namespace mcca
