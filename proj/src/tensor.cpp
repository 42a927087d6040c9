#include "mcca/tensor.hpp"

#include <cmath>
#include <string>

#include "mcca/errors.hpp"

namespace mcca {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t p = 1;
    for (std::size_t e : shape) p *= e;
    return p;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols, rows);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) t(j, i) = (*this)(i, j);
    return t;
}

DenseTensor::DenseTensor(std::vector<std::size_t> extents)
    : shape(std::move(extents)), data(shape_product(shape), 0.0) {
    if (shape.empty()) throw InvalidInput("tensor needs at least one mode");
    for (std::size_t e : shape)
        if (e == 0) throw InvalidInput("tensor extents must be positive");
}

DenseTensor::DenseTensor(std::vector<std::size_t> extents, std::vector<double> values)
    : shape(std::move(extents)), data(std::move(values)) {
    if (shape.empty()) throw InvalidInput("tensor needs at least one mode");
    for (std::size_t e : shape)
        if (e == 0) throw InvalidInput("tensor extents must be positive");
    if (data.size() != shape_product(shape))
        throw InvalidInput("tensor data length does not match shape");
}

std::size_t DenseTensor::offset(const std::vector<std::size_t>& idx) const {
    std::size_t off = 0, stride = 1;
    for (std::size_t t = 0; t < shape.size(); ++t) {
        off += idx[t] * stride;
        stride *= shape[t];
    }
    return off;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols != b.rows) throw InvalidInput("matmul: dimension mismatch");
    DenseMatrix c(a.rows, b.cols);
    for (std::size_t j = 0; j < b.cols; ++j)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double bkj = b(k, j);
            if (bkj == 0.0) continue;
            for (std::size_t i = 0; i < a.rows; ++i) c(i, j) += a(i, k) * bkj;
        }
    return c;
}

namespace {

// Column strides L_t of the k-mode unfolding, lowest mode index fastest.
std::vector<std::size_t> unfold_strides(const std::vector<std::size_t>& shape, std::size_t k) {
    std::vector<std::size_t> strides(shape.size(), 0);
    std::size_t acc = 1;
    for (std::size_t t = 0; t < shape.size(); ++t) {
        if (t == k) continue;
        strides[t] = acc;
        acc *= shape[t];
    }
    return strides;
}

} // namespace

DenseMatrix unfold(const DenseTensor& t, std::size_t k) {
    const std::size_t M = t.order();
    if (k >= M) throw InvalidInput("unfold: mode index out of range");
    const std::size_t pk = t.shape[k];
    const std::size_t ncols = t.size() / pk;
    DenseMatrix out(pk, ncols);

    const auto lstride = unfold_strides(t.shape, k);
    std::vector<std::size_t> idx(M, 0);
    for (std::size_t off = 0; off < t.size(); ++off) {
        std::size_t l = 0;
        for (std::size_t m = 0; m < M; ++m)
            if (m != k) l += idx[m] * lstride[m];
        out(idx[k], l) = t.data[off];
        for (std::size_t m = 0; m < M; ++m) {
            if (++idx[m] < t.shape[m]) break;
            idx[m] = 0;
        }
    }
    return out;
}

DenseTensor fold(const DenseMatrix& m, std::size_t k, const std::vector<std::size_t>& shape) {
    const std::size_t M = shape.size();
    if (k >= M) throw InvalidInput("fold: mode index out of range");
    const std::size_t total = shape_product(shape);
    if (m.rows != shape[k] || m.cols * m.rows != total)
        throw InvalidInput("fold: matrix dimensions do not match target shape");

    DenseTensor out(shape);
    const auto lstride = unfold_strides(shape, k);
    std::vector<std::size_t> idx(M, 0);
    for (std::size_t off = 0; off < total; ++off) {
        std::size_t l = 0;
        for (std::size_t t = 0; t < M; ++t)
            if (t != k) l += idx[t] * lstride[t];
        out.data[off] = m(idx[k], l);
        for (std::size_t t = 0; t < M; ++t) {
            if (++idx[t] < shape[t]) break;
            idx[t] = 0;
        }
    }
    return out;
}

DenseTensor mode_product(const DenseTensor& t, const DenseMatrix& a, std::size_t k) {
    if (k >= t.order()) throw InvalidInput("mode_product: mode index out of range");
    if (a.cols != t.shape[k]) throw InvalidInput("mode_product: dimension mismatch");
    std::vector<std::size_t> new_shape = t.shape;
    new_shape[k] = a.rows;
    return fold(matmul(a, unfold(t, k)), k, new_shape);
}

double frobenius_norm(const DenseTensor& t) {
    double s = 0.0;
    for (double x : t.data) s += x * x;
    return std::sqrt(s);
}

DenseMatrix kronecker(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out(a.rows * b.rows, a.cols * b.cols);
    for (std::size_t j = 0; j < a.cols; ++j)
        for (std::size_t i = 0; i < a.rows; ++i) {
            const double aij = a(i, j);
            for (std::size_t q = 0; q < b.cols; ++q)
                for (std::size_t p = 0; p < b.rows; ++p)
                    out(i * b.rows + p, j * b.cols + q) = aij * b(p, q);
        }
    return out;
}

} // namespace mcca
