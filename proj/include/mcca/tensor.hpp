#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace mcca {

/// Dense matrix, column-major storage (consistent with DenseTensor at M=2).
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data; // column-major, length rows*cols

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i + j * rows]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i + j * rows]; }

    static DenseMatrix identity(std::size_t n);
    DenseMatrix transposed() const;

    bool operator==(const DenseMatrix&) const = default;
};

/// M-way dense array, first-index-fastest layout. Element (p_1,...,p_M)
/// (0-based) sits at offset sum_t p_t * prod_{m<t} P_m, so unfolding along
/// mode 0 is a reinterpretation of the flat buffer.
struct DenseTensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    DenseTensor() = default;
    explicit DenseTensor(std::vector<std::size_t> extents);
    DenseTensor(std::vector<std::size_t> extents, std::vector<double> values);

    std::size_t order() const { return shape.size(); }
    std::size_t size() const { return data.size(); }

    std::size_t offset(const std::vector<std::size_t>& idx) const;
    double& at(const std::vector<std::size_t>& idx) { return data[offset(idx)]; }
    double at(const std::vector<std::size_t>& idx) const { return data[offset(idx)]; }

    bool operator==(const DenseTensor&) const = default;
};

std::size_t shape_product(const std::vector<std::size_t>& shape);

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// k-mode unfolding (0-based mode). Rows index mode k; column l enumerates
/// the remaining modes, lowest mode index fastest:
///   l = sum_{t != k} p_t * L_t,  L_t = prod_{m<t, m != k} P_m.
DenseMatrix unfold(const DenseTensor& t, std::size_t k);

/// Inverse of unfold for the given target shape.
DenseTensor fold(const DenseMatrix& m, std::size_t k, const std::vector<std::size_t>& shape);

/// k-mode product t x_k a; mode-k extent P_k becomes a.rows (needs a.cols == P_k).
DenseTensor mode_product(const DenseTensor& t, const DenseMatrix& a, std::size_t k);

double frobenius_norm(const DenseTensor& t);

DenseMatrix kronecker(const DenseMatrix& a, const DenseMatrix& b);

} // namespace mcca
