#include "mcca/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mcca/errors.hpp"

namespace mcca {

DenseTensor reconstruct(const std::vector<DenseMatrix>& bases, const DenseTensor& sample) {
    if (bases.size() != sample.order()) throw InvalidInput("reconstruct: shape mismatch");
    DenseTensor out = sample;
    for (std::size_t k = 0; k < bases.size(); ++k) {
        if (bases[k].rows != sample.shape[k]) throw InvalidInput("reconstruct: shape mismatch");
        out = mode_product(out, bases[k].transposed(), k);
        out = mode_product(out, bases[k], k);
    }
    return out;
}

DenseTensor reconstruct(const MccaModel& model, const DenseTensor& sample) {
    return reconstruct(model.basis, sample);
}

DenseTensor reconstruct(const MpcaModel& model, const DenseTensor& sample) {
    return reconstruct(model.basis, sample);
}

DenseTensor reconstruct(const LinearModel& model, const DenseTensor& sample) {
    if (sample.size() != model.dim) throw InvalidInput("reconstruct: shape mismatch");
    const DenseTensor vec({model.dim}, sample.data);
    DenseTensor out = mode_product(vec, model.basis.transposed(), 0);
    out = mode_product(out, model.basis, 0);
    return DenseTensor(sample.shape, std::move(out.data));
}

namespace {

template <typename Model>
double rer_impl(const GroupedDataset& data, const Model& model) {
    data.validate();
    double err = 0.0, total = 0.0;
    for (const auto& g : data.groups)
        for (const auto& t : g) {
            const DenseTensor rec = reconstruct(model, t);
            for (std::size_t i = 0; i < t.size(); ++i) {
                const double d = t.data[i] - rec.data[i];
                err += d * d;
                total += t.data[i] * t.data[i];
            }
        }
    if (total == 0.0) throw InvalidInput("rer: all-zero dataset");
    return err / total;
}

} // namespace

double rer(const GroupedDataset& data, const MccaModel& model) { return rer_impl(data, model); }
double rer(const GroupedDataset& data, const MpcaModel& model) { return rer_impl(data, model); }
double rer(const GroupedDataset& data, const LinearModel& model) { return rer_impl(data, model); }

std::size_t param_count(Method method, const std::vector<std::size_t>& shape,
                        const std::vector<std::size_t>& ranks, std::size_t n_samples) {
    if (ranks.empty()) throw InvalidInput("param_count: empty rank list");
    if (n_samples == 0) throw InvalidInput("param_count: zero samples");
    switch (method) {
    case Method::Mcca:
    case Method::Mpca: {
        if (ranks.size() != shape.size())
            throw InvalidInput("param_count: rank list length mismatch");
        std::size_t bases = 0, core = 1;
        for (std::size_t k = 0; k < shape.size(); ++k) {
            bases += shape[k] * ranks[k];
            core *= ranks[k];
        }
        return bases + n_samples * core;
    }
    case Method::Pca:
    case Method::Cca: {
        if (ranks.size() != 1)
            throw InvalidInput("param_count: vector methods take a single rank");
        const std::size_t r = ranks[0];
        return r * shape_product(shape) + n_samples * r;
    }
    }
    throw InvalidInput("param_count: unknown method");
}

double cr(Method method, const std::vector<std::size_t>& shape,
          const std::vector<std::size_t>& ranks, std::size_t n_samples) {
    const double raw = static_cast<double>(n_samples) * static_cast<double>(shape_product(shape));
    return static_cast<double>(param_count(method, shape, ranks, n_samples)) / raw;
}

SymmetricMatrix residual(const SymmetricMatrix& s, const DenseMatrix& v,
                         const SymmetricMatrix& lambda) {
    if (v.rows != s.dim || v.cols != lambda.dim)
        throw InvalidInput("residual: dimension mismatch");
    const DenseMatrix approx = matmul(matmul(v, lambda.as_matrix()), v.transposed());
    DenseMatrix diff = s.as_matrix();
    for (std::size_t i = 0; i < diff.data.size(); ++i) diff.data[i] -= approx.data[i];
    return SymmetricMatrix::symmetrize(diff);
}

std::vector<double> principal_angles(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows != b.rows) throw InvalidInput("principal_angles: dimension mismatch");
    const DenseMatrix g = matmul(a.transposed(), b);
    // cosines from A^T B, sines from the residual B - A A^T B; combining
    // both through atan2 keeps small angles accurate, where acos alone
    // loses half the working precision.
    const DenseMatrix gram_c = matmul(g.transposed(), g);
    DenseMatrix bp = b;
    const DenseMatrix ag = matmul(a, g);
    for (std::size_t i = 0; i < bp.data.size(); ++i) bp.data[i] -= ag.data[i];
    const DenseMatrix gram_s = matmul(bp.transposed(), bp);
    const auto eig_c = sym_eig(SymmetricMatrix::symmetrize(gram_c));
    const auto eig_s = sym_eig(SymmetricMatrix::symmetrize(gram_s));

    const std::size_t n = std::min(a.cols, b.cols);
    std::vector<double> angles(n);
    for (std::size_t i = 0; i < n; ++i) {
        // cosines descending pair with sines ascending
        const double c = std::sqrt(std::max(eig_c.values[i], 0.0));
        const double s = std::sqrt(std::max(eig_s.values[eig_s.values.size() - 1 - i], 0.0));
        angles[i] = std::atan2(s, std::min(c, 1.0));
    }
    return angles; // ascending
}

std::string ranks_to_string(const std::vector<std::size_t>& ranks) {
    std::string out;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (i) out += 'x';
        out += std::to_string(ranks[i]);
    }
    return out;
}

std::vector<std::size_t> ranks_from_string(const std::string& text) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('x', pos);
        if (end == std::string::npos) end = text.size();
        const std::string piece = text.substr(pos, end - pos);
        if (piece.empty()) throw InvalidInput("bad rank list: " + text);
        for (char c : piece)
            if (c < '0' || c > '9') throw InvalidInput("bad rank list: " + text);
        out.push_back(static_cast<std::size_t>(std::stoull(piece)));
        if (end == text.size()) break;
        pos = end + 1;
    }
    return out;
}

namespace {

std::string real17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void write_records_csv(std::ostream& os, const std::vector<CompressionRecord>& records) {
    os << "method,ranks,params,cr,rer\n";
    for (const auto& r : records)
        os << method_name(r.method) << ',' << ranks_to_string(r.ranks) << ',' << r.params << ','
           << real17(r.cr) << ',' << real17(r.rer) << '\n';
}

std::vector<CompressionRecord> read_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "method,ranks,params,cr,rer")
        throw InvalidInput("records csv: bad header");
    std::vector<CompressionRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string method, ranks, params, crs, rers;
        if (!std::getline(ss, method, ',') || !std::getline(ss, ranks, ',') ||
            !std::getline(ss, params, ',') || !std::getline(ss, crs, ',') ||
            !std::getline(ss, rers))
            throw InvalidInput("records csv: malformed row: " + line);
        CompressionRecord rec;
        rec.method = method_from_name(method);
        rec.ranks = ranks_from_string(ranks);
        rec.params = static_cast<std::size_t>(std::stoull(params));
        rec.cr = std::stod(crs);
        rec.rer = std::stod(rers);
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace mcca
