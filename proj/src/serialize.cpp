#include "mcca/serialize.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "mcca/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

namespace mcca {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t get_u32(std::istream& is, const char* what) {
    std::uint32_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(v)))
        throw InvalidInput(std::string("truncated file while reading ") + what);
    return v;
}

void put_f64s(std::ostream& os, const std::vector<double>& v) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void get_f64s(std::istream& is, std::vector<double>& v, const char* what) {
    if (!is.read(reinterpret_cast<char*>(v.data()),
                 static_cast<std::streamsize>(v.size() * sizeof(double))))
        throw InvalidInput(std::string("truncated file while reading ") + what);
}

void check_eof(std::istream& is, const char* what) {
    if (is.peek() != std::char_traits<char>::eof())
        throw InvalidInput(std::string("trailing bytes in ") + what);
}

void check_magic(std::istream& is, const char* magic, const char* what) {
    char buf[8] = {};
    const std::size_t len = std::strlen(magic);
    if (!is.read(buf, static_cast<std::streamsize>(len)) || std::memcmp(buf, magic, len) != 0)
        throw InvalidInput(std::string("bad magic for ") + what);
}

} // namespace

std::size_t StoredModel::basis_element_count() const {
    std::size_t n = 0;
    for (const auto& v : basis) n += v.data.size();
    return n;
}

StoredModel to_stored(const MccaModel& model, const std::vector<std::size_t>& shape) {
    StoredModel s;
    s.tag = Method::Mcca;
    s.shape = shape;
    s.ranks = model.ranks;
    s.basis = model.basis;
    s.latent = model.latent;
    return s;
}

StoredModel to_stored(const LinearModel& model) {
    StoredModel s;
    s.tag = model.tag;
    s.shape = {model.dim};
    s.ranks = {model.basis.cols};
    s.basis = {model.basis};
    return s;
}

StoredModel to_stored(const MpcaModel& model) {
    StoredModel s;
    s.tag = Method::Mpca;
    s.ranks.reserve(model.basis.size());
    s.shape.reserve(model.basis.size());
    for (const auto& v : model.basis) {
        s.shape.push_back(v.rows);
        s.ranks.push_back(v.cols);
    }
    s.basis = model.basis;
    return s;
}

void write_model(const std::filesystem::path& path, const StoredModel& model) {
    if (model.shape.empty() || model.ranks.size() != model.shape.size() ||
        model.basis.size() != model.shape.size())
        throw InvalidInput("write_model: inconsistent mode counts");
    for (std::size_t k = 0; k < model.basis.size(); ++k)
        if (model.basis[k].rows != model.shape[k] || model.basis[k].cols != model.ranks[k])
            throw InvalidInput("write_model: basis dimensions disagree with header");
    for (const auto& per_group : model.latent) {
        if (per_group.size() != model.shape.size())
            throw InvalidInput("write_model: latent mode count mismatch");
        for (std::size_t k = 0; k < per_group.size(); ++k)
            if (per_group[k].dim != model.ranks[k])
                throw InvalidInput("write_model: latent dimensions disagree with ranks");
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidInput("cannot open model file for writing: " + path.string());
    os.write("MCCA1", 5);
    put_u32(os, static_cast<std::uint32_t>(model.tag));
    put_u32(os, static_cast<std::uint32_t>(model.shape.size()));
    put_u32(os, static_cast<std::uint32_t>(model.latent.size()));
    for (std::size_t r : model.ranks) put_u32(os, static_cast<std::uint32_t>(r));
    for (std::size_t p : model.shape) put_u32(os, static_cast<std::uint32_t>(p));
    for (const auto& v : model.basis) put_f64s(os, v.data);
    for (const auto& per_group : model.latent)
        for (const auto& lam : per_group) put_f64s(os, lam.data);
    if (!os) throw InvalidInput("failed writing model file: " + path.string());
}

StoredModel read_model(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidInput("cannot open model file: " + path.string());
    check_magic(is, "MCCA1", "model file");

    StoredModel model;
    const std::uint32_t tag = get_u32(is, "method tag");
    if (tag > 3) throw InvalidInput("model file: unknown method tag");
    model.tag = static_cast<Method>(tag);
    const std::uint32_t modes = get_u32(is, "mode count");
    const std::uint32_t groups = get_u32(is, "group count");
    if (modes == 0) throw InvalidInput("model file: zero modes");
    model.ranks.resize(modes);
    model.shape.resize(modes);
    for (auto& r : model.ranks) r = get_u32(is, "ranks");
    for (auto& p : model.shape) p = get_u32(is, "shapes");

    model.basis.reserve(modes);
    for (std::size_t k = 0; k < modes; ++k) {
        DenseMatrix v(model.shape[k], model.ranks[k]);
        get_f64s(is, v.data, "basis");
        model.basis.push_back(std::move(v));
    }
    model.latent.resize(groups);
    for (auto& per_group : model.latent) {
        per_group.reserve(modes);
        for (std::size_t k = 0; k < modes; ++k) {
            SymmetricMatrix lam(model.ranks[k]);
            get_f64s(is, lam.data, "latent covariance");
            per_group.push_back(std::move(lam));
        }
    }
    check_eof(is, "model file");
    return model;
}

void write_tensor(const std::filesystem::path& path, const DenseTensor& t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidInput("cannot open tensor file for writing: " + path.string());
    os.write("MCTN1", 5);
    put_u32(os, static_cast<std::uint32_t>(t.order()));
    for (std::size_t e : t.shape) put_u32(os, static_cast<std::uint32_t>(e));
    put_f64s(os, t.data);
    if (!os) throw InvalidInput("failed writing tensor file: " + path.string());
}

DenseTensor read_tensor(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidInput("cannot open tensor file: " + path.string());
    check_magic(is, "MCTN1", "tensor file");
    const std::uint32_t modes = get_u32(is, "mode count");
    if (modes == 0) throw InvalidInput("tensor file: zero modes");
    std::vector<std::size_t> shape(modes);
    for (auto& e : shape) e = get_u32(is, "extents");
    DenseTensor t(shape);
    get_f64s(is, t.data, "tensor payload");
    check_eof(is, "tensor file");
    return t;
}

} // namespace mcca
