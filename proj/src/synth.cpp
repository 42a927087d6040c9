#include "mcca/synth.hpp"

#include <cmath>

#include "mcca/errors.hpp"
#include "mcca/tensor.hpp"

namespace mcca {

std::uint64_t Rng::next() {
    // splitmix64
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

namespace {

DenseMatrix random_orthonormal(Rng& rng, std::size_t rows, std::size_t cols) {
    DenseMatrix v(rows, cols);
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i < rows; ++i) v(i, j) = rng.normal();
        // modified Gram-Schmidt against earlier columns
        for (std::size_t p = 0; p < j; ++p) {
            double dot = 0.0;
            for (std::size_t i = 0; i < rows; ++i) dot += v(i, p) * v(i, j);
            for (std::size_t i = 0; i < rows; ++i) v(i, j) -= dot * v(i, p);
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < rows; ++i) norm += v(i, j) * v(i, j);
        norm = std::sqrt(norm);
        if (norm < 1e-12) throw NumericalError("random_orthonormal: degenerate draw");
        for (std::size_t i = 0; i < rows; ++i) v(i, j) /= norm;
    }
    return v;
}

} // namespace

SynthResult synth_dataset(const SynthSpec& spec) {
    if (spec.shape.empty()) throw InvalidInput("synth: empty shape");
    if (spec.ranks.size() != spec.shape.size())
        throw InvalidInput("synth: rank list length mismatch");
    for (std::size_t k = 0; k < spec.shape.size(); ++k)
        if (spec.ranks[k] == 0 || spec.ranks[k] > spec.shape[k])
            throw InvalidInput("synth: rank out of range");
    if (spec.groups == 0 || spec.samples_per_group == 0)
        throw InvalidInput("synth: need at least one group and one sample");

    Rng rng(spec.seed);
    const std::size_t modes = spec.shape.size();

    SynthResult out;
    out.planted_basis.reserve(modes);
    for (std::size_t k = 0; k < modes; ++k)
        out.planted_basis.push_back(random_orthonormal(rng, spec.shape[k], spec.ranks[k]));

    // Group-specific per-mode scale profiles over the shared basis, with a
    // geometric decay so low ranks still capture most of the energy.
    std::vector<std::vector<std::vector<double>>> scales(spec.groups);
    for (std::size_t g = 0; g < spec.groups; ++g) {
        scales[g].resize(modes);
        for (std::size_t k = 0; k < modes; ++k) {
            scales[g][k].resize(spec.ranks[k]);
            for (std::size_t r = 0; r < spec.ranks[k]; ++r)
                scales[g][k][r] = std::pow(spec.decay, static_cast<double>(r)) *
                                  (0.6 + 0.8 * rng.uniform());
        }
    }

    out.data.groups.resize(spec.groups);
    std::vector<std::size_t> core_shape = spec.ranks;
    for (std::size_t g = 0; g < spec.groups; ++g) {
        out.data.groups[g].reserve(spec.samples_per_group);
        for (std::size_t i = 0; i < spec.samples_per_group; ++i) {
            DenseTensor core(core_shape);
            std::vector<std::size_t> idx(modes, 0);
            for (std::size_t off = 0; off < core.size(); ++off) {
                double sd = 1.0;
                for (std::size_t k = 0; k < modes; ++k) sd *= scales[g][k][idx[k]];
                core.data[off] = sd * rng.normal();
                for (std::size_t k = 0; k < modes; ++k) {
                    if (++idx[k] < core_shape[k]) break;
                    idx[k] = 0;
                }
            }
            DenseTensor sample = core;
            for (std::size_t k = 0; k < modes; ++k)
                sample = mode_product(sample, out.planted_basis[k], k);
            if (spec.noise > 0.0)
                for (double& x : sample.data) x += spec.noise * rng.normal();
            out.data.groups[g].push_back(std::move(sample));
        }
    }
    return out;
}

} // namespace mcca
