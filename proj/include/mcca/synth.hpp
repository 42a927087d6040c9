#pragma once

#include <cstdint>

#include "mcca/covariance.hpp"

namespace mcca {

/// Deterministic normal generator (own Box-Muller over mt19937_64 output,
/// so streams are identical across standard libraries).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    double uniform();       // [0, 1)
    double normal();        // standard normal

private:
    std::uint64_t next();
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct SynthSpec {
    std::vector<std::size_t> shape;
    std::vector<std::size_t> ranks;
    std::size_t groups = 2;
    std::size_t samples_per_group = 20;
    double noise = 0.05; // additive i.i.d. noise standard deviation
    double decay = 0.7;  // latent spectrum decay per rank index
    std::uint64_t seed = 0;
};

struct SynthResult {
    GroupedDataset data;
    std::vector<DenseMatrix> planted_basis; // shared across groups
};

/// Grouped samples drawn from the shared-subspace model: a random core
/// tensor with group-specific per-mode scale profiles, mapped through one
/// shared orthonormal basis per mode, plus additive noise.
SynthResult synth_dataset(const SynthSpec& spec);

} // namespace mcca
