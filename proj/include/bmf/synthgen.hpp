#pragma once

#include "bmf/bitmat.hpp"

#include <cstddef>
#include <cstdint>

namespace bmf {

struct SyntheticDataset {
    BinaryMatrix x;
    BinaryMatrix z_true;
    BinaryMatrix u_true;
    double noise_level = 0.0;
    std::uint64_t seed = 0;
};

// Factor density d such that iid Bernoulli(d) factors with L codes give an
// expected data density of `target`: 1 − (1 − d²)^L = target.
double factor_density_for(std::size_t latent_dim, double target_density);
inline double balanced_factor_density(std::size_t latent_dim) { return factor_density_for(latent_dim, 0.5); }

// Boolean product of iid factors at the given factor density. Columns of the
// truth that come out all-zero are redrawn so the effective dimension is L.
SyntheticDataset generate(std::size_t n_rows, std::size_t n_cols, std::size_t latent_dim, std::uint64_t seed,
                          double factor_density);
inline SyntheticDataset generate(std::size_t n_rows, std::size_t n_cols, std::size_t latent_dim, std::uint64_t seed)
{
    return generate(n_rows, n_cols, latent_dim, seed, balanced_factor_density(latent_dim));
}

// Flips each entry independently with probability p_flip ≤ 0.5.
BinaryMatrix add_noise(const BinaryMatrix& x, double p_flip, std::uint64_t seed);

}  // namespace bmf
