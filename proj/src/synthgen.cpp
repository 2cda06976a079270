#include "bmf/synthgen.hpp"

#include "bmf/random.hpp"

#include <cmath>
#include <stdexcept>

namespace bmf {

namespace {

constexpr int kColumnRetries = 100;

BinaryMatrix draw_factor(std::size_t rows, std::size_t latent_dim, double density, std::uint64_t seed, Stream stream)
{
    BinaryMatrix f(rows, latent_dim);
    for (std::size_t l = 0; l < latent_dim; ++l) {
        for (int attempt = 0; attempt < kColumnRetries; ++attempt) {
            StreamRng rng(seed, stream, {l, static_cast<std::uint64_t>(attempt)});
            std::size_t ones = 0;
            for (std::size_t r = 0; r < rows; ++r) {
                const bool v = rng.bernoulli(density);
                f.set(r, l, v);
                ones += v;
            }
            if (ones > 0) break;
        }
    }
    return f;
}

}  // namespace

double factor_density_for(std::size_t latent_dim, double target_density)
{
    if (latent_dim == 0) throw std::invalid_argument("factor density requires at least one latent dimension");
    if (!(target_density > 0.0 && target_density < 1.0))
        throw std::invalid_argument("target density must lie in (0, 1)");
    return std::sqrt(1.0 - std::pow(1.0 - target_density, 1.0 / static_cast<double>(latent_dim)));
}

SyntheticDataset generate(std::size_t n_rows, std::size_t n_cols, std::size_t latent_dim, std::uint64_t seed,
                          double factor_density)
{
    if (n_rows == 0 || n_cols == 0 || latent_dim == 0)
        throw std::invalid_argument("synthetic data needs at least one row, column and latent dimension");
    if (!(factor_density > 0.0 && factor_density <= 1.0))
        throw std::invalid_argument("factor density must lie in (0, 1]");
    SyntheticDataset out;
    out.seed = seed;
    out.z_true = draw_factor(n_rows, latent_dim, factor_density, seed, Stream::synth_z);
    out.u_true = draw_factor(n_cols, latent_dim, factor_density, seed, Stream::synth_u);
    out.x = boolean_product(out.z_true, out.u_true);
    return out;
}

BinaryMatrix add_noise(const BinaryMatrix& x, double p_flip, std::uint64_t seed)
{
    if (!(p_flip >= 0.0 && p_flip <= 0.5)) throw std::invalid_argument("bit-flip probability must lie in [0, 0.5]");
    BinaryMatrix out = x;
    if (p_flip == 0.0) return out;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        StreamRng rng(seed, Stream::noise, {r});
        for (std::size_t c = 0; c < x.cols(); ++c)
            if (rng.bernoulli(p_flip)) out.set(r, c, !x.get(r, c));
    }
    return out;
}

}  // namespace bmf
