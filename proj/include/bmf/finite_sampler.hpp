#pragma once

#include "bmf/bitmat.hpp"
#include "bmf/chain.hpp"
#include "bmf/model.hpp"

#include <cstddef>
#include <cstdint>
#include <span>

namespace bmf {

struct FiniteConfig {
    std::size_t latent_dim = 0;
    double prior_z = 0.5;
    double prior_u = 0.5;
    std::size_t n_samples = 200;
    std::size_t burn_in = 100;
    std::uint64_t seed = 0;
    double lambda_init = kLambdaInit;
    unsigned threads = 1;
    bool record_factors = true;

    // Throws std::invalid_argument on out-of-range settings.
    void validate() const;
    nlohmann::json to_json() const;
};

// Identifies the random streams of one sweep.
struct SweepContext {
    std::uint64_t seed = 0;
    std::uint64_t sweep = 0;
    unsigned threads = 1;
};

// p(f_l = 1 | rest) for one factor row: x_row has D bits, z_row L bits,
// u is D×L. The same function serves U rows with the roles transposed.
double conditional_prob_one(std::span<const Word> x_row, std::span<const Word> z_row, const BinaryMatrix& u,
                            std::size_t l, double lambda, double prior_logit);

// Resamples every entry of Z (rows in parallel; row n draws from the stream
// keyed by (seed, sweep, n)), then refreshes the cached codes.
void sweep_z(const Observations& data, ModelState& state, const SweepContext& ctx, double prior_logit);
void sweep_u(const Observations& data, ModelState& state, const SweepContext& ctx, double prior_logit);

// sweep_z, sweep_u, then λ ← its maximum-likelihood value. Returns the
// post-sweep prediction counts.
PredictionCounts gibbs_step(const Observations& data, ModelState& state, const FiniteConfig& config,
                            std::uint64_t sweep);

// Z and U iid Bernoulli(prior_z / prior_u) from the seed.
ModelState init_finite_state(std::size_t n, std::size_t d, const FiniteConfig& config);

Chain run_finite(const BinaryMatrix& x, const FiniteConfig& config);

}  // namespace bmf
