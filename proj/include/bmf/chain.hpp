#pragma once

#include "bmf/bitmat.hpp"

#include <json.hpp>

#include <cstddef>
#include <vector>

namespace bmf {

struct ChainSample {
    std::size_t iteration = 0;
    std::size_t latent_dim = 0;
    double lambda = 0.0;
    // Empty (0×0) when the chain records traces only.
    BinaryMatrix z;
    BinaryMatrix u;

    friend bool operator==(const ChainSample&, const ChainSample&) = default;
};

// Post-burn-in record of a sampler run.
struct Chain {
    std::vector<ChainSample> samples;
    std::size_t n_samples = 0;
    std::size_t burn_in = 0;
    bool has_factors = true;
    nlohmann::json config = nlohmann::json::object();

    bool empty() const { return samples.empty(); }
    std::size_t size() const { return samples.size(); }

    friend bool operator==(const Chain&, const Chain&) = default;
};

}  // namespace bmf
