#pragma once

#include "bmf/bitmat.hpp"
#include "bmf/chain.hpp"
#include "bmf/model.hpp"
#include "bmf/random.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bmf {

struct IbpConfig {
    double alpha = 1.0;
    double q = 0.5;
    std::size_t lprime_max = 10;
    std::size_t n_samples = 200;
    std::size_t burn_in = 100;
    std::uint64_t seed = 0;
    double lambda_init = kLambdaInit;
    unsigned threads = 1;
    bool record_factors = true;

    void validate() const;
    nlohmann::json to_json() const;
};

// m[l] = number of ones in column l of Z.
struct ColumnCounts {
    std::vector<std::size_t> m;

    static ColumnCounts of(const BinaryMatrix& z);
    std::size_t excluding(const BinaryMatrix& z, std::size_t n, std::size_t l) const { return m[l] - z.get(n, l); }

    friend bool operator==(const ColumnCounts&, const ColumnCounts&) = default;
};

// Log of the per-entry likelihood of a negative prediction once L′ new codes
// are marginalised out, for L′ = 0..lprime_max-1. a[] applies to false
// negatives (x = 1), b[] to true negatives (x = 0):
//   a[L′] = log[p0·σ(−λ) + (1−p0)·σ(λ)],  b[L′] = log[p0·σ(λ) + (1−p0)·σ(−λ)]
// with p0 = (1−q)^L′ the probability that all L′ new entries are zero.
struct BracketTable {
    std::vector<double> a;
    std::vector<double> b;
    double lambda_at_build = 0.0;
    double q_at_build = 0.0;

    bool matches(double lambda, double q) const { return lambda == lambda_at_build && q == q_at_build && !a.empty(); }
};

BracketTable build_bracket_table(double lambda, double q, std::size_t lprime_max);

// p(z_nl = 1 | rest) under the IBP prior; requires m_{−n,l} > 0.
double existing_code_prob_one(const Observations& data, const ModelState& state, const ColumnCounts& counts,
                              std::size_t n, std::size_t l);

// Deletes every column whose only one (if any) sits in row n. Returns the
// number of columns removed.
std::size_t prune_singletons(std::size_t n, ModelState& state, ColumnCounts& counts);

// Unnormalised log posterior of L′ new codes for a row with the given negative
// prediction tallies: log Poisson(α/N)(L′) + FN·a[L′] + TN·b[L′].
std::vector<double> new_dish_log_weights(const NegativeCounts& negatives, const BracketTable& table, double alpha,
                                         std::size_t n_rows);
std::vector<double> new_dish_log_weights(const Observations& data, const ModelState& state, std::size_t n,
                                         const BracketTable& table, double alpha);

// Draws L′ for row n, appends L′ columns with z_n = 1, and gives the new U
// columns one Gibbs pass. Returns L′.
std::size_t sample_new_dishes(const Observations& data, ModelState& state, ColumnCounts& counts,
                              const BracketTable& table, const IbpConfig& config, std::size_t n, StreamRng& rng);

// One Algorithm-style pass: rows of Z in order (existing codes, pruning, new
// codes), then all of U, then λ. Rebuilds `table` when λ or q moved.
PredictionCounts ibp_sweep(const Observations& data, ModelState& state, ColumnCounts& counts, BracketTable& table,
                           const IbpConfig& config, std::uint64_t sweep);

Chain run_ibp(const BinaryMatrix& x, const IbpConfig& config);

// One draw from the IBP(α) prior by the sequential customer construction.
BinaryMatrix sample_ibp_prior(std::size_t n_rows, double alpha, StreamRng& rng);

}  // namespace bmf
