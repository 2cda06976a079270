#pragma once

#include "bmf/bitmat.hpp"
#include "bmf/likelihood.hpp"

#include <cstddef>

namespace bmf {

// Data matrix X (N×D) together with its transpose, so that both factor sweeps
// can read their data rows as contiguous words.
class Observations {
public:
    explicit Observations(BinaryMatrix x);

    const BinaryMatrix& x() const { return x_; }
    const BinaryMatrix& xt() const { return xt_; }
    std::size_t n_rows() const { return x_.rows(); }
    std::size_t n_cols() const { return x_.cols(); }

private:
    BinaryMatrix x_;
    BinaryMatrix xt_;
};

// Current factors Z (N×L), U (D×L) and λ. Alongside the row-major factors the
// state keeps their transposes ("codes"): row l of ut() is column l of U as a
// D-bit vector, row l of zt() is column l of Z as an N-bit vector.
//
// Invariant: z().cols() == u().cols() == zt().rows() == ut().rows(), and the
// transposes agree with the factors except between a *_rows_mut() call and
// the matching sync_*().
class ModelState {
public:
    ModelState(std::size_t n, std::size_t d, NoiseParam lambda = NoiseParam{});
    ModelState(BinaryMatrix z, BinaryMatrix u, NoiseParam lambda = NoiseParam{});

    std::size_t n_rows() const { return z_.rows(); }
    std::size_t n_features() const { return u_.rows(); }
    std::size_t latent_dim() const { return z_.cols(); }

    const BinaryMatrix& z() const { return z_; }
    const BinaryMatrix& u() const { return u_; }
    const BinaryMatrix& zt() const { return zt_; }
    const BinaryMatrix& ut() const { return ut_; }

    NoiseParam lambda() const { return lambda_; }
    void set_lambda(NoiseParam lambda) { lambda_ = lambda; }

    void set_z(std::size_t n, std::size_t l, bool v)
    {
        z_.set(n, l, v);
        zt_.set(l, n, v);
    }
    void set_u(std::size_t d, std::size_t l, bool v)
    {
        u_.set(d, l, v);
        ut_.set(l, d, v);
    }

    // Direct row access for the sweeps; the transpose is stale until synced.
    BinaryMatrix& z_rows_mut() { return z_; }
    BinaryMatrix& u_rows_mut() { return u_; }
    void sync_zt() { zt_ = z_.transpose(); }
    void sync_ut() { ut_ = u_.transpose(); }
    // Copies row n of Z into column n of zt().
    void sync_zt_row(std::size_t n);
    void sync_ut_row(std::size_t d);

    // Appends k all-zero latent columns to both factors.
    void append_columns(std::size_t k);
    void erase_column(std::size_t l);

private:
    BinaryMatrix z_;
    BinaryMatrix u_;
    BinaryMatrix zt_;
    BinaryMatrix ut_;
    NoiseParam lambda_;
};

// Full-data prediction tallies from the cached codes.
PredictionCounts count_predictions(const Observations& data, const ModelState& state, unsigned threads = 1);

}  // namespace bmf
