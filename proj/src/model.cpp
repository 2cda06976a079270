#include "bmf/model.hpp"

#include "parallel.hpp"

#include <vector>

namespace bmf {

namespace {
constexpr std::size_t kInitialCapacity = 64;
}

Observations::Observations(BinaryMatrix x) : x_(std::move(x)), xt_(x_.transpose()) {}

ModelState::ModelState(std::size_t n, std::size_t d, NoiseParam lambda)
    : z_(n, 0, kInitialCapacity), u_(d, 0, kInitialCapacity), zt_(0, n), ut_(0, d), lambda_(lambda)
{
}

ModelState::ModelState(BinaryMatrix z, BinaryMatrix u, NoiseParam lambda)
    : z_(std::move(z)), u_(std::move(u)), lambda_(lambda)
{
    if (z_.cols() != u_.cols()) throw DimensionError("ModelState: Z and U disagree on the latent dimension");
    zt_ = z_.transpose();
    ut_ = u_.transpose();
}

void ModelState::sync_zt_row(std::size_t n)
{
    for (std::size_t l = 0; l < z_.cols(); ++l) zt_.set(l, n, z_.get(n, l));
}

void ModelState::sync_ut_row(std::size_t d)
{
    for (std::size_t l = 0; l < u_.cols(); ++l) ut_.set(l, d, u_.get(d, l));
}

void ModelState::append_columns(std::size_t k)
{
    z_.append_cols(k);
    u_.append_cols(k);
    zt_.append_rows(k);
    ut_.append_rows(k);
}

void ModelState::erase_column(std::size_t l)
{
    z_.erase_col(l);
    u_.erase_col(l);
    zt_.erase_row(l);
    ut_.erase_row(l);
}

PredictionCounts count_predictions(const Observations& data, const ModelState& state, unsigned threads)
{
    const BinaryMatrix& x = data.x();
    const std::size_t width = words_for(x.cols());
    const std::size_t n_chunks = detail::chunk_count(x.rows(), threads);
    std::vector<PredictionCounts> partial(n_chunks);
    detail::parallel_chunks(x.rows(), threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        std::vector<Word> pred(width);
        for (std::size_t n = begin; n < end; ++n) {
            covered_by(state.z().row(n), state.latent_dim(), state.ut(), pred);
            partial[chunk] += compare_row(x.row(n), pred, x.cols());
        }
    });
    PredictionCounts total;
    for (const auto& p : partial) total += p;
    return total;
}

}  // namespace bmf
