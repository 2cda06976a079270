#include "bmf/finite_sampler.hpp"

#include "bmf/random.hpp"
#include "bmf/row_sampler.hpp"
#include "parallel.hpp"

#include <stdexcept>
#include <string>

namespace bmf {

namespace {

void check_probability(double p, const char* name)
{
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
}

// Resamples every row of `factor` against data rows `x` and codes `codes`.
void sweep_rows(const BinaryMatrix& x, BinaryMatrix& factor, const BinaryMatrix& codes, Stream stream,
                const SweepContext& ctx, double lambda, double prior_logit)
{
    const std::size_t n_codes = factor.cols();
    if (n_codes == 0) return;
    const auto prior = [prior_logit](std::size_t) { return prior_logit; };
    detail::parallel_chunks(factor.rows(), ctx.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        RowSampler sampler(x.cols());
        for (std::size_t r = begin; r < end; ++r) {
            StreamRng rng(ctx.seed, stream, {ctx.sweep, r});
            sampler.resample(x.row(r), factor.row_mut(r), n_codes, codes, 0, lambda, prior, rng);
        }
    });
}

}  // namespace

void FiniteConfig::validate() const
{
    if (latent_dim < 1) throw std::invalid_argument("latent dimension must be at least 1");
    check_probability(prior_z, "prior_z");
    check_probability(prior_u, "prior_u");
    if (n_samples <= burn_in) throw std::invalid_argument("number of samples must exceed burn-in");
    (void)NoiseParam{lambda_init};
}

nlohmann::json FiniteConfig::to_json() const
{
    return {{"model", "finite"},       {"latent_dim", latent_dim}, {"prior_z", prior_z},
            {"prior_u", prior_u},      {"n_samples", n_samples},   {"burn_in", burn_in},
            {"seed", seed},            {"lambda_init", lambda_init}};
}

double conditional_prob_one(std::span<const Word> x_row, std::span<const Word> z_row, const BinaryMatrix& u,
                            std::size_t l, double lambda, double prior_logit)
{
    if (l >= u.cols()) throw std::out_of_range("conditional_prob_one: latent index out of range");
    const BinaryMatrix codes = u.transpose();
    RowSampler sampler(u.rows());
    sampler.cover(z_row, u.cols(), codes);
    const bool active = (z_row[l / kWordBits] >> (l % kWordBits)) & 1u;
    const auto score = static_cast<double>(sampler.exclusive_score(x_row, codes.row(l), active));
    return sigmoid(lambda * score + prior_logit);
}

void sweep_z(const Observations& data, ModelState& state, const SweepContext& ctx, double prior_logit)
{
    sweep_rows(data.x(), state.z_rows_mut(), state.ut(), Stream::sweep_z, ctx, state.lambda().value(), prior_logit);
    state.sync_zt();
}

void sweep_u(const Observations& data, ModelState& state, const SweepContext& ctx, double prior_logit)
{
    sweep_rows(data.xt(), state.u_rows_mut(), state.zt(), Stream::sweep_u, ctx, state.lambda().value(), prior_logit);
    state.sync_ut();
}

PredictionCounts gibbs_step(const Observations& data, ModelState& state, const FiniteConfig& config,
                            std::uint64_t sweep)
{
    const SweepContext ctx{config.seed, sweep, config.threads};
    sweep_z(data, state, ctx, logit(config.prior_z));
    sweep_u(data, state, ctx, logit(config.prior_u));
    const PredictionCounts counts = count_predictions(data, state, config.threads);
    state.set_lambda(lambda_mle(counts));
    return counts;
}

ModelState init_finite_state(std::size_t n, std::size_t d, const FiniteConfig& config)
{
    BinaryMatrix z(n, config.latent_dim);
    BinaryMatrix u(d, config.latent_dim);
    for (std::size_t r = 0; r < n; ++r) {
        StreamRng rng(config.seed, Stream::init_z, {r});
        for (std::size_t l = 0; l < config.latent_dim; ++l) z.set(r, l, rng.bernoulli(config.prior_z));
    }
    for (std::size_t r = 0; r < d; ++r) {
        StreamRng rng(config.seed, Stream::init_u, {r});
        for (std::size_t l = 0; l < config.latent_dim; ++l) u.set(r, l, rng.bernoulli(config.prior_u));
    }
    return ModelState(std::move(z), std::move(u), NoiseParam{config.lambda_init});
}

Chain run_finite(const BinaryMatrix& x, const FiniteConfig& config)
{
    config.validate();
    if (x.empty()) throw std::invalid_argument("run_finite: data matrix is empty");

    const Observations data(x);
    ModelState state = init_finite_state(x.rows(), x.cols(), config);

    Chain chain;
    chain.n_samples = config.n_samples;
    chain.burn_in = config.burn_in;
    chain.has_factors = config.record_factors;
    chain.config = config.to_json();
    chain.samples.reserve(config.n_samples - config.burn_in);
    for (std::size_t it = 0; it < config.n_samples; ++it) {
        gibbs_step(data, state, config, it);
        if (it < config.burn_in) continue;
        ChainSample s{it, state.latent_dim(), state.lambda().value(), {}, {}};
        if (config.record_factors) {
            s.z = state.z().compact();
            s.u = state.u().compact();
        }
        chain.samples.push_back(std::move(s));
    }
    return chain;
}

}  // namespace bmf
