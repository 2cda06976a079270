#include "bmf/ibp_sampler.hpp"

#include "bmf/finite_sampler.hpp"
#include "bmf/row_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace bmf {

namespace {

NegativeCounts negatives_from_coverage(std::span<const Word> x, std::span<const Word> coverage, std::size_t width)
{
    std::size_t fn = 0;
    std::size_t either = 0;
    for (std::size_t i = 0; i < coverage.size(); ++i) {
        fn += static_cast<std::size_t>(std::popcount(x[i] & ~coverage[i]));
        either += static_cast<std::size_t>(std::popcount(x[i] | coverage[i]));
    }
    return {width - either, fn};
}

std::size_t draw_from_log_weights(const std::vector<double>& log_w, StreamRng& rng)
{
    const double top = *std::max_element(log_w.begin(), log_w.end());
    std::vector<double> cumulative(log_w.size());
    double total = 0.0;
    for (std::size_t k = 0; k < log_w.size(); ++k) {
        total += std::exp(log_w[k] - top);
        cumulative[k] = total;
    }
    const double target = rng.uniform() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), log_w.size() - 1);
}

std::size_t add_new_dishes(const Observations& data, ModelState& state, ColumnCounts& counts,
                           const BracketTable& table, const IbpConfig& config, std::size_t n,
                           const NegativeCounts& negatives, StreamRng& rng, RowSampler& u_sampler)
{
    const std::size_t k = draw_from_log_weights(new_dish_log_weights(negatives, table, config.alpha, data.n_rows()), rng);
    if (k == 0) return 0;

    const std::size_t first = state.latent_dim();
    state.append_columns(k);
    for (std::size_t l = first; l < first + k; ++l) {
        state.set_z(n, l, true);
        counts.m.push_back(1);
    }

    const double lambda = state.lambda().value();
    const double prior = logit(config.q);
    const auto prior_logit = [prior](std::size_t) { return prior; };
    BinaryMatrix& u = state.u_rows_mut();
    for (std::size_t d = 0; d < data.n_cols(); ++d)
        u_sampler.resample(data.xt().row(d), u.row_mut(d), first + k, state.zt(), first, lambda, prior_logit, rng);
    for (std::size_t d = 0; d < data.n_cols(); ++d)
        for (std::size_t l = first; l < first + k; ++l)
            if (state.u().get(d, l)) state.set_u(d, l, true);
    return k;
}

}  // namespace

void IbpConfig::validate() const
{
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0, 1)");
    if (lprime_max < 1) throw std::invalid_argument("lprime_max must be at least 1");
    if (n_samples <= burn_in) throw std::invalid_argument("number of samples must exceed burn-in");
    (void)NoiseParam{lambda_init};
}

nlohmann::json IbpConfig::to_json() const
{
    return {{"model", "ibp"},         {"alpha", alpha},         {"q", q},       {"lprime_max", lprime_max},
            {"n_samples", n_samples}, {"burn_in", burn_in},     {"seed", seed}, {"lambda_init", lambda_init}};
}

ColumnCounts ColumnCounts::of(const BinaryMatrix& z)
{
    ColumnCounts c;
    c.m.resize(z.cols());
    for (std::size_t l = 0; l < z.cols(); ++l) c.m[l] = z.count_ones_in_col(l);
    return c;
}

BracketTable build_bracket_table(double lambda, double q, std::size_t lprime_max)
{
    BracketTable t;
    t.lambda_at_build = lambda;
    t.q_at_build = q;
    t.a.resize(lprime_max);
    t.b.resize(lprime_max);
    const double on = sigmoid(lambda);
    const double off = sigmoid(-lambda);
    for (std::size_t k = 0; k < lprime_max; ++k) {
        const double p0 = std::pow(1.0 - q, static_cast<double>(k));
        t.a[k] = std::log(p0 * off + (1.0 - p0) * on);
        t.b[k] = std::log(p0 * on + (1.0 - p0) * off);
    }
    return t;
}

double existing_code_prob_one(const Observations& data, const ModelState& state, const ColumnCounts& counts,
                              std::size_t n, std::size_t l)
{
    if (l >= state.latent_dim()) throw std::out_of_range("existing_code_prob_one: latent index out of range");
    const std::size_t others = counts.excluding(state.z(), n, l);
    if (others == 0) throw std::logic_error("existing_code_prob_one: singleton column must be pruned, not sampled");
    RowSampler sampler(data.n_cols());
    sampler.cover(state.z().row(n), state.latent_dim(), state.ut());
    const auto score =
        static_cast<double>(sampler.exclusive_score(data.x().row(n), state.ut().row(l), state.z().get(n, l)));
    const double prior = static_cast<double>(others) / static_cast<double>(data.n_rows());
    return sigmoid(logit(prior) + state.lambda().value() * score);
}

std::size_t prune_singletons(std::size_t n, ModelState& state, ColumnCounts& counts)
{
    std::size_t removed = 0;
    for (std::size_t l = state.latent_dim(); l-- > 0;) {
        if (counts.excluding(state.z(), n, l) != 0) continue;
        state.erase_column(l);
        counts.m.erase(counts.m.begin() + static_cast<std::ptrdiff_t>(l));
        ++removed;
    }
    return removed;
}

std::vector<double> new_dish_log_weights(const NegativeCounts& negatives, const BracketTable& table, double alpha,
                                         std::size_t n_rows)
{
    const double rate = alpha / static_cast<double>(n_rows);
    const double log_rate = std::log(rate);
    const auto fn = static_cast<double>(negatives.fn_);
    const auto tn = static_cast<double>(negatives.tn);
    std::vector<double> w(table.a.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        const auto kk = static_cast<double>(k);
        const double log_prior = (k == 0 ? 0.0 : kk * log_rate) - rate - std::lgamma(kk + 1.0);
        w[k] = log_prior + fn * table.a[k] + tn * table.b[k];
    }
    return w;
}

std::vector<double> new_dish_log_weights(const Observations& data, const ModelState& state, std::size_t n,
                                         const BracketTable& table, double alpha)
{
    return new_dish_log_weights(row_negative_counts(data.x().row(n), state.z().row(n), state.u()), table, alpha,
                                data.n_rows());
}

std::size_t sample_new_dishes(const Observations& data, ModelState& state, ColumnCounts& counts,
                              const BracketTable& table, const IbpConfig& config, std::size_t n, StreamRng& rng)
{
    const NegativeCounts negatives = row_negative_counts(data.x().row(n), state.z().row(n), state.u());
    RowSampler u_sampler(data.n_rows());
    return add_new_dishes(data, state, counts, table, config, n, negatives, rng, u_sampler);
}

PredictionCounts ibp_sweep(const Observations& data, ModelState& state, ColumnCounts& counts, BracketTable& table,
                           const IbpConfig& config, std::uint64_t sweep)
{
    const double lambda = state.lambda().value();
    if (!table.matches(lambda, config.q)) table = build_bracket_table(lambda, config.q, config.lprime_max);

    const std::size_t n_rows = data.n_rows();
    RowSampler z_sampler(data.n_cols());
    RowSampler u_sampler(n_rows);
    std::vector<double> prior;
    for (std::size_t n = 0; n < n_rows; ++n) {
        StreamRng rng(config.seed, Stream::ibp_row, {sweep, n});
        prune_singletons(n, state, counts);

        const std::size_t n_codes = state.latent_dim();
        prior.resize(n_codes);
        for (std::size_t l = 0; l < n_codes; ++l)
            prior[l] = logit(static_cast<double>(counts.excluding(state.z(), n, l)) / static_cast<double>(n_rows));
        for (std::size_t l = 0; l < n_codes; ++l) counts.m[l] -= state.z().get(n, l);
        z_sampler.resample(data.x().row(n), state.z_rows_mut().row_mut(n), n_codes, state.ut(), 0, lambda,
                           [&prior](std::size_t l) { return prior[l]; }, rng);
        for (std::size_t l = 0; l < n_codes; ++l) counts.m[l] += state.z().get(n, l);
        state.sync_zt_row(n);

        const NegativeCounts negatives = negatives_from_coverage(data.x().row(n), z_sampler.coverage(), data.n_cols());
        add_new_dishes(data, state, counts, table, config, n, negatives, rng, u_sampler);
    }

    sweep_u(data, state, SweepContext{config.seed, sweep, config.threads}, logit(config.q));
    const PredictionCounts totals = count_predictions(data, state, config.threads);
    state.set_lambda(lambda_mle(totals));
    return totals;
}

Chain run_ibp(const BinaryMatrix& x, const IbpConfig& config)
{
    config.validate();
    if (x.empty()) throw std::invalid_argument("run_ibp: data matrix is empty");

    const Observations data(x);
    ModelState state(x.rows(), x.cols(), NoiseParam{config.lambda_init});
    ColumnCounts counts;
    BracketTable table;

    Chain chain;
    chain.n_samples = config.n_samples;
    chain.burn_in = config.burn_in;
    chain.has_factors = config.record_factors;
    chain.config = config.to_json();
    chain.samples.reserve(config.n_samples - config.burn_in);
    for (std::size_t it = 0; it < config.n_samples; ++it) {
        ibp_sweep(data, state, counts, table, config, it);
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

BinaryMatrix sample_ibp_prior(std::size_t n_rows, double alpha, StreamRng& rng)
{
    BinaryMatrix z(n_rows, 0, 64);
    std::vector<std::size_t> m;
    for (std::size_t i = 0; i < n_rows; ++i) {
        const auto customers = static_cast<double>(i + 1);
        for (std::size_t l = 0; l < m.size(); ++l) {
            if (rng.bernoulli(static_cast<double>(m[l]) / customers)) {
                z.set(i, l, true);
                ++m[l];
            }
        }
        if (alpha <= 0.0) continue;
        std::poisson_distribution<std::size_t> new_dishes(alpha / customers);
        const std::size_t k = new_dishes(rng);
        const std::size_t first = z.cols();
        z.append_cols(k);
        for (std::size_t l = first; l < first + k; ++l) {
            z.set(i, l, true);
            m.push_back(1);
        }
    }
    return z.compact();
}

}  // namespace bmf
