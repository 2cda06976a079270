#include "bmf/posterior.hpp"

#include <algorithm>
#include <tuple>

namespace bmf {

namespace {

void require_samples(const Chain& chain, const char* who)
{
    if (chain.empty()) throw EmptyChainError(std::string(who) + ": chain holds no samples");
}

struct Pairing {
    std::size_t row;
    std::size_t col;
    double score;
};

// Greedy one-to-one pairing of rows of `a` with rows of `b` by descending
// Jaccard similarity; ties go to the lower (a, b) index. Pairs with zero
// similarity are left unmatched.
std::vector<Pairing> greedy_pairing(const BinaryMatrix& a, const BinaryMatrix& b)
{
    std::vector<Pairing> all;
    all.reserve(a.rows() * b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double s = jaccard(a.row(i), b.row(j));
            if (s > 0.0) all.push_back({i, j, s});
        }
    std::stable_sort(all.begin(), all.end(), [](const Pairing& x, const Pairing& y) { return x.score > y.score; });
    std::vector<bool> used_a(a.rows()), used_b(b.rows());
    std::vector<Pairing> out;
    for (const Pairing& p : all) {
        if (used_a[p.row] || used_b[p.col]) continue;
        used_a[p.row] = used_b[p.col] = true;
        out.push_back(p);
    }
    return out;
}

}  // namespace

LSummary l_summary(const Chain& chain)
{
    require_samples(chain, "l_summary");
    LSummary s;
    std::map<std::size_t, std::size_t> counts;
    double total = 0.0;
    for (const ChainSample& sample : chain.samples) {
        ++counts[sample.latent_dim];
        total += static_cast<double>(sample.latent_dim);
    }
    const auto n = static_cast<double>(chain.size());
    s.mean = total / n;
    std::size_t best = 0;
    for (const auto& [l, c] : counts) {
        s.histogram[l] = static_cast<double>(c) / n;
        if (c > best) {
            best = c;
            s.mode = l;
        }
    }
    return s;
}

double jaccard(std::span<const Word> a, std::span<const Word> b)
{
    std::size_t both = 0;
    std::size_t either = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        both += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
        either += static_cast<std::size_t>(std::popcount(a[i] | b[i]));
    }
    return either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);
}

DenseMatrix marginal_mean_z(const Chain& chain)
{
    require_samples(chain, "marginal_mean_z");
    if (!chain.has_factors) throw std::invalid_argument("marginal_mean_z: chain was recorded without factors");

    const std::size_t mode = l_summary(chain).mode;
    const auto ref_it = std::find_if(chain.samples.begin(), chain.samples.end(),
                                     [mode](const ChainSample& s) { return s.latent_dim == mode; });
    const std::size_t n_rows = ref_it->z.rows();

    // Reference patterns as rows (one N-bit row per latent column).
    BinaryMatrix reference = ref_it->z.transpose();
    std::vector<std::vector<double>> sums(reference.rows(), std::vector<double>(n_rows, 0.0));

    for (const ChainSample& sample : chain.samples) {
        if (sample.z.rows() != n_rows) throw DimensionError("marginal_mean_z: samples disagree on N");
        const BinaryMatrix columns = sample.z.transpose();
        std::vector<bool> matched(columns.rows(), false);
        auto accumulate = [&](std::size_t col, std::size_t ref) {
            for (std::size_t n = 0; n < n_rows; ++n) sums[ref][n] += columns.get(col, n);
        };
        for (const Pairing& p : greedy_pairing(columns, reference)) {
            matched[p.row] = true;
            accumulate(p.row, p.col);
        }
        for (std::size_t c = 0; c < columns.rows(); ++c) {
            if (matched[c]) continue;
            reference.append_rows(1);
            for (std::size_t n = 0; n < n_rows; ++n) reference.set(reference.rows() - 1, n, columns.get(c, n));
            sums.emplace_back(n_rows, 0.0);
            accumulate(c, reference.rows() - 1);
        }
    }

    DenseMatrix mean(n_rows, reference.rows());
    const auto n_samples = static_cast<double>(chain.size());
    for (std::size_t l = 0; l < reference.rows(); ++l)
        for (std::size_t n = 0; n < n_rows; ++n) mean(n, l) = sums[l][n] / n_samples;
    return mean;
}

double reconstruction_error(const BinaryMatrix& x, const BinaryMatrix& z, const BinaryMatrix& u)
{
    const PredictionCounts c = prediction_counts(x, z, u);
    if (c.total() == 0) return 0.0;
    return static_cast<double>(c.wrong()) / static_cast<double>(c.total());
}

FactorMatch match_factors(const BinaryMatrix& u_inferred, const BinaryMatrix& u_true)
{
    if (u_inferred.rows() != u_true.rows()) throw DimensionError("match_factors: factors disagree on D");
    FactorMatch out;
    const BinaryMatrix inferred = u_inferred.transpose();
    const BinaryMatrix truth = u_true.transpose();
    auto pairing = greedy_pairing(inferred, truth);
    std::sort(pairing.begin(), pairing.end(), [](const Pairing& a, const Pairing& b) { return a.col < b.col; });
    double total = 0.0;
    for (const Pairing& p : pairing) {
        out.pairs.emplace_back(p.row, p.col);
        out.scores.push_back(p.score);
        total += p.score;
    }
    out.mean_jaccard = truth.rows() == 0 ? (inferred.rows() == 0 ? 1.0 : 0.0) : total / static_cast<double>(truth.rows());
    return out;
}

}  // namespace bmf
