#pragma once

#include "bmf/bitmat.hpp"
#include "bmf/likelihood.hpp"
#include "bmf/random.hpp"

#include <bit>
#include <cstddef>
#include <span>
#include <vector>

namespace bmf {

// Gibbs update of one row of a factor matrix.
//
// A factor row f (L bits) selects codes, i.e. rows of the other factor's
// transpose (L × M bits). The data row x has M bits. For entry l the
// likelihood term of the full conditional is
//
//     λ · Σ_m x̃_m · code_l[m] · ∏_{l'≠l} (1 − f_l' · code_l'[m])
//
// and a position m contributes only when code_l covers it and no other active
// code does. Coverage is tracked as two bit planes: `once_` (covered by at
// least one active code) and `twice_` (at least two). Positions covered by
// codes other than l are then `twice_` if f_l = 1 and `once_` if f_l = 0.
class RowSampler {
public:
    explicit RowSampler(std::size_t width_bits)
        : once_(words_for(width_bits)), twice_(words_for(width_bits))
    {
    }

    // Recomputes the coverage planes for factor row `f`.
    void cover(std::span<const Word> f, std::size_t n_codes, const BinaryMatrix& codes)
    {
        std::fill(once_.begin(), once_.end(), Word{0});
        std::fill(twice_.begin(), twice_.end(), Word{0});
        for (std::size_t i = 0; i < words_for(n_codes); ++i) {
            Word bits = f[i];
            while (bits) {
                add(codes.row(i * kWordBits + static_cast<std::size_t>(std::countr_zero(bits))));
                bits &= bits - 1;
            }
        }
    }

    // Signed count Σ x̃_m over positions only code l would explain. cover()
    // must have been called for the current f.
    long long exclusive_score(std::span<const Word> x, std::span<const Word> code, bool active) const
    {
        const std::vector<Word>& others = active ? twice_ : once_;
        long long pos = 0;
        long long tot = 0;
        for (std::size_t i = 0; i < others.size(); ++i) {
            const Word rel = code[i] & ~others[i];
            pos += std::popcount(rel & x[i]);
            tot += std::popcount(rel);
        }
        return 2 * pos - tot;
    }

    // Resamples f_l for l = first..n_codes-1 in ascending order. prior_logit(l)
    // gives the prior log-odds of f_l = 1.
    template <class PriorLogit>
    void resample(std::span<const Word> x, std::span<Word> f, std::size_t n_codes, const BinaryMatrix& codes,
                  std::size_t first, double lambda, PriorLogit&& prior_logit, StreamRng& rng)
    {
        cover(f, n_codes, codes);
        for (std::size_t l = first; l < n_codes; ++l) {
            Word& word = f[l / kWordBits];
            const Word mask = Word{1} << (l % kWordBits);
            const bool was = (word & mask) != 0;
            const auto code = codes.row(l);
            const double score = static_cast<double>(exclusive_score(x, code, was));
            const bool now = rng.uniform() < sigmoid(lambda * score + prior_logit(l));
            if (now == was) continue;
            if (now) {
                word |= mask;
                add(code);
            } else {
                word &= ~mask;
                cover(f, n_codes, codes);
            }
        }
    }

    // Positions covered by at least one active code of the last row handled.
    std::span<const Word> coverage() const { return once_; }

private:
    void add(std::span<const Word> code)
    {
        for (std::size_t i = 0; i < once_.size(); ++i) {
            twice_[i] |= once_[i] & code[i];
            once_[i] |= code[i];
        }
    }

    std::vector<Word> once_;
    std::vector<Word> twice_;
};

}  // namespace bmf
