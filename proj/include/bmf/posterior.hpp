#pragma once

#include "bmf/bitmat.hpp"
#include "bmf/chain.hpp"

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

namespace bmf {

struct LSummary {
    std::size_t mode = 0;
    double mean = 0.0;
    std::map<std::size_t, double> histogram;
};

// Row-major real matrix with entries in [0, 1].
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

struct FactorMatch {
    // (inferred column, true column) pairs with their Jaccard similarity.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<double> scores;
    // Mean over true columns; unmatched true columns count as 0.
    double mean_jaccard = 0.0;
};

class EmptyChainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Histogram, mean and mode of the L trace. Ties in the mode go to the smaller L.
LSummary l_summary(const Chain& chain);

// Entrywise posterior mean of Z after label alignment. The reference is the
// first sample whose L equals the posterior mode; every sample's columns are
// greedily paired with reference columns by descending Jaccard similarity,
// and columns that pair with nothing open new reference columns.
DenseMatrix marginal_mean_z(const Chain& chain);

double jaccard(std::span<const Word> a, std::span<const Word> b);

// (fp + fn) / (N·D).
double reconstruction_error(const BinaryMatrix& x, const BinaryMatrix& z, const BinaryMatrix& u);

FactorMatch match_factors(const BinaryMatrix& u_inferred, const BinaryMatrix& u_true);

}  // namespace bmf
