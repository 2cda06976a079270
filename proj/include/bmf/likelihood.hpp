#pragma once

#include "bmf/bitmat.hpp"

#include <cmath>

namespace bmf {

// Cap that keeps λ finite when the reconstruction is perfect: logit(1 - 1e-8).
inline const double kLambdaMax = std::log((1.0 - 1e-8) / 1e-8);
inline constexpr double kLambdaInit = 0.5;

inline double sigmoid(double y)
{
    return y >= 0 ? 1.0 / (1.0 + std::exp(-y)) : std::exp(y) / (1.0 + std::exp(y));
}

// log σ(y), stable for large |y|.
inline double log_sigmoid(double y)
{
    return y >= 0 ? -std::log1p(std::exp(-y)) : y - std::log1p(std::exp(y));
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

// Logit-scale noise precision. Always in [0, kLambdaMax].
class NoiseParam {
public:
    NoiseParam() = default;
    explicit NoiseParam(double lambda);

    double value() const { return lambda_; }

    friend bool operator==(const NoiseParam&, const NoiseParam&) = default;

private:
    double lambda_ = kLambdaInit;
};

// Sum over all entries of log p(x_nd | Z, U, λ): C·log σ(λ) + W·log σ(−λ).
double log_likelihood(const PredictionCounts& counts, double lambda);
double log_likelihood(const BinaryMatrix& x, const BinaryMatrix& z, const BinaryMatrix& u, NoiseParam lambda);

enum class Smoothing { none, laplace };

// Closed-form maximiser of log_likelihood in λ, clamped to [0, kLambdaMax].
// With Laplace smoothing the estimate is logit((C+1)/(C+W+2)).
NoiseParam lambda_mle(const PredictionCounts& counts, Smoothing smoothing = Smoothing::laplace);

}  // namespace bmf
