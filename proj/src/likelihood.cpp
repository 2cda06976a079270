#include "bmf/likelihood.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace bmf {

NoiseParam::NoiseParam(double lambda) : lambda_(lambda)
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("noise parameter must be finite and nonnegative, got " + std::to_string(lambda));
    lambda_ = std::min(lambda, kLambdaMax);
}

double log_likelihood(const PredictionCounts& counts, double lambda)
{
    const auto correct = static_cast<double>(counts.correct());
    const auto wrong = static_cast<double>(counts.wrong());
    double ll = 0.0;
    if (correct > 0) ll += correct * log_sigmoid(lambda);
    if (wrong > 0) ll += wrong * log_sigmoid(-lambda);
    return ll;
}

double log_likelihood(const BinaryMatrix& x, const BinaryMatrix& z, const BinaryMatrix& u, NoiseParam lambda)
{
    return log_likelihood(prediction_counts(x, z, u), lambda.value());
}

NoiseParam lambda_mle(const PredictionCounts& counts, Smoothing smoothing)
{
    const auto correct = static_cast<double>(counts.correct());
    const auto wrong = static_cast<double>(counts.wrong());
    double lambda = 0.0;
    if (smoothing == Smoothing::laplace) {
        lambda = logit((correct + 1.0) / (correct + wrong + 2.0));
    } else if (wrong == 0.0) {
        lambda = correct > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
        lambda = std::log(correct) - std::log(wrong);
    }
    return NoiseParam(std::clamp(lambda, 0.0, kLambdaMax));
}

}  // namespace bmf
