#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dresp/population.hpp"

namespace dresp {

// Uniform background + Beta component:
//   f(psi) = lambda + (1 - lambda) * Beta(psi; alpha, beta).
// lambda is the non-responsive (uniform) weight; 1 - lambda the responsive
// fraction.
struct MixtureParams {
    double lambda = 0;
    double alpha = 1;
    double beta = 1;
};

// Density at psi in (0, 1); always >= lambda. Endpoints with a shape
// parameter < 1 are singular and throw for pointwise evaluation.
double mixture_density(const MixtureParams& params, double psi);

struct MixtureFit {
    MixtureParams params;
    int bin_count = 0;
    double neg_log_likelihood = 0;
    bool converged = false;

    double responsive_fraction() const { return 1.0 - params.lambda; }
};

enum class FitMethod {
    // Multinomial likelihood of the binned scores; bin probabilities
    // integrate the Beta component exactly, so shape parameters < 1 (density
    // unbounded at an endpoint) stay well-posed.
    binned_likelihood,
    // Least squares of bin-averaged model density against histogram density;
    // comparison mode only.
    histogram_least_squares,
};

struct FitOptions {
    FitMethod method = FitMethod::binned_likelihood;
    int bin_count = 50;
};

// Fits (lambda, alpha, beta) by multi-start Nelder-Mead over
// (logit lambda, log alpha, log beta), alpha and beta bounded to [0.01, 100].
// Deterministic: fixed start grid, best run by objective then start index.
// Requires >= 50 scores and bin_count >= 10; throws "degenerate_scores" when
// every score is identical.
MixtureFit fit_mixture(std::span<const double> psi_scores, const FitOptions& options = {});

MixtureFit fit_mixture(const CorrectedScores& scores, const FitOptions& options = {});

// Pr(responsive | psi) = 1 - lambda / f(psi); in [0, 1) on (0, 1) because
// f >= lambda pointwise.
double responsiveness_probability(const MixtureParams& params, double psi);

double responsiveness_probability(const MixtureFit& fit, double psi);

struct EndpointProbability {
    double value = 0;
    bool is_limit = false;  // true when the density diverges and 1 is reported as the limit
};

// Endpoint-safe variant: at psi in {0, 1} the density limit decides the
// value (shape < 1: diverges, probability -> 1; shape = 1: finite; shape > 1:
// density 0, probability 0).
EndpointProbability responsiveness_probability_at(const MixtureParams& params, double psi);

}  // namespace dresp
