#include "dresp/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dresp/nelder_mead.hpp"
#include "dresp/special_functions.hpp"

namespace dresp {

namespace {

constexpr double kShapeMin = 0.01;
constexpr double kShapeMax = 100.0;
// lambda stays in (0,1) through the logit; +-36 spans [2e-16, 1-2e-16].
constexpr double kLogitLimit = 36.0;

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

void check_params(const MixtureParams& p) {
    if (!(p.lambda >= 0.0 && p.lambda <= 1.0))
        throw std::invalid_argument("mixture: lambda must be in [0,1]");
    if (!(p.alpha > 0.0) || !(p.beta > 0.0))
        throw std::invalid_argument("mixture: alpha and beta must be > 0");
}

MixtureParams decode(std::span<const double> x) {
    const double t = std::clamp(x[0], -kLogitLimit, kLogitLimit);
    const double la = std::clamp(x[1], std::log(kShapeMin), std::log(kShapeMax));
    const double lb = std::clamp(x[2], std::log(kShapeMin), std::log(kShapeMax));
    return {sigmoid(t), std::exp(la), std::exp(lb)};
}

double beta_pdf(double alpha, double beta, double x) {
    return std::exp((alpha - 1.0) * std::log(x) + (beta - 1.0) * std::log1p(-x) -
                    log_beta(alpha, beta));
}

// Beta pdf at an endpoint, or the divergence marker.
double beta_pdf_endpoint(double alpha, double beta, bool at_one, bool& diverges) {
    const double shape = at_one ? beta : alpha;
    diverges = shape < 1.0;
    if (diverges) return 0.0;
    if (shape > 1.0) return 0.0;
    // shape == 1: the remaining factor is finite
    return at_one ? std::exp((alpha - 1.0) * 0.0 - log_beta(alpha, beta))  // x=1: x^(a-1)=1
                  : std::exp((beta - 1.0) * 0.0 - log_beta(alpha, beta));
}

}  // namespace

double mixture_density(const MixtureParams& params, double psi) {
    check_params(params);
    if (std::isnan(psi) || psi < 0.0 || psi > 1.0)
        throw std::invalid_argument("mixture_density: psi must be in [0,1]");
    if (psi == 0.0 || psi == 1.0) {
        bool diverges = false;
        const double pdf = beta_pdf_endpoint(params.alpha, params.beta, psi == 1.0, diverges);
        if (diverges)
            throw std::invalid_argument("mixture_density: endpoint singularity (shape < 1)");
        return params.lambda + (1.0 - params.lambda) * pdf;
    }
    return params.lambda + (1.0 - params.lambda) * beta_pdf(params.alpha, params.beta, psi);
}

namespace {

struct BinnedData {
    std::vector<double> counts;
    double total = 0;
    int bins = 0;
};

BinnedData bin_scores(std::span<const double> scores, int bin_count) {
    BinnedData data;
    data.bins = bin_count;
    data.counts.assign(static_cast<std::size_t>(bin_count), 0.0);
    for (double v : scores) {
        if (std::isnan(v) || v < 0.0 || v > 1.0)
            throw std::invalid_argument("fit_mixture: scores must be in [0,1]");
        // Endpoint scores go to the first/last bin.
        const int idx = std::min(bin_count - 1,
                                 static_cast<int>(v * static_cast<double>(bin_count)));
        data.counts[static_cast<std::size_t>(idx)] += 1.0;
        data.total += 1.0;
    }
    return data;
}

// Bin probabilities lambda * w + (1 - lambda) * (I(edge_hi) - I(edge_lo)).
// Integrating the Beta component keeps shapes < 1 (endpoint-singular
// densities) well-posed.
std::vector<double> bin_probabilities(const MixtureParams& p, int bins) {
    std::vector<double> cdf(static_cast<std::size_t>(bins) + 1);
    cdf[0] = 0.0;
    cdf[static_cast<std::size_t>(bins)] = 1.0;
    for (int k = 1; k < bins; ++k)
        cdf[static_cast<std::size_t>(k)] = regularized_incomplete_beta(
            p.alpha, p.beta, static_cast<double>(k) / static_cast<double>(bins));
    const double w = 1.0 / static_cast<double>(bins);
    std::vector<double> q(static_cast<std::size_t>(bins));
    for (int k = 0; k < bins; ++k) {
        const double seg = std::max(0.0, cdf[static_cast<std::size_t>(k) + 1] -
                                             cdf[static_cast<std::size_t>(k)]);
        q[static_cast<std::size_t>(k)] = p.lambda * w + (1.0 - p.lambda) * seg;
    }
    return q;
}

double binned_nll(const BinnedData& data, const MixtureParams& p) {
    const std::vector<double> q = bin_probabilities(p, data.bins);
    double nll = 0;
    for (int k = 0; k < data.bins; ++k) {
        const double n_k = data.counts[static_cast<std::size_t>(k)];
        if (n_k > 0) nll -= n_k * std::log(q[static_cast<std::size_t>(k)]);
    }
    return nll;
}

double least_squares_objective(const BinnedData& data, const MixtureParams& p) {
    const std::vector<double> q = bin_probabilities(p, data.bins);
    const double w = 1.0 / static_cast<double>(data.bins);
    double ss = 0;
    for (int k = 0; k < data.bins; ++k) {
        const double model_density = q[static_cast<std::size_t>(k)] / w;
        const double hist_density = data.counts[static_cast<std::size_t>(k)] / (data.total * w);
        const double r = model_density - hist_density;
        ss += r * r;
    }
    return ss;
}

}  // namespace

MixtureFit fit_mixture(std::span<const double> psi_scores, const FitOptions& options) {
    if (psi_scores.size() < 50)
        throw std::invalid_argument("fit_mixture: need at least 50 scores");
    if (options.bin_count < 10)
        throw std::invalid_argument("fit_mixture: need at least 10 bins");

    const double first = psi_scores.front();
    const bool all_same = std::all_of(psi_scores.begin(), psi_scores.end(),
                                      [&](double v) { return v == first; });
    if (all_same) throw std::invalid_argument("degenerate_scores");

    const BinnedData data = bin_scores(psi_scores, options.bin_count);

    const auto objective = [&](std::span<const double> x) {
        const MixtureParams p = decode(x);
        return options.method == FitMethod::binned_likelihood ? binned_nll(data, p)
                                                              : least_squares_objective(data, p);
    };

    // Deterministic multi-start grid over the transformed space.
    constexpr double lambda_starts[] = {0.1, 0.3, 0.5, 0.7, 0.9};
    constexpr double shape_starts[][2] = {{0.2, 0.2}, {0.2, 2.0}, {2.0, 0.2}, {2.0, 2.0}};

    NelderMeadOptions nm;
    nm.max_iterations = 2000;
    nm.spread_tolerance = 1e-10;
    nm.initial_step = 0.5;

    bool have_best = false;
    NelderMeadResult best;
    for (double l0 : lambda_starts) {
        for (const auto& s0 : shape_starts) {
            const double start[3] = {logit(l0), std::log(s0[0]), std::log(s0[1])};
            NelderMeadResult run = nelder_mead(objective, start, nm);
            if (!have_best || run.value < best.value) {  // ties keep the earlier start
                best = std::move(run);
                have_best = true;
            }
        }
    }

    MixtureFit fit;
    fit.params = decode(best.x);
    fit.bin_count = options.bin_count;
    fit.neg_log_likelihood = binned_nll(data, fit.params);
    fit.converged = best.converged;
    return fit;
}

MixtureFit fit_mixture(const CorrectedScores& scores, const FitOptions& options) {
    std::vector<double> psi;
    psi.reserve(scores.entries.size());
    for (const auto& e : scores.entries) psi.push_back(e.psi);
    return fit_mixture(psi, options);
}

double responsiveness_probability(const MixtureParams& params, double psi) {
    if (std::isnan(psi) || psi <= 0.0 || psi >= 1.0)
        throw std::invalid_argument("responsiveness_probability: psi must be in (0,1)");
    return 1.0 - params.lambda / mixture_density(params, psi);
}

double responsiveness_probability(const MixtureFit& fit, double psi) {
    if (!fit.converged)
        throw std::invalid_argument("responsiveness_probability: fit did not converge");
    return responsiveness_probability(fit.params, psi);
}

EndpointProbability responsiveness_probability_at(const MixtureParams& params, double psi) {
    if (std::isnan(psi) || psi < 0.0 || psi > 1.0)
        throw std::invalid_argument("responsiveness_probability_at: psi must be in [0,1]");
    if (psi > 0.0 && psi < 1.0) return {responsiveness_probability(params, psi), false};

    check_params(params);
    bool diverges = false;
    const double pdf = beta_pdf_endpoint(params.alpha, params.beta, psi == 1.0, diverges);
    if (diverges) return {1.0, true};  // density -> inf, probability -> 1 in the limit
    const double f = params.lambda + (1.0 - params.lambda) * pdf;
    // lambda = 0: every observed score is Beta-generated, so the interior
    // probability is identically 1; where the density vanishes the value only
    // exists as that limit.
    if (params.lambda == 0.0) return {1.0, f == 0.0};
    return {1.0 - params.lambda / f, false};
}

}  // namespace dresp
