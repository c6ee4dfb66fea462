#include "dresp/population.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dresp {

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j (0-based) share the mean of ranks i+1..j+1
        const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

RankTable rank_customers(std::span<const CustomerMetrics> metrics) {
    if (metrics.empty()) throw std::invalid_argument("rank_customers: empty input");

    RankTable table;
    std::vector<double> phis;
    for (const auto& m : metrics) {
        if (m.degenerate()) {
            table.excluded.push_back(m.customer_id);
        } else {
            table.entries.push_back({m.customer_id, m.phi, 0.0});
            phis.push_back(m.phi);
        }
    }
    if (table.entries.empty())
        throw std::invalid_argument("rank_customers: no non-degenerate metrics");

    const std::vector<double> ranks = average_ranks(phis);
    for (std::size_t i = 0; i < ranks.size(); ++i) table.entries[i].rank = ranks[i];
    return table;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> values) : sorted_(std::move(values)) {
    if (sorted_.empty()) throw std::invalid_argument("EmpiricalCdf: empty sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
    const auto leq = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
    return static_cast<double>(leq) / static_cast<double>(sorted_.size());
}

EmpiricalCdf build_control_cdf(std::span<const CustomerMetrics> control_metrics) {
    std::vector<double> phis;
    for (const auto& m : control_metrics)
        if (!m.degenerate()) phis.push_back(m.phi);
    if (phis.empty()) throw std::invalid_argument("build_control_cdf: empty control group");
    return EmpiricalCdf(std::move(phis));
}

CorrectedScores bias_correct(std::span<const CustomerMetrics> treatment_metrics,
                             const EmpiricalCdf& control_cdf) {
    CorrectedScores scores;
    for (const auto& m : treatment_metrics) {
        if (m.degenerate()) {
            scores.excluded.push_back(m.customer_id);
            continue;
        }
        scores.entries.push_back({m.customer_id, m.phi, control_cdf(m.phi)});
    }
    return scores;
}

ClassificationSummary classify_at_confidence(const CorrectedScores& scores, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("classify_at_confidence: level must be in (0,1)");
    ClassificationSummary summary;
    summary.level = level;
    summary.total_scored = scores.entries.size();
    for (const auto& entry : scores.entries)
        if (entry.psi >= level) summary.responsive_ids.push_back(entry.customer_id);
    return summary;
}

double spearman_rank_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("spearman_rank_correlation: length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw std::invalid_argument("spearman_rank_correlation: need at least 3 pairs");

    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);

    const double mean = (static_cast<double>(n) + 1.0) / 2.0;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = rx[i] - mean;
        const double dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("spearman_rank_correlation: constant input sequence");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace dresp
