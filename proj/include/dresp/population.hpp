#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dresp/metrics.hpp"

namespace dresp {

struct RankedCustomer {
    std::string customer_id;
    double phi = 0;
    double rank = 0;  // 1..N, ties share their mean rank
};

struct RankTable {
    std::vector<RankedCustomer> entries;  // input order
    std::vector<std::string> excluded;    // degenerate customers, reported not ranked
};

// Confidence ranking: higher phi, higher rank. Degenerate-flagged customers
// are excluded and listed. Throws when no rankable metric remains.
RankTable rank_customers(std::span<const CustomerMetrics> metrics);

// Empirical CDF with the counting rule F(x) = #{v <= x} / N.
class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::vector<double> values);  // throws on empty input

    double operator()(double x) const;
    std::size_t size() const { return sorted_.size(); }
    std::span<const double> sorted_values() const { return sorted_; }

private:
    std::vector<double> sorted_;
};

// Control-group CDF over phi, degenerate customers excluded.
EmpiricalCdf build_control_cdf(std::span<const CustomerMetrics> control_metrics);

struct CorrectedScore {
    std::string customer_id;
    double phi = 0;
    double psi = 0;  // F_control(phi)
};

struct CorrectedScores {
    std::vector<CorrectedScore> entries;  // input order
    std::vector<std::string> excluded;    // degenerate customers
};

// Bias correction psi = F_control(phi): monotone, maps into [0,1].
CorrectedScores bias_correct(std::span<const CustomerMetrics> treatment_metrics,
                             const EmpiricalCdf& control_cdf);

struct ClassificationSummary {
    double level = 0;
    std::vector<std::string> responsive_ids;  // psi >= level, input order
    std::size_t total_scored = 0;

    double fraction() const {
        return total_scored == 0 ? 0.0
                                 : static_cast<double>(responsive_ids.size()) /
                                       static_cast<double>(total_scored);
    }
};

// Subset with psi >= level. Requires 0 < level < 1.
ClassificationSummary classify_at_confidence(const CorrectedScores& scores, double level);

// 1-based average ranks (tied values share their mean rank).
std::vector<double> average_ranks(std::span<const double> values);

// Spearman rho with average-rank ties. Requires >= 3 pairs and non-constant
// inputs; throws otherwise.
double spearman_rank_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace dresp
