#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dresp/metrics.hpp"
#include "dresp/mixture.hpp"
#include "dresp/population.hpp"

namespace dresp {

// Runs estimate_metrics for every series, fanning out across threads.
// Results keep input order and are a pure function of (data, config): the
// per-customer seeding makes them independent of the thread count.
// progress, when set, is called with the number of completed customers.
std::vector<CustomerMetrics> estimate_all(
    std::span<const ConsumptionSeries> series_set, const PriceSignal& signal,
    const TimeGrid& grid, const SamplerConfig& config, BillEvalPath path = BillEvalPath::day_matrix,
    unsigned threads = 1, const std::function<void(std::size_t)>& progress = {});

struct AnalysisResult {
    RankTable ranks;  // treatment group
    std::optional<CorrectedScores> scores;
    std::optional<ClassificationSummary> classification;
    std::optional<MixtureFit> fit;
    std::vector<std::string> warnings;
};

// Population stages over a metrics table: confidence ranking, control-group
// CDF, bias correction, classification, mixture fit. Degrades explicitly:
// without a control group only the ranking runs; the mixture stage needs at
// least 50 corrected scores.
AnalysisResult analyze_metrics(std::span<const CustomerMetrics> metrics, double confidence_level,
                               const FitOptions& fit_options = {});

}  // namespace dresp
