#include "dresp/pipeline.hpp"

#include <atomic>
#include <mutex>
#include <optional>
#include <thread>

namespace dresp {

std::vector<CustomerMetrics> estimate_all(std::span<const ConsumptionSeries> series_set,
                                          const PriceSignal& signal, const TimeGrid& grid,
                                          const SamplerConfig& config, BillEvalPath path,
                                          unsigned threads, const std::function<void(std::size_t)>& progress) {
    std::optional<PermutationPool> pool;
    EstimateOptions options;
    options.path = path;
    if (config.seeding_mode == SeedingMode::shared_pool) {
        pool.emplace(config, grid.num_days);
        options.pool = &*pool;
    }

    std::vector<CustomerMetrics> results(series_set.size());
    if (series_set.empty()) return results;

    const unsigned workers =
        std::min<unsigned>(std::max(threads, 1u), static_cast<unsigned>(series_set.size()));

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= series_set.size()) return;
            try {
                results[i] = estimate_metrics(series_set[i], signal, grid, config, options);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
            const std::size_t completed = done.fetch_add(1) + 1;
            if (progress) {
                std::lock_guard<std::mutex> lock(progress_mutex);
                progress(completed);
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads_vec;
        threads_vec.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) threads_vec.emplace_back(worker);
        for (std::thread& t : threads_vec) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

AnalysisResult analyze_metrics(std::span<const CustomerMetrics> metrics, double confidence_level,
                               const FitOptions& fit_options) {
    std::vector<CustomerMetrics> treatment;
    std::vector<CustomerMetrics> control;
    for (const CustomerMetrics& m : metrics)
        (m.group == Group::treatment ? treatment : control).push_back(m);

    if (treatment.empty())
        throw std::invalid_argument("analyze_metrics: no treatment customers");

    AnalysisResult out;
    out.ranks = rank_customers(treatment);
    if (!out.ranks.excluded.empty())
        out.warnings.push_back(std::to_string(out.ranks.excluded.size()) +
                               " treatment customer(s) excluded as degenerate");

    std::size_t control_usable = 0;
    for (const CustomerMetrics& m : control)
        if (!m.degenerate()) ++control_usable;

    if (control_usable == 0) {
        out.warnings.push_back(
            "control group absent: bias correction, classification and mixture fit skipped");
        return out;
    }

    const EmpiricalCdf cdf = build_control_cdf(control);
    out.scores = bias_correct(treatment, cdf);
    out.classification = classify_at_confidence(*out.scores, confidence_level);

    if (out.scores->entries.size() < 50) {
        out.warnings.push_back("mixture fit skipped: fewer than 50 corrected scores");
        return out;
    }
    try {
        out.fit = fit_mixture(*out.scores, fit_options);
    } catch (const std::invalid_argument& e) {
        out.warnings.push_back(std::string("mixture fit skipped: ") + e.what());
    }
    return out;
}

}  // namespace dresp
