#include "dresp/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace dresp {

const char* to_string(Group g) {
    return g == Group::treatment ? "treatment" : "control";
}

TimeGrid::TimeGrid(std::uint32_t s, std::uint32_t d) : slots_per_day(s), num_days(d) {
    if (s < 1) throw std::invalid_argument("TimeGrid: slots_per_day must be >= 1");
    if (d < 2) throw std::invalid_argument("TimeGrid: num_days must be >= 2");
}

bool signal_has_distinct_days(const PriceSignal& signal, const TimeGrid& grid) {
    const std::uint32_t s = grid.slots_per_day;
    if (signal.prices.size() != grid.total_slots()) return false;
    const double* first = signal.prices.data();
    for (std::uint32_t d = 1; d < grid.num_days; ++d) {
        if (!std::equal(first, first + s, signal.prices.data() + static_cast<std::size_t>(d) * s))
            return true;
    }
    return false;
}

namespace {

const char* series_problem(const ConsumptionSeries& series, const TimeGrid& grid) {
    if (series.readings.size() != grid.total_slots()) return reason::length_mismatch;
    for (double v : series.readings) {
        if (!std::isfinite(v)) return reason::non_finite_reading;
        if (v < 0) return reason::negative_reading;
    }
    return nullptr;
}

}  // namespace

ValidationReport validate_dataset(std::span<const ConsumptionSeries> series_set,
                                  const PriceSignal& signal, const TimeGrid& grid) {
    if (series_set.empty()) throw std::invalid_argument("validate_dataset: empty input collection");

    ValidationReport report;

    if (signal.prices.size() != grid.total_slots()) {
        report.global_failures.emplace_back(reason::price_length_mismatch);
    } else {
        for (double p : signal.prices) {
            if (!std::isfinite(p)) {
                report.global_failures.emplace_back(reason::non_finite_price);
                break;
            }
            if (p < 0) {
                report.global_failures.emplace_back(reason::negative_price);
                break;
            }
        }
        if (report.global_failures.empty() && !signal_has_distinct_days(signal, grid))
            report.global_failures.emplace_back(reason::degenerate_signal);
    }

    std::unordered_map<std::string, int> id_count;
    for (const auto& series : series_set) ++id_count[series.customer_id];

    for (const auto& series : series_set) {
        if (id_count[series.customer_id] > 1) {
            report.series_failures.push_back({series.customer_id, reason::duplicate_customer});
            continue;
        }
        if (const char* why = series_problem(series, grid)) {
            report.series_failures.push_back({series.customer_id, why});
            continue;
        }
        ++report.num_passed;
        if (series.group == Group::treatment)
            ++report.treatment_count;
        else
            ++report.control_count;
    }

    std::sort(report.series_failures.begin(), report.series_failures.end(),
              [](const SeriesFailure& a, const SeriesFailure& b) {
                  return std::tie(a.customer_id, a.reason) < std::tie(b.customer_id, b.reason);
              });
    return report;
}

}  // namespace dresp
