#include "dresp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dresp/special_functions.hpp"

namespace dresp {

const char* to_string(MetricsFlag f) {
    return f == MetricsFlag::ok ? "ok" : "degenerate";
}

namespace {

// Equality at relative tolerance: the matrix path and the slot-level actual
// bill may differ in the last ulps, and the identity permutation must still
// register as a tie.
bool bills_tie(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= kTieRelTol * scale;
}

CustomerMetrics summarize(const ConsumptionSeries& series, double bill,
                          std::span<const double> bills, bool population_moments) {
    const std::size_t n = bills.size();

    std::uint64_t above = 0;
    std::uint64_t ties = 0;
    double sum = 0;
    for (double value : bills) {
        sum += value;
        if (bills_tie(value, bill))
            ++ties;
        else if (value > bill)
            ++above;
    }
    const double mean = sum / static_cast<double>(n);

    double ss = 0;
    for (double value : bills) {
        const double d = value - mean;
        ss += d * d;
    }
    const double denom = population_moments ? static_cast<double>(n) : static_cast<double>(n - 1);
    const double sd = std::sqrt(ss / denom);

    CustomerMetrics m;
    m.customer_id = series.customer_id;
    m.group = series.group;
    m.bill = bill;
    m.mean_random_bill = mean;
    m.sd_random_bill = sd;
    m.phi = (static_cast<double>(above) + 0.5 * static_cast<double>(ties)) /
            static_cast<double>(n);
    m.samples_used = n;
    m.ties_count = ties;
    if (sd <= kDegenerateRelTol * std::abs(mean) || sd == 0.0) {
        m.flag = MetricsFlag::degenerate;
        m.z = std::numeric_limits<double>::quiet_NaN();
    } else {
        m.z = (mean - bill) / sd;
    }
    return m;
}

}  // namespace

CustomerMetrics estimate_metrics(const ConsumptionSeries& series, const PriceSignal& signal,
                                 const TimeGrid& grid, const SamplerConfig& config,
                                 const EstimateOptions& options) {
    const std::uint32_t samples = config.samples_per_customer;
    if (samples < 2) throw std::invalid_argument("estimate_metrics: need K >= 2 samples");
    if (options.pool && options.pool->num_days() != grid.num_days)
        throw std::invalid_argument("estimate_metrics: pool grid mismatch");

    const double bill = actual_bill(series, signal);

    std::vector<double> bills(samples);
    const bool use_pool =
        config.seeding_mode == SeedingMode::shared_pool && options.pool != nullptr;
    RngStream stream = customer_stream(config, series.customer_id);
    std::vector<std::uint32_t> perm(grid.num_days);

    if (options.path == BillEvalPath::day_matrix) {
        const DayInteractionMatrix m = day_interaction_matrix(series, signal, grid);
        for (std::uint32_t k = 0; k < samples; ++k) {
            if (use_pool) {
                bills[k] = permuted_bill(m, options.pool->permutation(k));
            } else {
                sample_day_permutation(stream, perm);
                bills[k] = permuted_bill(m, perm);
            }
        }
    } else {
        for (std::uint32_t k = 0; k < samples; ++k) {
            if (use_pool) {
                bills[k] = permuted_bill_direct(series, signal, grid, options.pool->permutation(k));
            } else {
                sample_day_permutation(stream, perm);
                bills[k] = permuted_bill_direct(series, signal, grid, perm);
            }
        }
    }

    return summarize(series, bill, bills, /*population_moments=*/false);
}

CustomerMetrics exact_metrics(const ConsumptionSeries& series, const PriceSignal& signal,
                              const TimeGrid& grid) {
    if (grid.num_days > 8)
        throw std::invalid_argument("exact_metrics: enumeration limited to D <= 8");

    const double bill = actual_bill(series, signal);
    const DayInteractionMatrix m = day_interaction_matrix(series, signal, grid);

    std::vector<std::uint32_t> perm(grid.num_days);
    std::iota(perm.begin(), perm.end(), 0u);
    std::vector<double> bills;
    do {
        bills.push_back(permuted_bill(m, perm));
    } while (std::next_permutation(perm.begin(), perm.end()));

    return summarize(series, bill, bills, /*population_moments=*/true);
}

double phi_from_z(double z, ZMapping mapping) {
    if (mapping == ZMapping::halfvar_printed) return 0.5 * std::erfc(-z);
    return normal_cdf(z);
}

}  // namespace dresp
