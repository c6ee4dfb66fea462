#include "dresp/billing.hpp"

#include <stdexcept>

namespace dresp {

DayInteractionMatrix::DayInteractionMatrix(std::vector<double> values, std::uint32_t num_days)
    : values_(std::move(values)), num_days_(num_days) {
    if (values_.size() != static_cast<std::size_t>(num_days_) * num_days_)
        throw std::invalid_argument("DayInteractionMatrix: values size must be D*D");
}

double DayInteractionMatrix::diagonal_sum() const {
    double acc = 0;
    for (std::uint32_t d = 0; d < num_days_; ++d) acc += at(d, d);
    return acc;
}

double actual_bill(const ConsumptionSeries& series, const PriceSignal& signal) {
    if (series.readings.size() != signal.prices.size())
        throw std::invalid_argument("actual_bill: series/signal length mismatch");
    double acc = 0;
    const double* c = series.readings.data();
    const double* p = signal.prices.data();
    const std::size_t n = series.readings.size();
    for (std::size_t t = 0; t < n; ++t) acc += p[t] * c[t];
    return acc;
}

DayInteractionMatrix day_interaction_matrix(const ConsumptionSeries& series,
                                            const PriceSignal& signal, const TimeGrid& grid) {
    const std::uint32_t days = grid.num_days;
    const std::uint32_t s = grid.slots_per_day;
    if (series.readings.size() != grid.total_slots() || signal.prices.size() != grid.total_slots())
        throw std::invalid_argument("day_interaction_matrix: input length mismatch");

    std::vector<double> values(static_cast<std::size_t>(days) * days);
    for (std::uint32_t j = 0; j < days; ++j) {
        const double* price_day = signal.prices.data() + static_cast<std::size_t>(j) * s;
        double* row = values.data() + static_cast<std::size_t>(j) * days;
        for (std::uint32_t d = 0; d < days; ++d) {
            const double* cons_day = series.readings.data() + static_cast<std::size_t>(d) * s;
            double acc = 0;
            for (std::uint32_t k = 0; k < s; ++k) acc += price_day[k] * cons_day[k];
            row[d] = acc;
        }
    }
    return DayInteractionMatrix(std::move(values), days);
}

double permuted_bill(const DayInteractionMatrix& m, std::span<const std::uint32_t> perm) {
    const std::uint32_t days = m.num_days();
    if (perm.size() != days)
        throw std::invalid_argument("permuted_bill: permutation size does not match matrix");
    const double* v = m.values().data();
    double acc = 0;
    for (std::uint32_t d = 0; d < days; ++d)
        acc += v[static_cast<std::size_t>(perm[d]) * days + d];
    return acc;
}

double permuted_bill_direct(const ConsumptionSeries& series, const PriceSignal& signal,
                            const TimeGrid& grid, std::span<const std::uint32_t> perm) {
    if (perm.size() != grid.num_days)
        throw std::invalid_argument("permuted_bill_direct: permutation size does not match grid");
    if (series.readings.size() != grid.total_slots() || signal.prices.size() != grid.total_slots())
        throw std::invalid_argument("permuted_bill_direct: input length mismatch");
    const std::uint32_t s = grid.slots_per_day;
    double acc = 0;
    for (std::uint32_t d = 0; d < grid.num_days; ++d) {
        const double* price_day = signal.prices.data() + static_cast<std::size_t>(perm[d]) * s;
        const double* cons_day = series.readings.data() + static_cast<std::size_t>(d) * s;
        for (std::uint32_t k = 0; k < s; ++k) acc += price_day[k] * cons_day[k];
    }
    return acc;
}

}  // namespace dresp
