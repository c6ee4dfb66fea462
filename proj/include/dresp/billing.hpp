#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dresp/model.hpp"

namespace dresp {

// D x D precomputation: at(j, d) = sum_s price(day j, slot s) * consumption(day d, slot s).
// A day-permuted bill is then sum_d at(perm[d], d), so each Monte Carlo sample
// costs O(D) instead of O(T). The diagonal sums to the actual bill.
class DayInteractionMatrix {
public:
    DayInteractionMatrix(std::vector<double> values, std::uint32_t num_days);

    double at(std::uint32_t price_day, std::uint32_t consumption_day) const {
        return values_[static_cast<std::size_t>(price_day) * num_days_ + consumption_day];
    }
    std::uint32_t num_days() const { return num_days_; }
    std::span<const double> values() const { return values_; }
    double diagonal_sum() const;

private:
    std::vector<double> values_;  // row-major, rows = price day j, cols = consumption day d
    std::uint32_t num_days_;
};

// Actual bill b = sum_t p_t * c_t.
double actual_bill(const ConsumptionSeries& series, const PriceSignal& signal);

DayInteractionMatrix day_interaction_matrix(const ConsumptionSeries& series,
                                            const PriceSignal& signal, const TimeGrid& grid);

// Permuted bill sum_d m(perm[d], d); equals the slot-level evaluation of the
// day-block permutation expanded to slots. Throws on dimension mismatch.
double permuted_bill(const DayInteractionMatrix& m, std::span<const std::uint32_t> perm);

// Low-memory fallback: direct slot-level evaluation, no matrix. Agrees with
// permuted_bill to within accumulation tolerance.
double permuted_bill_direct(const ConsumptionSeries& series, const PriceSignal& signal,
                            const TimeGrid& grid, std::span<const std::uint32_t> perm);

}  // namespace dresp
