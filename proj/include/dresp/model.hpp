#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dresp {

enum class Group { treatment, control };

const char* to_string(Group g);

// Slot/day indexing shared by every module. Slots are 0-based; slot t belongs
// to day t / slots_per_day. No partial days.
struct TimeGrid {
    std::uint32_t slots_per_day = 0;  // S
    std::uint32_t num_days = 0;       // D

    // Throws std::invalid_argument unless S >= 1 and D >= 2.
    TimeGrid(std::uint32_t s, std::uint32_t d);

    std::size_t total_slots() const {
        return static_cast<std::size_t>(slots_per_day) * num_days;
    }
    std::uint32_t day_of_slot(std::size_t t) const {
        return static_cast<std::uint32_t>(t / slots_per_day);
    }
    std::uint32_t slot_in_day(std::size_t t) const {
        return static_cast<std::uint32_t>(t % slots_per_day);
    }
};

// Per-customer kWh readings on the grid. Immutable after construction.
struct ConsumptionSeries {
    std::string customer_id;
    std::vector<double> readings;  // kWh per slot, length == grid.total_slots()
    Group group = Group::treatment;
};

// Tariff prices on the grid, shared by all customers.
struct PriceSignal {
    std::vector<double> prices;  // currency per kWh, length == grid.total_slots()
};

namespace reason {
inline constexpr const char* length_mismatch = "length_mismatch";
inline constexpr const char* negative_reading = "negative_reading";
inline constexpr const char* non_finite_reading = "non_finite_reading";
inline constexpr const char* duplicate_customer = "duplicate_customer";
inline constexpr const char* missing_group = "missing_group";
inline constexpr const char* missing_reads = "missing_reads";
inline constexpr const char* duplicate_slot = "duplicate_slot";
inline constexpr const char* price_length_mismatch = "price_length_mismatch";
inline constexpr const char* negative_price = "negative_price";
inline constexpr const char* non_finite_price = "non_finite_price";
inline constexpr const char* degenerate_signal = "degenerate_signal";
}  // namespace reason

struct SeriesFailure {
    std::string customer_id;
    std::string reason;
};

struct ValidationReport {
    std::vector<SeriesFailure> series_failures;  // sorted by (customer_id, reason)
    std::vector<std::string> global_failures;    // signal-level problems
    std::size_t num_passed = 0;
    std::size_t treatment_count = 0;  // among passing series
    std::size_t control_count = 0;

    bool ok() const { return series_failures.empty() && global_failures.empty(); }
};

// Checks every type invariant. Per-series problems are reported per series;
// signal-level problems (wrong length, negative prices, all day vectors
// identical) fail globally. Throws std::invalid_argument on an empty
// collection. Order-independent: permuting the input permutes nothing in the
// report.
ValidationReport validate_dataset(std::span<const ConsumptionSeries> series_set,
                                  const PriceSignal& signal, const TimeGrid& grid);

// True when at least two day-level price vectors differ. A signal without two
// distinct day vectors makes every permuted bill identical and phi undefined.
bool signal_has_distinct_days(const PriceSignal& signal, const TimeGrid& grid);

}  // namespace dresp
