#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dresp/model.hpp"

namespace dresp {

// One price band: a set of days, a slot range within each of those days, and
// the price level applied there. Days are either explicit or chosen by the
// generator ("auto"), optionally biased towards high-demand days.
struct PriceEvent {
    std::vector<std::uint32_t> days;  // explicit day list; ignored when auto_days > 0
    std::uint32_t auto_days = 0;      // number of days the generator places
    std::uint32_t slot_begin = 0;     // [slot_begin, slot_end) within the day
    std::uint32_t slot_end = 0;
    double price_level = 1.0;
};

// Diurnal base profile: two Gaussian bumps (morning/evening) over a floor,
// scaled per household by a lognormal factor, with lognormal day-to-day and
// slot-level noise. All noise is per-household (idiosyncratic); a shared
// day factor exists only to support price signal bias scenarios.
struct BaseProfileSpec {
    double base_load = 0.15;  // kWh per half-hour-equivalent slot floor
    double morning_peak = 0.35;
    double morning_center_hours = 7.5;
    double morning_width_hours = 1.5;
    double evening_peak = 0.8;
    double evening_center_hours = 18.5;
    double evening_width_hours = 2.2;
    double household_sd = 0.3;  // lognormal sigma of the household scale
    double day_sd = 0.2;        // lognormal sigma of the per-day factor
    double slot_sd = 0.15;      // lognormal sigma of the per-slot noise
};

struct ScenarioConfig {
    std::uint32_t num_treatment = 0;
    std::uint32_t num_control = 0;
    TimeGrid grid{48, 2};
    double responsive_fraction_true = 0;
    double response_strength = 0;      // peak fractional reduction in high-price slots
    double strength_min_factor = 0.5;  // responders draw strength in [min_factor, 1] * response_strength
    double recovery_share = 1.0;       // share of shed energy recovered in adjacent cheaper slots
    double price_normal = 1.0;
    std::vector<PriceEvent> events;
    double signal_bias_strength = 0;  // > 0 places auto events preferentially on high-demand days
    double common_day_sd = 0;         // shared (population-wide) day factor; 0 disables
    BaseProfileSpec profile;
};

struct GroundTruthLabel {
    std::string customer_id;
    bool responsive = false;
    double response_strength = 0;  // household-specific strength actually applied
};

struct ScenarioData {
    std::vector<ConsumptionSeries> series;  // treatment block then control block, id order
    PriceSignal signal;
    std::vector<GroundTruthLabel> labels;
};

// Deterministic for a fixed (config, seed): households derive their own
// streams, so generation order never matters. Throws std::invalid_argument on
// infeasible configs (overlapping contradictory price bands, empty groups,
// a signal without two distinct day vectors).
ScenarioData generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

// Flat key = value scenario file; '#' starts a comment, keys are documented
// in the README. The "event" key repeats, one price band each:
//   event = auto:20 34-40 3.0
//   event = 1,4,9-12 10-14 0.5
ScenarioConfig parse_scenario_config(std::istream& in);
ScenarioConfig load_scenario_config(const std::string& path);

}  // namespace dresp
