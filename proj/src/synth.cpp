#include "dresp/synth.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>

#include "dresp/rng.hpp"

namespace dresp {

namespace {

void check_config(const ScenarioConfig& c) {
    if (c.num_treatment == 0) throw std::invalid_argument("scenario: empty_treatment");
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in01(c.responsive_fraction_true))
        throw std::invalid_argument("scenario: responsive_fraction must be in [0,1]");
    if (!in01(c.response_strength))
        throw std::invalid_argument("scenario: response_strength must be in [0,1]");
    if (!in01(c.strength_min_factor))
        throw std::invalid_argument("scenario: strength_min_factor must be in [0,1]");
    if (!in01(c.recovery_share))
        throw std::invalid_argument("scenario: recovery_share must be in [0,1]");
    if (!(c.price_normal > 0.0) || !std::isfinite(c.price_normal))
        throw std::invalid_argument("scenario: price_normal must be positive");
    if (!(c.signal_bias_strength >= 0.0) || !(c.common_day_sd >= 0.0))
        throw std::invalid_argument("scenario: bias and day-factor sd must be >= 0");
    const BaseProfileSpec& p = c.profile;
    if (!(p.base_load >= 0.0) || !(p.morning_peak >= 0.0) || !(p.evening_peak >= 0.0))
        throw std::invalid_argument("scenario: profile levels must be >= 0");
    if (!(p.morning_width_hours > 0.0) || !(p.evening_width_hours > 0.0))
        throw std::invalid_argument("scenario: profile widths must be positive");
    if (!(p.household_sd >= 0.0) || !(p.day_sd >= 0.0) || !(p.slot_sd >= 0.0))
        throw std::invalid_argument("scenario: noise sd must be >= 0");

    const std::uint32_t S = c.grid.slots_per_day;
    const std::uint32_t D = c.grid.num_days;
    for (const PriceEvent& ev : c.events) {
        if (!(ev.slot_begin < ev.slot_end) || ev.slot_end > S)
            throw std::invalid_argument("scenario: event slot range out of day");
        if (!(ev.price_level >= 0.0) || !std::isfinite(ev.price_level))
            throw std::invalid_argument("scenario: event price level must be >= 0");
        if (ev.auto_days == 0) {
            if (ev.days.empty())
                throw std::invalid_argument("scenario: event needs days or auto count");
            for (std::uint32_t d : ev.days)
                if (d >= D) throw std::invalid_argument("scenario: event day out of range");
        } else if (ev.auto_days > D) {
            throw std::invalid_argument("scenario: event auto day count exceeds days");
        }
    }
}

double lognormal_factor(RngStream& stream, double sd) {
    if (sd == 0.0) return 1.0;
    // mean-one lognormal: E[exp(sd N - sd^2/2)] = 1
    return std::exp(sd * stream.next_normal() - 0.5 * sd * sd);
}

// Top-k selection by perturbed score; bias > 0 favours high-propensity days.
std::vector<std::uint32_t> pick_auto_days(std::span<const double> propensity,
                                          const std::vector<bool>& claimed,
                                          std::uint32_t want, double bias, RngStream& stream) {
    std::vector<std::pair<double, std::uint32_t>> scored;
    for (std::uint32_t d = 0; d < propensity.size(); ++d) {
        if (claimed[d]) continue;
        const double u = stream.next_unit();
        const double gumbel = -std::log(-std::log(std::max(u, 1e-300)));
        scored.emplace_back(bias * propensity[d] + gumbel, d);
    }
    if (scored.size() < want)
        throw std::invalid_argument("scenario: not enough free days for auto event");
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<std::uint32_t> days(want);
    for (std::uint32_t k = 0; k < want; ++k) days[k] = scored[k].second;
    std::sort(days.begin(), days.end());
    return days;
}

void apply_event_prices(std::vector<double>& prices, std::vector<bool>& slot_set,
                        const TimeGrid& grid, std::span<const std::uint32_t> days,
                        const PriceEvent& ev) {
    for (std::uint32_t d : days) {
        for (std::uint32_t s = ev.slot_begin; s < ev.slot_end; ++s) {
            const std::size_t t = static_cast<std::size_t>(d) * grid.slots_per_day + s;
            if (slot_set[t] && prices[t] != ev.price_level)
                throw std::invalid_argument("scenario: conflicting price bands");
            prices[t] = ev.price_level;
            slot_set[t] = true;
        }
    }
}

std::string padded_id(char prefix, std::uint32_t index, std::size_t width) {
    std::string digits = std::to_string(index);
    std::string id(1, prefix);
    if (digits.size() < width) id.append(width - digits.size(), '0');
    id += digits;
    return id;
}

// Load shifting: shed a fraction of each contiguous high-price run, return a
// share of it to up to three non-high slots on each side of the run.
void apply_response(std::vector<double>& readings, std::span<const double> prices,
                    const TimeGrid& grid, double price_normal, double strength,
                    double recovery_share) {
    const std::uint32_t S = grid.slots_per_day;
    for (std::uint32_t d = 0; d < grid.num_days; ++d) {
        const std::size_t base = static_cast<std::size_t>(d) * S;
        std::uint32_t s = 0;
        while (s < S) {
            if (!(prices[base + s] > price_normal)) {
                ++s;
                continue;
            }
            std::uint32_t run_begin = s;
            while (s < S && prices[base + s] > price_normal) ++s;
            const std::uint32_t run_end = s;

            double shed = 0;
            for (std::uint32_t t = run_begin; t < run_end; ++t) {
                const double amount = strength * readings[base + t];
                readings[base + t] -= amount;
                shed += amount;
            }

            std::vector<std::size_t> receivers;
            for (std::uint32_t back = run_begin; back > 0 && receivers.size() < 3; --back) {
                const std::uint32_t t = back - 1;
                if (prices[base + t] > price_normal) break;
                receivers.push_back(base + t);
            }
            const std::size_t left_count = receivers.size();
            for (std::uint32_t t = run_end; t < S && receivers.size() < left_count + 3; ++t) {
                if (prices[base + t] > price_normal) break;
                receivers.push_back(base + t);
            }
            if (receivers.empty()) continue;  // nowhere to shift; energy is lost
            const double share = recovery_share * shed / static_cast<double>(receivers.size());
            for (std::size_t t : receivers) readings[t] += share;
        }
    }
}

}  // namespace

ScenarioData generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
    check_config(config);
    const TimeGrid& grid = config.grid;
    const std::uint32_t S = grid.slots_per_day;
    const std::uint32_t D = grid.num_days;
    const std::size_t T = grid.total_slots();

    RngStream signal_stream(stream_seed(seed, "signal"));

    // Shared day factors drive both demand (all households) and, through the
    // propensity scores, biased event placement.
    std::vector<double> day_factor(D, 1.0);
    std::vector<double> day_propensity(D, 0.0);
    if (config.common_day_sd > 0.0) {
        for (std::uint32_t d = 0; d < D; ++d) {
            const double n = signal_stream.next_normal();
            day_propensity[d] = n;
            day_factor[d] = std::exp(config.common_day_sd * n -
                                     0.5 * config.common_day_sd * config.common_day_sd);
        }
    }

    std::vector<double> prices(T, config.price_normal);
    std::vector<bool> slot_set(T, false);
    std::vector<bool> day_claimed(D, false);

    // Explicit day lists are honoured before any auto placement runs.
    for (const PriceEvent& ev : config.events) {
        if (ev.auto_days > 0) continue;
        std::vector<std::uint32_t> days = ev.days;
        std::sort(days.begin(), days.end());
        if (std::adjacent_find(days.begin(), days.end()) != days.end())
            throw std::invalid_argument("scenario: duplicate day in event");
        apply_event_prices(prices, slot_set, grid, days, ev);
        for (std::uint32_t d : days) day_claimed[d] = true;
    }
    for (const PriceEvent& ev : config.events) {
        if (ev.auto_days == 0) continue;
        const std::vector<std::uint32_t> days =
            pick_auto_days(day_propensity, day_claimed, ev.auto_days,
                           config.signal_bias_strength, signal_stream);
        apply_event_prices(prices, slot_set, grid, days, ev);
        for (std::uint32_t d : days) day_claimed[d] = true;
    }

    PriceSignal signal{std::move(prices)};
    if (!signal_has_distinct_days(signal, grid))
        throw std::invalid_argument("scenario: degenerate_signal (no day-to-day variation)");

    // Slot-of-day base curve.
    std::vector<double> base_curve(S);
    const BaseProfileSpec& prof = config.profile;
    for (std::uint32_t s = 0; s < S; ++s) {
        const double hour = (s + 0.5) * 24.0 / static_cast<double>(S);
        auto bump = [hour](double peak, double center, double width) {
            const double z = (hour - center) / width;
            return peak * std::exp(-0.5 * z * z);
        };
        base_curve[s] = prof.base_load +
                        bump(prof.morning_peak, prof.morning_center_hours, prof.morning_width_hours) +
                        bump(prof.evening_peak, prof.evening_center_hours, prof.evening_width_hours);
    }

    const std::uint32_t total_households = config.num_treatment + config.num_control;
    const std::uint32_t num_responders = static_cast<std::uint32_t>(std::llround(
        config.responsive_fraction_true * static_cast<double>(config.num_treatment)));
    const std::size_t id_width =
        std::max<std::size_t>(5, std::to_string(total_households).size());

    ScenarioData out;
    out.signal = std::move(signal);
    out.series.reserve(total_households);
    out.labels.reserve(total_households);

    for (std::uint32_t h = 0; h < total_households; ++h) {
        const bool treatment = h < config.num_treatment;
        const std::uint32_t index = treatment ? h + 1 : h - config.num_treatment + 1;
        const std::string id = padded_id(treatment ? 'T' : 'C', index, id_width);
        const bool responder = treatment && h < num_responders;

        RngStream hh(stream_seed(seed, "hh:" + id));
        const double scale = lognormal_factor(hh, prof.household_sd);

        std::vector<double> readings(T);
        for (std::uint32_t d = 0; d < D; ++d) {
            const double f_day = day_factor[d] * lognormal_factor(hh, prof.day_sd);
            const std::size_t base = static_cast<std::size_t>(d) * S;
            for (std::uint32_t s = 0; s < S; ++s)
                readings[base + s] =
                    base_curve[s] * scale * f_day * lognormal_factor(hh, prof.slot_sd);
        }

        double strength = 0;
        if (responder) {
            // separate stream keeps base consumption identical across
            // scenarios that differ only in response settings
            RngStream str(stream_seed(seed, "strength:" + id));
            const double factor = config.strength_min_factor +
                                  (1.0 - config.strength_min_factor) * str.next_unit();
            strength = config.response_strength * factor;
            if (strength > 0.0)
                apply_response(readings, out.signal.prices, grid, config.price_normal,
                               strength, config.recovery_share);
        }

        out.series.push_back(ConsumptionSeries{
            id, std::move(readings), treatment ? Group::treatment : Group::control});
        out.labels.push_back(GroundTruthLabel{id, responder, strength});
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

[[noreturn]] void config_fail(std::size_t line, const std::string& what) {
    throw std::invalid_argument("scenario config line " + std::to_string(line) + ": " + what);
}

double parse_f64(std::string_view v, std::size_t line) {
    double out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        config_fail(line, "bad number '" + std::string(v) + "'");
    return out;
}

std::uint32_t parse_u32(std::string_view v, std::size_t line) {
    std::uint32_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        config_fail(line, "bad integer '" + std::string(v) + "'");
    return out;
}

// "3", "9-12", comma separated; inclusive ranges.
std::vector<std::uint32_t> parse_day_list(std::string_view v, std::size_t line) {
    std::vector<std::uint32_t> days;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        std::size_t comma = v.find(',', pos);
        if (comma == std::string_view::npos) comma = v.size();
        const std::string_view item = trim(v.substr(pos, comma - pos));
        if (item.empty()) config_fail(line, "empty day entry");
        const std::size_t dash = item.find('-');
        if (dash == std::string_view::npos) {
            days.push_back(parse_u32(item, line));
        } else {
            const std::uint32_t lo = parse_u32(trim(item.substr(0, dash)), line);
            const std::uint32_t hi = parse_u32(trim(item.substr(dash + 1)), line);
            if (hi < lo) config_fail(line, "day range reversed");
            for (std::uint32_t d = lo; d <= hi; ++d) days.push_back(d);
        }
        if (comma == v.size()) break;
        pos = comma + 1;
    }
    return days;
}

PriceEvent parse_event(std::string_view v, std::size_t line) {
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < v.size()) {
        while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos]))) ++pos;
        std::size_t end = pos;
        while (end < v.size() && !std::isspace(static_cast<unsigned char>(v[end]))) ++end;
        if (end > pos) tokens.push_back(v.substr(pos, end - pos));
        pos = end;
    }
    if (tokens.size() != 3)
        config_fail(line, "event needs: <days|auto:N> <first_slot-last_slot> <price>");

    PriceEvent ev;
    if (tokens[0].starts_with("auto:")) {
        ev.auto_days = parse_u32(tokens[0].substr(5), line);
        if (ev.auto_days == 0) config_fail(line, "auto event needs at least one day");
    } else {
        ev.days = parse_day_list(tokens[0], line);
    }
    const std::size_t dash = tokens[1].find('-');
    if (dash == std::string_view::npos) config_fail(line, "slot range needs lo-hi");
    const std::uint32_t lo = parse_u32(tokens[1].substr(0, dash), line);
    const std::uint32_t hi = parse_u32(tokens[1].substr(dash + 1), line);
    if (hi < lo) config_fail(line, "slot range reversed");
    ev.slot_begin = lo;
    ev.slot_end = hi + 1;  // inclusive in the file format
    ev.price_level = parse_f64(tokens[2], line);
    return ev;
}

}  // namespace

ScenarioConfig parse_scenario_config(std::istream& in) {
    ScenarioConfig c;
    std::uint32_t slots = c.grid.slots_per_day;
    std::uint32_t days = c.grid.num_days;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) config_fail(line_no, "expected key = value");
        const std::string key{trim(line.substr(0, eq))};
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) config_fail(line_no, "expected key = value");

        if (key == "num_treatment") c.num_treatment = parse_u32(value, line_no);
        else if (key == "num_control") c.num_control = parse_u32(value, line_no);
        else if (key == "days") days = parse_u32(value, line_no);
        else if (key == "slots_per_day") slots = parse_u32(value, line_no);
        else if (key == "responsive_fraction") c.responsive_fraction_true = parse_f64(value, line_no);
        else if (key == "response_strength") c.response_strength = parse_f64(value, line_no);
        else if (key == "strength_min_factor") c.strength_min_factor = parse_f64(value, line_no);
        else if (key == "recovery_share") c.recovery_share = parse_f64(value, line_no);
        else if (key == "price_normal") c.price_normal = parse_f64(value, line_no);
        else if (key == "signal_bias") c.signal_bias_strength = parse_f64(value, line_no);
        else if (key == "common_day_sd") c.common_day_sd = parse_f64(value, line_no);
        else if (key == "base_load") c.profile.base_load = parse_f64(value, line_no);
        else if (key == "morning_peak") c.profile.morning_peak = parse_f64(value, line_no);
        else if (key == "morning_center_hours") c.profile.morning_center_hours = parse_f64(value, line_no);
        else if (key == "morning_width_hours") c.profile.morning_width_hours = parse_f64(value, line_no);
        else if (key == "evening_peak") c.profile.evening_peak = parse_f64(value, line_no);
        else if (key == "evening_center_hours") c.profile.evening_center_hours = parse_f64(value, line_no);
        else if (key == "evening_width_hours") c.profile.evening_width_hours = parse_f64(value, line_no);
        else if (key == "household_sd") c.profile.household_sd = parse_f64(value, line_no);
        else if (key == "day_sd") c.profile.day_sd = parse_f64(value, line_no);
        else if (key == "slot_sd") c.profile.slot_sd = parse_f64(value, line_no);
        else if (key == "event") c.events.push_back(parse_event(value, line_no));
        else config_fail(line_no, "unknown key '" + key + "'");
    }

    c.grid = TimeGrid(slots, days);
    return c;
}

ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario config: " + path);
    return parse_scenario_config(in);
}

}  // namespace dresp
