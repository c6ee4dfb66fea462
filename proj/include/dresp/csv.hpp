#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "dresp/metrics.hpp"
#include "dresp/model.hpp"
#include "dresp/population.hpp"
#include "dresp/synth.hpp"

namespace dresp {

// Hard ingestion failure: unreadable file, bad header, malformed field.
// Contract-level problems (negative readings, missing slots...) are reported
// per series instead, so one bad customer never aborts a run.
struct CsvError : std::runtime_error {
    CsvError(const std::string& path, std::size_t line, const std::string& what);
};

// Shortest round-trip decimal formatting; output is byte-stable across runs.
std::string format_double(double v);

// Accepts plain decimals and scientific notation.
double parse_double(const std::string& field);

// prices.csv: header "slot,price", slots 0..T-1 each exactly once.
PriceSignal read_prices_csv(const std::string& path);

// groups.csv: header "customer_id,group", group in {treatment, control}.
std::unordered_map<std::string, Group> read_groups_csv(const std::string& path);

struct IngestResult {
    std::vector<ConsumptionSeries> series;  // first-appearance order
    std::vector<SeriesFailure> failures;    // missing_group / missing_reads / duplicate_slot
};

// consumption.csv: header "customer_id,slot,kwh", long format, slot 0-based.
// Series with missing or duplicate slots, or without a group assignment, land
// in failures; they are dropped from the returned set.
IngestResult read_consumption_csv(const std::string& path, const TimeGrid& grid,
                                  const std::unordered_map<std::string, Group>& groups);

void write_prices_csv(const std::string& path, const PriceSignal& signal);
void write_groups_csv(const std::string& path, std::span<const ConsumptionSeries> series);
void write_consumption_csv(const std::string& path, std::span<const ConsumptionSeries> series);
void write_labels_csv(const std::string& path, std::span<const GroundTruthLabel> labels);
std::vector<GroundTruthLabel> read_labels_csv(const std::string& path);

// metrics.csv: header "customer_id,group,bill,mu_B,sigma_B,phi,z,ties,flag".
void write_metrics_csv(const std::string& path, std::span<const CustomerMetrics> metrics);
std::vector<CustomerMetrics> read_metrics_csv(const std::string& path);

// ranks.csv: header "customer_id,phi,rank".
void write_ranks_csv(const std::string& path, const RankTable& table);

// psi.csv: header "customer_id,phi,psi".
void write_psi_csv(const std::string& path, const CorrectedScores& scores);
CorrectedScores read_psi_csv(const std::string& path);

// classification.csv: header "customer_id,psi,responsive_at_level" plus a
// trailing pr_responsive column when a mixture fit is available.
struct ClassificationRow {
    std::string customer_id;
    double psi = 0;
    bool responsive_at_level = false;
    std::optional<double> pr_responsive;
};
void write_classification_csv(const std::string& path, std::span<const ClassificationRow> rows);
std::vector<ClassificationRow> read_classification_csv(const std::string& path);

// Equal-width histogram over [0, 1].
struct Histogram {
    std::vector<double> edges;         // bin_count + 1 edges
    std::vector<std::uint64_t> counts; // bin_count counts
};
Histogram make_histogram(std::span<const double> values, int bin_count);

// hist csv: header "bin_lo,bin_hi,count", one row per bin.
void write_histogram_csv(const std::string& path, const Histogram& hist);
Histogram read_histogram_csv(const std::string& path);

}  // namespace dresp
