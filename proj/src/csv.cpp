#include "dresp/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>
#include <system_error>

namespace dresp {

CsvError::CsvError(const std::string& path, std::size_t line, const std::string& what)
    : std::runtime_error(line == 0 ? path + ": " + what
                                   : path + ":" + std::to_string(line) + ": " + what) {}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

double parse_double(const std::string& field) {
    double out = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end)
        throw std::invalid_argument("bad number '" + field + "'");
    return out;
}

namespace {

constexpr std::string_view kPricesHeader = "slot,price";
constexpr std::string_view kGroupsHeader = "customer_id,group";
constexpr std::string_view kConsumptionHeader = "customer_id,slot,kwh";
constexpr std::string_view kLabelsHeader = "customer_id,responsive,response_strength";
constexpr std::string_view kMetricsHeader = "customer_id,group,bill,mu_B,sigma_B,phi,z,ties,flag";
constexpr std::string_view kRanksHeader = "customer_id,phi,rank";
constexpr std::string_view kPsiHeader = "customer_id,phi,psi";
constexpr std::string_view kClassificationHeader = "customer_id,psi,responsive_at_level";
constexpr std::string_view kHistHeader = "bin_lo,bin_hi,count";

// Line-oriented reader; tolerates CRLF, no quoting (fields never contain commas).
class CsvReader {
public:
    explicit CsvReader(const std::string& path) : path_(path), in_(path) {
        if (!in_) throw CsvError(path, 0, "cannot open file");
    }

    bool next_row(std::vector<std::string>& fields) {
        std::string line;
        if (!std::getline(in_, line)) return false;
        ++line_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        fields.clear();
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) {
                fields.emplace_back(line, pos);
                break;
            }
            fields.emplace_back(line, pos, comma - pos);
            pos = comma + 1;
        }
        return true;
    }

    void expect_header(std::string_view header) {
        std::string line;
        if (!std::getline(in_, line)) throw CsvError(path_, 1, "missing header");
        ++line_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line != header)
            throw CsvError(path_, 1, "expected header '" + std::string(header) + "'");
    }

    [[noreturn]] void fail(const std::string& what) const { throw CsvError(path_, line_, what); }

    void require_fields(const std::vector<std::string>& fields, std::size_t n) const {
        if (fields.size() != n)
            fail("expected " + std::to_string(n) + " fields, got " +
                 std::to_string(fields.size()));
    }

    std::size_t line() const { return line_; }

private:
    std::string path_;
    std::ifstream in_;
    std::size_t line_ = 0;
};

// Buffered writer: rows accumulate and flush in chunks, final flush checks.
class CsvWriter {
public:
    CsvWriter(const std::string& path, std::string_view header) : path_(path), out_(path) {
        if (!out_) throw CsvError(path, 0, "cannot open file for writing");
        buf_.reserve(kChunk + 256);
        buf_.append(header);
        buf_.push_back('\n');
    }

    void raw(std::string_view s) { buf_.append(s); }
    void field_sep() { buf_.push_back(','); }
    void number(double v) {
        char tmp[64];
        const auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof(tmp), v);
        buf_.append(tmp, ptr);
    }
    void integer(std::uint64_t v) { buf_.append(std::to_string(v)); }
    void end_row() {
        buf_.push_back('\n');
        if (buf_.size() >= kChunk) flush();
    }

    void finish() {
        flush();
        out_.flush();
        if (!out_) throw CsvError(path_, 0, "write failed");
    }

private:
    static constexpr std::size_t kChunk = 1 << 20;

    void flush() {
        out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
        buf_.clear();
    }

    std::string path_;
    std::ofstream out_;
    std::string buf_;
};

double parse_number(const CsvReader& r, const std::string& field) {
    double out = 0;
    const char* begin = field.data();
    const auto [ptr, ec] = std::from_chars(begin, begin + field.size(), out);
    if (ec != std::errc{} || ptr != begin + field.size())
        r.fail("bad number '" + field + "'");
    return out;
}

std::uint64_t parse_integer(const CsvReader& r, const std::string& field) {
    std::uint64_t out = 0;
    const char* begin = field.data();
    const auto [ptr, ec] = std::from_chars(begin, begin + field.size(), out);
    if (ec != std::errc{} || ptr != begin + field.size())
        r.fail("bad integer '" + field + "'");
    return out;
}

bool parse_bool01(const CsvReader& r, const std::string& field) {
    if (field == "1") return true;
    if (field == "0") return false;
    r.fail("expected 0 or 1, got '" + field + "'");
}

}  // namespace

PriceSignal read_prices_csv(const std::string& path) {
    CsvReader r(path);
    r.expect_header(kPricesHeader);
    std::vector<std::pair<std::uint64_t, double>> rows;
    std::vector<std::string> fields;
    while (r.next_row(fields)) {
        r.require_fields(fields, 2);
        rows.emplace_back(parse_integer(r, fields[0]), parse_number(r, fields[1]));
    }
    if (rows.empty()) throw CsvError(path, 0, "no price rows");

    const std::size_t total = rows.size();
    PriceSignal signal;
    signal.prices.assign(total, 0.0);
    std::vector<bool> seen(total, false);
    for (const auto& [slot, price] : rows) {
        if (slot >= total) throw CsvError(path, 0, "price slots are not 0..T-1");
        if (seen[slot]) throw CsvError(path, 0, "duplicate price slot " + std::to_string(slot));
        seen[slot] = true;
        signal.prices[slot] = price;
    }
    return signal;
}

std::unordered_map<std::string, Group> read_groups_csv(const std::string& path) {
    CsvReader r(path);
    r.expect_header(kGroupsHeader);
    std::unordered_map<std::string, Group> groups;
    std::vector<std::string> fields;
    while (r.next_row(fields)) {
        r.require_fields(fields, 2);
        Group g;
        if (fields[1] == "treatment") g = Group::treatment;
        else if (fields[1] == "control") g = Group::control;
        else r.fail("group must be treatment or control, got '" + fields[1] + "'");
        if (!groups.emplace(fields[0], g).second)
            r.fail("duplicate customer_id '" + fields[0] + "'");
    }
    return groups;
}

IngestResult read_consumption_csv(const std::string& path, const TimeGrid& grid,
                                  const std::unordered_map<std::string, Group>& groups) {
    const std::size_t total = grid.total_slots();

    struct Pending {
        std::string id;
        std::vector<double> readings;
        std::vector<bool> seen;
        std::size_t count = 0;
        bool duplicate = false;
    };

    CsvReader r(path);
    r.expect_header(kConsumptionHeader);
    std::vector<Pending> pending;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::string> fields;
    while (r.next_row(fields)) {
        r.require_fields(fields, 3);
        const std::uint64_t slot = parse_integer(r, fields[1]);
        if (slot >= total)
            r.fail("slot " + std::to_string(slot) + " outside grid of " +
                   std::to_string(total) + " slots");
        const double kwh = parse_number(r, fields[2]);

        auto [it, inserted] = index.emplace(fields[0], pending.size());
        if (inserted) {
            Pending p;
            p.id = fields[0];
            p.readings.assign(total, 0.0);
            p.seen.assign(total, false);
            pending.push_back(std::move(p));
        }
        Pending& p = pending[it->second];
        if (p.seen[slot]) {
            p.duplicate = true;
            continue;
        }
        p.seen[slot] = true;
        p.readings[slot] = kwh;
        ++p.count;
    }

    IngestResult out;
    for (Pending& p : pending) {
        const auto git = groups.find(p.id);
        bool keep = true;
        if (git == groups.end()) {
            out.failures.push_back({p.id, reason::missing_group});
            keep = false;
        }
        if (p.duplicate) {
            out.failures.push_back({p.id, reason::duplicate_slot});
            keep = false;
        } else if (p.count != total) {
            out.failures.push_back({p.id, reason::missing_reads});
            keep = false;
        }
        if (keep)
            out.series.push_back(ConsumptionSeries{p.id, std::move(p.readings), git->second});
    }
    return out;
}

void write_prices_csv(const std::string& path, const PriceSignal& signal) {
    CsvWriter w(path, kPricesHeader);
    for (std::size_t t = 0; t < signal.prices.size(); ++t) {
        w.integer(t);
        w.field_sep();
        w.number(signal.prices[t]);
        w.end_row();
    }
    w.finish();
}

void write_groups_csv(const std::string& path, std::span<const ConsumptionSeries> series) {
    CsvWriter w(path, kGroupsHeader);
    for (const ConsumptionSeries& s : series) {
        w.raw(s.customer_id);
        w.field_sep();
        w.raw(to_string(s.group));
        w.end_row();
    }
    w.finish();
}

void write_consumption_csv(const std::string& path, std::span<const ConsumptionSeries> series) {
    CsvWriter w(path, kConsumptionHeader);
    for (const ConsumptionSeries& s : series) {
        for (std::size_t t = 0; t < s.readings.size(); ++t) {
            w.raw(s.customer_id);
            w.field_sep();
            w.integer(t);
            w.field_sep();
            w.number(s.readings[t]);
            w.end_row();
        }
    }
    w.finish();
}

void write_labels_csv(const std::string& path, std::span<const GroundTruthLabel> labels) {
    CsvWriter w(path, kLabelsHeader);
    for (const GroundTruthLabel& l : labels) {
        w.raw(l.customer_id);
        w.field_sep();
        w.raw(l.responsive ? "1" : "0");
        w.field_sep();
        w.number(l.response_strength);
        w.end_row();
    }
    w.finish();
}

std::vector<GroundTruthLabel> read_labels_csv(const std::string& path) {
    CsvReader r(path);
    r.expect_header(kLabelsHeader);
    std::vector<GroundTruthLabel> labels;
    std::vector<std::string> fields;
    while (r.next_row(fields)) {
        r.require_fields(fields, 3);
        labels.push_back({fields[0], parse_bool01(r, fields[1]), parse_number(r, fields[2])});
    }
    return labels;
}

void write_metrics_csv(const std::string& path, std::span<const CustomerMetrics> metrics) {
    CsvWriter w(path, kMetricsHeader);
    for (const CustomerMetrics& m : metrics) {
        w.raw(m.customer_id);
        w.field_sep();
        w.raw(to_string(m.group));
        w.field_sep();
        w.number(m.bill);
        w.field_sep();
        w.number(m.mean_random_bill);
        w.field_sep();
        w.number(m.sd_random_bill);
        w.field_sep();
        w.number(m.phi);
        w.field_sep();
        w.number(m.z);
        w.field_sep();
        w.integer(m.ties_count);
        w.field_sep();
        w.raw(to_string(m.flag));
        w.end_row();
    }
    w.finish();
}

std::vector<CustomerMetrics> read_metrics_csv(const std::string& path) {
    CsvReader r(path);
    r.expect_header(kMetricsHeader);
    std::vector<CustomerMetrics> metrics;
    std::vector<std::string> fields;
    while (r.next_row(fields)) {
        r.require_fields(fields, 9);
        CustomerMetrics m;
        m.customer_id = fields[0];
        if (fields[1] == "treatment") m.group = Group::treatment;
        else if (fields[1] == "control") m.group = Group::control;
        else r.fail("bad group '" + fields[1] + "'");
        m.bill = parse_number(r, fields[2]);
        m.mean_random_bill = parse_number(r, fields[3]);
        m.sd_random_bill = parse_number(r, fields[4]);
        m.phi = parse_number(r, fields[5]);
        m.z = parse_number(r, fields[6]);
        m.ties_count = parse_integer(r, fields[7]);
        if (fields[8] == "ok") m.flag = MetricsFlag::ok;
        else if (fields[8] == "degenerate") m.flag = MetricsFlag::degenerate;
        else r.fail("bad flag '" + fields[8] + "'");
        metrics.push_back(std::move(m));
    }
    return metrics;
}

void write_ranks_csv(const std::string& path, const RankTable& table) {
    CsvWriter w(path, kRanksHeader);
    for (const RankedCustomer& e : table.entries) {
        w.raw(e.customer_id);
        w.field_sep();
        w.number(e.phi);
        w.field_sep();
        w.number(e.rank);
        w.end_row();
    }
    w.finish();
}

void write_psi_csv(const std::string& path, const CorrectedScores& scores) {
    CsvWriter w(path, kPsiHeader);
    for (const CorrectedScore& e : scores.entries) {
        w.raw(e.customer_id);
        w.field_sep();
        w.number(e.phi);
        w.field_sep();
        w.number(e.psi);
        w.end_row();
    }
    w.finish();
}

CorrectedScores read_psi_csv(const std::string& path) {
    CsvReader r(path);
    r.expect_header(kPsiHeader);
    CorrectedScores scores;
    std::vector<std::string> fields;
    while (r.next_row(fields)) {
        r.require_fields(fields, 3);
        scores.entries.push_back(
            {fields[0], parse_number(r, fields[1]), parse_number(r, fields[2])});
    }
    return scores;
}

void write_classification_csv(const std::string& path, std::span<const ClassificationRow> rows) {
    const bool with_pr = !rows.empty() && rows.front().pr_responsive.has_value();
    std::string header{kClassificationHeader};
    if (with_pr) header += ",pr_responsive";
    CsvWriter w(path, header);
    for (const ClassificationRow& row : rows) {
        w.raw(row.customer_id);
        w.field_sep();
        w.number(row.psi);
        w.field_sep();
        w.raw(row.responsive_at_level ? "1" : "0");
        if (with_pr) {
            w.field_sep();
            w.number(row.pr_responsive.value());
        }
        w.end_row();
    }
    w.finish();
}

std::vector<ClassificationRow> read_classification_csv(const std::string& path) {
    CsvReader r(path);
    bool with_pr = false;
    {
        std::vector<std::string> fields;
        if (!r.next_row(fields)) throw CsvError(path, 1, "missing header");
        std::string header;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) header += ',';
            header += fields[i];
        }
        if (header == kClassificationHeader) with_pr = false;
        else if (header == std::string(kClassificationHeader) + ",pr_responsive") with_pr = true;
        else throw CsvError(path, 1, "unexpected header '" + header + "'");
    }
    std::vector<ClassificationRow> rows;
    std::vector<std::string> fields;
    while (r.next_row(fields)) {
        r.require_fields(fields, with_pr ? 4 : 3);
        ClassificationRow row;
        row.customer_id = fields[0];
        row.psi = parse_number(r, fields[1]);
        row.responsive_at_level = parse_bool01(r, fields[2]);
        if (with_pr) row.pr_responsive = parse_number(r, fields[3]);
        rows.push_back(std::move(row));
    }
    return rows;
}

Histogram make_histogram(std::span<const double> values, int bin_count) {
    if (bin_count < 1) throw std::invalid_argument("make_histogram: need at least one bin");
    Histogram h;
    h.edges.resize(static_cast<std::size_t>(bin_count) + 1);
    for (int k = 0; k <= bin_count; ++k)
        h.edges[static_cast<std::size_t>(k)] =
            static_cast<double>(k) / static_cast<double>(bin_count);
    h.counts.assign(static_cast<std::size_t>(bin_count), 0);
    for (double v : values) {
        if (std::isnan(v) || v < 0.0 || v > 1.0)
            throw std::invalid_argument("make_histogram: values must be in [0,1]");
        const int idx =
            std::min(bin_count - 1, static_cast<int>(v * static_cast<double>(bin_count)));
        ++h.counts[static_cast<std::size_t>(idx)];
    }
    return h;
}

void write_histogram_csv(const std::string& path, const Histogram& hist) {
    CsvWriter w(path, kHistHeader);
    for (std::size_t k = 0; k < hist.counts.size(); ++k) {
        w.number(hist.edges[k]);
        w.field_sep();
        w.number(hist.edges[k + 1]);
        w.field_sep();
        w.integer(hist.counts[k]);
        w.end_row();
    }
    w.finish();
}

Histogram read_histogram_csv(const std::string& path) {
    CsvReader r(path);
    r.expect_header(kHistHeader);
    Histogram h;
    std::vector<std::string> fields;
    while (r.next_row(fields)) {
        r.require_fields(fields, 3);
        const double lo = parse_number(r, fields[0]);
        const double hi = parse_number(r, fields[1]);
        if (h.edges.empty()) h.edges.push_back(lo);
        else if (h.edges.back() != lo) r.fail("bins are not contiguous");
        h.edges.push_back(hi);
        h.counts.push_back(parse_integer(r, fields[2]));
    }
    if (h.counts.empty()) throw CsvError(path, 0, "no histogram rows");
    return h;
}

}  // namespace dresp
