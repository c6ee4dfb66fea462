// dresp: did customers respond to a dynamic electricity price signal?
//
// simulate -> metrics -> analyze -> report, CSV files between stages. Every
// stage is deterministic for fixed inputs and seed; rerunning a stage
// overwrites its outputs byte for byte.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dresp/csv.hpp"
#include "dresp/mixture.hpp"
#include "dresp/pipeline.hpp"
#include "dresp/synth.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAnalysis = 1;
constexpr int kExitInput = 2;

int emit_error(int code, const std::string& kind, const std::string& detail) {
    json j;
    j["error"] = kind;
    j["detail"] = detail;
    std::cout << j.dump(2) << "\n";
    return code;
}

std::string utc_stamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ----------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 1;
    bool quiet = false;
};

int run_simulate(const SimulateArgs& a) {
    if (!fs::exists(a.config_path)) return emit_error(kExitInput, "missing_input", a.config_path);

    dresp::ScenarioConfig config;
    dresp::ScenarioData data;
    try {
        config = dresp::load_scenario_config(a.config_path);
        data = dresp::generate_scenario(config, a.seed);
    } catch (const std::exception& e) {
        return emit_error(kExitInput, "invalid_config", e.what());
    }

    try {
        fs::create_directories(a.out_dir);
        const fs::path out(a.out_dir);
        dresp::write_consumption_csv((out / "consumption.csv").string(), data.series);
        dresp::write_prices_csv((out / "prices.csv").string(), data.signal);
        dresp::write_groups_csv((out / "groups.csv").string(), data.series);
        dresp::write_labels_csv((out / "labels.csv").string(), data.labels);
    } catch (const std::exception& e) {
        return emit_error(kExitInput, "io_error", e.what());
    }

    if (!a.quiet) {
        std::size_t responders = 0;
        for (const auto& l : data.labels)
            if (l.responsive) ++responders;
        std::cout << "simulated " << config.num_treatment << " treatment + " << config.num_control
                  << " control households (" << responders << " responsive), "
                  << config.grid.num_days << " days x " << config.grid.slots_per_day
                  << " slots -> " << a.out_dir << "\n";
    }
    return kExitOk;
}

// -------------------------------------------------------- validate / metrics

struct DatasetArgs {
    std::string consumption_path;
    std::string prices_path;
    std::string groups_path;
    std::uint32_t slots_per_day = 48;
};

struct Dataset {
    std::vector<dresp::ConsumptionSeries> series;
    dresp::PriceSignal signal;
    std::optional<dresp::TimeGrid> grid;
    std::vector<dresp::SeriesFailure> ingest_failures;
};

// exit code 0 means ds is usable
int load_dataset(const DatasetArgs& a, Dataset& ds) {
    for (const std::string& p : {a.consumption_path, a.prices_path, a.groups_path})
        if (!fs::exists(p)) return emit_error(kExitInput, "missing_input", p);

    try {
        ds.signal = dresp::read_prices_csv(a.prices_path);
        const std::size_t total = ds.signal.prices.size();
        if (a.slots_per_day == 0 || total % a.slots_per_day != 0)
            return emit_error(kExitInput, "partial_day",
                              "price rows (" + std::to_string(total) +
                                  ") are not a whole number of days of " +
                                  std::to_string(a.slots_per_day) + " slots");
        const auto days = static_cast<std::uint32_t>(total / a.slots_per_day);
        try {
            ds.grid.emplace(a.slots_per_day, days);
        } catch (const std::invalid_argument& e) {
            return emit_error(kExitInput, "invalid_grid", e.what());
        }
        const auto groups = dresp::read_groups_csv(a.groups_path);
        dresp::IngestResult ingest =
            dresp::read_consumption_csv(a.consumption_path, *ds.grid, groups);
        ds.series = std::move(ingest.series);
        ds.ingest_failures = std::move(ingest.failures);
    } catch (const dresp::CsvError& e) {
        return emit_error(kExitInput, "io_error", e.what());
    }
    return kExitOk;
}

json report_to_json(const dresp::ValidationReport& report,
                    const std::vector<dresp::SeriesFailure>& ingest_failures) {
    std::vector<dresp::SeriesFailure> failures = report.series_failures;
    failures.insert(failures.end(), ingest_failures.begin(), ingest_failures.end());
    std::sort(failures.begin(), failures.end(), [](const auto& x, const auto& y) {
        if (x.customer_id != y.customer_id) return x.customer_id < y.customer_id;
        return x.reason < y.reason;
    });

    json j;
    j["ok"] = report.ok() && ingest_failures.empty();
    j["num_passed"] = report.num_passed;
    j["treatment"] = report.treatment_count;
    j["control"] = report.control_count;
    j["global_failures"] = report.global_failures;
    j["series_failures"] = json::array();
    for (const auto& f : failures)
        j["series_failures"].push_back({{"customer_id", f.customer_id}, {"reason", f.reason}});
    if (!j["ok"].get<bool>()) j["error"] = "validation_failed";
    return j;
}

// report filled in; nonzero exit only for hard errors
int validate_dataset_stage(const Dataset& ds, json& out) {
    dresp::ValidationReport report;
    if (ds.series.empty()) {
        report.global_failures.push_back("no_valid_series");
    } else {
        report = dresp::validate_dataset(ds.series, ds.signal, *ds.grid);
    }
    out = report_to_json(report, ds.ingest_failures);
    return kExitOk;
}

int run_validate(const DatasetArgs& a) {
    Dataset ds;
    if (int rc = load_dataset(a, ds); rc != kExitOk) return rc;
    json report;
    if (int rc = validate_dataset_stage(ds, report); rc != kExitOk) return rc;
    std::cout << report.dump(2) << "\n";
    return report["ok"].get<bool>() ? kExitOk : kExitInput;
}

struct MetricsArgs {
    DatasetArgs dataset;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::uint32_t samples = 100000;
    std::string seeding_mode = "per-customer";
    std::string eval_path = "matrix";
    unsigned threads = 1;
    bool quiet = false;
};

int run_metrics(const MetricsArgs& a) {
    Dataset ds;
    if (int rc = load_dataset(a.dataset, ds); rc != kExitOk) return rc;

    json report;
    if (int rc = validate_dataset_stage(ds, report); rc != kExitOk) return rc;
    if (!report["ok"].get<bool>()) {
        std::cout << report.dump(2) << "\n";
        return kExitInput;
    }

    dresp::SamplerConfig config;
    config.global_seed = a.seed;
    config.samples_per_customer = a.samples;
    config.seeding_mode = a.seeding_mode == "shared-pool"
                              ? dresp::SeedingMode::shared_pool
                              : dresp::SeedingMode::per_customer_independent;
    const dresp::BillEvalPath path =
        a.eval_path == "direct" ? dresp::BillEvalPath::slot_direct : dresp::BillEvalPath::day_matrix;

    const std::size_t n = ds.series.size();
    std::function<void(std::size_t)> progress;
    if (!a.quiet) {
        const std::size_t step = std::max<std::size_t>(1, n / 20);
        progress = [n, step](std::size_t done) {
            if (done % step == 0 || done == n)
                std::cerr << "\r  " << done << "/" << n << " customers" << std::flush;
        };
    }

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<dresp::CustomerMetrics> metrics;
    try {
        metrics = dresp::estimate_all(ds.series, ds.signal, *ds.grid, config, path, a.threads,
                                      progress);
    } catch (const std::exception& e) {
        if (!a.quiet) std::cerr << "\n";
        return emit_error(kExitAnalysis, "analysis_error", e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!a.quiet) std::cerr << "\n";

    try {
        fs::create_directories(a.out_dir);
        dresp::write_metrics_csv((fs::path(a.out_dir) / "metrics.csv").string(), metrics);
    } catch (const std::exception& e) {
        return emit_error(kExitInput, "io_error", e.what());
    }

    if (!a.quiet) {
        std::size_t degenerate = 0;
        for (const auto& m : metrics)
            if (m.degenerate()) ++degenerate;
        std::cout << "metrics for " << metrics.size() << " customers (" << degenerate
                  << " degenerate), K=" << a.samples << ", " << elapsed << " s -> " << a.out_dir
                  << "/metrics.csv\n";
    }
    return kExitOk;
}

// ------------------------------------------------------------------ analyze

struct AnalyzeArgs {
    std::string metrics_path;
    std::string out_dir;
    double confidence_level = 0.95;
    int bins = 50;
    std::string fit_method = "likelihood";
    bool quiet = false;
};

int run_analyze(const AnalyzeArgs& a) {
    if (!fs::exists(a.metrics_path))
        return emit_error(kExitInput, "missing_input", a.metrics_path);

    std::vector<dresp::CustomerMetrics> metrics;
    try {
        metrics = dresp::read_metrics_csv(a.metrics_path);
    } catch (const dresp::CsvError& e) {
        return emit_error(kExitInput, "io_error", e.what());
    }

    dresp::FitOptions fit_options;
    fit_options.bin_count = a.bins;
    fit_options.method = a.fit_method == "least-squares"
                             ? dresp::FitMethod::histogram_least_squares
                             : dresp::FitMethod::binned_likelihood;

    dresp::AnalysisResult result;
    try {
        result = dresp::analyze_metrics(metrics, a.confidence_level, fit_options);
    } catch (const std::exception& e) {
        return emit_error(kExitAnalysis, "analysis_error", e.what());
    }

    for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";

    try {
        fs::create_directories(a.out_dir);
        const fs::path out(a.out_dir);

        dresp::write_ranks_csv((out / "ranks.csv").string(), result.ranks);

        std::vector<double> phis;
        for (const auto& e : result.ranks.entries) phis.push_back(e.phi);
        dresp::write_histogram_csv((out / "hist_phi_treatment.csv").string(),
                                   dresp::make_histogram(phis, a.bins));

        std::vector<double> control_phis;
        for (const auto& m : metrics)
            if (m.group == dresp::Group::control && !m.degenerate())
                control_phis.push_back(m.phi);
        if (!control_phis.empty())
            dresp::write_histogram_csv((out / "hist_phi_control.csv").string(),
                                       dresp::make_histogram(control_phis, a.bins));

        if (result.scores) {
            dresp::write_psi_csv((out / "psi.csv").string(), *result.scores);

            std::vector<double> psis;
            for (const auto& e : result.scores->entries) psis.push_back(e.psi);
            dresp::write_histogram_csv((out / "hist_psi.csv").string(),
                                       dresp::make_histogram(psis, a.bins));

            const bool have_fit = result.fit && result.fit->converged;
            std::vector<dresp::ClassificationRow> rows;
            rows.reserve(result.scores->entries.size());
            for (const auto& e : result.scores->entries) {
                dresp::ClassificationRow row;
                row.customer_id = e.customer_id;
                row.psi = e.psi;
                row.responsive_at_level = e.psi >= a.confidence_level;
                if (have_fit)
                    row.pr_responsive =
                        dresp::responsiveness_probability_at(result.fit->params, e.psi).value;
                rows.push_back(std::move(row));
            }
            dresp::write_classification_csv((out / "classification.csv").string(), rows);
        }

        if (result.fit) {
            json j;
            j["lambda"] = result.fit->params.lambda;
            j["alpha"] = result.fit->params.alpha;
            j["beta"] = result.fit->params.beta;
            j["responsive_fraction"] = result.fit->responsive_fraction();
            j["neg_log_likelihood"] = result.fit->neg_log_likelihood;
            j["bin_count"] = result.fit->bin_count;
            j["converged"] = result.fit->converged;
            j["fit_method"] = a.fit_method;
            std::ofstream f(out / "mixture.json");
            if (!f) throw std::runtime_error("cannot write mixture.json");
            f << j.dump(2) << "\n";
        }
    } catch (const std::exception& e) {
        return emit_error(kExitInput, "io_error", e.what());
    }

    if (!a.quiet) {
        std::cout << "ranked " << result.ranks.entries.size() << " treatment customers";
        if (!result.ranks.excluded.empty())
            std::cout << " (" << result.ranks.excluded.size() << " degenerate excluded)";
        std::cout << "\n";
        if (result.classification)
            std::cout << "responsive at " << a.confidence_level << " confidence: "
                      << result.classification->responsive_ids.size() << "/"
                      << result.classification->total_scored << " ("
                      << result.classification->fraction() << ")\n";
        if (result.fit)
            std::cout << "mixture: lambda=" << result.fit->params.lambda
                      << " alpha=" << result.fit->params.alpha
                      << " beta=" << result.fit->params.beta
                      << " responsive_fraction=" << result.fit->responsive_fraction() << "\n";
    }
    return kExitOk;
}

// ------------------------------------------------------------------- report

struct ReportArgs {
    std::string analysis_dir;
    std::string out_dir;
    bool no_timestamps = false;
    bool quiet = false;
};

int run_report(const ReportArgs& a) {
    const fs::path in(a.analysis_dir);
    const fs::path out(a.out_dir.empty() ? a.analysis_dir : a.out_dir);
    const fs::path phi_t = in / "hist_phi_treatment.csv";
    if (!fs::exists(phi_t)) return emit_error(kExitInput, "missing_input", phi_t.string());

    const std::string stamp = utc_stamp();
    try {
        fs::create_directories(out);

        svg::Chart phi_chart("Randomized-bill quantile by group", "phi");
        phi_chart.add_histogram({dresp::read_histogram_csv(phi_t.string()), "treatment",
                                 "#4878b0", 0.65});
        if (fs::exists(in / "hist_phi_control.csv"))
            phi_chart.add_histogram({dresp::read_histogram_csv((in / "hist_phi_control.csv").string()),
                                     "control", "#e07a3f", 0.55});
        phi_chart.write((out / "fig_phi.svg").string(), !a.no_timestamps, stamp);

        std::optional<dresp::MixtureParams> params;
        std::optional<double> fitted_fraction;
        if (fs::exists(in / "mixture.json")) {
            std::ifstream f(in / "mixture.json");
            json j = json::parse(f);
            params = dresp::MixtureParams{j.at("lambda").get<double>(),
                                          j.at("alpha").get<double>(),
                                          j.at("beta").get<double>()};
            fitted_fraction = j.at("responsive_fraction").get<double>();
        }

        if (fs::exists(in / "hist_psi.csv")) {
            svg::Chart psi_chart("Bias-corrected score with fitted mixture", "psi");
            psi_chart.add_histogram({dresp::read_histogram_csv((in / "hist_psi.csv").string()),
                                     "treatment psi", "#7f7f7f", 0.6});
            if (params) {
                svg::Curve curve;
                curve.label = "uniform + Beta fit";
                curve.color = "#c03030";
                const int points = 512;
                for (int k = 1; k < points; ++k) {
                    const double x = static_cast<double>(k) / points;
                    curve.points.emplace_back(x, dresp::mixture_density(*params, x));
                }
                psi_chart.add_curve(std::move(curve));
            }
            psi_chart.write((out / "fig_psi.svg").string(), !a.no_timestamps, stamp);
        }

        std::ofstream summary(out / "summary.txt");
        if (!summary) throw std::runtime_error("cannot write summary.txt");
        if (!a.no_timestamps) summary << "generated " << stamp << "\n";
        const dresp::Histogram ht = dresp::read_histogram_csv(phi_t.string());
        std::uint64_t n_t = 0;
        for (auto c : ht.counts) n_t += c;
        summary << "treatment customers scored: " << n_t << "\n";
        if (fs::exists(in / "hist_phi_control.csv")) {
            const auto hc = dresp::read_histogram_csv((in / "hist_phi_control.csv").string());
            std::uint64_t n_c = 0;
            for (auto c : hc.counts) n_c += c;
            summary << "control customers scored: " << n_c << "\n";
        }
        if (params) {
            summary << "mixture fit: lambda=" << dresp::format_double(params->lambda)
                    << " alpha=" << dresp::format_double(params->alpha)
                    << " beta=" << dresp::format_double(params->beta) << "\n";
            summary << "responsive fraction (1 - lambda): "
                    << dresp::format_double(*fitted_fraction) << "\n";
        }
    } catch (const std::exception& e) {
        return emit_error(kExitInput, "io_error", e.what());
    }

    if (!a.quiet)
        std::cout << "report written to " << out.string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"day-shuffle randomization analysis of demand response to a price signal"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* c_sim = app.add_subcommand("simulate", "generate a synthetic scenario dataset");
    c_sim->add_option("--config", sim.config_path, "scenario config file")->required();
    c_sim->add_option("--out", sim.out_dir, "output directory")->required();
    c_sim->add_option("--seed", sim.seed, "generator seed");
    c_sim->add_flag("--quiet", sim.quiet, "suppress the summary line");

    DatasetArgs val;
    CLI::App* c_val = app.add_subcommand("validate", "check a dataset against the input contract");
    c_val->add_option("--consumption", val.consumption_path, "consumption.csv")->required();
    c_val->add_option("--prices", val.prices_path, "prices.csv")->required();
    c_val->add_option("--groups", val.groups_path, "groups.csv")->required();
    c_val->add_option("--slots-per-day", val.slots_per_day, "slots per day")->required();

    MetricsArgs met;
    CLI::App* c_met = app.add_subcommand("metrics", "per-customer randomized-bill metrics");
    c_met->add_option("--consumption", met.dataset.consumption_path, "consumption.csv")->required();
    c_met->add_option("--prices", met.dataset.prices_path, "prices.csv")->required();
    c_met->add_option("--groups", met.dataset.groups_path, "groups.csv")->required();
    c_met->add_option("--slots-per-day", met.dataset.slots_per_day, "slots per day")->required();
    c_met->add_option("--out", met.out_dir, "output directory")->required();
    c_met->add_option("--seed", met.seed, "sampling seed");
    c_met->add_option("--samples", met.samples, "randomized bills per customer (K)")
        ->check(CLI::Range(static_cast<std::uint32_t>(2), static_cast<std::uint32_t>(100000000)));
    c_met->add_option("--seeding-mode", met.seeding_mode, "per-customer | shared-pool")
        ->check(CLI::IsMember({"per-customer", "shared-pool"}));
    c_met->add_option("--eval-path", met.eval_path, "matrix | direct")
        ->check(CLI::IsMember({"matrix", "direct"}));
    c_met->add_option("--threads", met.threads, "worker threads");
    c_met->add_flag("--quiet", met.quiet, "suppress progress and summary");

    AnalyzeArgs ana;
    CLI::App* c_ana = app.add_subcommand("analyze", "population ranking, bias correction, mixture fit");
    c_ana->add_option("--metrics", ana.metrics_path, "metrics.csv from the metrics stage")->required();
    c_ana->add_option("--out", ana.out_dir, "output directory")->required();
    c_ana->add_option("--confidence-level", ana.confidence_level, "classification threshold on psi")
        ->check(CLI::Range(1e-6, 1.0 - 1e-6));
    c_ana->add_option("--bins", ana.bins, "histogram bins for the mixture fit")
        ->check(CLI::Range(10, 1000));
    c_ana->add_option("--fit-method", ana.fit_method, "likelihood | least-squares")
        ->check(CLI::IsMember({"likelihood", "least-squares"}));
    c_ana->add_flag("--quiet", ana.quiet, "suppress the summary");

    ReportArgs rep;
    CLI::App* c_rep = app.add_subcommand("report", "figures and a text summary from an analysis");
    c_rep->add_option("--analysis", rep.analysis_dir, "directory written by analyze")->required();
    c_rep->add_option("--out", rep.out_dir, "output directory (defaults to the analysis dir)");
    c_rep->add_flag("--no-timestamps", rep.no_timestamps, "omit generation timestamps");
    c_rep->add_flag("--quiet", rep.quiet, "suppress the summary line");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInput;
    }

    if (c_sim->parsed()) return run_simulate(sim);
    if (c_val->parsed()) return run_validate(val);
    if (c_met->parsed()) return run_metrics(met);
    if (c_ana->parsed()) return run_analyze(ana);
    if (c_rep->parsed()) return run_report(rep);
    return kExitInput;
}
