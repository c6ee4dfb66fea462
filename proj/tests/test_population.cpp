#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dresp/population.hpp"
#include "dresp/rng.hpp"

using namespace dresp;

namespace {

CustomerMetrics metric(std::string id, double phi, Group g = Group::treatment,
                       MetricsFlag flag = MetricsFlag::ok) {
    CustomerMetrics m;
    m.customer_id = std::move(id);
    m.group = g;
    m.phi = phi;
    m.z = flag == MetricsFlag::ok ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    m.flag = flag;
    return m;
}

}  // namespace

TEST_CASE("average ranks with ties") {
    const std::vector<double> v{10, 20, 20, 30};
    const std::vector<double> r = average_ranks(v);
    CHECK(r == std::vector<double>{1.0, 2.5, 2.5, 4.0});

    const std::vector<double> same{5, 5, 5};
    CHECK(average_ranks(same) == std::vector<double>{2.0, 2.0, 2.0});

    const std::vector<double> rev{3, 2, 1};
    CHECK(average_ranks(rev) == std::vector<double>{3.0, 2.0, 1.0});
}

TEST_CASE("spearman rank correlation") {
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{1, 3, 2, 4};
    CHECK(spearman_rank_correlation(x, y) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(spearman_rank_correlation(x, x) == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> rev{4, 3, 2, 1};
    CHECK(spearman_rank_correlation(x, rev) == doctest::Approx(-1.0).epsilon(1e-12));

    const std::vector<double> constant{2, 2, 2, 2};
    CHECK_THROWS_AS(spearman_rank_correlation(x, constant), std::invalid_argument);
    const std::vector<double> two{1, 2};
    CHECK_THROWS_AS(spearman_rank_correlation(two, two), std::invalid_argument);
    const std::vector<double> three{1, 2, 3};
    CHECK_THROWS_AS(spearman_rank_correlation(x, three), std::invalid_argument);
}

TEST_CASE("rank_customers orders by phi and excludes degenerates") {
    const std::vector<CustomerMetrics> ms{
        metric("low", 0.2), metric("bad", 0.9, Group::treatment, MetricsFlag::degenerate),
        metric("high", 0.95), metric("mid", 0.5), metric("mid2", 0.5),
    };
    const RankTable table = rank_customers(ms);
    REQUIRE(table.entries.size() == 4);
    REQUIRE(table.excluded.size() == 1);
    CHECK(table.excluded[0] == "bad");

    // input order preserved; higher phi -> higher rank; ties share the mean
    CHECK(table.entries[0].customer_id == "low");
    CHECK(table.entries[0].rank == 1.0);
    CHECK(table.entries[1].customer_id == "high");
    CHECK(table.entries[1].rank == 4.0);
    CHECK(table.entries[2].rank == 2.5);
    CHECK(table.entries[3].rank == 2.5);
}

TEST_CASE("rank_customers needs at least one usable metric") {
    const std::vector<CustomerMetrics> ms{
        metric("a", 0.5, Group::treatment, MetricsFlag::degenerate)};
    CHECK_THROWS_AS(rank_customers(ms), std::invalid_argument);
}

TEST_CASE("empirical CDF counting rule") {
    const EmpiricalCdf cdf(std::vector<double>{1, 2, 2, 3});
    CHECK(cdf.size() == 4);
    CHECK(cdf(0.5) == 0.0);
    CHECK(cdf(1.0) == 0.25);
    CHECK(cdf(1.5) == 0.25);
    CHECK(cdf(2.0) == 0.75);
    CHECK(cdf(2.5) == 0.75);
    CHECK(cdf(3.0) == 1.0);
    CHECK(cdf(99.0) == 1.0);

    CHECK_THROWS_AS(EmpiricalCdf(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("control CDF construction excludes degenerates") {
    const std::vector<CustomerMetrics> control{
        metric("c1", 0.3, Group::control), metric("c2", 0.6, Group::control),
        metric("c3", 0.9, Group::control, MetricsFlag::degenerate),
    };
    const EmpiricalCdf cdf = build_control_cdf(control);
    CHECK(cdf.size() == 2);
    CHECK(cdf(0.3) == 0.5);

    const std::vector<CustomerMetrics> all_bad{
        metric("c", 0.5, Group::control, MetricsFlag::degenerate)};
    CHECK_THROWS_AS(build_control_cdf(all_bad), std::invalid_argument);
}

TEST_CASE("bias correction maps phi through the control CDF") {
    const std::vector<CustomerMetrics> control{
        metric("c1", 0.2, Group::control), metric("c2", 0.4, Group::control),
        metric("c3", 0.6, Group::control), metric("c4", 0.8, Group::control),
    };
    const EmpiricalCdf cdf = build_control_cdf(control);
    const std::vector<CustomerMetrics> treatment{
        metric("t1", 0.1), metric("t2", 0.4), metric("t3", 0.7), metric("t4", 0.99),
        metric("skip", 0.5, Group::treatment, MetricsFlag::degenerate),
    };
    const CorrectedScores scores = bias_correct(treatment, cdf);
    REQUIRE(scores.entries.size() == 4);
    CHECK(scores.entries[0].psi == 0.0);
    CHECK(scores.entries[1].psi == 0.5);
    CHECK(scores.entries[2].psi == 0.75);
    CHECK(scores.entries[3].psi == 1.0);
    REQUIRE(scores.excluded.size() == 1);
    CHECK(scores.excluded[0] == "skip");

    // monotone: phi order is preserved in psi
    for (std::size_t i = 1; i < scores.entries.size(); ++i)
        CHECK(scores.entries[i].psi >= scores.entries[i - 1].psi);
}

// For distinct phi values, applying the control CDF to the control group
// itself gives order statistics exactly {k/N}, no tolerance.
TEST_CASE("control self-correction identity") {
    RngStream rng(606);
    const std::size_t n = 300;
    std::vector<CustomerMetrics> control;
    for (std::size_t i = 0; i < n; ++i)
        control.push_back(metric("c" + std::to_string(i), rng.next_unit(), Group::control));

    const EmpiricalCdf cdf = build_control_cdf(control);
    const CorrectedScores self = bias_correct(control, cdf);
    std::vector<double> psi;
    for (const auto& e : self.entries) psi.push_back(e.psi);
    std::sort(psi.begin(), psi.end());
    for (std::size_t k = 0; k < n; ++k)
        CHECK(psi[k] == static_cast<double>(k + 1) / static_cast<double>(n));
}

TEST_CASE("classification at a confidence level") {
    CorrectedScores scores;
    scores.entries = {{"a", 0.1, 0.2}, {"b", 0.9, 0.95}, {"c", 0.8, 0.94}, {"d", 0.99, 1.0}};
    const ClassificationSummary summary = classify_at_confidence(scores, 0.95);
    CHECK(summary.level == 0.95);
    CHECK(summary.total_scored == 4);
    REQUIRE(summary.responsive_ids.size() == 2);  // psi >= level, inclusive
    CHECK(summary.responsive_ids[0] == "b");
    CHECK(summary.responsive_ids[1] == "d");
    CHECK(summary.fraction() == 0.5);

    CHECK_THROWS_AS(classify_at_confidence(scores, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(classify_at_confidence(scores, 1.0), std::invalid_argument);
}
