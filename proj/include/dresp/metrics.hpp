#pragma once

#include <cstdint>
#include <string>

#include "dresp/billing.hpp"
#include "dresp/model.hpp"
#include "dresp/permutation.hpp"

namespace dresp {

enum class MetricsFlag { ok, degenerate };

const char* to_string(MetricsFlag f);

// Per-customer summary of the randomized-bill distribution.
//
// phi is the exceedance quantile Pr(B > b) with ties half-weighted (mid-p):
// phi = (#{B > b} + #{B == b} / 2) / K. Equality is tested at relative
// tolerance 1e-12. When sigma_B vanishes the permutation distribution is
// degenerate for this customer and phi/z carry no information; the flag is
// set and downstream stages exclude the customer.
struct CustomerMetrics {
    std::string customer_id;
    Group group = Group::treatment;
    double bill = 0;              // actual bill b
    double mean_random_bill = 0;  // mu_B
    double sd_random_bill = 0;    // sigma_B
    double phi = 0;
    double z = 0;  // (mu_B - b) / sigma_B; NaN when degenerate
    std::uint64_t samples_used = 0;
    std::uint64_t ties_count = 0;
    MetricsFlag flag = MetricsFlag::ok;

    bool degenerate() const { return flag == MetricsFlag::degenerate; }
};

inline constexpr double kTieRelTol = 1e-12;
inline constexpr double kDegenerateRelTol = 1e-12;

enum class BillEvalPath { day_matrix, slot_direct };

struct EstimateOptions {
    BillEvalPath path = BillEvalPath::day_matrix;
    // Consulted in shared_pool mode when non-null; otherwise the pool stream
    // is replayed per customer.
    const PermutationPool* pool = nullptr;
};

// Monte Carlo estimate over K sampled day permutations. mu_B and sigma_B are
// the sample mean and sample standard deviation (K-1 denominator).
// Requires K >= 2 and D >= 2.
CustomerMetrics estimate_metrics(const ConsumptionSeries& series, const PriceSignal& signal,
                                 const TimeGrid& grid, const SamplerConfig& config,
                                 const EstimateOptions& options = {});

// Exhaustive enumeration over all D! permutations (D <= 8): exact phi with
// tie-halving and exact population moments.
CustomerMetrics exact_metrics(const ConsumptionSeries& series, const PriceSignal& signal,
                              const TimeGrid& grid);

// Mapping between the z-statistic and phi when the randomized bill is
// normally distributed. standard_normal is the standardized CDF Phi(z);
// halfvar_printed is the variance-1/2 variant (1 + erf(z)) / 2, kept for
// fidelity checks only.
enum class ZMapping { standard_normal, halfvar_printed };

double phi_from_z(double z, ZMapping mapping = ZMapping::standard_normal);

}  // namespace dresp
