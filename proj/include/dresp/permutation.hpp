#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dresp/rng.hpp"

namespace dresp {

// A bijection on {0, ..., D-1}. Shuffling whole days keeps the within-day
// structure of price events intact.
struct DayPermutation {
    std::vector<std::uint32_t> mapping;

    bool is_valid() const;
};

enum class SeedingMode { per_customer_independent, shared_pool };

struct SamplerConfig {
    std::uint64_t global_seed = 0;
    std::uint32_t samples_per_customer = 100000;  // K
    SeedingMode seeding_mode = SeedingMode::per_customer_independent;
};

// Fisher-Yates over the identity, drawing uniformly from all D! permutations.
// Throws std::invalid_argument when out.size() < 2.
void sample_day_permutation(RngStream& stream, std::span<std::uint32_t> out);

DayPermutation sample_permutation(RngStream& stream, std::uint32_t num_days);

// Stream for one customer. In per_customer_independent mode the seed is
// stream_seed(global_seed, customer_id), so results are independent of
// processing order and worker count. In shared_pool mode every customer gets
// the pool stream and therefore sees the exact same permutation sequence.
RngStream customer_stream(const SamplerConfig& config, std::string_view customer_id);

RngStream pool_stream(const SamplerConfig& config);

// K permutations materialized once from the pool stream; shared read-only
// across workers in shared_pool mode.
class PermutationPool {
public:
    PermutationPool(const SamplerConfig& config, std::uint32_t num_days);

    std::span<const std::uint32_t> permutation(std::uint32_t k) const {
        return {flat_.data() + static_cast<std::size_t>(k) * num_days_, num_days_};
    }
    std::uint32_t size() const { return count_; }
    std::uint32_t num_days() const { return num_days_; }

private:
    std::vector<std::uint32_t> flat_;
    std::uint32_t num_days_;
    std::uint32_t count_;
};

}  // namespace dresp
