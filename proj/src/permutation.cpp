#include "dresp/permutation.hpp"

#include <numeric>
#include <stdexcept>
#include <vector>

namespace dresp {

bool DayPermutation::is_valid() const {
    std::vector<bool> seen(mapping.size(), false);
    for (std::uint32_t v : mapping) {
        if (v >= mapping.size() || seen[v]) return false;
        seen[v] = true;
    }
    return !mapping.empty();
}

void sample_day_permutation(RngStream& stream, std::span<std::uint32_t> out) {
    const std::size_t days = out.size();
    if (days < 2)
        throw std::invalid_argument("sample_day_permutation: need at least two days");
    for (std::size_t i = 0; i < days; ++i) out[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = days - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(stream.next_below(i + 1));
        std::swap(out[i], out[j]);
    }
}

DayPermutation sample_permutation(RngStream& stream, std::uint32_t num_days) {
    DayPermutation perm;
    perm.mapping.resize(num_days);
    sample_day_permutation(stream, perm.mapping);
    return perm;
}

RngStream customer_stream(const SamplerConfig& config, std::string_view customer_id) {
    if (config.seeding_mode == SeedingMode::shared_pool) return pool_stream(config);
    return RngStream(stream_seed(config.global_seed, customer_id));
}

RngStream pool_stream(const SamplerConfig& config) {
    return RngStream(stream_seed(config.global_seed, "__pool__"));
}

PermutationPool::PermutationPool(const SamplerConfig& config, std::uint32_t num_days)
    : num_days_(num_days), count_(config.samples_per_customer) {
    if (num_days < 2) throw std::invalid_argument("PermutationPool: need at least two days");
    RngStream stream = pool_stream(config);
    flat_.resize(static_cast<std::size_t>(count_) * num_days_);
    for (std::uint32_t k = 0; k < count_; ++k)
        sample_day_permutation(stream,
                               {flat_.data() + static_cast<std::size_t>(k) * num_days_, num_days_});
}

}  // namespace dresp
