#pragma once

#include <functional>
#include <span>
#include <vector>

namespace dresp {

struct NelderMeadOptions {
    int max_iterations = 2000;
    // Converged when the simplex's value spread drops below this.
    double spread_tolerance = 1e-10;
    double initial_step = 0.5;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0;
    int iterations = 0;
    bool converged = false;
};

// Plain downhill simplex. Deterministic: no randomized restarts, ties broken
// by index order.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::span<const double> start,
                             const NelderMeadOptions& options = {});

}  // namespace dresp
