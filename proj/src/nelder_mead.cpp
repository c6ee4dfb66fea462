#include "dresp/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dresp {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::span<const double> start, const NelderMeadOptions& options) {
    const std::size_t n = start.size();
    if (n == 0) throw std::invalid_argument("nelder_mead: empty start point");

    constexpr double alpha = 1.0;  // reflection
    constexpr double gamma = 2.0;  // expansion
    constexpr double rho = 0.5;    // contraction
    constexpr double sigma = 0.5;  // shrink

    std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(start.begin(), start.end()));
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;

    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = objective(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    auto sort_order = [&] {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    };

    std::vector<double> centroid(n), reflected(n), expanded(n), contracted(n);
    NelderMeadResult result;
    bool converged = false;

    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        sort_order();
        const double best = values[order[0]];
        const double worst = values[order[n]];
        if (std::abs(worst - best) < options.spread_tolerance) {
            converged = true;
            break;
        }

        const std::size_t worst_idx = order[n];
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst_idx) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        for (std::size_t d = 0; d < n; ++d)
            reflected[d] = centroid[d] + alpha * (centroid[d] - simplex[worst_idx][d]);
        const double f_reflected = objective(reflected);

        if (f_reflected < values[order[0]]) {
            for (std::size_t d = 0; d < n; ++d)
                expanded[d] = centroid[d] + gamma * (reflected[d] - centroid[d]);
            const double f_expanded = objective(expanded);
            if (f_expanded < f_reflected) {
                simplex[worst_idx] = expanded;
                values[worst_idx] = f_expanded;
            } else {
                simplex[worst_idx] = reflected;
                values[worst_idx] = f_reflected;
            }
        } else if (f_reflected < values[order[n - 1]]) {
            simplex[worst_idx] = reflected;
            values[worst_idx] = f_reflected;
        } else {
            const bool outside = f_reflected < values[worst_idx];
            const std::vector<double>& towards = outside ? reflected : simplex[worst_idx];
            for (std::size_t d = 0; d < n; ++d)
                contracted[d] = centroid[d] + rho * (towards[d] - centroid[d]);
            const double f_contracted = objective(contracted);
            if (f_contracted < (outside ? f_reflected : values[worst_idx])) {
                simplex[worst_idx] = contracted;
                values[worst_idx] = f_contracted;
            } else {
                const std::vector<double> best_point = simplex[order[0]];
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == order[0]) continue;
                    for (std::size_t d = 0; d < n; ++d)
                        simplex[i][d] = best_point[d] + sigma * (simplex[i][d] - best_point[d]);
                    values[i] = objective(simplex[i]);
                }
            }
        }
    }

    sort_order();
    result.x = simplex[order[0]];
    result.value = values[order[0]];
    result.iterations = iter;
    result.converged = converged;
    return result;
}

}  // namespace dresp
