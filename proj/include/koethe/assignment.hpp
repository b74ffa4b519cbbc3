#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace koethe {

/// Minimax (bottleneck) assignment: permutation sigma minimizing
/// max_i cost(i, sigma(i)). Binary search over the distinct cost values
/// with an augmenting-path feasibility matching at each threshold; the sup
/// shape of the domination relation calls for bottleneck, not sum-cost.
struct BottleneckResult {
    std::vector<std::size_t> sigma;  // row -> column
    double value = 0;
};

namespace assignment_detail {

/// Kuhn's augmenting search on the threshold graph cost <= limit.
inline bool try_kuhn(const Eigen::MatrixXd& cost, double limit, std::vector<std::size_t>& sigma_out) {
    const std::size_t n = static_cast<std::size_t>(cost.rows());
    std::vector<long> match_col(n, -1);
    std::vector<char> visited(n, 0);

    struct Ctx {
        const Eigen::MatrixXd& cost;
        double limit;
        std::vector<long>& match_col;
        std::vector<char>& visited;
        bool augment(std::size_t row) {
            const std::size_t n = static_cast<std::size_t>(cost.rows());
            for (std::size_t col = 0; col < n; ++col) {
                if (visited[col] || cost(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) > limit)
                    continue;
                visited[col] = 1;
                if (match_col[col] < 0 || augment(static_cast<std::size_t>(match_col[col]))) {
                    match_col[col] = static_cast<long>(row);
                    return true;
                }
            }
            return false;
        }
    } ctx{cost, limit, match_col, visited};

    for (std::size_t row = 0; row < n; ++row) {
        std::fill(visited.begin(), visited.end(), 0);
        if (!ctx.augment(row)) return false;
    }
    sigma_out.assign(n, 0);
    for (std::size_t col = 0; col < n; ++col) sigma_out[static_cast<std::size_t>(match_col[col])] = col;
    return true;
}

} // namespace assignment_detail

inline BottleneckResult bottleneck_assignment(const Eigen::MatrixXd& cost) {
    if (cost.rows() != cost.cols() || cost.rows() == 0) throw std::invalid_argument("cost matrix must be square");
    const std::size_t n = static_cast<std::size_t>(cost.rows());
    for (Eigen::Index i = 0; i < cost.size(); ++i)
        if (!std::isfinite(cost.data()[i])) throw std::invalid_argument("cost matrix must be finite");

    std::vector<double> values(cost.data(), cost.data() + cost.size());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    std::size_t lo = 0, hi = values.size() - 1;
    std::vector<std::size_t> sigma;
    if (!assignment_detail::try_kuhn(cost, values[hi], sigma))
        throw std::logic_error("complete threshold graph has no perfect matching");
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        std::vector<std::size_t> cand;
        if (assignment_detail::try_kuhn(cost, values[mid], cand)) {
            hi = mid;
            sigma = std::move(cand);
        } else {
            lo = mid + 1;
        }
    }
    BottleneckResult out;
    out.sigma = std::move(sigma);
    out.value = values[hi];
    // tighten to the achieved maximum (guards against ties in `values`)
    double achieved = 0;
    for (std::size_t r = 0; r < n; ++r)
        achieved = std::max(achieved, cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(out.sigma[r])));
    out.value = achieved;
    return out;
}

} // namespace koethe
