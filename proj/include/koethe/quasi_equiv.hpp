#pragma once

#include "koethe/assignment.hpp"
#include "koethe/tabulated.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace koethe {

/// Row normalization A := (|x_j|_q / ||x_j||_l2). For profiles of
/// l2-orthonormal families the output has entries >= 1 and satisfies the
/// finite A ~ A^2 witness (r = 2q, C = 1).
inline TabulatedMatrix normalize_profile(const TabulatedMatrix& tab, const std::vector<double>& l2row) {
    if (l2row.size() != tab.rows()) throw std::invalid_argument("normalize_profile: l2 row length mismatch");
    for (double v : l2row)
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("normalize_profile: l2 norms must be positive");
    std::vector<double> logs(tab.rows() * tab.grades());
    for (std::size_t r = 0; r < tab.rows(); ++r)
        for (std::size_t q = 0; q < tab.grades(); ++q)
            logs[r * tab.grades() + q] = tab.log_entry(r, q) - std::log(l2row[r]);
    return TabulatedMatrix::from_log(tab.rows(), tab.grades(), std::move(logs), tab.provenance());
}

/// Finite witness for A ~ A^2 on a normalized profile: entries >= 1 give
/// A < A^2 with r = q, C = 1, and Cauchy-Schwarz gives A^2 < A with
/// r = 2q, C = 1 wherever the shifted column exists.
inline bool self_equivalence_witness_holds(const TabulatedMatrix& tab, double tol = 1e-12) {
    for (std::size_t r = 0; r < tab.rows(); ++r) {
        for (std::size_t q = 0; q < tab.grades(); ++q) {
            if (tab.log_entry(r, q) < std::log(1.0 - tol) - tol) return false;  // entries >= 1
            if (2 * q < tab.grades()) {
                if (2 * tab.log_entry(r, q) > tab.log_entry(r, 2 * q) + tol) return false;
            }
        }
    }
    return true;
}

enum class MatchStatus : std::uint8_t { Exact, Approximate, Failed };

inline std::string match_status_to_string(MatchStatus s) {
    switch (s) {
        case MatchStatus::Exact: return "exact";
        case MatchStatus::Approximate: return "approximate";
        case MatchStatus::Failed: return "failed";
    }
    return "?";
}

/// Permutation, scalars and achieved distortion witnessing the finite
/// quasi-equivalence relation a_{j,q} ~ lambda_j b_{sigma(j),q}.
struct MatchResult {
    std::vector<std::size_t> sigma;  // 0-based: row j of A matches row sigma[j] of B
    std::vector<double> log_lambda;
    double distortion = 0;
    MatchStatus status = MatchStatus::Failed;
};

/// Pair cost is the sup half-range of the log difference profile; the
/// log-midrange scalar is its unique minimizer. The assignment is
/// bottleneck-optimal, matching the sup shape of the relation.
inline MatchResult match(const TabulatedMatrix& tabA, const TabulatedMatrix& tabB) {
    if (tabA.rows() != tabB.rows() || tabA.grades() != tabB.grades())
        throw std::invalid_argument("match: dimension mismatch");
    const std::size_t n = tabA.rows(), Q = tabA.grades();
    Eigen::MatrixXd cost(n, n), midrange(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -std::numeric_limits<double>::infinity();
            for (std::size_t q = 0; q < Q; ++q) {
                double d = tabA.log_entry(j, q) - tabB.log_entry(k, q);
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
            cost(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = (hi - lo) / 2;
            midrange(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = (hi + lo) / 2;
        }
    }
    MatchResult out;
    BottleneckResult assignment = bottleneck_assignment(cost);
    out.sigma = std::move(assignment.sigma);
    out.distortion = assignment.value;
    out.log_lambda.resize(n);
    for (std::size_t j = 0; j < n; ++j)
        out.log_lambda[j] = midrange(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(out.sigma[j]));
    out.status = std::isfinite(out.distortion)
                     ? (out.distortion <= 1e-9 ? MatchStatus::Exact : MatchStatus::Approximate)
                     : MatchStatus::Failed;
    return out;
}

/// Same-column strict check: a_{j,q}/C <= lambda_j b_{sigma(j),q} <= C a_{j,q}
/// for all j, q. Grade-shifted comparisons are matrix_calculus territory.
inline bool verify_quasi_equivalence(const TabulatedMatrix& tabA, const TabulatedMatrix& tabB,
                                     const std::vector<std::size_t>& sigma, const std::vector<double>& lambdas,
                                     double C) {
    if (tabA.rows() != tabB.rows() || tabA.grades() != tabB.grades())
        throw std::invalid_argument("verify_quasi_equivalence: dimension mismatch");
    check_permutation(sigma, tabA.rows());
    if (lambdas.size() != tabA.rows()) throw std::invalid_argument("lambda count mismatch");
    if (!(C > 0)) throw std::invalid_argument("C must be positive");
    double logC = std::log(C);
    for (std::size_t j = 0; j < tabA.rows(); ++j) {
        if (!(lambdas[j] > 0.0)) throw std::invalid_argument("lambdas must be positive");
        for (std::size_t q = 0; q < tabA.grades(); ++q) {
            double d = tabA.log_entry(j, q) - std::log(lambdas[j]) - tabB.log_entry(sigma[j], q);
            if (std::abs(d) > logC) return false;
        }
    }
    return true;
}

} // namespace koethe
