#pragma once

#include "koethe/tabulated.hpp"
#include "koethe/verdict.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace koethe {

/// Worker cap for probe grids; KOETHE_LAB_THREADS overrides. Results are
/// merged in row order so the thread count never changes the output.
inline unsigned probe_worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    unsigned n = hw == 0 ? 1 : std::min(hw, 8u);
    if (const char* env = std::getenv("KOETHE_LAB_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 256) n = static_cast<unsigned>(v);
    }
    return n;
}

namespace probe_detail {

/// max over rows of f(row), deterministic chunked reduction.
template <typename F>
double parallel_row_max(std::size_t rows, F&& f) {
    unsigned workers = probe_worker_count();
    if (workers <= 1 || rows < 4096) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < rows; ++r) best = std::max(best, f(r));
        return best;
    }
    std::vector<double> part(workers, -std::numeric_limits<double>::infinity());
    std::vector<std::thread> pool;
    std::size_t chunk = (rows + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            std::size_t lo = w * chunk, hi = std::min(rows, lo + chunk);
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t r = lo; r < hi; ++r) best = std::max(best, f(r));
            part[w] = best;
        });
    }
    for (auto& t : pool) t.join();
    double best = -std::numeric_limits<double>::infinity();
    for (double v : part) best = std::max(best, v);
    return best;
}

/// Least-squares slope of y against log j over the top decade of rows.
inline double top_decade_slope(const std::vector<double>& y_by_row) {
    std::size_t J = y_by_row.size();
    std::size_t lo = J >= 10 ? J / 10 : 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t r = lo; r < J; ++r) {
        double x = std::log(static_cast<double>(r + 1));
        double y = y_by_row[r];
        if (!std::isfinite(y)) continue;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return 0.0;
    double den = n * sxx - sx * sx;
    if (den <= 0) return 0.0;
    return (n * sxy - sx * sy) / den;
}

} // namespace probe_detail

/// Probe slope beyond which a log-ratio counts as diverging.
inline constexpr double kDivergenceSlope = 0.05;

struct DominationProbe {
    unsigned q = 0;
    struct PerR {
        unsigned r;
        double log_C_best;  // log max_j a_{j,q} / b_{j,r}
        double slope;       // trend of the log ratio over the top decade
    };
    std::vector<PerR> per_r;
};

/// C_best(r) = max_j a_{j,q}/b_{j,r} together with the divergence trend,
/// for r = 0..r_max.
inline DominationProbe probe_domination(const TabulatedMatrix& tabA, const TabulatedMatrix& tabB, unsigned q,
                                        unsigned r_max) {
    if (tabA.rows() != tabB.rows()) throw std::invalid_argument("probe_domination: row count mismatch");
    if (q >= tabA.grades() || r_max >= tabB.grades())
        throw std::invalid_argument("probe_domination: r-range exceeds grid");
    DominationProbe out;
    out.q = q;
    std::size_t J = tabA.rows();
    for (unsigned r = 0; r <= r_max; ++r) {
        std::vector<double> logratio(J);
        for (std::size_t row = 0; row < J; ++row) logratio[row] = tabA.log_entry(row, q) - tabB.log_entry(row, r);
        double best = probe_detail::parallel_row_max(J, [&](std::size_t row) { return logratio[row]; });
        out.per_r.push_back({r, best, probe_detail::top_decade_slope(logratio)});
    }
    return out;
}

enum class TailFlag { Converging, Diverging, Inconclusive };

inline std::string tail_flag_to_string(TailFlag f) {
    switch (f) {
        case TailFlag::Converging: return "converging";
        case TailFlag::Diverging: return "diverging";
        case TailFlag::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct NuclearityProbe {
    unsigned q = 0, r = 0;
    double sum_lo = 0, sum_mid = 0, sum_full = 0;  // partial sums at J/100, J/10, J
    double increment_ratio = 0;                    // (S_J - S_{J/10}) / (S_{J/10} - S_{J/100})
    TailFlag flag = TailFlag::Inconclusive;
};

/// Partial sums of a_{j,q}/a_{j,r}. Diverging means the last decade added
/// at least as much as the one before (within 2%): genuinely hopeless
/// tails like (log j)^{q-r}. Converging needs the increments to collapse.
/// Slowly-converging borderline exponents stay inconclusive on purpose.
inline NuclearityProbe probe_nuclearity(const TabulatedMatrix& tab, unsigned q, unsigned r) {
    if (q >= tab.grades() || r >= tab.grades()) throw std::invalid_argument("probe_nuclearity: r-range exceeds grid");
    NuclearityProbe out;
    out.q = q;
    out.r = r;
    std::size_t J = tab.rows();
    std::size_t c1 = J / 100, c2 = J / 10;
    long double acc = 0;
    for (std::size_t row = 0; row < J; ++row) {
        acc += std::exp(static_cast<long double>(tab.log_entry(row, q) - tab.log_entry(row, r)));
        if (row + 1 == c1) out.sum_lo = static_cast<double>(acc);
        if (row + 1 == c2) out.sum_mid = static_cast<double>(acc);
    }
    out.sum_full = static_cast<double>(acc);
    if (J < 100) return out;
    double prev = out.sum_mid - out.sum_lo;
    double last = out.sum_full - out.sum_mid;
    if (prev <= 0) {
        out.flag = last <= 0 ? TailFlag::Converging : TailFlag::Inconclusive;
        return out;
    }
    out.increment_ratio = last / prev;
    if (out.increment_ratio >= 1.02)
        out.flag = TailFlag::Diverging;
    else if (out.increment_ratio <= 0.5)
        out.flag = TailFlag::Converging;
    return out;
}

struct DnProbe {
    unsigned p = 0;
    struct PerQ {
        unsigned q;
        unsigned r;
        double log_C;
    };
    std::vector<PerQ> per_q;
    double worst_log_C = 0;
};

/// Best finite-section (DN) certificate: the p minimizing the worst per-q
/// constant in a_{j,q}^2 <= C a_{j,p} a_{j,r}.
inline DnProbe probe_dn(const TabulatedMatrix& tab) {
    std::size_t Q = tab.grades(), J = tab.rows();
    DnProbe best;
    bool have = false;
    unsigned p_cap = static_cast<unsigned>(std::min<std::size_t>(Q - 1, 16));
    for (unsigned p = 0; p <= p_cap; ++p) {
        DnProbe cand;
        cand.p = p;
        cand.worst_log_C = -std::numeric_limits<double>::infinity();
        for (unsigned q = 0; q < Q; ++q) {
            double best_c = std::numeric_limits<double>::infinity();
            unsigned best_r = 0;
            for (unsigned r = 0; r < Q; ++r) {
                double c = -std::numeric_limits<double>::infinity();
                for (std::size_t row = 0; row < J; ++row)
                    c = std::max(c, 2 * tab.log_entry(row, q) - tab.log_entry(row, p) - tab.log_entry(row, r));
                if (c < best_c) {
                    best_c = c;
                    best_r = r;
                }
            }
            cand.per_q.push_back({q, best_r, best_c});
            cand.worst_log_C = std::max(cand.worst_log_C, best_c);
        }
        if (!have || cand.worst_log_C < best.worst_log_C) {
            best = cand;
            have = true;
        }
    }
    return best;
}

/// Cross-check between a symbolic verdict and its probe. Fails exactly when
/// a Proved verdict meets a diverging probe at the witness r, or a Refuted
/// verdict meets a clearly bounded one (slope < -0.05) at the refuting q0.
inline bool consistency_check(const Verdict& verdict, const DominationProbe& probe, long witness_r = -1) {
    if (verdict.is_undecided()) return true;
    if (verdict.is_proved()) {
        bool saw_witness = false;
        for (const auto& prr : probe.per_r) {
            if (witness_r >= 0 && prr.r != static_cast<unsigned>(witness_r)) continue;
            saw_witness = true;
            if (prr.slope <= kDivergenceSlope) return true;
        }
        return !saw_witness;  // witness r beyond the probed range: nothing to contradict
    }
    for (const auto& prr : probe.per_r)
        if (prr.slope < -kDivergenceSlope) return false;
    return true;
}

inline bool consistency_check(const Verdict& verdict, const NuclearityProbe& probe) {
    if (verdict.is_proved() && probe.flag == TailFlag::Diverging) return false;
    if (verdict.is_refuted() && probe.flag == TailFlag::Converging) return false;
    return true;
}

} // namespace koethe
