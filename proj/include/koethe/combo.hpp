#pragma once

#include "koethe/qpoly.hpp"
#include "koethe/spec.hpp"
#include "koethe/verdict.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace koethe {

/// Union of two specs' bases in presentation order, with coefficient
/// polynomials re-indexed against it. All quantified conditions reduce to
/// sign scans of such combos.
struct MergedBasis {
    std::vector<GrowthBasisFunction> fns;

    static MergedBasis merge(const std::vector<GrowthBasisFunction>& a,
                             const std::vector<GrowthBasisFunction>& b) {
        MergedBasis out;
        out.fns = a;
        for (const auto& fb : b) {
            bool found = false;
            for (auto& fa : out.fns) {
                if (fa.same_function(fb)) {
                    if (!(fa.growth_class() == fb.growth_class()))
                        throw std::invalid_argument("unmergeable bases: '" + fb.name() +
                                                    "' declared with two different classes");
                    if (!fa.has_samples() && fb.has_samples()) fa = fb;  // keep richer probe data
                    found = true;
                    break;
                }
            }
            if (!found) out.fns.push_back(fb);
        }
        std::sort(out.fns.begin(), out.fns.end(), presentation_less);
        return out;
    }

    std::size_t size() const { return fns.size(); }

    std::vector<GradePoly> project(const KoetheMatrixSpec& spec) const {
        std::vector<GradePoly> out(fns.size());
        for (std::size_t k = 0; k < spec.term_count(); ++k) {
            for (std::size_t i = 0; i < fns.size(); ++i) {
                if (fns[i].same_function(spec.basis()[k])) {
                    out[i] = spec.coefficients()[k];
                    break;
                }
            }
        }
        return out;
    }
};

/// sum_k coef[k](q) * phi_k(j), the log of a ratio of matrix entries.
struct LogCombo {
    MergedBasis basis;
    std::vector<GradePoly> coef;

    LogCombo() = default;
    LogCombo(MergedBasis b, std::vector<GradePoly> c) : basis(std::move(b)), coef(std::move(c)) {
        if (basis.fns.size() != coef.size()) throw std::invalid_argument("combo shape mismatch");
    }

    static LogCombo of_spec(const KoetheMatrixSpec& a) {
        MergedBasis mb = MergedBasis::merge(a.basis(), {});
        auto c = mb.project(a);
        return LogCombo(std::move(mb), std::move(c));
    }

    double eval(std::uint64_t j, unsigned q) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < coef.size(); ++k)
            acc += to_double(coef[k].eval_at(q)) * basis.fns[k].eval(j);
        return acc;
    }

    std::uint64_t eval_limit() const {
        std::uint64_t lim = UINT64_MAX;
        for (std::size_t k = 0; k < coef.size(); ++k)
            if (!coef[k].is_zero()) lim = std::min(lim, basis.fns[k].eval_limit());
        return lim;
    }
};

namespace scan_detail {

enum class PointStatus { Bounded, Unbounded, Undecided };
enum class SumStatus { Summable, Divergent, Undecided };

/// One grade point: either a window grade or the tail beyond it.
struct GradePoint {
    bool is_tail;
    unsigned q;  // valid when !is_tail
};

inline std::vector<GradePoint> grade_points() {
    std::vector<GradePoint> pts;
    for (unsigned q = 0; q <= kGradeWindow; ++q) pts.push_back({false, q});
    pts.push_back({true, 0});
    return pts;
}

struct ComboSigns {
    std::vector<GradeSigns> per_coef;
    std::vector<GradeSigns> per_coef_plus_one;  // for the log-summability cutoff

    explicit ComboSigns(const LogCombo& c) {
        per_coef.reserve(c.coef.size());
        per_coef_plus_one.reserve(c.coef.size());
        for (const auto& p : c.coef) {
            per_coef.push_back(grade_signs(p));
            per_coef_plus_one.push_back(grade_signs_shifted(p, Rational(1)));
        }
    }

    /// Sign of coefficient k at a grade point; second value false when the
    /// tail sign is not certified.
    std::pair<int, bool> sign_at(std::size_t k, const GradePoint& pt, bool shifted = false) const {
        const GradeSigns& s = shifted ? per_coef_plus_one[k] : per_coef[k];
        if (!pt.is_tail) return {s.window[pt.q], true};
        return {s.tail, s.tail_known};
    }
};

/// Boundedness above of the combo at one grade point. A positive
/// coefficient on an unbounded basis wins unless a strictly faster basis
/// carries a negative one; incomparable leaders with mixed signs stay
/// undecided.
inline PointStatus bounded_above_at(const LogCombo& combo, const ComboSigns& signs, const GradePoint& pt,
                                    int* offending = nullptr) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t k = 0; k < combo.coef.size(); ++k) {
        auto [s, known] = signs.sign_at(k, pt);
        if (!known) return PointStatus::Undecided;
        if (s == 0 || combo.basis.fns[k].is_bounded()) continue;
        (s > 0 ? pos : neg).push_back(k);
    }
    if (pos.empty()) return PointStatus::Bounded;
    for (std::size_t k : pos) {
        bool beats_all = true;
        for (std::size_t m : neg)
            if (!strictly_faster(combo.basis.fns[k], combo.basis.fns[m])) beats_all = false;
        if (beats_all) {
            if (offending) *offending = static_cast<int>(k);
            return PointStatus::Unbounded;
        }
    }
    for (std::size_t k : neg) {
        bool beats_all = true;
        for (std::size_t m : pos)
            if (!strictly_faster(combo.basis.fns[k], combo.basis.fns[m])) beats_all = false;
        if (beats_all) return PointStatus::Bounded;
    }
    return PointStatus::Undecided;
}

/// Summability of sum_j exp(combo(j)) at one grade point, per the leading
/// growth class: anything faster than log with a negative leader is
/// summable, a builtin-log leader needs coefficient < -1, bounded leaders
/// never let the terms vanish.
inline SumStatus summable_at(const LogCombo& combo, const ComboSigns& signs, const GradePoint& pt,
                             int* offending = nullptr) {
    std::vector<std::size_t> live;
    for (std::size_t k = 0; k < combo.coef.size(); ++k) {
        auto [s, known] = signs.sign_at(k, pt);
        if (!known) return SumStatus::Undecided;
        if (s == 0 || combo.basis.fns[k].is_bounded()) continue;
        live.push_back(k);
    }
    if (live.empty()) {
        if (offending) *offending = -1;
        return SumStatus::Divergent;  // terms stay bounded away from zero
    }
    // maximal elements under strict growth dominance (single class by construction)
    std::vector<std::size_t> maximal;
    for (std::size_t k : live) {
        bool dominated = false;
        for (std::size_t m : live)
            if (strictly_faster(combo.basis.fns[m], combo.basis.fns[k])) dominated = true;
        if (!dominated) maximal.push_back(k);
    }
    bool all_neg = true, all_pos = true;
    for (std::size_t k : maximal) {
        int s = signs.sign_at(k, pt).first;
        (s > 0 ? all_neg : all_pos) = false;
    }
    if (!all_neg && !all_pos) return SumStatus::Undecided;
    if (all_pos) {
        if (offending) *offending = static_cast<int>(maximal.front());
        return SumStatus::Divergent;
    }
    GrowthClassKind cls = combo.basis.fns[maximal.front()].growth_class().kind;
    if (cls != GrowthClassKind::Logarithmic) return SumStatus::Summable;  // superlog or faster, negative leader
    // logarithmic leaders: the builtin log(j) coefficient d decides via d < -1
    const std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t builtin = npos;
    for (std::size_t k : maximal)
        if (combo.basis.fns[k].is_builtin_log()) builtin = k;
    if (builtin == npos) return SumStatus::Undecided;  // named log-class sequences only: constants unknown
    auto [s1, known1] = signs.sign_at(builtin, pt, /*shifted=*/true);
    if (!known1) return SumStatus::Undecided;
    if (s1 < 0) return SumStatus::Summable;  // d < -1; named-log companions are nonpositive here
    if (maximal.size() == 1) {
        if (offending) *offending = static_cast<int>(builtin);
        return SumStatus::Divergent;  // d >= -1 and nothing else to save it
    }
    return SumStatus::Undecided;  // d >= -1 but negative named-log terms might still help
}

/// Concrete refuting grade for a tail point.
inline unsigned concrete_tail_grade(const LogCombo& combo) {
    Rational worst(kGradeWindow);
    for (const auto& p : combo.coef) {
        Rational b = cauchy_root_bound(p);
        if (b > worst) worst = b;
    }
    return static_cast<unsigned>(static_cast<double>(worst)) + 1;
}

/// Numeric sup estimate over j for the witness constant C. Returns the
/// window-wide bound; falls back to 0 (C = 1) when every coefficient is
/// nonpositive, which is the common exact case.
inline double probe_sup(const LogCombo& combo) {
    bool all_nonpos = true;
    for (const auto& p : combo.coef) {
        GradeSigns s = grade_signs(p);
        if (!s.all_nonpositive()) all_nonpos = false;
    }
    if (all_nonpos) return 0.0;
    double sup = 0.0;
    std::uint64_t jmax = std::min<std::uint64_t>(combo.eval_limit(), 1u << 20);
    for (unsigned q = 0; q <= kGradeWindow; q += 8) {
        for (std::uint64_t j = 1; j <= jmax; j = (j < 16 ? j + 1 : j * 2)) {
            double v = combo.eval(j, q);
            if (std::isfinite(v) && v > sup) sup = v;
        }
    }
    return std::min(sup, 1400.0);
}

} // namespace scan_detail

/// Decides sup_j combo(j, q) < infinity for every grade q (the kernel of
/// the domination relation). Proved carries C = exp(window sup bound);
/// Refuted carries the offending grade and basis.
inline Verdict bounded_above(const LogCombo& combo) {
    using namespace scan_detail;
    ComboSigns signs(combo);
    bool any_undecided = false;
    for (const GradePoint& pt : grade_points()) {
        int offending = -1;
        PointStatus st = bounded_above_at(combo, signs, pt, &offending);
        if (st == PointStatus::Unbounded) {
            Certificate c;
            c.q0 = pt.is_tail ? concrete_tail_grade(combo) : pt.q;
            c.basis_index = offending;
            c.code = "positive-leading";
            return Verdict::refuted(std::move(c));
        }
        if (st == PointStatus::Undecided) any_undecided = true;
    }
    if (any_undecided) {
        Evidence e;
        e.note = "incomparable leading coefficients with mixed signs";
        return Verdict::undecided(std::move(e));
    }
    Witness w;
    w.C = rational_exp_upper_bound(probe_sup(combo));
    return Verdict::proved(std::move(w));
}

/// Decides sum_j exp(combo(j, q)) < infinity for every grade q (the kernel
/// of the nuclearity condition).
inline Verdict summable(const LogCombo& combo) {
    using namespace scan_detail;
    ComboSigns signs(combo);
    bool any_undecided = false;
    for (const GradePoint& pt : grade_points()) {
        int offending = -1;
        SumStatus st = summable_at(combo, signs, pt, &offending);
        if (st == SumStatus::Divergent) {
            Certificate c;
            c.q0 = pt.is_tail ? concrete_tail_grade(combo) : pt.q;
            c.basis_index = offending;
            c.code = offending < 0 ? "nonvanishing-terms" : "insufficient-decay";
            return Verdict::refuted(std::move(c));
        }
        if (st == SumStatus::Undecided) any_undecided = true;
    }
    if (any_undecided) {
        Evidence e;
        e.note = "summability depends on undeclared growth constants";
        return Verdict::undecided(std::move(e));
    }
    Witness w;
    return Verdict::proved(std::move(w));
}

} // namespace koethe
