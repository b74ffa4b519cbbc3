#pragma once

#include "koethe/combo.hpp"
#include "koethe/tabulated.hpp"
#include "koethe/verdict.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace koethe {

/// Search space for the existential grade quantifiers: r = a*q + b and the
/// fixed grade p. Failing every template yields Undecided, never Refuted.
inline constexpr unsigned kTemplateSlopeMax = 4;
inline constexpr unsigned kTemplateOffsetMax = 16;
inline constexpr unsigned kFixedGradeMax = 16;

/// log(a_{j,q} / b_{j, a*q+b}) as a merged-basis combo.
inline LogCombo domination_combo(const KoetheMatrixSpec& A, const KoetheMatrixSpec& B, RTemplate r) {
    MergedBasis mb = MergedBasis::merge(A.basis(), B.basis());
    std::vector<GradePoly> alpha = mb.project(A);
    std::vector<GradePoly> beta = mb.project(B);
    std::vector<GradePoly> coef(mb.size());
    for (std::size_t k = 0; k < mb.size(); ++k) coef[k] = alpha[k] - beta[k].compose_affine(r.a, r.b);
    return LogCombo(std::move(mb), std::move(coef));
}

/// Decides A < B (domination): for every q there are r and C with
/// a_{j,q} <= C b_{j,r}. Proof search runs over affine r-templates;
/// refutation needs an r-independence certificate.
inline Verdict dominated_by(const KoetheMatrixSpec& A, const KoetheMatrixSpec& B) {
    for (unsigned a = 0; a <= kTemplateSlopeMax; ++a) {
        for (unsigned b = 0; b <= kTemplateOffsetMax; ++b) {
            Verdict v = bounded_above(domination_combo(A, B, {a, b}));
            if (v.is_proved()) {
                Witness w = *v.witness();
                w.r_template = RTemplate{a, b};
                return Verdict::proved(std::move(w), v.evidence());
            }
        }
    }
    // Refutation: a basis phi of unbounded growth where B's coefficient is
    // r-free and A's value at some q0 exceeds it, with every basis not
    // strictly slower than phi silent in B and nonnegative in A.
    MergedBasis mb = MergedBasis::merge(A.basis(), B.basis());
    std::vector<GradePoly> alpha = mb.project(A);
    std::vector<GradePoly> beta = mb.project(B);
    for (unsigned q0 = 0; q0 <= kGradeWindow; ++q0) {
        for (std::size_t ki = mb.size(); ki-- > 0;) {  // fastest first
            if (mb.fns[ki].is_bounded()) continue;
            if (!beta[ki].is_constant()) continue;
            Rational gap = alpha[ki].eval_at(q0) - beta[ki].coefficient(0);
            if (gap <= 0) continue;
            bool ok = true;
            for (std::size_t m = 0; m < mb.size() && ok; ++m) {
                if (m == ki || strictly_faster(mb.fns[ki], mb.fns[m])) continue;
                if (!beta[m].is_zero()) ok = false;
                if (alpha[m].eval_at(q0) < 0) ok = false;
            }
            if (ok) {
                Certificate c;
                c.q0 = q0;
                c.basis_index = static_cast<int>(ki);
                c.code = "r-free-gap";
                return Verdict::refuted(std::move(c));
            }
        }
    }
    Evidence e;
    e.note = "no affine r-template certified and no r-independence certificate found";
    return Verdict::undecided(std::move(e));
}

/// A ~ B: mutual domination.
inline Verdict equivalent(const KoetheMatrixSpec& A, const KoetheMatrixSpec& B) {
    Verdict fwd = dominated_by(A, B);
    if (fwd.is_refuted()) {
        Verdict v = fwd;
        v.evidence().note = "A < B fails";
        return v;
    }
    Verdict bwd = dominated_by(B, A);
    if (bwd.is_refuted()) {
        Verdict v = bwd;
        v.evidence().note = "B < A fails";
        return v;
    }
    if (fwd.is_proved() && bwd.is_proved()) {
        Witness w = *fwd.witness();
        Evidence e;
        const RTemplate rb = *bwd.witness()->r_template;
        e.note = "reverse r-template r = " + std::to_string(rb.a) + "*q + " + std::to_string(rb.b);
        return Verdict::proved(std::move(w), std::move(e));
    }
    return Verdict::undecided(fwd.is_undecided() ? fwd.evidence() : bwd.evidence());
}

/// Theorem 3.1 (4)(i): for every q some r makes sum_j a_{j,q}/a_{j,r} finite.
inline Verdict is_nuclear(const KoetheMatrixSpec& A) {
    LogCombo base = LogCombo::of_spec(A);
    for (unsigned a = 0; a <= kTemplateSlopeMax; ++a) {
        for (unsigned b = 0; b <= kTemplateOffsetMax; ++b) {
            std::vector<GradePoly> coef(base.coef.size());
            for (std::size_t k = 0; k < base.coef.size(); ++k)
                coef[k] = base.coef[k] - base.coef[k].compose_affine(a, b);
            Verdict v = summable(LogCombo(base.basis, std::move(coef)));
            if (v.is_proved()) {
                Witness w = *v.witness();
                w.r_template = RTemplate{a, b};
                return Verdict::proved(std::move(w));
            }
        }
    }
    // Certificate: every unbounded basis has a grade-constant coefficient,
    // so the ratio never decays in j no matter how large r is.
    bool all_constant = true;
    int first_unbounded = -1;
    for (std::size_t k = 0; k < base.coef.size(); ++k) {
        if (base.basis.fns[k].is_bounded() || base.coef[k].is_zero()) continue;
        if (first_unbounded < 0) first_unbounded = static_cast<int>(k);
        if (!base.coef[k].is_constant()) all_constant = false;
    }
    if (all_constant) {
        Certificate c;
        c.q0 = 0;
        c.basis_index = first_unbounded;
        c.code = "no-r-decay";
        return Verdict::refuted(std::move(c));
    }
    Evidence e;
    e.note = "no affine r-template certified summability";
    return Verdict::undecided(std::move(e));
}

/// Theorem 3.1 (4)(ii): some grade p has inf_j a_{j,p} > 0.
inline Verdict has_continuous_norm_row(const KoetheMatrixSpec& A) {
    LogCombo base = LogCombo::of_spec(A);
    for (unsigned p = 0; p <= kFixedGradeMax; ++p) {
        std::vector<GradePoly> neg(base.coef.size());
        for (std::size_t k = 0; k < base.coef.size(); ++k) neg[k] = GradePoly(-base.coef[k].eval_at(p));
        Verdict v = bounded_above(LogCombo(base.basis, std::move(neg)));
        if (v.is_proved()) {
            Witness w = *v.witness();
            w.p = p;
            return Verdict::proved(std::move(w));
        }
    }
    // Certificate: a p-free negative coefficient on an unbounded basis that
    // nothing of comparable or faster growth can offset.
    for (std::size_t ki = base.coef.size(); ki-- > 0;) {
        if (base.basis.fns[ki].is_bounded() || base.coef[ki].is_zero()) continue;
        if (!base.coef[ki].is_constant() || base.coef[ki].coefficient(0) >= 0) continue;
        bool ok = true;
        for (std::size_t m = 0; m < base.coef.size() && ok; ++m) {
            if (m == ki || strictly_faster(base.basis.fns[ki], base.basis.fns[m])) continue;
            if (!base.coef[m].is_zero()) ok = false;
        }
        if (ok) {
            Certificate c;
            c.q0 = 0;
            c.basis_index = static_cast<int>(ki);
            c.code = "p-free-decay";
            return Verdict::refuted(std::move(c));
        }
    }
    Evidence e;
    e.note = "no grade p <= " + std::to_string(kFixedGradeMax) + " certified a positive row bound";
    return Verdict::undecided(std::move(e));
}

/// Theorem 3.2 (2)(ii): some p works for every q with a_{j,q}^2 <= C a_{j,p} a_{j,r}.
inline Verdict has_DN(const KoetheMatrixSpec& A) {
    LogCombo base = LogCombo::of_spec(A);
    for (unsigned p = 0; p <= kFixedGradeMax; ++p) {
        for (unsigned a = 0; a <= kTemplateSlopeMax; ++a) {
            for (unsigned b = 0; b <= kTemplateOffsetMax; ++b) {
                std::vector<GradePoly> coef(base.coef.size());
                for (std::size_t k = 0; k < base.coef.size(); ++k)
                    coef[k] = base.coef[k].scaled(Rational(2)) - GradePoly(base.coef[k].eval_at(p)) -
                              base.coef[k].compose_affine(a, b);
                Verdict v = bounded_above(LogCombo(base.basis, std::move(coef)));
                if (v.is_proved()) {
                    Witness w = *v.witness();
                    w.p = p;
                    w.r_template = RTemplate{a, b};
                    return Verdict::proved(std::move(w));
                }
            }
        }
    }
    Evidence e;
    e.note = "dominating-norm template search exhausted";
    return Verdict::undecided(std::move(e));
}

/// Pirkovskii's algebra criterion A < A^2.
inline Verdict is_algebra(const KoetheMatrixSpec& A) { return dominated_by(A, A.square()); }

/// Theorem 3.1 (4)(iii): A^2 < A, i.e. the space is closed under square roots.
inline Verdict is_sqrt_closed(const KoetheMatrixSpec& A) { return dominated_by(A.square(), A); }

/// Theorem 3.1 (5)(iii): A ~ A^2.
inline Verdict is_self_equivalent(const KoetheMatrixSpec& A) { return equivalent(A, A.square()); }

// ---- Koethe axiom validation ----

/// Symbolic check of Def 2.2: axiom (i) is automatic for exponential
/// entries; axiom (ii) via the per-basis coefficient differences
/// c_k(q+1) - c_k(q) and the sign-scan rule.
inline Verdict validate_koethe(const KoetheMatrixSpec& spec) {
    std::vector<GradePoly> diff(spec.term_count());
    for (std::size_t k = 0; k < spec.term_count(); ++k)
        diff[k] = spec.coefficients()[k].compose_affine(1, 1) - spec.coefficients()[k];

    bool all_nonneg = true;
    for (const auto& d : diff)
        if (!grade_signs(d).all_nonnegative()) all_nonneg = false;
    if (all_nonneg) return Verdict::proved(Witness{});

    MergedBasis mb = MergedBasis::merge(spec.basis(), {});
    for (unsigned q0 = 0; q0 <= kGradeWindow; ++q0) {
        std::vector<GradePoly> coef(diff.size());
        for (std::size_t k = 0; k < diff.size(); ++k) coef[k] = GradePoly(diff[k].eval_at(q0));
        LogCombo combo(mb, coef);

        std::vector<GradePoly> neg(coef.size());
        for (std::size_t k = 0; k < coef.size(); ++k) neg[k] = -coef[k];
        bool goes_to_minus_inf = bounded_above(LogCombo(mb, std::move(neg))).is_refuted();

        std::uint64_t jmax = std::min<std::uint64_t>(combo.eval_limit(), goes_to_minus_inf ? (1u << 26) : 4096);
        for (std::uint64_t j = 1; j <= jmax; j = (j < 64 ? j + 1 : j + j / 2)) {
            if (combo.eval(j, 0) < -1e-7) {
                Certificate c;
                c.q0 = q0;
                c.j = j;
                c.code = "monotonicity-violation";
                return Verdict::refuted(std::move(c));
            }
        }
        if (goes_to_minus_inf) {
            Certificate c;  // violation certain past the probed range
            c.q0 = q0;
            c.code = "monotonicity-violation";
            return Verdict::refuted(std::move(c));
        }
    }
    Evidence e;
    e.note = "coefficient differences are not sign-certified over the grade window";
    return Verdict::undecided(std::move(e));
}

/// Finite-section check of both axioms on a tabulated grid.
inline Verdict validate_koethe(const TabulatedMatrix& tab) {
    for (std::size_t r = 0; r < tab.rows(); ++r) {
        for (std::size_t q = 0; q + 1 < tab.grades(); ++q) {
            if (tab.log_entry(r, q) > tab.log_entry(r, q + 1)) {
                Certificate c;
                c.q0 = static_cast<unsigned>(q);
                c.j = r + 1;
                c.code = "column-decrease";
                return Verdict::refuted(std::move(c));
            }
        }
    }
    return Verdict::proved(Witness{});
}

// ---- Full classification (Theorem 3.1 conditions (4) and (5)) ----

struct ClassificationReport {
    Verdict koethe_axioms;
    Verdict nuclear;               // (4)(i) == (5)(i)
    Verdict continuous_norm_row;   // (4)(ii)
    Verdict sqrt_closed;           // (4)(iii): A^2 < A
    Verdict dn;                    // (5)(ii)
    Verdict algebra;               // A < A^2
    Verdict self_equivalence;      // (5)(iii): A ~ A^2
    TriState set4 = TriState::Unknown;
    TriState set5 = TriState::Unknown;
    bool consistent = true;
};

/// Runs every member check and cross-validates the theorem's (4) <=> (5)
/// equivalence; consistent goes false only when both sides are decided and
/// disagree, which would expose a calculus bug.
inline ClassificationReport classify(const KoetheMatrixSpec& A) {
    ClassificationReport rep;
    rep.koethe_axioms = validate_koethe(A);
    if (rep.koethe_axioms.is_refuted()) throw std::invalid_argument("classify: '" + A.name() + "' is not a Koethe matrix");
    rep.nuclear = is_nuclear(A);
    rep.continuous_norm_row = has_continuous_norm_row(A);
    rep.sqrt_closed = is_sqrt_closed(A);
    rep.dn = has_DN(A);
    rep.algebra = is_algebra(A);
    rep.self_equivalence = is_self_equivalent(A);
    rep.set4 = tri_conjunction({rep.nuclear, rep.continuous_norm_row, rep.sqrt_closed});
    rep.set5 = tri_conjunction({rep.nuclear, rep.dn, rep.self_equivalence});
    rep.consistent = rep.set4 == TriState::Unknown || rep.set5 == TriState::Unknown || rep.set4 == rep.set5;
    return rep;
}

} // namespace koethe
