#pragma once

#include "koethe/rational.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace koethe {

/// Exhaustive window for sign checks over the grade index q. Sign behaviour
/// that cannot be pinned down inside this window (plus the leading
/// coefficient) yields Undecided rather than a guess.
inline constexpr unsigned kGradeWindow = 64;

/// Polynomial in the grade index q with exact rational coefficients.
/// Coefficients are stored in ascending degree order and normalized
/// (no trailing zeros).
class GradePoly {
public:
    GradePoly() = default;
    explicit GradePoly(Rational constant) {
        if (constant != 0) coef_.push_back(std::move(constant));
    }
    explicit GradePoly(std::vector<Rational> ascending) : coef_(std::move(ascending)) {
        normalize();
    }

    static GradePoly variable() { return GradePoly(std::vector<Rational>{Rational(0), Rational(1)}); }
    static GradePoly constant(long c) { return GradePoly(Rational(c)); }

    bool is_zero() const { return coef_.empty(); }
    bool is_constant() const { return coef_.size() <= 1; }
    int degree() const { return coef_.empty() ? -1 : static_cast<int>(coef_.size()) - 1; }

    const Rational& leading() const {
        static const Rational zero(0);
        return coef_.empty() ? zero : coef_.back();
    }

    Rational coefficient(std::size_t i) const {
        return i < coef_.size() ? coef_[i] : Rational(0);
    }

    Rational eval(const Rational& q) const {
        Rational acc(0);
        for (auto it = coef_.rbegin(); it != coef_.rend(); ++it) acc = acc * q + *it;
        return acc;
    }
    Rational eval_at(unsigned q) const { return eval(Rational(q)); }

    GradePoly operator-() const {
        GradePoly out(*this);
        for (auto& c : out.coef_) c = -c;
        return out;
    }
    GradePoly& operator+=(const GradePoly& o) {
        if (o.coef_.size() > coef_.size()) coef_.resize(o.coef_.size(), Rational(0));
        for (std::size_t i = 0; i < o.coef_.size(); ++i) coef_[i] += o.coef_[i];
        normalize();
        return *this;
    }
    GradePoly& operator-=(const GradePoly& o) { return *this += -o; }
    friend GradePoly operator+(GradePoly a, const GradePoly& b) { return a += b; }
    friend GradePoly operator-(GradePoly a, const GradePoly& b) { return a -= b; }

    friend GradePoly operator*(const GradePoly& a, const GradePoly& b) {
        if (a.is_zero() || b.is_zero()) return GradePoly();
        std::vector<Rational> prod(a.coef_.size() + b.coef_.size() - 1, Rational(0));
        for (std::size_t i = 0; i < a.coef_.size(); ++i)
            for (std::size_t k = 0; k < b.coef_.size(); ++k) prod[i + k] += a.coef_[i] * b.coef_[k];
        return GradePoly(std::move(prod));
    }

    GradePoly scaled(const Rational& s) const {
        if (s == 0) return GradePoly();
        GradePoly out(*this);
        for (auto& c : out.coef_) c *= s;
        return out;
    }

    GradePoly pow(unsigned e) const {
        GradePoly out = constant(1);
        for (unsigned i = 0; i < e; ++i) out = out * (*this);
        return out;
    }

    /// p(a*q + b) for the affine grade substitutions used by r-templates.
    GradePoly compose_affine(unsigned a, unsigned b) const {
        GradePoly arg(std::vector<Rational>{Rational(b), Rational(a)});
        GradePoly acc;
        for (auto it = coef_.rbegin(); it != coef_.rend(); ++it) {
            acc = acc * arg;
            acc += GradePoly(*it);
        }
        return acc;
    }

    bool operator==(const GradePoly& o) const { return coef_ == o.coef_; }
    bool operator!=(const GradePoly& o) const { return !(*this == o); }

    /// Canonical form, highest degree first: "2*q^2 - q + 1/2", "0" when zero.
    std::string to_string() const {
        if (coef_.empty()) return "0";
        std::string out;
        for (int d = degree(); d >= 0; --d) {
            const Rational& c = coef_[static_cast<std::size_t>(d)];
            if (c == 0) continue;
            Rational mag = c < 0 ? Rational(-c) : c;
            if (out.empty()) {
                out += (c < 0) ? "-" : "";
            } else {
                out += (c < 0) ? " - " : " + ";
            }
            bool unit = (mag == 1);
            if (d == 0) {
                out += rational_to_string(mag);
            } else {
                if (!unit) out += rational_to_string(mag) + "*";
                out += (d == 1) ? "q" : "q^" + std::to_string(d);
            }
        }
        return out.empty() ? "0" : out;
    }

private:
    void normalize() {
        while (!coef_.empty() && coef_.back() == 0) coef_.pop_back();
    }

    std::vector<Rational> coef_;
};

/// Sign data of a grade polynomial over all of N_0: exact signs on the
/// window q = 0..kGradeWindow plus the sign for every q beyond it.
/// tail_known is false when roots may hide past the window (Cauchy bound
/// exceeds it), in which case callers must fall back to Undecided.
struct GradeSigns {
    std::array<int, kGradeWindow + 1> window{};
    int tail = 0;
    bool tail_known = true;

    bool all_nonnegative() const {
        if (!tail_known || tail < 0) return false;
        return std::all_of(window.begin(), window.end(), [](int s) { return s >= 0; });
    }
    bool all_nonpositive() const {
        if (!tail_known || tail > 0) return false;
        return std::all_of(window.begin(), window.end(), [](int s) { return s <= 0; });
    }
};

/// Upper bound on the magnitude of the real roots (Cauchy bound).
inline Rational cauchy_root_bound(const GradePoly& p) {
    if (p.is_constant()) return Rational(0);
    Rational lead = p.leading();
    if (lead < 0) lead = -lead;
    Rational worst(0);
    for (int i = 0; i < p.degree(); ++i) {
        Rational c = p.coefficient(static_cast<std::size_t>(i));
        if (c < 0) c = -c;
        if (c > worst) worst = c;
    }
    return Rational(1) + worst / lead;
}

inline GradeSigns grade_signs(const GradePoly& p) {
    GradeSigns out;
    for (unsigned q = 0; q <= kGradeWindow; ++q) out.window[q] = sign_of(p.eval_at(q));
    if (p.is_constant()) {
        out.tail = p.is_zero() ? 0 : sign_of(p.leading());
        out.tail_known = true;
        return out;
    }
    out.tail = sign_of(p.leading());
    out.tail_known = cauchy_root_bound(p) <= Rational(kGradeWindow);
    return out;
}

/// Signs of p + shift; used to compare a coefficient against a threshold
/// (e.g. the summability cutoff d < -1 tests sign of p + 1).
inline GradeSigns grade_signs_shifted(const GradePoly& p, const Rational& shift) {
    GradePoly shifted = p + GradePoly(shift);
    return grade_signs(shifted);
}

/// First window grade at which the sign predicate holds, or the first
/// certain grade past the window when only the tail qualifies.
inline long first_grade_with_sign(const GradeSigns& s, int wanted, const GradePoly& p) {
    for (unsigned q = 0; q <= kGradeWindow; ++q)
        if (s.window[q] == wanted) return static_cast<long>(q);
    if (s.tail_known && s.tail == wanted) {
        Rational b = cauchy_root_bound(p);
        long q0 = static_cast<long>(kGradeWindow) + 1;
        if (b > q0) q0 = static_cast<long>(static_cast<double>(b)) + 1;
        return q0;
    }
    return -1;
}

} // namespace koethe
