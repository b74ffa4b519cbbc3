#pragma once

#include "koethe/growth.hpp"
#include "koethe/qpoly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace koethe {

/// Symbolic Koethe matrix family a_{j,q} = exp(sum_k c_k(q) * phi_k(j)) over
/// a growth-ordered basis phi_k with rational coefficient polynomials c_k.
/// Entries are automatically positive; the Koethe axioms themselves are
/// checked by validate_koethe, not assumed here.
class KoetheMatrixSpec {
public:
    KoetheMatrixSpec() = default;

    static KoetheMatrixSpec make(std::string name,
                                 std::vector<std::pair<GrowthBasisFunction, GradePoly>> terms) {
        KoetheMatrixSpec spec;
        spec.name_ = std::move(name);
        for (auto& [fn, poly] : terms) spec.add_term(fn, poly);
        return spec;
    }

    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    std::size_t term_count() const { return basis_.size(); }
    const std::vector<GrowthBasisFunction>& basis() const { return basis_; }
    const std::vector<GradePoly>& coefficients() const { return coefficients_; }

    /// Merges into an existing slot when the basis function is already
    /// present; keeps the basis sorted slowest -> fastest.
    void add_term(const GrowthBasisFunction& fn, const GradePoly& poly) {
        if (poly.is_zero()) return;
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            if (basis_[i].same_function(fn)) {
                if (!(basis_[i].growth_class() == fn.growth_class()))
                    throw std::invalid_argument("conflicting class for basis function in '" + name_ + "'");
                coefficients_[i] += poly;
                if (coefficients_[i].is_zero()) {
                    basis_.erase(basis_.begin() + static_cast<long>(i));
                    coefficients_.erase(coefficients_.begin() + static_cast<long>(i));
                }
                return;
            }
        }
        auto pos = std::lower_bound(basis_.begin(), basis_.end(), fn, presentation_less);
        std::size_t idx = static_cast<std::size_t>(pos - basis_.begin());
        basis_.insert(pos, fn);
        coefficients_.insert(coefficients_.begin() + static_cast<long>(idx), poly);
    }

    double log_evaluate(std::uint64_t j, unsigned q) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < basis_.size(); ++k)
            acc += to_double(coefficients_[k].eval_at(q)) * basis_[k].eval(j);
        return acc;
    }

    /// a_{j,q}; strictly positive. Throws MissingSampleError when a named
    /// sequence lacks a sample at j.
    double evaluate(std::uint64_t j, unsigned q) const { return std::exp(log_evaluate(j, q)); }

    /// Largest j every term can evaluate at (bounded by named-sequence
    /// sample coverage).
    std::uint64_t eval_limit() const {
        std::uint64_t lim = UINT64_MAX;
        for (const auto& fn : basis_) lim = std::min(lim, fn.eval_limit());
        return lim;
    }

    /// The matrix A^2 = (a_{j,q}^2): every coefficient polynomial doubles.
    KoetheMatrixSpec square() const {
        KoetheMatrixSpec out(*this);
        out.name_ = name_.empty() ? "squared" : name_ + "_squared";
        for (auto& c : out.coefficients_) c = c.scaled(Rational(2));
        return out;
    }

    /// Structural equality; ignores sample tables (probe data, not identity).
    bool operator==(const KoetheMatrixSpec& o) const {
        if (name_ != o.name_ || basis_.size() != o.basis_.size()) return false;
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            if (!basis_[i].same_function(o.basis_[i])) return false;
            if (!(basis_[i].growth_class() == o.basis_[i].growth_class())) return false;
            if (coefficients_[i] != o.coefficients_[i]) return false;
        }
        return true;
    }
    bool operator!=(const KoetheMatrixSpec& o) const { return !(*this == o); }

private:
    std::string name_;
    std::vector<GrowthBasisFunction> basis_;
    std::vector<GradePoly> coefficients_;
};

namespace detail {

inline std::string basisref_string(const GrowthBasisFunction& fn) {
    switch (fn.kind()) {
        case BasisKind::ConstantOne: return "1";
        case BasisKind::LogJ: return "log(j)";
        case BasisKind::PowerJ: return "j^" + rational_to_string(fn.exponent());
        case BasisKind::NamedSequence: return "seq(" + fn.name() + ")";
    }
    return "?";
}

/// Signed fragments making up the log_entry expression; sign is factored
/// out so the printer can join with " + " / " - ".
inline void append_term_fragments(const GrowthBasisFunction& fn, const GradePoly& poly,
                                  std::vector<std::pair<int, std::string>>& out) {
    if (fn.kind() == BasisKind::ConstantOne) {
        // constant-one terms dissolve into plain polynomial monomials
        for (int d = poly.degree(); d >= 0; --d) {
            Rational c = poly.coefficient(static_cast<std::size_t>(d));
            if (c == 0) continue;
            int s = sign_of(c);
            Rational mag = s < 0 ? Rational(-c) : c;
            std::string body;
            if (d == 0) {
                body = rational_to_string(mag);
            } else {
                if (mag != 1) body = rational_to_string(mag) + "*";
                body += (d == 1) ? "q" : "q^" + std::to_string(d);
            }
            out.emplace_back(s, body);
        }
        return;
    }
    std::string ref = basisref_string(fn);
    int monomials = 0;
    for (int d = 0; d <= poly.degree(); ++d)
        if (poly.coefficient(static_cast<std::size_t>(d)) != 0) ++monomials;
    if (monomials == 1) {
        int d = poly.degree();
        while (poly.coefficient(static_cast<std::size_t>(d)) == 0) --d;
        Rational c = poly.coefficient(static_cast<std::size_t>(d));
        int s = sign_of(c);
        Rational mag = s < 0 ? Rational(-c) : c;
        std::string body;
        if (d == 0) {
            body = (mag == 1) ? ref : rational_to_string(mag) + " * " + ref;
        } else {
            if (mag != 1) body = rational_to_string(mag) + "*";
            body += (d == 1) ? "q" : "q^" + std::to_string(d);
            body += " * " + ref;
        }
        out.emplace_back(s, body);
        return;
    }
    out.emplace_back(1, "(" + poly.to_string() + ") * " + ref);
}

} // namespace detail

/// Canonical DSL rendering; parse(print(spec)) is structurally equal to spec.
inline std::string print_spec(const KoetheMatrixSpec& spec) {
    std::string out = "matrix " + spec.name() + " {\n";
    for (const auto& fn : spec.basis()) {
        if (fn.kind() == BasisKind::NamedSequence)
            out += "  seq " + fn.name() + " class " + fn.growth_class().to_string() + "\n";
    }
    std::vector<std::pair<int, std::string>> fragments;
    for (std::size_t k = 0; k < spec.term_count(); ++k)
        detail::append_term_fragments(spec.basis()[k], spec.coefficients()[k], fragments);
    std::string expr;
    if (fragments.empty()) {
        expr = "0";
    } else {
        for (std::size_t i = 0; i < fragments.size(); ++i) {
            if (i == 0) {
                if (fragments[i].first < 0) expr += "-";
            } else {
                expr += fragments[i].first < 0 ? " - " : " + ";
            }
            expr += fragments[i].second;
        }
    }
    out += "  log_entry: " + expr + "\n}\n";
    return out;
}

} // namespace koethe
