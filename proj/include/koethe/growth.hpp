#pragma once

#include "koethe/rational.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace koethe {

/// Declared asymptotic class of a basis function of j. The order below is
/// total across classes; polynomial classes are ordered by exponent.
enum class GrowthClassKind : std::uint8_t {
    Bounded = 0,
    Logarithmic = 1,
    SuperLogarithmic = 2,  // faster than any power of log j, slower than any j^theta
    Polynomial = 3,
    SuperPolynomial = 4,
};

struct GrowthClass {
    GrowthClassKind kind = GrowthClassKind::Bounded;
    Rational theta{0};  // only meaningful for Polynomial

    bool unbounded() const { return kind != GrowthClassKind::Bounded; }

    bool operator==(const GrowthClass& o) const {
        if (kind != o.kind) return false;
        return kind != GrowthClassKind::Polynomial || theta == o.theta;
    }

    std::string to_string() const {
        switch (kind) {
            case GrowthClassKind::Bounded: return "bounded";
            case GrowthClassKind::Logarithmic: return "log";
            case GrowthClassKind::SuperLogarithmic: return "superlog";
            case GrowthClassKind::Polynomial: return "poly(" + rational_to_string(theta) + ")";
            case GrowthClassKind::SuperPolynomial: return "superpoly";
        }
        return "?";
    }
};

/// Strict growth dominance between classes. Same class (including equal
/// polynomial exponents) is never strict: two distinct sequences of the
/// same declared class stay incomparable.
inline bool strictly_faster(const GrowthClass& a, const GrowthClass& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
    if (a.kind == GrowthClassKind::Polynomial) return a.theta > b.theta;
    return false;
}

enum class BasisKind : std::uint8_t { ConstantOne, LogJ, PowerJ, NamedSequence };

struct MissingSampleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One member of the growth basis: 1, log(j), j^theta, or a named sequence
/// with a declared class and optional sample values for numeric probing.
/// Basis functions are nonnegative for j >= 1 by construction.
class GrowthBasisFunction {
public:
    static GrowthBasisFunction one() {
        return GrowthBasisFunction(BasisKind::ConstantOne, {GrowthClassKind::Bounded, Rational(0)}, Rational(0), "");
    }
    static GrowthBasisFunction log_j() {
        return GrowthBasisFunction(BasisKind::LogJ, {GrowthClassKind::Logarithmic, Rational(0)}, Rational(0), "");
    }
    static GrowthBasisFunction power_j(Rational theta) {
        if (theta <= 0) throw std::invalid_argument("power basis needs exponent theta > 0");
        GrowthClass cls{GrowthClassKind::Polynomial, theta};
        return GrowthBasisFunction(BasisKind::PowerJ, cls, std::move(theta), "");
    }
    static GrowthBasisFunction named(std::string name, GrowthClass cls, std::vector<double> samples = {}) {
        if (name.empty()) throw std::invalid_argument("named sequence needs a name");
        for (double v : samples)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("sample values must be finite and nonnegative");
        GrowthBasisFunction f(BasisKind::NamedSequence, cls, Rational(0), std::move(name));
        f.samples_ = std::move(samples);
        return f;
    }

    BasisKind kind() const { return kind_; }
    const GrowthClass& growth_class() const { return class_; }
    const Rational& exponent() const { return exponent_; }
    const std::string& name() const { return name_; }
    const std::vector<double>& samples() const { return samples_; }
    bool has_samples() const { return !samples_.empty(); }

    bool is_bounded() const { return !class_.unbounded(); }
    bool is_builtin_log() const { return kind_ == BasisKind::LogJ; }

    /// Identity for merging/deduplication: structural, ignoring samples.
    bool same_function(const GrowthBasisFunction& o) const {
        if (kind_ != o.kind_) return false;
        switch (kind_) {
            case BasisKind::PowerJ: return exponent_ == o.exponent_;
            case BasisKind::NamedSequence: return name_ == o.name_;
            default: return true;
        }
    }

    double eval(std::uint64_t j) const {
        if (j < 1) throw std::invalid_argument("index j starts at 1");
        switch (kind_) {
            case BasisKind::ConstantOne: return 1.0;
            case BasisKind::LogJ: return std::log(static_cast<double>(j));
            case BasisKind::PowerJ: return std::pow(static_cast<double>(j), to_double(exponent_));
            case BasisKind::NamedSequence:
                if (j > samples_.size())
                    throw MissingSampleError("no sample value for sequence '" + name_ + "' at j=" + std::to_string(j));
                return samples_[j - 1];
        }
        return 0.0;
    }

    /// Largest j covered by pointwise evaluation (samples for named
    /// sequences, unbounded for builtins).
    std::uint64_t eval_limit() const {
        if (kind_ == BasisKind::NamedSequence) return samples_.size();
        return UINT64_MAX;
    }

    /// Total order used for canonical presentation (slowest first).
    /// Separate from strictly_faster: this one breaks ties arbitrarily
    /// but deterministically.
    std::pair<std::pair<int, Rational>, std::pair<int, std::string>> sort_key() const {
        Rational theta = class_.kind == GrowthClassKind::Polynomial ? class_.theta : Rational(0);
        return {{static_cast<int>(class_.kind), theta}, {static_cast<int>(kind_), name_}};
    }

private:
    GrowthBasisFunction(BasisKind kind, GrowthClass cls, Rational exponent, std::string name)
        : kind_(kind), class_(cls), exponent_(std::move(exponent)), name_(std::move(name)) {
        // declared class must match the builtin kinds
        switch (kind_) {
            case BasisKind::ConstantOne:
                if (class_.kind != GrowthClassKind::Bounded) throw std::invalid_argument("constant basis is bounded");
                break;
            case BasisKind::LogJ:
                if (class_.kind != GrowthClassKind::Logarithmic) throw std::invalid_argument("log basis is logarithmic");
                break;
            case BasisKind::PowerJ:
                if (class_.kind != GrowthClassKind::Polynomial || class_.theta != exponent_)
                    throw std::invalid_argument("power basis class must be poly(theta)");
                break;
            case BasisKind::NamedSequence: break;
        }
    }

    BasisKind kind_;
    GrowthClass class_;
    Rational exponent_;
    std::string name_;
    std::vector<double> samples_;
};

inline bool presentation_less(const GrowthBasisFunction& a, const GrowthBasisFunction& b) {
    return a.sort_key() < b.sort_key();
}

inline bool strictly_faster(const GrowthBasisFunction& a, const GrowthBasisFunction& b) {
    return strictly_faster(a.growth_class(), b.growth_class());
}

} // namespace koethe
