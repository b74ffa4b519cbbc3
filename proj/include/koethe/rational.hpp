#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace koethe {

/// Exact rational scalar used for all symbolic decisions. Floating point
/// appears only in grid/probe paths.
using Rational = boost::multiprecision::cpp_rational;

inline int sign_of(const Rational& r) {
    if (r > 0) return 1;
    if (r < 0) return -1;
    return 0;
}

inline double to_double(const Rational& r) { return static_cast<double>(r); }

inline std::string rational_to_string(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

/// Accepts "7", "-7", "3/4", "-3/4". Throws std::invalid_argument otherwise.
inline Rational rational_from_string(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    std::size_t slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            return Rational(boost::multiprecision::cpp_int(text));
        }
        boost::multiprecision::cpp_int num(text.substr(0, slash));
        boost::multiprecision::cpp_int den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::runtime_error&) {
        throw std::invalid_argument("bad rational literal: " + text);
    }
}

/// Smallest power of two that is >= exp(x), as an exact rational. Used to
/// report sup-bound constants without pretending to more precision than a
/// numeric probe supplies.
inline Rational rational_exp_upper_bound(double x) {
    if (!(x == x)) throw std::invalid_argument("NaN bound");
    if (x > 2048.0) throw std::invalid_argument("bound exceeds representable range");
    if (x <= 0.0) return Rational(1);
    const double log2e = 1.4426950408889634;
    long k = static_cast<long>(std::ceil(x * log2e)) + 1;
    boost::multiprecision::cpp_int num(1);
    num <<= static_cast<unsigned>(k);
    return Rational(num);
}

} // namespace koethe
