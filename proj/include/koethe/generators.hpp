#pragma once

#include "koethe/dsl.hpp"
#include "koethe/operators.hpp"
#include "koethe/quasi_equiv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace koethe {

// ---- Named example families ----

/// The matrix of s: a_{j,q} = j^q.
inline KoetheMatrixSpec spec_s() {
    return KoetheMatrixSpec::make("s", {{GrowthBasisFunction::log_j(), GradePoly::variable()}});
}

/// a_{j,q} = j^q e^{-j}: nuclear but without a continuous norm row.
inline KoetheMatrixSpec spec_decay_counterexample() {
    return KoetheMatrixSpec::make("decay", {{GrowthBasisFunction::log_j(), GradePoly::variable()},
                                            {GrowthBasisFunction::power_j(Rational(1)), GradePoly::constant(-1)}});
}

/// Power series space of infinite type for the builtin alpha shapes:
/// "log(j)" gives s itself, "j^theta" gives e^{q j^theta}.
inline KoetheMatrixSpec spec_power_series(const std::string& alpha) {
    GradePoly q = GradePoly::variable();
    if (alpha == "log(j)") return KoetheMatrixSpec::make("power_series_log", {{GrowthBasisFunction::log_j(), q}});
    if (alpha.rfind("j^", 0) == 0) {
        Rational theta = rational_from_string(alpha.substr(2));
        return KoetheMatrixSpec::make("power_series_pow", {{GrowthBasisFunction::power_j(theta), q}});
    }
    if (alpha == "j") return KoetheMatrixSpec::make("power_series_j", {{GrowthBasisFunction::power_j(Rational(1)), q}});
    throw std::invalid_argument("alpha '" + alpha + "' is outside the symbolic fragment; tabulate it instead");
}

/// Tabulated power series grid for an arbitrary exponent sequence alpha(j).
template <typename AlphaFn>
TabulatedMatrix power_series_grid(AlphaFn&& alpha, std::size_t J, std::size_t Q) {
    std::vector<double> logs(J * Q);
    for (std::size_t r = 0; r < J; ++r) {
        double a = alpha(static_cast<std::uint64_t>(r + 1));
        if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("alpha must be finite and nonnegative");
        for (std::size_t q = 0; q < Q; ++q) logs[r * Q + q] = static_cast<double>(q) * a;
    }
    return TabulatedMatrix::from_log(J, Q, std::move(logs), Provenance::EvaluatedFromSpec);
}

inline TabulatedMatrix loglog_power_series_grid(std::size_t J, std::size_t Q) {
    return power_series_grid(
        [](std::uint64_t j) { return j < 3 ? 0.0 : std::log(std::log(static_cast<double>(j))); }, J, Q);
}

// ---- Planted quasi-equivalence instances ----

struct PlantedPair {
    TabulatedMatrix A;
    TabulatedMatrix B;
    std::vector<std::size_t> sigma;     // row j of A corresponds to row sigma[j] of B
    std::vector<double> lambda;         // a_{j,q} = lambda_j * b_{sigma(j),q} exactly
    double separation = 0;              // min pairwise bottleneck cost between distinct A rows
};

/// B = permuted, scaled copy of a random column-monotone grid whose rows are
/// pairwise separated in the matching cost by at least `separation`.
inline PlantedPair planted_pair(std::uint64_t seed, std::size_t n, std::size_t Q, double separation) {
    if (n < 2 || Q < 2) throw std::invalid_argument("planted_pair: need n >= 2, Q >= 2");
    if (!(separation > 0)) throw std::invalid_argument("planted_pair: separation must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // log a(j, q) = u_j + s_j q: distinct slopes keep rows apart in the
    // half-range cost ((Q-1) |s_j - s_k| / 2).
    double gap = 2.0 * separation / static_cast<double>(Q - 1);
    std::vector<double> slope(n), level(n);
    for (std::size_t j = 0; j < n; ++j) {
        slope[j] = 0.1 + gap * static_cast<double>(j + 1) * (1.0 + 0.25 * unif(rng));
        level[j] = 3.0 * unif(rng);
    }
    std::vector<double> logs(n * Q);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t q = 0; q < Q; ++q) logs[j * Q + q] = level[j] + slope[j] * static_cast<double>(q);
    PlantedPair out;
    out.A = TabulatedMatrix::from_log(n, Q, std::move(logs), Provenance::EvaluatedFromSpec);

    out.sigma.resize(n);
    for (std::size_t j = 0; j < n; ++j) out.sigma[j] = j;
    std::shuffle(out.sigma.begin(), out.sigma.end(), rng);
    out.lambda.resize(n);
    for (std::size_t j = 0; j < n; ++j) out.lambda[j] = std::exp(2.0 * unif(rng) - 1.0);

    std::vector<double> blogs(n * Q);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t q = 0; q < Q; ++q)
            blogs[out.sigma[j] * Q + q] = out.A.log_entry(j, q) - std::log(out.lambda[j]);
    out.B = TabulatedMatrix::from_log(n, Q, std::move(blogs), Provenance::EvaluatedFromSpec);

    out.separation = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::size_t q = 0; q < Q; ++q) {
                double d = out.A.log_entry(j, q) - out.A.log_entry(k, q);
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
            out.separation = std::min(out.separation, (hi - lo) / 2);
        }
    return out;
}

// ---- Fragment spec corpus for the oracle-equivalence checks ----

/// 30+ fragment specs covering the decidable shapes: pure powers of j,
/// power series of polynomial and superlogarithmic type, decaying rows,
/// constant rows and mixtures. Named sequences carry samples so every
/// member can be probed on a grid of `sample_rows` rows.
inline std::vector<KoetheMatrixSpec> corpus_specs(std::size_t sample_rows = 10000) {
    std::vector<double> superlog_samples(sample_rows), poly_samples(sample_rows), superlog_b(sample_rows);
    for (std::size_t j = 1; j <= sample_rows; ++j) {
        double lj = std::log(static_cast<double>(j));
        superlog_samples[j - 1] = lj * lj;
        superlog_b[j - 1] = std::pow(lj, 1.5);
        poly_samples[j - 1] = static_cast<double>(j) + 17.0;
    }
    GrowthBasisFunction alpha = GrowthBasisFunction::named(
        "alpha", {GrowthClassKind::SuperLogarithmic, Rational(0)}, superlog_samples);
    GrowthBasisFunction gamma =
        GrowthBasisFunction::named("gamma", {GrowthClassKind::SuperLogarithmic, Rational(0)}, superlog_b);
    GrowthBasisFunction beta =
        GrowthBasisFunction::named("beta", {GrowthClassKind::Polynomial, Rational(1)}, poly_samples);

    const GradePoly q = GradePoly::variable();
    const GradePoly q2 = q * q;
    const GradePoly q3 = q2 * q;
    auto log_b = GrowthBasisFunction::log_j();
    auto j1 = GrowthBasisFunction::power_j(Rational(1));
    auto j2 = GrowthBasisFunction::power_j(Rational(2));
    auto jhalf = GrowthBasisFunction::power_j(Rational(1, 2));
    auto one = GrowthBasisFunction::one();

    std::vector<KoetheMatrixSpec> out;
    auto add = [&](const char* name, std::vector<std::pair<GrowthBasisFunction, GradePoly>> terms) {
        out.push_back(KoetheMatrixSpec::make(name, std::move(terms)));
    };

    add("s", {{log_b, q}});
    add("s_double", {{log_b, q.scaled(Rational(2))}});
    add("s_shift", {{log_b, q + GradePoly::constant(1)}});
    add("s_half", {{log_b, q.scaled(Rational(1, 2))}});
    add("s_affine", {{log_b, q.scaled(Rational(2)) + GradePoly::constant(1)}});
    add("s_quad", {{log_b, q2}});
    add("s_quad_mix", {{log_b, q2 + q}});
    add("s_cubic", {{log_b, q3}});
    add("lambda_j", {{j1, q}});
    add("lambda_j_double", {{j1, q.scaled(Rational(2))}});
    add("lambda_j_quad", {{j1, q2}});
    add("lambda_sqrt", {{jhalf, q}});
    add("lambda_j2", {{j2, q}});
    add("decay", {{log_b, q}, {j1, GradePoly::constant(-1)}});
    add("decay_steep", {{log_b, q}, {j1, GradePoly::constant(-2)}});
    add("decay_slow", {{log_b, q}, {jhalf, GradePoly::constant(-1)}});
    add("grade_exp", {{one, q}});
    add("grade_exp_quad", {{one, q2}});
    add("const_row", {{log_b, GradePoly::constant(1)}});
    add("harmonic_row", {{log_b, GradePoly::constant(-1)}});
    add("mix_log_j", {{log_b, q}, {j1, q}});
    add("mix_scaled", {{log_b, q.scaled(Rational(3))}, {j1, q.scaled(Rational(2))}});
    add("mix_shift", {{log_b, q}, {j1, q + GradePoly::constant(1)}});
    add("mix_const_j", {{log_b, q}, {j1, GradePoly::constant(1)}});
    add("two_powers", {{jhalf, q}, {j1, q}});
    add("power_quad", {{j1, q2 + q}});
    add("superlog_named", {{alpha, q}});
    add("superlog_pair", {{alpha, q}, {gamma, q}});
    add("superlog_log", {{log_b, q}, {alpha, q}});
    add("poly_named", {{beta, q}});
    add("poly_named_quad", {{beta, q2}});
    add("superlog_alone_scaled", {{alpha, q.scaled(Rational(2))}});
    return out;
}

} // namespace koethe
