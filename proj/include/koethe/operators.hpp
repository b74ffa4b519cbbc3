#pragma once

#include "koethe/tabulated.hpp"
#include "koethe/verdict.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace koethe {

using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

/// Finite section of a rapidly decreasing matrix: a dense complex N x N
/// operator on the truncated space.
struct FiniteOperator {
    MatrixXc entries;

    FiniteOperator() = default;
    explicit FiniteOperator(MatrixXc m) : entries(std::move(m)) {
        if (entries.rows() != entries.cols()) throw std::invalid_argument("operator must be square");
        if (!entries.allFinite()) throw std::invalid_argument("operator entries must be finite");
    }

    Eigen::Index dim() const { return entries.rows(); }
    FiniteOperator adjoint() const { return FiniteOperator(entries.adjoint()); }
};

/// Diagonal graded weights w_q(j) = j^q for j = 1..N; D_0 is the identity.
inline Eigen::VectorXd graded_weights(Eigen::Index n, unsigned q) {
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w[i] = std::pow(static_cast<double>(i + 1), static_cast<double>(q));
    return w;
}

/// |xi|_q = (sum_j |xi_j|^2 j^{2q})^{1/2}.
inline double vector_norm(const VectorXc& xi, unsigned q) {
    long double acc = 0;
    for (Eigen::Index i = 0; i < xi.size(); ++i) {
        long double w = std::pow(static_cast<long double>(i + 1), static_cast<long double>(q));
        acc += std::norm(xi[i]) * w * w;
    }
    return static_cast<double>(std::sqrt(acc));
}

/// Largest singular value by power iteration on M*M with a fixed start
/// vector; deterministic for a given input. Rank-one inputs converge in a
/// couple of steps, which is the hot path for projection profiles.
inline double sigma_max(const MatrixXc& m, double tol = 1e-13, int max_iter = 20000) {
    Eigen::Index n = m.rows();
    if (n == 0) return 0.0;
    double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    VectorXc v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = Complex(1.0 + 0.01 * static_cast<double>(i % 7), 0.0);
    v.normalize();
    double sigma = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        VectorXc w = m * v;
        double s = w.norm();
        if (s == 0.0) return 0.0;
        VectorXc next = m.adjoint() * w;
        double nn = next.norm();
        if (nn == 0.0) return s;
        next /= nn;
        double rel = std::abs(s - sigma);
        sigma = s;
        v = next;
        if (rel <= tol * std::max(1.0, sigma) && it >= 2) break;
    }
    return sigma;
}

/// ||x||_q = largest singular value of D_q x D_q. The q = 0 case is the
/// plain l2 operator norm.
inline double operator_norm(const FiniteOperator& x, unsigned q) {
    Eigen::VectorXd w = graded_weights(x.dim(), q);
    MatrixXc weighted = w.asDiagonal() * x.entries * w.asDiagonal();
    return sigma_max(weighted);
}

/// Bundles the weight rule with a grade cap so callers get range checking.
class GradedNormSystem {
public:
    GradedNormSystem(Eigen::Index dim, unsigned grades) : dim_(dim), grades_(grades) {
        if (dim <= 0 || grades == 0) throw std::invalid_argument("empty norm system");
    }

    Eigen::Index dim() const { return dim_; }
    unsigned grades() const { return grades_; }

    double vector_norm(const VectorXc& xi, unsigned q) const {
        check(q, xi.size());
        return koethe::vector_norm(xi, q);
    }
    double operator_norm(const FiniteOperator& x, unsigned q) const {
        check(q, x.dim());
        return koethe::operator_norm(x, q);
    }

private:
    void check(unsigned q, Eigen::Index n) const {
        if (q >= grades_) throw std::out_of_range("grade q=" + std::to_string(q) + " out of range");
        if (n != dim_) throw std::invalid_argument("dimension mismatch");
    }
    Eigen::Index dim_;
    unsigned grades_;
};

/// xi |-> <xi, f> f. For l2-unit f this is a self-adjoint projection and
/// ||f (x) f||_q = |f|_q^2.
inline FiniteOperator rank_one(const VectorXc& f) {
    if (f.norm() == 0.0) throw std::invalid_argument("rank_one: zero vector");
    return FiniteOperator(f * f.adjoint());
}

/// Modified Gram-Schmidt with one re-orthogonalization pass whenever the
/// residual projection exceeds the tolerance.
inline std::vector<VectorXc> gram_schmidt_l2(const std::vector<VectorXc>& vectors, double tol = 1e-10) {
    std::vector<VectorXc> out;
    for (const VectorXc& input : vectors) {
        VectorXc v = input;
        for (const VectorXc& u : out) v -= u.dot(v) * u;
        double overlap = 0.0;
        for (const VectorXc& u : out) overlap = std::max(overlap, std::abs(u.dot(v)));
        if (overlap > tol) {
            for (const VectorXc& u : out) v -= u.dot(v) * u;
        }
        double n = v.norm();
        if (n < 1e-10) throw std::invalid_argument("gram_schmidt_l2: rank deficiency below threshold");
        out.push_back(v / n);
    }
    return out;
}

/// Family of near-projections with the tolerances of Theorem 3.1 (2):
/// idempotent, self-adjoint, pairwise orthogonal up to `tolerance` in the
/// l2 operator norm.
struct ProjectionFamily {
    std::vector<FiniteOperator> members;
    double tolerance = 1e-10;

    static ProjectionFamily from_orthonormal(const std::vector<VectorXc>& fs, double tol = 1e-10) {
        ProjectionFamily fam;
        fam.tolerance = tol;
        for (const auto& f : fs) fam.members.push_back(rank_one(f));
        return fam;
    }

    bool check_invariants() const {
        for (const auto& p : members) {
            if (sigma_max(p.entries * p.entries - p.entries) > tolerance) return false;
            if (sigma_max(p.entries.adjoint() - p.entries) > tolerance) return false;
        }
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t k = i + 1; k < members.size(); ++k)
                if (sigma_max(members[i].entries * members[k].entries) > tolerance) return false;
        return true;
    }
};

/// Profile matrix (|f_j|_q): row j, column q. Column-monotone because the
/// weights grow with q.
inline TabulatedMatrix profile(const std::vector<VectorXc>& family, unsigned Q) {
    if (family.empty()) throw std::invalid_argument("profile: empty family");
    std::vector<double> logs(family.size() * Q);
    for (std::size_t j = 0; j < family.size(); ++j)
        for (unsigned q = 0; q < Q; ++q) logs[j * Q + q] = std::log(vector_norm(family[j], q));
    return TabulatedMatrix::from_log(family.size(), Q, std::move(logs), Provenance::OperatorProfile);
}

/// Profile matrix (||P_j||_q) of an operator family.
inline TabulatedMatrix profile(const ProjectionFamily& family, unsigned Q) {
    if (family.members.empty()) throw std::invalid_argument("profile: empty family");
    std::vector<double> logs(family.members.size() * Q);
    for (std::size_t j = 0; j < family.members.size(); ++j)
        for (unsigned q = 0; q < Q; ++q) logs[j * Q + q] = std::log(operator_norm(family.members[j], q));
    return TabulatedMatrix::from_log(family.members.size(), Q, std::move(logs), Provenance::OperatorProfile);
}

struct DominatingL2Result {
    Verdict verdict;
    struct PerQ {
        unsigned q;
        unsigned r;
        double log_C;
    };
    std::vector<PerQ> per_q;
};

/// Finite-section rendering of "|| ||_l2 is a dominating norm": for each q
/// find r, C with a_{j,q}^2 <= C * l2_j * a_{j,r}, and validate the
/// Cauchy-Schwarz route |xi|_q^2 <= C ||xi|| |xi|_r on random coefficient
/// vectors. The l2 row defaults to column 0.
inline DominatingL2Result check_dominating_l2(const TabulatedMatrix& tab,
                                              const std::vector<double>& l2row = {},
                                              std::uint64_t seed = 20240901) {
    if (!tab.is_column_monotone()) throw std::invalid_argument("check_dominating_l2: non-monotone tab");
    if (!l2row.empty() && l2row.size() != tab.rows()) throw std::invalid_argument("l2 row length mismatch");
    std::size_t J = tab.rows(), Q = tab.grades();
    auto log_l2 = [&](std::size_t row) {
        return l2row.empty() ? tab.log_entry(row, 0) : std::log(l2row[row]);
    };
    DominatingL2Result out;
    double worst = 0.0;
    for (unsigned q = 0; q < Q; ++q) {
        double best_c = std::numeric_limits<double>::infinity();
        unsigned best_r = 0;
        for (unsigned r = 0; r < Q; ++r) {
            double c = -std::numeric_limits<double>::infinity();
            for (std::size_t row = 0; row < J; ++row)
                c = std::max(c, 2 * tab.log_entry(row, q) - log_l2(row) - tab.log_entry(row, r));
            if (c < best_c - 1e-12) {
                best_c = c;
                best_r = r;
            }
        }
        out.per_q.push_back({q, best_r, best_c});
        worst = std::max(worst, best_c);
    }

    // Cauchy-Schwarz route on random coefficient vectors.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::size_t n = std::min<std::size_t>(J, 512);
    for (int trial = 0; trial < 100; ++trial) {
        VectorXc xi(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) xi[static_cast<Eigen::Index>(i)] = Complex(gauss(rng), gauss(rng));
        for (const auto& pq : out.per_q) {
            long double lhs = 0, l2 = 0, rhs = 0;
            for (std::size_t i = 0; i < n; ++i) {
                long double m = std::norm(xi[static_cast<Eigen::Index>(i)]);
                lhs += m * std::exp(2.0L * tab.log_entry(i, pq.q));
                l2 += m * std::exp(2.0L * log_l2(i));
                rhs += m * std::exp(2.0L * tab.log_entry(i, pq.r));
            }
            long double bound = std::exp(static_cast<long double>(pq.log_C)) * std::sqrt(l2) * std::sqrt(rhs);
            if (lhs > bound * (1 + 1e-9)) {
                Certificate c;
                c.q0 = pq.q;
                c.code = "cauchy-schwarz-violation";
                out.verdict = Verdict::refuted(std::move(c));
                return out;
            }
        }
    }
    Witness w;
    w.C = rational_exp_upper_bound(std::min(worst, 1400.0));
    Evidence e;
    for (const auto& pq : out.per_q) e.per_q.push_back({pq.q, static_cast<long>(pq.r), pq.log_C, 0.0});
    out.verdict = Verdict::proved(std::move(w), std::move(e));
    return out;
}

// ---- Structured families ----

inline std::vector<VectorXc> canonical_family(Eigen::Index n, Eigen::Index ambient) {
    if (ambient < n) throw std::invalid_argument("ambient dimension too small");
    std::vector<VectorXc> out;
    for (Eigen::Index j = 0; j < n; ++j) {
        VectorXc e = VectorXc::Zero(ambient);
        e[j] = 1.0;
        out.push_back(std::move(e));
    }
    return out;
}

/// Orthonormal vectors supported on dyadic blocks [2^k, 2^{k+1}): the
/// columns of a Householder reflection of each block. Profile rows sit
/// between the block-endpoint powers 2^{kq} and 2^{(k+1)q}.
inline std::vector<VectorXc> block_householder_family(unsigned blocks) {
    if (blocks == 0 || blocks > 16) throw std::invalid_argument("blocks must be in 1..16");
    Eigen::Index ambient = Eigen::Index(1) << blocks;
    std::vector<VectorXc> out;
    for (unsigned k = 0; k < blocks; ++k) {
        Eigen::Index lo = (Eigen::Index(1) << k) - 1;  // 0-based start of block [2^k, 2^{k+1})
        Eigen::Index m = Eigen::Index(1) << k;
        Eigen::VectorXd v = Eigen::VectorXd::Ones(m) / std::sqrt(static_cast<double>(m));
        for (Eigen::Index col = 0; col < m; ++col) {
            VectorXc f = VectorXc::Zero(ambient);
            for (Eigen::Index row = 0; row < m; ++row) {
                double h = (row == col ? 1.0 : 0.0) - 2.0 * v[row] * v[col];
                f[lo + row] = h;
            }
            out.push_back(std::move(f));
        }
    }
    return out;
}

inline std::vector<VectorXc> random_orthonormal_family(std::mt19937_64& rng, Eigen::Index ambient, Eigen::Index n) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<VectorXc> raw;
    for (Eigen::Index j = 0; j < n; ++j) {
        VectorXc v(ambient);
        for (Eigen::Index i = 0; i < ambient; ++i) v[i] = Complex(gauss(rng), gauss(rng));
        raw.push_back(std::move(v));
    }
    return gram_schmidt_l2(raw);
}

// ---- Operator JSON I/O: {"dim": N, "re": [[...]], "im": [[...]]} ----

inline nlohmann::ordered_json operator_to_json(const FiniteOperator& x) {
    nlohmann::ordered_json j;
    j["dim"] = x.dim();
    nlohmann::ordered_json re = nlohmann::ordered_json::array(), im = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < x.dim(); ++r) {
        nlohmann::ordered_json rrow = nlohmann::ordered_json::array(), irow = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < x.dim(); ++c) {
            rrow.push_back(x.entries(r, c).real());
            irow.push_back(x.entries(r, c).imag());
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    j["re"] = std::move(re);
    j["im"] = std::move(im);
    return j;
}

inline FiniteOperator operator_from_json(const nlohmann::json& j) {
    Eigen::Index n = j.at("dim").get<Eigen::Index>();
    MatrixXc m(n, n);
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            m(r, c) = Complex(re.at(r).at(c).get<double>(), im.at(r).at(c).get<double>());
    return FiniteOperator(std::move(m));
}

} // namespace koethe
