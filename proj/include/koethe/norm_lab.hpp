#pragma once

#include "koethe/operators.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace koethe {

/// Norm given by a Hermitian Gram matrix: ||x||^2 = x* G x. Gram-form norms
/// satisfy the parallelogram law identically; definiteness is checked where
/// an operation needs it (a seminorm is legal as the quotient-continuity
/// part of the inf-convolution).
class HilbertNorm {
public:
    HilbertNorm() = default;
    explicit HilbertNorm(MatrixXc gram) : gram_(0.5 * (gram + gram.adjoint())) {
        if (gram_.rows() != gram_.cols()) throw std::invalid_argument("gram must be square");
        if (!gram_.allFinite()) throw std::invalid_argument("gram must be finite");
    }

    static HilbertNorm identity(Eigen::Index n) { return HilbertNorm(MatrixXc::Identity(n, n)); }
    static HilbertNorm diagonal(const Eigen::VectorXd& weights) {
        MatrixXc g = MatrixXc::Zero(weights.size(), weights.size());
        for (Eigen::Index i = 0; i < weights.size(); ++i) {
            if (!(weights[i] >= 0.0)) throw std::invalid_argument("diagonal weights must be nonnegative");
            g(i, i) = weights[i] * weights[i];
        }
        return HilbertNorm(std::move(g));
    }
    static HilbertNorm zero(Eigen::Index n) { return HilbertNorm(MatrixXc::Zero(n, n)); }

    Eigen::Index dim() const { return gram_.rows(); }
    const MatrixXc& gram() const { return gram_; }

    double squared(const VectorXc& x) const {
        double v = (x.adjoint() * gram_ * x)(0, 0).real();
        return v < 0 ? 0.0 : v;
    }
    double operator()(const VectorXc& x) const { return std::sqrt(squared(x)); }

    /// Column-wise norms of a sample batch.
    Eigen::VectorXd batch(const MatrixXc& X) const {
        MatrixXc GX = gram_ * X;
        Eigen::VectorXd out(X.cols());
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
            double v = X.col(c).dot(GX.col(c)).real();
            out[c] = std::sqrt(v < 0 ? 0.0 : v);
        }
        return out;
    }

    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(gram_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
    bool is_definite(double tol = 1e-12) const { return min_eigenvalue() > tol; }

private:
    MatrixXc gram_;
};

struct PreconditionViolation : std::runtime_error {
    PreconditionViolation(const std::string& msg, VectorXc w)
        : std::runtime_error(msg), witness(std::move(w)) {}
    VectorXc witness;
};

/// Finite model of the short exact sequence 0 -> E -> F -> G -> 0:
/// F = C^N, E = span of orthonormal columns, G realized as the orthogonal
/// complement coordinates, quotient map x |-> complement* x.
struct SubspaceModel {
    Eigen::Index ambient = 0;
    MatrixXc basis;       // N x k, l2-orthonormal columns
    MatrixXc complement;  // N x (N-k), orthonormal, complement* basis = 0

    Eigen::Index sub_dim() const { return basis.cols(); }
    Eigen::Index quotient_dim() const { return complement.cols(); }

    VectorXc embed(const VectorXc& u) const { return basis * u; }
    VectorXc quotient(const VectorXc& x) const { return complement.adjoint() * x; }

    static SubspaceModel from_basis(MatrixXc b) {
        SubspaceModel m;
        m.ambient = b.rows();
        Eigen::Index k = b.cols();
        if (k < 1 || k > m.ambient) throw std::invalid_argument("subspace dimension out of range");
        if ((b.adjoint() * b - MatrixXc::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-10)
            throw std::invalid_argument("subspace basis columns must be l2-orthonormal");
        m.basis = std::move(b);
        Eigen::HouseholderQR<MatrixXc> qr(m.basis);
        MatrixXc Q = qr.householderQ();
        m.complement = Q.rightCols(m.ambient - k);
        return m;
    }

    static SubspaceModel coordinate(Eigen::Index n, Eigen::Index k) {
        MatrixXc b = MatrixXc::Zero(n, k);
        for (Eigen::Index i = 0; i < k; ++i) b(i, i) = 1.0;
        return from_basis(std::move(b));
    }

    static SubspaceModel random(std::mt19937_64& rng, Eigen::Index n, Eigen::Index k) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        MatrixXc raw(n, k);
        for (Eigen::Index c = 0; c < k; ++c)
            for (Eigen::Index r = 0; r < n; ++r) raw(r, c) = Complex(gauss(rng), gauss(rng));
        Eigen::HouseholderQR<MatrixXc> qr(raw);
        MatrixXc Q = qr.householderQ();
        return from_basis(Q.leftCols(k));
    }
};

/// ||x||_F^2 = inf_{z in E} (||z||_E^2 + ||x - z||^2) with
/// ||.||^2 = ||.||_1^2 + ||.||_2^2, computed exactly by block elimination
/// of the minimizer (Schur complement), no iterative solve involved.
/// norm2 may be a seminorm; norm1 must dominate normE on E.
inline HilbertNorm inf_convolution_norm(const SubspaceModel& model, const HilbertNorm& normE,
                                        const HilbertNorm& norm1, const HilbertNorm& norm2) {
    Eigen::Index k = model.sub_dim();
    if (normE.dim() != k || norm1.dim() != model.ambient || norm2.dim() != model.ambient)
        throw std::invalid_argument("inf_convolution_norm: dimension mismatch");
    MatrixXc restr = model.basis.adjoint() * norm1.gram() * model.basis - normE.gram();
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(restr);
    double scale = std::max(1.0, normE.gram().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-9 * scale) {
        Eigen::Index worst;
        es.eigenvalues().minCoeff(&worst);
        throw PreconditionViolation("inf_convolution_norm: ||x||_E <= ||x||_1 fails on E",
                                    model.basis * es.eigenvectors().col(worst));
    }
    MatrixXc G = norm1.gram() + norm2.gram();
    MatrixXc M = normE.gram() + model.basis.adjoint() * G * model.basis;
    Eigen::LLT<MatrixXc> llt(M);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("inf_convolution_norm: singular Gram");
    MatrixXc GB = G * model.basis;
    MatrixXc gram_F = G - GB * llt.solve(GB.adjoint());
    return HilbertNorm(std::move(gram_F));
}

/// Gram of x |-> inf_{y in E} ||x - y|| for a given norm on F.
inline HilbertNorm quotient_seminorm(const SubspaceModel& model, const HilbertNorm& norm) {
    MatrixXc M = model.basis.adjoint() * norm.gram() * model.basis;
    Eigen::LLT<MatrixXc> llt(M);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("quotient_seminorm: singular restriction");
    MatrixXc GB = norm.gram() * model.basis;
    return HilbertNorm(norm.gram() - GB * llt.solve(GB.adjoint()));
}

/// Canonical choices behind Lemma 3.5: ||.||_1 restricts to ||.||_E on E
/// and ||.||_2 realizes the quotient continuity bound with equality.
inline std::pair<HilbertNorm, HilbertNorm> make_lemma35_norms(const SubspaceModel& model, const HilbertNorm& normE,
                                                              const HilbertNorm& normG) {
    MatrixXc g1 = model.basis * normE.gram() * model.basis.adjoint() +
                  model.complement * model.complement.adjoint();
    MatrixXc g2 = model.complement * normG.gram() * model.complement.adjoint();
    return {HilbertNorm(std::move(g1)), HilbertNorm(std::move(g2))};
}

struct Lemma35Report {
    double max_ratio = 0;       // sup ||x||_E / ||x||_F over sampled E, expected <= sqrt(3)
    double min_ratio = 0;       // inf of the same ratio, expected >= 1
    int alpha_violations = 0;   // samples breaking either alpha bound
    int beta_violations = 0;    // samples breaking the quotient bound
    double parallelogram_residual = 0;
    VectorXc worst_vector;
    bool ok() const { return alpha_violations == 0 && beta_violations == 0; }
};

inline Lemma35Report verify_lemma35(const HilbertNorm& normF, const SubspaceModel& model, const HilbertNorm& normE,
                                    const HilbertNorm& normG, int samples = 1000, std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double sqrt3 = std::sqrt(3.0);
    Lemma35Report rep;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    HilbertNorm beta_rhs = quotient_seminorm(model, normF);
    auto draw = [&](Eigen::Index n) {
        VectorXc v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = Complex(gauss(rng), gauss(rng));
        return v;
    };
    for (int s = 0; s < samples; ++s) {
        VectorXc u = draw(model.sub_dim());
        VectorXc x = model.embed(u);
        double e = normE(u), f = normF(x);
        if (f > e * (1 + 1e-9)) ++rep.alpha_violations;                    // ||x||_F <= ||x||_E
        if (e > sqrt3 * f * (1 + 1e-9)) ++rep.alpha_violations;            // ||x||_E <= sqrt(3) ||x||_F
        if (f > 0) {
            double ratio = e / f;
            if (ratio > rep.max_ratio) {
                rep.max_ratio = ratio;
                rep.worst_vector = x;
            }
            rep.min_ratio = std::min(rep.min_ratio, ratio);
        }
        VectorXc y = draw(model.ambient);
        double lhs = normG(model.quotient(y));
        double rhs = beta_rhs(y);
        if (lhs > rhs * (1 + 1e-9) + 1e-12) ++rep.beta_violations;

        VectorXc z = draw(model.ambient);
        double pl = std::abs(normF.squared(y + z) + normF.squared(y - z) - 2 * normF.squared(y) - 2 * normF.squared(z));
        double plscale = std::max(1e-300, 2 * normF.squared(y) + 2 * normF.squared(z));
        rep.parallelogram_residual = std::max(rep.parallelogram_residual, pl / plscale);
    }
    return rep;
}

/// Lemma 3.7: a Hilbert norm on F whose restriction to E equals normE
/// exactly, via the orthogonal projection onto E in the Lemma 3.5 norm
/// plus the quotient part.
inline HilbertNorm extend_hilbert_norm(const SubspaceModel& model, const HilbertNorm& normE,
                                       const HilbertNorm& normG_in = HilbertNorm()) {
    Eigen::Index k = model.sub_dim();
    if (normE.dim() != k) throw std::invalid_argument("extend_hilbert_norm: dimension mismatch");
    HilbertNorm normG = normG_in.dim() == model.quotient_dim() ? normG_in : HilbertNorm::identity(model.quotient_dim());
    auto [n1, n2] = make_lemma35_norms(model, normE, normG);
    HilbertNorm normF = inf_convolution_norm(model, normE, n1, n2);
    MatrixXc M = model.basis.adjoint() * normF.gram() * model.basis;
    Eigen::LLT<MatrixXc> llt(M);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("extend_hilbert_norm: degenerate model");
    MatrixXc P = llt.solve(model.basis.adjoint() * normF.gram());  // k x N, identity on E
    MatrixXc gram = P.adjoint() * normE.gram() * P +
                    model.complement * normG.gram() * model.complement.adjoint();
    return HilbertNorm(std::move(gram));
}

/// Graded system (||.||_m)_{m<K}; the default diagonal realization uses
/// weights j^m, which is monotone and log-convex exactly.
struct NormLadder {
    std::vector<HilbertNorm> levels;
    bool diagonal = false;

    std::size_t size() const { return levels.size(); }
    const HilbertNorm& level(std::size_t m) const {
        if (m >= levels.size()) throw std::out_of_range("ladder level out of range");
        return levels[m];
    }

    static NormLadder diagonal_ladder(Eigen::Index dim, std::size_t K) {
        NormLadder l;
        l.diagonal = true;
        for (std::size_t m = 0; m < K; ++m) {
            Eigen::VectorXd w(dim);
            for (Eigen::Index i = 0; i < dim; ++i)
                w[i] = std::pow(static_cast<double>(i + 1), static_cast<double>(m));
            l.levels.push_back(HilbertNorm::diagonal(w));
        }
        return l;
    }
};

struct Lemma38Report {
    struct Level {
        unsigned u = 0;
        long v = -1;                   // smallest certified pairing, -1 when none fits the ladder
        double observed = 0;           // sup ||x||_U^2 / (||x|| ||x||_V) at that v
        long canonical_v = -1;         // v = 2u, inside the ladder
        double observed_canonical = 0; // observed constant at the canonical pairing
        long proof_v = -1;             // the 12u pairing walked in the proof, when inside the ladder
        double observed_proof = 0;
    };
    std::vector<Level> levels;
    double max_observed = 0;      // over canonical pairings (the falsifiable bound)
    double restriction_error = 0; // |(||j(x)|| - ||x||_E)| / ||x||_E, max over E samples
    bool all_certified = true;    // every level with 2u < K certified within the ladder
};

/// Lemma 3.8 in finite dimensions: builds ||x||^2 = ||x||_F^2 + ||qx||_G^2
/// on top of the exact extension of ladderE level 0 and verifies the
/// dominating bound ||x||_U^2 <= 49 ||x|| ||x||_V against the combined
/// ladder levels, recording observed constants.
inline std::pair<HilbertNorm, Lemma38Report> dominating_extension(const SubspaceModel& model,
                                                                  const NormLadder& ladderE,
                                                                  const NormLadder& ladderG, int samples = 1000,
                                                                  std::uint64_t seed = 1) {
    if (ladderE.size() == 0 || ladderG.size() == 0) throw std::invalid_argument("empty ladder");
    std::size_t K = std::min(ladderE.size(), ladderG.size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    auto draw = [&](Eigen::Index n) {
        VectorXc v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = Complex(gauss(rng), gauss(rng));
        return v;
    };

    // interpolation precondition: log-convexity along each ladder
    for (const NormLadder* lad : {&ladderE, &ladderG}) {
        if (lad->diagonal) continue;
        Eigen::Index n = lad->levels.front().dim();
        for (int s = 0; s < 64; ++s) {
            VectorXc x = draw(n);
            for (std::size_t m = 1; m + 1 < lad->size(); ++m) {
                double mid_sq = lad->level(m).squared(x);
                double lohi = lad->level(m - 1)(x) * lad->level(m + 1)(x);
                if (mid_sq > lohi * (1 + 1e-9) + 1e-12) throw std::invalid_argument("ladder not log-convex");
            }
        }
    }

    HilbertNorm normF = extend_hilbert_norm(model, ladderE.level(0), ladderG.level(0));
    MatrixXc gram_dom = normF.gram() +
                        model.complement * ladderG.level(0).gram() * model.complement.adjoint();
    HilbertNorm dom{gram_dom};

    std::vector<HilbertNorm> combined;
    for (std::size_t m = 0; m < K; ++m) {
        MatrixXc g = model.basis * ladderE.level(m).gram() * model.basis.adjoint() +
                     model.complement * ladderG.level(m).gram() * model.complement.adjoint();
        combined.emplace_back(std::move(g));
    }

    MatrixXc X(model.ambient, samples);
    for (int s = 0; s < samples; ++s) X.col(s) = draw(model.ambient);
    Eigen::VectorXd dom_vals = dom.batch(X);
    std::vector<Eigen::VectorXd> level_vals;
    for (const auto& c : combined) level_vals.push_back(c.batch(X));

    const double cap = 49.0 * (1 + 1e-6);
    Lemma38Report rep;
    for (std::size_t u = 0; u < K; ++u) {
        Lemma38Report::Level lv;
        lv.u = static_cast<unsigned>(u);
        for (std::size_t v = 0; v < K; ++v) {
            double observed = 0;
            for (int s = 0; s < samples; ++s) {
                double num = level_vals[u][s] * level_vals[u][s];
                double den = dom_vals[s] * level_vals[v][s];
                if (den > 0) observed = std::max(observed, num / den);
            }
            if (lv.v < 0 && observed <= cap) {
                lv.v = static_cast<long>(v);
                lv.observed = observed;
            }
            if (2 * u == v) {
                lv.canonical_v = static_cast<long>(v);
                lv.observed_canonical = observed;
            }
            if (12 * u == v) {
                lv.proof_v = static_cast<long>(v);
                lv.observed_proof = observed;
            }
        }
        if (lv.canonical_v >= 0) {
            rep.max_observed = std::max(rep.max_observed, lv.observed_canonical);
            if (lv.observed_canonical > cap) rep.all_certified = false;
        }
        if (lv.v < 0 && 2 * u < K) rep.all_certified = false;
        rep.levels.push_back(lv);
    }

    for (int s = 0; s < 256; ++s) {
        VectorXc u = draw(model.sub_dim());
        VectorXc x = model.embed(u);
        double e = ladderE.level(0)(u);
        if (e > 0) rep.restriction_error = std::max(rep.restriction_error, std::abs(dom(x) - e) / e);
    }
    return {std::move(dom), std::move(rep)};
}

// ---- Model JSON I/O: {"dim": N, "subspace": [[...]], "ladder": {...}} ----

inline nlohmann::ordered_json model_to_json(const SubspaceModel& model, std::size_t ladder_levels) {
    nlohmann::ordered_json j;
    j["dim"] = model.ambient;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < model.ambient; ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < model.sub_dim(); ++c) row.push_back(model.basis(r, c).real());
        rows.push_back(std::move(row));
    }
    j["subspace"] = std::move(rows);
    j["ladder"] = {{"levels", ladder_levels}, {"weights", "j^k"}};
    return j;
}

inline std::pair<SubspaceModel, std::size_t> model_from_json(const nlohmann::json& j) {
    Eigen::Index n = j.at("dim").get<Eigen::Index>();
    const auto& rows = j.at("subspace");
    if (rows.empty()) throw std::invalid_argument("model subspace is empty");
    Eigen::Index k = static_cast<Eigen::Index>(rows.front().size());
    MatrixXc b(n, k);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < k; ++c) b(r, c) = rows.at(r).at(c).get<double>();
    std::size_t levels = 4;
    if (j.contains("ladder")) levels = j["ladder"].value("levels", std::size_t{4});
    return {SubspaceModel::from_basis(std::move(b)), levels};
}

} // namespace koethe
