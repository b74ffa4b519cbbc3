#pragma once

#include "koethe/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace koethe {

enum class VerdictState : std::uint8_t { Proved, Refuted, Undecided };

inline std::string verdict_state_to_string(VerdictState s) {
    switch (s) {
        case VerdictState::Proved: return "Proved";
        case VerdictState::Refuted: return "Refuted";
        case VerdictState::Undecided: return "Undecided";
    }
    return "?";
}

/// Affine grade substitution r = a*q + b used by the existential r searches.
struct RTemplate {
    unsigned a = 0;
    unsigned b = 0;
    unsigned apply(unsigned q) const { return a * q + b; }
    bool operator==(const RTemplate& o) const { return a == o.a && b == o.b; }
};

struct Witness {
    std::optional<unsigned> p;            // fixed grade (continuous-norm row, (DN))
    std::optional<RTemplate> r_template;  // the per-q grade shift
    Rational C{1};                        // window-bound constant
};

struct Certificate {
    unsigned q0 = 0;                      // refuting grade
    int basis_index = -1;                 // offending basis in presentation order, -1 if none
    std::optional<std::uint64_t> j;       // concrete row violation when available
    std::string code;
};

struct ProbeSample {
    unsigned q = 0;
    long r = -1;
    double log_C = 0.0;
    double slope = 0.0;
};

struct Evidence {
    std::vector<ProbeSample> per_q;
    std::string note;
    bool empty() const { return per_q.empty() && note.empty(); }
};

/// Tri-state outcome of every decision procedure. Proved always carries a
/// witness and Refuted a certificate; Undecided may carry probe evidence.
class Verdict {
public:
    static Verdict proved(Witness w, Evidence e = {}) {
        Verdict v;
        v.state_ = VerdictState::Proved;
        v.witness_ = std::move(w);
        v.evidence_ = std::move(e);
        return v;
    }
    static Verdict refuted(Certificate c, Evidence e = {}) {
        Verdict v;
        v.state_ = VerdictState::Refuted;
        v.certificate_ = std::move(c);
        v.evidence_ = std::move(e);
        return v;
    }
    static Verdict undecided(Evidence e = {}) {
        Verdict v;
        v.state_ = VerdictState::Undecided;
        v.evidence_ = std::move(e);
        return v;
    }

    VerdictState state() const { return state_; }
    bool is_proved() const { return state_ == VerdictState::Proved; }
    bool is_refuted() const { return state_ == VerdictState::Refuted; }
    bool is_undecided() const { return state_ == VerdictState::Undecided; }
    bool decided() const { return state_ != VerdictState::Undecided; }

    const std::optional<Witness>& witness() const { return witness_; }
    const std::optional<Certificate>& certificate() const { return certificate_; }
    const Evidence& evidence() const { return evidence_; }
    Evidence& evidence() { return evidence_; }

private:
    VerdictState state_ = VerdictState::Undecided;
    std::optional<Witness> witness_;
    std::optional<Certificate> certificate_;
    Evidence evidence_;
};

/// Conjunction of member verdicts: one Refuted member decides the
/// conjunction; Undecided never upgrades.
inline Verdict conjunction(const std::vector<Verdict>& members) {
    for (const auto& m : members)
        if (m.is_refuted()) return m;
    for (const auto& m : members)
        if (m.is_undecided()) return Verdict::undecided(m.evidence());
    Witness w;
    if (!members.empty() && members.front().witness()) w = *members.front().witness();
    return Verdict::proved(w);
}

enum class TriState : std::uint8_t { Holds, Fails, Unknown };

inline TriState tri_conjunction(const std::vector<Verdict>& members) {
    bool unknown = false;
    for (const auto& m : members) {
        if (m.is_refuted()) return TriState::Fails;
        if (m.is_undecided()) unknown = true;
    }
    return unknown ? TriState::Unknown : TriState::Holds;
}

inline std::string tri_state_to_string(TriState t) {
    switch (t) {
        case TriState::Holds: return "holds";
        case TriState::Fails: return "fails";
        case TriState::Unknown: return "unknown";
    }
    return "?";
}

} // namespace koethe
