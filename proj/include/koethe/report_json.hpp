#pragma once

#include "koethe/calculus.hpp"
#include "koethe/probe.hpp"
#include "koethe/quasi_equiv.hpp"

#include <string>

#include "json.hpp"

namespace koethe {

using ReportJson = nlohmann::ordered_json;

inline ReportJson witness_to_json(const Witness& w) {
    ReportJson j;
    if (w.p) j["p"] = *w.p;
    if (w.r_template) j["r_template"] = {{"a", w.r_template->a}, {"b", w.r_template->b}};
    j["C"] = rational_to_string(w.C);
    return j;
}

inline ReportJson certificate_to_json(const Certificate& c) {
    ReportJson j;
    j["q0"] = c.q0;
    j["basis_index"] = c.basis_index;
    if (c.j) j["j"] = *c.j;
    j["code"] = c.code;
    return j;
}

inline ReportJson evidence_to_json(const Evidence& e) {
    ReportJson j;
    if (!e.note.empty()) j["note"] = e.note;
    if (!e.per_q.empty()) {
        ReportJson arr = ReportJson::array();
        for (const auto& s : e.per_q)
            arr.push_back({{"q", s.q}, {"r", s.r}, {"log_C", s.log_C}, {"slope", s.slope}});
        j["per_q"] = std::move(arr);
    }
    return j;
}

inline ReportJson verdict_to_json(const Verdict& v) {
    ReportJson j;
    j["state"] = verdict_state_to_string(v.state());
    if (v.witness()) j["witness"] = witness_to_json(*v.witness());
    if (v.certificate()) j["certificate"] = certificate_to_json(*v.certificate());
    if (!v.evidence().empty()) j["evidence"] = evidence_to_json(v.evidence());
    return j;
}

inline ReportJson classification_to_json(const std::string& matrix_name, const ClassificationReport& rep) {
    ReportJson j;
    j["matrix"] = matrix_name;
    ReportJson verdicts;
    verdicts["koethe_axioms"] = verdict_to_json(rep.koethe_axioms);
    verdicts["nuclear"] = verdict_to_json(rep.nuclear);
    verdicts["continuous_norm_row"] = verdict_to_json(rep.continuous_norm_row);
    verdicts["sqrt_closed"] = verdict_to_json(rep.sqrt_closed);
    verdicts["dn"] = verdict_to_json(rep.dn);
    verdicts["algebra"] = verdict_to_json(rep.algebra);
    verdicts["self_equivalence"] = verdict_to_json(rep.self_equivalence);
    j["verdicts"] = std::move(verdicts);
    j["set4"] = tri_state_to_string(rep.set4);
    j["set5"] = tri_state_to_string(rep.set5);
    j["consistency"] = rep.consistent;
    return j;
}

inline ReportJson domination_probe_to_json(const DominationProbe& p) {
    ReportJson j;
    j["q"] = p.q;
    ReportJson arr = ReportJson::array();
    for (const auto& prr : p.per_r)
        arr.push_back({{"r", prr.r}, {"log_C_best", prr.log_C_best}, {"slope", prr.slope}});
    j["per_r"] = std::move(arr);
    return j;
}

inline ReportJson nuclearity_probe_to_json(const NuclearityProbe& p) {
    return ReportJson{{"q", p.q},
                      {"r", p.r},
                      {"sum_lo", p.sum_lo},
                      {"sum_mid", p.sum_mid},
                      {"sum_full", p.sum_full},
                      {"increment_ratio", p.increment_ratio},
                      {"flag", tail_flag_to_string(p.flag)}};
}

inline ReportJson match_to_json(const MatchResult& m) {
    ReportJson j;
    ReportJson sigma = ReportJson::array();
    for (std::size_t v : m.sigma) sigma.push_back(v + 1);  // 1-based in reports
    j["sigma"] = std::move(sigma);
    j["log_lambda"] = m.log_lambda;
    j["distortion"] = m.distortion;
    j["status"] = match_status_to_string(m.status);
    return j;
}

} // namespace koethe
