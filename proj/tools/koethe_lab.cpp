// Command-line front end: spec checking, Theorem 3.1/3.2 classification with
// numeric probes, example-family construction, profile matching and the
// norm-extension lab. Reports are deterministic for a fixed seed; exit code 2
// is reserved for a symbolic-verdict-vs-probe contradiction.

#include "koethe/calculus.hpp"
#include "koethe/dsl.hpp"
#include "koethe/generators.hpp"
#include "koethe/norm_lab.hpp"
#include "koethe/probe.hpp"
#include "koethe/report_json.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using koethe::ReportJson;

struct OutputOptions {
    std::string format = "json";
    std::string out_path;
};

void emit(const ReportJson& report, const OutputOptions& opt) {
    std::string text;
    if (opt.format == "json") {
        text = report.dump(2) + "\n";
    } else {
        // flat text rendering: one "path: value" line per leaf
        std::function<void(const ReportJson&, const std::string&)> walk = [&](const ReportJson& node,
                                                                              const std::string& prefix) {
            if (node.is_object()) {
                for (auto it = node.begin(); it != node.end(); ++it)
                    walk(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
            } else if (node.is_array()) {
                for (std::size_t i = 0; i < node.size(); ++i) walk(node[i], prefix + "[" + std::to_string(i) + "]");
            } else {
                text += prefix + ": " + node.dump() + "\n";
            }
        };
        walk(report, "");
    }
    if (opt.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(opt.out_path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + opt.out_path);
        os << text;
    }
}

bool is_grid_file(const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return true;
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return true;
    return false;
}

std::pair<std::size_t, std::size_t> parse_probe_args(const std::vector<std::string>& kv) {
    std::size_t J = 1000, Q = 8;
    for (const auto& s : kv) {
        auto eq = s.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--probe expects J=<int> Q=<int>");
        std::string key = s.substr(0, eq);
        long long value = std::stoll(s.substr(eq + 1));
        if (value < 2) throw std::invalid_argument("--probe values must be >= 2");
        if (key == "J")
            J = static_cast<std::size_t>(value);
        else if (key == "Q")
            Q = static_cast<std::size_t>(value);
        else
            throw std::invalid_argument("--probe expects J=<int> Q=<int>");
    }
    return {J, Q};
}

std::string write_grid_auto(const koethe::TabulatedMatrix& tab, const std::string& base) {
    if (tab.fits_linear_range()) {
        std::string path = base + ".csv";
        koethe::write_csv_file(tab, path);
        return path;
    }
    std::string path = base + ".json";
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << koethe::tabulated_to_json(tab).dump(2) << "\n";
    return path;
}

// Probes every decided member verdict on a finite truncation and reports
// contradictions; the caller turns any contradiction into exit code 2.
ReportJson probe_classification(const koethe::KoetheMatrixSpec& spec, const koethe::ClassificationReport& rep,
                                std::size_t J, std::size_t Q, bool& consistent) {
    using namespace koethe;
    ReportJson probe;
    consistent = true;
    if (spec.eval_limit() < J) {
        probe["note"] = "samples cover fewer than J rows; probe skipped";
        return probe;
    }
    TabulatedMatrix grid = evaluate_grid(spec, J, Q);
    TabulatedMatrix grid_sq = evaluate_grid(spec.square(), J, Q);

    // nuclearity at the witness template
    if (rep.nuclear.is_proved() && rep.nuclear.witness()->r_template) {
        RTemplate t = *rep.nuclear.witness()->r_template;
        ReportJson arr = ReportJson::array();
        for (unsigned q = 0; q < 3 && q < Q; ++q) {
            unsigned r = t.apply(q);
            if (r >= Q) continue;
            NuclearityProbe np = probe_nuclearity(grid, q, r);
            if (!consistency_check(rep.nuclear, np)) consistent = false;
            arr.push_back(nuclearity_probe_to_json(np));
        }
        probe["nuclear"] = std::move(arr);
    } else if (rep.nuclear.is_refuted()) {
        unsigned q0 = std::min<unsigned>(rep.nuclear.certificate()->q0, static_cast<unsigned>(Q - 1));
        ReportJson arr = ReportJson::array();
        for (unsigned r = 0; r < Q; ++r) {
            NuclearityProbe np = probe_nuclearity(grid, q0, r);
            if (!consistency_check(rep.nuclear, np)) consistent = false;
            arr.push_back(nuclearity_probe_to_json(np));
        }
        probe["nuclear"] = std::move(arr);
    }

    // domination members on the truncation
    auto probe_domination_member = [&](const Verdict& v, const TabulatedMatrix& A, const TabulatedMatrix& B,
                                       const char* key) {
        ReportJson arr = ReportJson::array();
        if (v.is_proved() && v.witness()->r_template) {
            RTemplate t = *v.witness()->r_template;
            for (unsigned q = 0; q < 3 && q < Q; ++q) {
                unsigned r = t.apply(q);
                if (r >= Q) continue;
                DominationProbe dp = probe_domination(A, B, q, static_cast<unsigned>(Q - 1));
                if (!consistency_check(v, dp, static_cast<long>(r))) consistent = false;
                arr.push_back(domination_probe_to_json(dp));
            }
        } else if (v.is_refuted()) {
            unsigned q0 = std::min<unsigned>(v.certificate()->q0, static_cast<unsigned>(Q - 1));
            DominationProbe dp = probe_domination(A, B, q0, static_cast<unsigned>(Q - 1));
            if (!consistency_check(v, dp)) consistent = false;
            arr.push_back(domination_probe_to_json(dp));
        }
        if (!arr.empty()) probe[key] = std::move(arr);
    };
    probe_domination_member(rep.sqrt_closed, grid_sq, grid, "sqrt_closed");
    probe_domination_member(rep.algebra, grid, grid_sq, "algebra");

    // continuous norm row: 1/a_{j,p} bounded iff the ones matrix is dominated
    {
        std::vector<double> ones(J * Q, 0.0);
        TabulatedMatrix ones_grid = TabulatedMatrix::from_log(J, Q, std::move(ones), Provenance::EvaluatedFromSpec);
        DominationProbe dp = probe_domination(ones_grid, grid, 0, static_cast<unsigned>(Q - 1));
        long witness_r = -1;
        if (rep.continuous_norm_row.is_proved() && rep.continuous_norm_row.witness()->p &&
            *rep.continuous_norm_row.witness()->p < Q)
            witness_r = static_cast<long>(*rep.continuous_norm_row.witness()->p);
        if (!consistency_check(rep.continuous_norm_row, dp, witness_r)) consistent = false;
        probe["continuous_norm_row"] = domination_probe_to_json(dp);
    }

    probe["dn_best"] = [&] {
        DnProbe dp = probe_dn(grid);
        ReportJson j;
        j["p"] = dp.p;
        j["worst_log_C"] = dp.worst_log_C;
        return j;
    }();
    probe["consistent"] = consistent;
    return probe;
}

int run_check(const std::string& path, const OutputOptions& opt) {
    ReportJson report = ReportJson::array();
    if (is_grid_file(path)) {
        koethe::TabulatedMatrix tab = koethe::read_grid_file(path);
        ReportJson one;
        one["matrix"] = path;
        one["verdict"] = koethe::verdict_to_json(koethe::validate_koethe(tab));
        report.push_back(std::move(one));
    } else {
        for (const auto& spec : koethe::parse_spec_file(path)) {
            ReportJson one;
            one["matrix"] = spec.name();
            one["verdict"] = koethe::verdict_to_json(koethe::validate_koethe(spec));
            one["canonical"] = koethe::print_spec(spec);
            report.push_back(std::move(one));
        }
    }
    emit(report, opt);
    return 0;
}

int run_classify(const std::string& path, const std::vector<std::string>& probe_kv, const OutputOptions& opt) {
    ReportJson report = ReportJson::array();
    bool all_consistent = true;
    for (const auto& spec : koethe::parse_spec_file(path)) {
        koethe::ClassificationReport rep = koethe::classify(spec);
        ReportJson one = koethe::classification_to_json(spec.name(), rep);
        if (!rep.consistent) all_consistent = false;
        if (!probe_kv.empty()) {
            auto [J, Q] = parse_probe_args(probe_kv);
            bool consistent = true;
            one["probe"] = probe_classification(spec, rep, J, Q, consistent);
            if (!consistent) all_consistent = false;
        }
        report.push_back(std::move(one));
    }
    emit(report, opt);
    return all_consistent ? 0 : 2;
}

int run_match(const std::string& pathA, const std::string& pathB, const OutputOptions& opt) {
    koethe::TabulatedMatrix A = koethe::read_grid_file(pathA);
    koethe::TabulatedMatrix B = koethe::read_grid_file(pathB);
    koethe::MatchResult m = koethe::match(A, B);
    ReportJson report = koethe::match_to_json(m);
    bool ok = koethe::verify_quasi_equivalence(A, B, m.sigma, [&] {
        std::vector<double> l(m.log_lambda.size());
        for (std::size_t i = 0; i < l.size(); ++i) l[i] = std::exp(m.log_lambda[i]);
        return l;
    }(), std::exp(m.distortion) + 1e-9);
    report["verified"] = ok;
    emit(report, opt);
    return ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"koethe-lab: Koethe matrix calculus, finite operator profiles and norm extension checks"};
    app.require_subcommand(1);

    OutputOptions opt;
    std::uint64_t seed = 0;
    app.add_option("--format", opt.format, "json|text")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--out", opt.out_path, "write the report to a file");
    app.add_option("--seed", seed, "seed for randomized constructions");

    // check
    std::string check_path;
    auto* cmd_check = app.add_subcommand("check", "validate the Koethe axioms of a spec or grid");
    cmd_check->add_option("file", check_path)->required();

    // classify
    std::string classify_path;
    std::vector<std::string> probe_kv;
    auto* cmd_classify = app.add_subcommand("classify", "Theorem 3.1/3.2 condition report");
    cmd_classify->add_option("file", classify_path)->required();
    cmd_classify->add_option("--probe", probe_kv, "J=<int> Q=<int>")->expected(1, 2);

    // probe
    std::string probe_kind, probe_a, probe_b;
    unsigned probe_q = 0;
    long probe_r = -1;
    auto* cmd_probe = app.add_subcommand("probe", "numeric truncation probes");
    cmd_probe->add_option("kind", probe_kind)->check(CLI::IsMember({"domination", "nuclearity", "dn"}))->required();
    cmd_probe->add_option("fileA", probe_a)->required();
    cmd_probe->add_option("fileB", probe_b);
    cmd_probe->add_option("--q", probe_q, "grade to probe");
    cmd_probe->add_option("--r", probe_r, "grade shift (nuclearity)");

    // construct
    std::string kind, alpha = "log(j)", out_base = "construct";
    std::size_t truncate = 64, grade = 8, nrows = 100;
    unsigned blocks = 6;
    double separation = 1e-3;
    bool with_profile = false;
    auto* cmd_construct = app.add_subcommand("construct", "emit named example families");
    cmd_construct->add_option("kind", kind)
        ->check(CLI::IsMember({"power-series", "canonical-basis", "block-householder", "planted-pair"}))
        ->required();
    cmd_construct->add_option("--alpha", alpha, "exponent sequence: log(j), j, j^<p/q>, loglog(j)");
    cmd_construct->add_option("--truncate", truncate, "rows J");
    cmd_construct->add_option("--grade", grade, "columns Q");
    cmd_construct->add_option("--n", nrows, "family size");
    cmd_construct->add_option("--blocks", blocks, "dyadic block count");
    cmd_construct->add_option("--separation", separation, "planted row separation");
    cmd_construct->add_flag("--profile", with_profile, "also emit the orthonormal-realization profile");
    cmd_construct->add_option("--out-base", out_base, "output path prefix");

    // match
    std::string match_a, match_b;
    auto* cmd_match = app.add_subcommand("match", "quasi-equivalence matching of two profiles");
    cmd_match->add_option("fileA", match_a)->required();
    cmd_match->add_option("fileB", match_b)->required();

    // normlab
    std::string model_path;
    std::size_t nl_dim = 16, nl_sub = 5, nl_ladder = 6, nl_models = 10, nl_samples = 500;
    auto* cmd_normlab = app.add_subcommand("normlab", "Lemma 3.5/3.7/3.8 verification runs");
    cmd_normlab->add_option("--model", model_path, "model JSON instead of random models");
    cmd_normlab->add_option("--dim", nl_dim);
    cmd_normlab->add_option("--subdim", nl_sub);
    cmd_normlab->add_option("--ladder", nl_ladder);
    cmd_normlab->add_option("--models", nl_models);
    cmd_normlab->add_option("--samples", nl_samples);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_check) return run_check(check_path, opt);
        if (*cmd_classify) return run_classify(classify_path, probe_kv, opt);

        if (*cmd_probe) {
            using namespace koethe;
            TabulatedMatrix A = read_grid_file(probe_a);
            ReportJson report;
            if (probe_kind == "domination") {
                if (probe_b.empty()) throw std::invalid_argument("domination probe needs two grids");
                TabulatedMatrix B = read_grid_file(probe_b);
                report = domination_probe_to_json(
                    probe_domination(A, B, probe_q, static_cast<unsigned>(B.grades() - 1)));
            } else if (probe_kind == "nuclearity") {
                unsigned r = probe_r >= 0 ? static_cast<unsigned>(probe_r) : static_cast<unsigned>(A.grades() - 1);
                report = nuclearity_probe_to_json(probe_nuclearity(A, probe_q, r));
            } else {
                DnProbe dp = probe_dn(A);
                report["p"] = dp.p;
                report["worst_log_C"] = dp.worst_log_C;
                ReportJson arr = ReportJson::array();
                for (const auto& pq : dp.per_q) arr.push_back({{"q", pq.q}, {"r", pq.r}, {"log_C", pq.log_C}});
                report["per_q"] = std::move(arr);
            }
            emit(report, opt);
            return 0;
        }

        if (*cmd_construct) {
            using namespace koethe;
            ReportJson report;
            report["kind"] = kind;
            if (kind == "power-series") {
                bool in_fragment = alpha != "loglog(j)";
                TabulatedMatrix grid = [&] {
                    if (alpha == "loglog(j)") return loglog_power_series_grid(truncate, grade);
                    if (alpha == "log(j)")
                        return power_series_grid([](std::uint64_t j) { return std::log(double(j)); }, truncate, grade);
                    if (alpha == "j")
                        return power_series_grid([](std::uint64_t j) { return double(j); }, truncate, grade);
                    if (alpha.rfind("j^", 0) == 0) {
                        double theta = to_double(rational_from_string(alpha.substr(2)));
                        if (theta <= 0) throw std::invalid_argument("alpha exponent must be positive");
                        return power_series_grid(
                            [theta](std::uint64_t j) { return std::pow(double(j), theta); }, truncate, grade);
                    }
                    throw std::invalid_argument("unknown alpha '" + alpha + "'");
                }();
                if (validate_koethe(grid).is_refuted()) throw std::logic_error("constructed grid fails Koethe axioms");
                report["grid"] = write_grid_auto(grid, out_base + "_grid");
                if (in_fragment) {
                    KoetheMatrixSpec spec = spec_power_series(alpha);
                    std::ofstream os(out_base + ".kothe", std::ios::binary);
                    os << print_spec(spec);
                    report["spec"] = out_base + ".kothe";
                }
                if (with_profile) {
                    // index-embedding realization f_j = e_{round(exp(alpha_j))}: |f_j|_q = i_j^q
                    std::vector<double> logs(truncate * grade);
                    for (std::size_t j = 1; j <= truncate; ++j) {
                        double a = grid.log_entry(j - 1, 1);  // alpha_j = log entry at q=1
                        double log_i = a <= 40.0 ? std::log(std::max<double>(1.0, std::llround(std::exp(a)))) : a;
                        for (std::size_t q = 0; q < grade; ++q) logs[(j - 1) * grade + q] = double(q) * log_i;
                    }
                    TabulatedMatrix prof =
                        TabulatedMatrix::from_log(truncate, grade, std::move(logs), Provenance::OperatorProfile);
                    report["profile"] = write_grid_auto(prof, out_base + "_profile");
                }
            } else if (kind == "canonical-basis") {
                auto fam = canonical_family(static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(nrows));
                TabulatedMatrix prof = profile(fam, static_cast<unsigned>(grade));
                report["profile"] = write_grid_auto(prof, out_base + "_profile");
            } else if (kind == "block-householder") {
                auto fam = block_householder_family(blocks);
                TabulatedMatrix prof = profile(fam, static_cast<unsigned>(grade));
                report["profile"] = write_grid_auto(prof, out_base + "_profile");
                report["members"] = fam.size();
            } else {  // planted-pair
                PlantedPair pp = planted_pair(seed, nrows, grade, separation);
                report["a"] = write_grid_auto(pp.A, out_base + "_a");
                report["b"] = write_grid_auto(pp.B, out_base + "_b");
                ReportJson plant;
                ReportJson sig = ReportJson::array();
                for (std::size_t v : pp.sigma) sig.push_back(v + 1);
                plant["sigma"] = std::move(sig);
                std::vector<double> ll(pp.lambda.size());
                for (std::size_t i = 0; i < ll.size(); ++i) ll[i] = std::log(pp.lambda[i]);
                plant["log_lambda"] = ll;
                plant["separation"] = pp.separation;
                std::ofstream os(out_base + "_plant.json", std::ios::binary);
                os << plant.dump(2) << "\n";
                report["plant"] = out_base + "_plant.json";
            }
            emit(report, opt);
            return 0;
        }

        if (*cmd_match) return run_match(match_a, match_b, opt);

        if (*cmd_normlab) {
            using namespace koethe;
            ReportJson runs = ReportJson::array();
            std::mt19937_64 rng(seed);
            auto run_one = [&](const SubspaceModel& model, std::size_t K, std::uint64_t run_seed) {
                HilbertNorm normE = HilbertNorm::identity(model.sub_dim());
                HilbertNorm normG = HilbertNorm::identity(model.quotient_dim());
                auto [n1, n2] = make_lemma35_norms(model, normE, normG);
                HilbertNorm normF = inf_convolution_norm(model, normE, n1, n2);
                Lemma35Report l35 = verify_lemma35(normF, model, normE, normG,
                                                   static_cast<int>(nl_samples), run_seed);
                auto ladE = NormLadder::diagonal_ladder(model.sub_dim(), K);
                auto ladG = NormLadder::diagonal_ladder(model.quotient_dim(), K);
                auto [dom, l38] = dominating_extension(model, ladE, ladG, static_cast<int>(nl_samples), run_seed + 1);
                ReportJson one;
                one["dim"] = model.ambient;
                one["subdim"] = model.sub_dim();
                one["lemma35"] = {{"max_ratio", l35.max_ratio},
                                  {"min_ratio", l35.min_ratio},
                                  {"alpha_violations", l35.alpha_violations},
                                  {"beta_violations", l35.beta_violations},
                                  {"parallelogram_residual", l35.parallelogram_residual}};
                ReportJson lv = ReportJson::array();
                for (const auto& l : l38.levels)
                    lv.push_back({{"u", l.u},
                                  {"v", l.v},
                                  {"observed", l.observed},
                                  {"canonical_v", l.canonical_v},
                                  {"observed_canonical", l.observed_canonical}});
                one["lemma38"] = {{"max_observed", l38.max_observed},
                                  {"restriction_error", l38.restriction_error},
                                  {"all_certified", l38.all_certified},
                                  {"levels", std::move(lv)}};
                runs.push_back(std::move(one));
                return l35.ok() && l38.all_certified;
            };
            bool ok = true;
            if (!model_path.empty()) {
                std::ifstream is(model_path, std::ios::binary);
                if (!is) throw std::runtime_error("cannot read " + model_path);
                nlohmann::json mj;
                is >> mj;
                auto [model, K] = model_from_json(mj);
                ok = run_one(model, K, seed);
            } else {
                for (std::size_t i = 0; i < nl_models; ++i) {
                    SubspaceModel model = SubspaceModel::random(rng, static_cast<Eigen::Index>(nl_dim),
                                                                static_cast<Eigen::Index>(nl_sub));
                    ok = run_one(model, nl_ladder, seed + i) && ok;
                }
            }
            ReportJson report;
            report["runs"] = std::move(runs);
            report["ok"] = ok;
            emit(report, opt);
            return ok ? 0 : 2;
        }
    } catch (const koethe::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
