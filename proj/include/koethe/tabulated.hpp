#pragma once

#include "koethe/spec.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace koethe {

enum class Provenance : std::uint8_t { EvaluatedFromSpec, ExternalFile, OperatorProfile };

inline std::string provenance_to_string(Provenance p) {
    switch (p) {
        case Provenance::EvaluatedFromSpec: return "evaluated-from-spec";
        case Provenance::ExternalFile: return "external-file";
        case Provenance::OperatorProfile: return "operator-profile";
    }
    return "?";
}

inline Provenance provenance_from_string(const std::string& s) {
    if (s == "evaluated-from-spec") return Provenance::EvaluatedFromSpec;
    if (s == "external-file") return Provenance::ExternalFile;
    if (s == "operator-profile") return Provenance::OperatorProfile;
    throw std::invalid_argument("unknown provenance: " + s);
}

/// Finite J x Q section of a Koethe matrix: strictly positive entries, row
/// index j = 1..J, column index q = 0..Q-1. Stored in the log domain so
/// families like e^{q j} stay representable at probe scale; entry() returns
/// the linear value and may overflow to +inf for display purposes only.
class TabulatedMatrix {
public:
    TabulatedMatrix() = default;

    static TabulatedMatrix from_log(std::size_t rows, std::size_t grades, std::vector<double> log_entries,
                                    Provenance prov) {
        if (rows * grades != log_entries.size()) throw std::invalid_argument("grid size mismatch");
        if (rows == 0 || grades == 0) throw std::invalid_argument("empty grid");
        for (double v : log_entries)
            if (!std::isfinite(v)) throw std::invalid_argument("log entries must be finite");
        TabulatedMatrix t;
        t.rows_ = rows;
        t.grades_ = grades;
        t.log_ = std::move(log_entries);
        t.prov_ = prov;
        return t;
    }

    static TabulatedMatrix from_linear(const std::vector<std::vector<double>>& rows, Provenance prov) {
        if (rows.empty() || rows.front().empty()) throw std::invalid_argument("empty grid");
        std::size_t grades = rows.front().size();
        std::vector<double> logs;
        logs.reserve(rows.size() * grades);
        for (const auto& r : rows) {
            if (r.size() != grades) throw std::invalid_argument("ragged grid");
            for (double v : r) {
                if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("entries must be positive and finite");
                logs.push_back(std::log(v));
            }
        }
        return from_log(rows.size(), grades, std::move(logs), prov);
    }

    std::size_t rows() const { return rows_; }
    std::size_t grades() const { return grades_; }
    Provenance provenance() const { return prov_; }
    void set_provenance(Provenance p) { prov_ = p; }

    /// row is 0-based; the weight index is j = row + 1.
    double log_entry(std::size_t row, std::size_t q) const { return log_[row * grades_ + q]; }
    double entry(std::size_t row, std::size_t q) const { return std::exp(log_entry(row, q)); }
    void set_log_entry(std::size_t row, std::size_t q, double v) { log_[row * grades_ + q] = v; }

    bool is_column_monotone() const {
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t q = 0; q + 1 < grades_; ++q)
                if (log_entry(r, q) > log_entry(r, q + 1)) return false;
        return true;
    }

    bool fits_linear_range() const {
        for (double v : log_) {
            if (std::abs(v) > 700.0) return false;
        }
        return true;
    }

private:
    std::size_t rows_ = 0, grades_ = 0;
    std::vector<double> log_;
    Provenance prov_ = Provenance::ExternalFile;
};

inline void check_permutation(const std::vector<std::size_t>& sigma, std::size_t n) {
    if (sigma.size() != n) throw std::invalid_argument("permutation length mismatch");
    std::vector<char> seen(n, 0);
    for (std::size_t v : sigma) {
        if (v >= n || seen[v]) throw std::invalid_argument("sigma is not a bijection");
        seen[v] = 1;
    }
}

/// Row reordering A_sigma: row j of the result is row sigma(j) of the input.
inline TabulatedMatrix permute(const TabulatedMatrix& tab, const std::vector<std::size_t>& sigma) {
    check_permutation(sigma, tab.rows());
    std::vector<double> logs(tab.rows() * tab.grades());
    for (std::size_t r = 0; r < tab.rows(); ++r)
        for (std::size_t q = 0; q < tab.grades(); ++q) logs[r * tab.grades() + q] = tab.log_entry(sigma[r], q);
    return TabulatedMatrix::from_log(tab.rows(), tab.grades(), std::move(logs), tab.provenance());
}

inline TabulatedMatrix scale_rows(const TabulatedMatrix& tab, const std::vector<double>& lambda) {
    if (lambda.size() != tab.rows()) throw std::invalid_argument("scalar count mismatch");
    for (double l : lambda)
        if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("row scalars must be positive");
    std::vector<double> logs(tab.rows() * tab.grades());
    for (std::size_t r = 0; r < tab.rows(); ++r)
        for (std::size_t q = 0; q < tab.grades(); ++q)
            logs[r * tab.grades() + q] = tab.log_entry(r, q) + std::log(lambda[r]);
    return TabulatedMatrix::from_log(tab.rows(), tab.grades(), std::move(logs), tab.provenance());
}

inline TabulatedMatrix evaluate_grid(const KoetheMatrixSpec& spec, std::size_t J, std::size_t Q) {
    if (J == 0 || Q == 0) throw std::invalid_argument("grid dimensions must be positive");
    if (spec.eval_limit() < J)
        throw MissingSampleError("named-sequence samples cover fewer than J=" + std::to_string(J) + " rows");
    std::vector<double> logs(J * Q);
    for (std::size_t r = 0; r < J; ++r)
        for (std::size_t q = 0; q < Q; ++q)
            logs[r * Q + q] = spec.log_evaluate(r + 1, static_cast<unsigned>(q));
    return TabulatedMatrix::from_log(J, Q, std::move(logs), Provenance::EvaluatedFromSpec);
}

// ---- CSV / JSON I/O ----

inline std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

/// CSV: one row per j, one positive decimal per grade column.
inline void write_csv(const TabulatedMatrix& tab, std::ostream& os) {
    if (!tab.fits_linear_range())
        throw std::invalid_argument("grid exceeds linear double range; write JSON with log scale instead");
    for (std::size_t r = 0; r < tab.rows(); ++r) {
        for (std::size_t q = 0; q < tab.grades(); ++q) {
            if (q) os << ',';
            os << format_double(tab.entry(r, q));
        }
        os << '\n';
    }
}

inline void write_csv_file(const TabulatedMatrix& tab, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_csv(tab, os);
}

inline TabulatedMatrix read_csv(std::istream& is, Provenance prov = Provenance::ExternalFile) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::invalid_argument("bad CSV value at line " + std::to_string(lineno) + ": '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("empty CSV grid");
    return TabulatedMatrix::from_linear(rows, prov);
}

inline TabulatedMatrix read_csv_file(const std::string& path, Provenance prov = Provenance::ExternalFile) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    return read_csv(is, prov);
}

/// JSON mirror {"rows": [[...]], "provenance": "..."}; an optional
/// "scale": "log" marks grids whose linear entries would overflow.
inline nlohmann::ordered_json tabulated_to_json(const TabulatedMatrix& tab) {
    nlohmann::ordered_json j;
    bool linear = tab.fits_linear_range();
    j["rows"] = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < tab.rows(); ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (std::size_t q = 0; q < tab.grades(); ++q)
            row.push_back(linear ? tab.entry(r, q) : tab.log_entry(r, q));
        j["rows"].push_back(std::move(row));
    }
    j["provenance"] = provenance_to_string(tab.provenance());
    if (!linear) j["scale"] = "log";
    return j;
}

inline TabulatedMatrix tabulated_from_json(const nlohmann::json& j) {
    if (!j.contains("rows") || !j["rows"].is_array()) throw std::invalid_argument("JSON grid needs \"rows\"");
    Provenance prov = Provenance::ExternalFile;
    if (j.contains("provenance")) prov = provenance_from_string(j["provenance"].get<std::string>());
    bool log_scale = j.contains("scale") && j["scale"].get<std::string>() == "log";
    std::vector<std::vector<double>> rows;
    for (const auto& row : j["rows"]) rows.push_back(row.get<std::vector<double>>());
    if (rows.empty() || rows.front().empty()) throw std::invalid_argument("empty JSON grid");
    if (!log_scale) return TabulatedMatrix::from_linear(rows, prov);
    std::size_t grades = rows.front().size();
    std::vector<double> logs;
    for (const auto& r : rows) {
        if (r.size() != grades) throw std::invalid_argument("ragged JSON grid");
        logs.insert(logs.end(), r.begin(), r.end());
    }
    return TabulatedMatrix::from_log(rows.size(), grades, std::move(logs), prov);
}

inline TabulatedMatrix read_grid_file(const std::string& path) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw std::runtime_error("cannot read " + path);
        nlohmann::json j;
        is >> j;
        return tabulated_from_json(j);
    }
    return read_csv_file(path);
}

} // namespace koethe
