#pragma once

#include "koethe/spec.hpp"

#include <cctype>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace koethe {

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line, int col)
        : std::runtime_error("parse error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line(line), col(col) {}
    int line;
    int col;
};

namespace dsl_detail {

enum class Tok { Ident, Integer, LBrace, RBrace, LParen, RParen, Plus, Minus, Star, Caret, Slash, Colon, Semi, End };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    Token next() {
        skip_ws();
        int line = line_, col = col_;
        if (pos_ >= src_.size()) return {Tok::End, "", line, col};
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string t;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                t += advance();
            return {Tok::Ident, t, line, col};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string t;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) t += advance();
            return {Tok::Integer, t, line, col};
        }
        advance();
        switch (c) {
            case '{': return {Tok::LBrace, "{", line, col};
            case '}': return {Tok::RBrace, "}", line, col};
            case '(': return {Tok::LParen, "(", line, col};
            case ')': return {Tok::RParen, ")", line, col};
            case '+': return {Tok::Plus, "+", line, col};
            case '-': return {Tok::Minus, "-", line, col};
            case '*': return {Tok::Star, "*", line, col};
            case '^': return {Tok::Caret, "^", line, col};
            case '/': return {Tok::Slash, "/", line, col};
            case ':': return {Tok::Colon, ":", line, col};
            case ';': return {Tok::Semi, ";", line, col};
            default: throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
    }

    /// Bare path token for "values PATH": everything up to whitespace/';'/'}'.
    Token next_path() {
        skip_ws();
        int line = line_, col = col_;
        std::string t;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c)) || c == ';' || c == '}') break;
            t += advance();
        }
        if (t.empty()) throw ParseError("expected a file path after 'values'", line, col);
        return {Tok::Ident, t, line, col};
    }

private:
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

struct Term {
    GradePoly poly;
    std::optional<GrowthBasisFunction> basis;
};

class Parser {
public:
    Parser(const std::string& src, std::string base_dir)
        : lexer_(src), base_dir_(std::move(base_dir)) {
        bump();
    }

    std::vector<KoetheMatrixSpec> parse_file() {
        std::vector<KoetheMatrixSpec> out;
        while (cur_.kind != Tok::End) out.push_back(parse_block());
        if (out.empty()) throw ParseError("expected at least one matrix block", cur_.line, cur_.col);
        return out;
    }

private:
    void bump() { cur_ = lexer_.next(); }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, cur_.line, cur_.col); }

    void expect(Tok kind, const char* what) {
        if (cur_.kind != kind) fail(std::string("expected ") + what + ", got '" + cur_.text + "'");
        bump();
    }

    bool accept(Tok kind) {
        if (cur_.kind != kind) return false;
        bump();
        return true;
    }

    bool at_keyword(const char* kw) const { return cur_.kind == Tok::Ident && cur_.text == kw; }

    Rational parse_rational_literal() {
        if (cur_.kind != Tok::Integer) fail("expected a rational literal");
        std::string num = cur_.text;
        bump();
        if (accept(Tok::Slash)) {
            if (cur_.kind != Tok::Integer) fail("expected a denominator");
            std::string den = cur_.text;
            bump();
            return rational_from_string(num + "/" + den);
        }
        return rational_from_string(num);
    }

    GrowthClass parse_class() {
        if (cur_.kind != Tok::Ident) fail("expected a growth class");
        std::string c = cur_.text;
        int line = cur_.line, col = cur_.col;
        bump();
        if (c == "bounded") return {GrowthClassKind::Bounded, Rational(0)};
        if (c == "log") return {GrowthClassKind::Logarithmic, Rational(0)};
        if (c == "superlog") return {GrowthClassKind::SuperLogarithmic, Rational(0)};
        if (c == "superpoly") return {GrowthClassKind::SuperPolynomial, Rational(0)};
        if (c == "poly") {
            expect(Tok::LParen, "'('");
            Rational theta = parse_rational_literal();
            expect(Tok::RParen, "')'");
            if (theta <= 0) throw ParseError("polynomial class needs exponent theta > 0", line, col);
            return {GrowthClassKind::Polynomial, theta};
        }
        throw ParseError("unknown basis class '" + c + "'", line, col);
    }

    std::vector<double> load_values(const std::string& path, int line, int col) {
        std::string full = path;
        if (!base_dir_.empty() && !path.empty() && path.front() != '/') full = base_dir_ + "/" + path;
        std::ifstream is(full);
        if (!is) throw ParseError("cannot read values file '" + full + "'", line, col);
        std::vector<double> vals;
        double v;
        while (is >> v) {
            if (!(v >= 0.0)) throw ParseError("values file '" + full + "' has a negative entry", line, col);
            vals.push_back(v);
        }
        if (vals.empty()) throw ParseError("values file '" + full + "' is empty", line, col);
        return vals;
    }

    KoetheMatrixSpec parse_block() {
        if (!at_keyword("matrix")) fail("expected 'matrix'");
        bump();
        if (cur_.kind != Tok::Ident) fail("expected a matrix name");
        std::string name = cur_.text;
        bump();
        expect(Tok::LBrace, "'{'");

        seqs_.clear();
        while (true) {
            if (accept(Tok::Semi)) continue;
            if (at_keyword("seq")) {
                parse_seq_decl();
                continue;
            }
            break;
        }

        if (!at_keyword("log_entry")) fail("expected 'log_entry:'");
        bump();
        expect(Tok::Colon, "':'");
        std::vector<Term> terms = parse_expr(true);
        while (accept(Tok::Semi)) {
        }
        expect(Tok::RBrace, "'}'");

        std::vector<std::pair<GrowthBasisFunction, GradePoly>> spec_terms;
        for (auto& t : terms) {
            GrowthBasisFunction fn = t.basis ? *t.basis : GrowthBasisFunction::one();
            spec_terms.emplace_back(std::move(fn), std::move(t.poly));
        }
        return KoetheMatrixSpec::make(std::move(name), std::move(spec_terms));
    }

    void parse_seq_decl() {
        bump();  // 'seq'
        if (cur_.kind != Tok::Ident) fail("expected a sequence name");
        std::string name = cur_.text;
        int line = cur_.line, col = cur_.col;
        bump();
        if (!at_keyword("class")) fail("expected 'class'");
        bump();
        GrowthClass cls = parse_class();
        std::vector<double> samples;
        if (at_keyword("values")) {
            // re-lex the next token as a path
            Token p = lexer_.next_path();
            samples = load_values(p.text, p.line, p.col);
            bump();
        }
        for (const auto& s : seqs_)
            if (s.name() == name) throw ParseError("duplicate basis function 'seq " + name + "'", line, col);
        seqs_.push_back(GrowthBasisFunction::named(name, cls, std::move(samples)));
    }

    std::vector<Term> parse_expr(bool allow_basis) {
        std::vector<Term> out;
        bool negate = accept(Tok::Minus);
        out.push_back(parse_term(allow_basis, negate));
        while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
            bool neg = cur_.kind == Tok::Minus;
            bump();
            out.push_back(parse_term(allow_basis, neg));
        }
        return out;
    }

    Term parse_term(bool allow_basis, bool negate) {
        Term t;
        t.poly = GradePoly::constant(1);
        parse_factor_into(t, allow_basis);
        while (accept(Tok::Star)) parse_factor_into(t, allow_basis);
        if (negate) t.poly = -t.poly;
        return t;
    }

    void parse_factor_into(Term& t, bool allow_basis) {
        int line = cur_.line, col = cur_.col;
        if (cur_.kind == Tok::Integer) {
            t.poly = t.poly * GradePoly(parse_rational_literal());
            return;
        }
        if (accept(Tok::Minus)) {  // unary minus inside a product
            parse_factor_into(t, allow_basis);
            t.poly = -t.poly;
            return;
        }
        if (cur_.kind == Tok::LParen) {
            bump();
            std::vector<Term> inner = parse_expr(false);
            expect(Tok::RParen, "')'");
            GradePoly p;
            for (auto& it : inner) p += it.poly;
            t.poly = t.poly * p;
            return;
        }
        if (cur_.kind != Tok::Ident) fail("expected a factor");
        std::string id = cur_.text;

        if (id == "q") {
            bump();
            unsigned e = 1;
            if (accept(Tok::Caret)) {
                if (cur_.kind != Tok::Integer) fail("expected an integer exponent after 'q^'");
                e = static_cast<unsigned>(std::stoul(cur_.text));
                bump();
            }
            t.poly = t.poly * GradePoly::variable().pow(e);
            return;
        }

        // from here on: basis references
        std::optional<GrowthBasisFunction> fn;
        if (id == "log") {
            bump();
            expect(Tok::LParen, "'('");
            if (!at_keyword("j")) fail("expected 'j' in log(j)");
            bump();
            expect(Tok::RParen, "')'");
            fn = GrowthBasisFunction::log_j();
        } else if (id == "j") {
            bump();
            expect(Tok::Caret, "'^' (bare j is written j^1)");
            Rational theta = parse_rational_literal();
            if (theta <= 0) throw ParseError("non-positive power exponent j^" + rational_to_string(theta), line, col);
            fn = GrowthBasisFunction::power_j(theta);
        } else if (id == "seq") {
            bump();
            expect(Tok::LParen, "'('");
            if (cur_.kind != Tok::Ident) fail("expected a sequence name");
            std::string name = cur_.text;
            bump();
            expect(Tok::RParen, "')'");
            const GrowthBasisFunction* found = nullptr;
            for (const auto& s : seqs_)
                if (s.name() == name) found = &s;
            if (!found) throw ParseError("sequence '" + name + "' was not declared", line, col);
            fn = *found;
        } else {
            fail("unknown identifier '" + id + "'");
        }

        if (!allow_basis) throw ParseError("basis functions are not allowed inside coefficient parentheses", line, col);
        if (t.basis) throw ParseError("product of two basis functions is outside the log-linear fragment", line, col);
        t.basis = std::move(fn);
    }

    Lexer lexer_;
    Token cur_{Tok::End, "", 0, 0};
    std::string base_dir_;
    std::vector<GrowthBasisFunction> seqs_;
};

} // namespace dsl_detail

/// All matrix blocks in the source, in order.
inline std::vector<KoetheMatrixSpec> parse_specs(const std::string& text, const std::string& base_dir = "") {
    dsl_detail::Parser p(text, base_dir);
    return p.parse_file();
}

/// Exactly one matrix block.
inline KoetheMatrixSpec parse_spec(const std::string& text, const std::string& base_dir = "") {
    auto all = parse_specs(text, base_dir);
    if (all.size() != 1)
        throw ParseError("expected exactly one matrix block, found " + std::to_string(all.size()), 1, 1);
    return std::move(all.front());
}

inline std::vector<KoetheMatrixSpec> parse_spec_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    std::string dir = ".";
    auto slash = path.find_last_of('/');
    if (slash != std::string::npos) dir = path.substr(0, slash);
    return parse_specs(text, dir);
}

} // namespace koethe
