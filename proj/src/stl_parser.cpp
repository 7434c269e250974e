#include <cctype>
#include <cmath>
#include <cstdlib>
#include <optional>

#include "pulsefal/stl.hpp"

namespace pulsefal::stl {

ParseError::ParseError(const std::string& msg, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Ident, Number, LParen, RParen, LBracket, RBracket, Comma, Plus, Minus, Star, Slash, Cmp, Arrow, End };

struct Token {
    Tok kind;
    std::string text;
    double number = 0.0;
    Comparator cmp = Comparator::Less;
    std::size_t offset = 0;
};

// Offset-tagged failure used internally so alternatives can be compared.
struct Failure {
    std::string message;
    std::size_t offset;
};

bool is_keyword(const std::string& s) {
    return s == "not" || s == "and" || s == "or" || s == "alw" || s == "ev" || s == "G" || s == "F" || s == "U";
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            Token t;
            t.offset = pos_;
            if (pos_ >= src_.size()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            const char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = pos_;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                    ++pos_;
                t.kind = Tok::Ident;
                t.text = std::string(src_.substr(start, pos_ - start));
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                lex_number(t);
            } else {
                lex_symbol(t);
            }
            out.push_back(std::move(t));
        }
    }

private:
    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    void lex_number(Token& t) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            } else {
                pos_ = save;
            }
        }
        t.kind = Tok::Number;
        t.text = std::string(src_.substr(start, pos_ - start));
        char* end = nullptr;
        t.number = std::strtod(t.text.c_str(), &end);
        if (end != t.text.c_str() + t.text.size()) throw Failure{"malformed number '" + t.text + "'", start};
    }

    void lex_symbol(Token& t) {
        const char c = src_[pos_];
        const char next = pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0';
        t.text = std::string(1, c);
        ++pos_;
        switch (c) {
            case '(': t.kind = Tok::LParen; return;
            case ')': t.kind = Tok::RParen; return;
            case '[': t.kind = Tok::LBracket; return;
            case ']': t.kind = Tok::RBracket; return;
            case ',': t.kind = Tok::Comma; return;
            case '+': t.kind = Tok::Plus; return;
            case '*': t.kind = Tok::Star; return;
            case '/': t.kind = Tok::Slash; return;
            case '-':
                if (next == '>') {
                    ++pos_;
                    t.kind = Tok::Arrow;
                    t.text = "->";
                } else {
                    t.kind = Tok::Minus;
                }
                return;
            case '<':
            case '>':
                t.kind = Tok::Cmp;
                if (next == '=') {
                    ++pos_;
                    t.text += "=";
                    t.cmp = c == '<' ? Comparator::LessEq : Comparator::GreaterEq;
                } else {
                    t.cmp = c == '<' ? Comparator::Less : Comparator::Greater;
                }
                return;
            default: throw Failure{"unexpected character '" + t.text + "'", pos_ - 1};
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Formula parse_all() {
        Formula f = parse_implies();
        if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' after formula");
        return f;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool at_ident(const char* word) const { return peek().kind == Tok::Ident && peek().text == word; }

    [[noreturn]] void fail(const std::string& msg) const { throw Failure{msg, peek().offset}; }

    void expect(Tok kind, const char* what) {
        if (peek().kind != kind) fail(std::string("expected ") + what + ", found '" + describe(peek()) + "'");
        take();
    }

    static std::string describe(const Token& t) { return t.kind == Tok::End ? "end of input" : t.text; }

    Formula parse_implies() {
        Formula lhs = parse_or();
        if (peek().kind == Tok::Arrow) {
            take();
            return implies(std::move(lhs), parse_implies());
        }
        return lhs;
    }

    Formula parse_or() {
        std::vector<Formula> parts{parse_and()};
        while (at_ident("or")) {
            take();
            parts.push_back(parse_and());
        }
        return disjunction(std::move(parts));
    }

    Formula parse_and() {
        std::vector<Formula> parts{parse_unary()};
        while (at_ident("and")) {
            take();
            parts.push_back(parse_unary());
        }
        return conjunction(std::move(parts));
    }

    Formula parse_unary() {
        if (at_ident("not")) {
            take();
            return negation(parse_unary());
        }
        if (at_ident("alw") || at_ident("G")) {
            take();
            Interval iv = parse_interval();
            return always(iv, parse_unary());
        }
        if (at_ident("ev") || at_ident("F")) {
            take();
            Interval iv = parse_interval();
            return eventually(iv, parse_unary());
        }
        return parse_primary();
    }

    Interval parse_interval() {
        expect(Tok::LBracket, "'['");
        const std::size_t at = peek().offset;
        Interval iv;
        iv.lo = parse_bound();
        expect(Tok::Comma, "','");
        iv.hi = parse_bound();
        expect(Tok::RBracket, "']'");
        if (iv.lo > iv.hi) throw Failure{"malformed interval: lower bound exceeds upper bound", at};
        return iv;
    }

    double parse_bound() {
        if (peek().kind != Tok::Number) fail("interval bound must be a non-negative number");
        return take().number;
    }

    Formula parse_primary() {
        const std::size_t start = pos_;
        std::optional<Failure> atom_failure;
        try {
            return parse_atom();
        } catch (const Failure& f) {
            atom_failure = f;
        }
        pos_ = start;
        if (peek().kind != Tok::LParen) throw *atom_failure;
        try {
            take();
            Formula inner = parse_implies();
            if (at_ident("U")) {
                take();
                Interval iv = parse_interval();
                Formula rhs = parse_implies();
                expect(Tok::RParen, "')'");
                return until(iv, std::move(inner), std::move(rhs));
            }
            expect(Tok::RParen, "')'");
            return inner;
        } catch (const Failure& f) {
            throw f.offset >= atom_failure->offset ? f : *atom_failure;
        }
    }

    Formula parse_atom() {
        Affine lhs = parse_expr();
        if (peek().kind != Tok::Cmp) fail("expected comparison operator, found '" + describe(peek()) + "'");
        const Comparator cmp = take().cmp;
        Affine rhs = parse_expr();
        for (const auto& [name, coef] : rhs.terms) lhs.terms[name] -= coef;
        lhs.constant -= rhs.constant;
        std::erase_if(lhs.terms, [](const auto& kv) { return kv.second == 0.0; });
        return atom(std::move(lhs), cmp);
    }

    Affine parse_expr() {
        Affine acc = parse_term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const double sign = take().kind == Tok::Plus ? 1.0 : -1.0;
            Affine rhs = parse_term();
            acc.constant += sign * rhs.constant;
            for (const auto& [name, coef] : rhs.terms) acc.terms[name] += sign * coef;
        }
        return acc;
    }

    Affine parse_term() {
        Affine acc = parse_factor();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            const bool divide = take().kind == Tok::Slash;
            const std::size_t at = peek().offset;
            Affine rhs = parse_factor();
            if (divide) {
                if (!rhs.is_constant()) throw Failure{"division by a signal is not affine", at};
                if (rhs.constant == 0.0) throw Failure{"division by zero", at};
                scale(acc, 1.0 / rhs.constant);
            } else if (acc.is_constant()) {
                scale(rhs, acc.constant);
                acc = std::move(rhs);
            } else if (rhs.is_constant()) {
                scale(acc, rhs.constant);
            } else {
                throw Failure{"product of signals is not affine", at};
            }
        }
        return acc;
    }

    static void scale(Affine& a, double s) {
        a.constant *= s;
        for (auto& [name, coef] : a.terms) coef *= s;
    }

    Affine parse_factor() {
        const Token& t = peek();
        Affine a;
        switch (t.kind) {
            case Tok::Minus:
                take();
                a = parse_factor();
                scale(a, -1.0);
                return a;
            case Tok::Plus: take(); return parse_factor();
            case Tok::Number: a.constant = take().number; return a;
            case Tok::Ident:
                if (is_keyword(t.text)) fail("unexpected operator '" + t.text + "'");
                a.terms[take().text] = 1.0;
                return a;
            case Tok::LParen: {
                take();
                a = parse_expr();
                expect(Tok::RParen, "')'");
                return a;
            }
            default: fail("unexpected '" + describe(t) + "'");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

Formula parse(std::string_view text) {
    try {
        bool blank = true;
        for (char c : text) blank = blank && std::isspace(static_cast<unsigned char>(c));
        if (blank) throw Failure{"empty specification", 0};
        for (std::size_t i = 0; i < text.size(); ++i)
            if (static_cast<unsigned char>(text[i]) > 127) throw Failure{"non-ASCII character", i};
        Parser p(Lexer(text).run());
        return p.parse_all();
    } catch (const Failure& f) {
        auto [line, col] = line_col(text, f.offset);
        throw ParseError(f.message, line, col);
    }
}

}  // namespace pulsefal::stl
