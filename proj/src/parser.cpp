#include "fmalg/opalg.hpp"

#include <cassert>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <vector>

namespace fmalg {

ParseError::ParseError(std::size_t position, const std::string& expected_,
                       const std::string& found)
    : std::runtime_error("parse error at offset " + std::to_string(position) +
                         ": expected " + expected_ + ", found " + found),
      position(position),
      expected(expected_) {}

namespace {

enum class Tok { plus, minus, star, lparen, rparen, number, imag, op, end };

struct Token {
    Tok kind;
    std::size_t pos;
    double value = 0;   // number
    int mode = 0;       // op
    bool dagger = false;
    std::string text;
};

const char* tok_name(Tok t) {
    switch (t) {
        case Tok::plus: return "'+'";
        case Tok::minus: return "'-'";
        case Tok::star: return "'*'";
        case Tok::lparen: return "'('";
        case Tok::rparen: return "')'";
        case Tok::number: return "number";
        case Tok::imag: return "'i'";
        case Tok::op: return "operator";
        case Tok::end: return "end of input";
    }
    return "?";
}

std::vector<Token> lex(std::string_view text) {
    std::vector<Token> out;
    std::size_t k = 0;
    while (k < text.size()) {
        const char c = text[k];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++k;
            continue;
        }
        const std::size_t start = k;
        switch (c) {
            case '+': out.push_back({Tok::plus, start}); ++k; continue;
            case '-': out.push_back({Tok::minus, start}); ++k; continue;
            case '*': out.push_back({Tok::star, start}); ++k; continue;
            case '(': out.push_back({Tok::lparen, start}); ++k; continue;
            case ')': out.push_back({Tok::rparen, start}); ++k; continue;
            case 'i': out.push_back({Tok::imag, start}); ++k; continue;
            default: break;
        }
        if (c == 'a' || c == 'A') {
            std::size_t j = k + 1;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j == k + 1)
                throw ParseError(k + 1, "mode index after '" + std::string(1, c) + "'",
                                 j < text.size() ? "'" + std::string(1, text[j]) + "'"
                                                 : "end of input");
            int mode = 0;
            std::from_chars(text.data() + k + 1, text.data() + j, mode);
            if (mode < 1)
                throw ParseError(k + 1, "mode index >= 1", "0");
            Token t{Tok::op, start};
            t.mode = mode;
            t.dagger = (c == 'A');
            out.push_back(t);
            k = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double value = 0;
            auto [ptr, ec] =
                std::from_chars(text.data() + k, text.data() + text.size(), value);
            if (ec != std::errc{})
                throw ParseError(k, "numeric literal", std::string(1, c));
            Token t{Tok::number, start};
            t.value = value;
            t.text = std::string(text.substr(k, static_cast<std::size_t>(ptr - (text.data() + k))));
            out.push_back(t);
            k = static_cast<std::size_t>(ptr - text.data());
            continue;
        }
        throw ParseError(k, "operator, literal, '(' or sign", "'" + std::string(1, c) + "'");
    }
    out.push_back({Tok::end, text.size()});
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    OperatorPoly run() {
        OperatorPoly p = parse_expr();
        expect(Tok::end);
        return p;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& advance() { return toks_[pos_++]; }
    bool accept(Tok t) {
        if (peek().kind != t) return false;
        ++pos_;
        return true;
    }
    void expect(Tok t) {
        if (peek().kind != t)
            throw ParseError(peek().pos, tok_name(t), tok_name(peek().kind));
        ++pos_;
    }

    OperatorPoly parse_expr() {
        // one optional sign before the first term
        double sign = 1;
        if (accept(Tok::minus)) sign = -1;
        else accept(Tok::plus);
        OperatorPoly p = parse_term() * cplx{sign, 0};
        for (;;) {
            if (accept(Tok::plus)) p += parse_term();
            else if (accept(Tok::minus)) p -= parse_term();
            else break;
        }
        return p;
    }

    OperatorPoly parse_term() {
        OperatorPoly p = parse_factor();
        while (accept(Tok::star)) p = p * parse_factor();
        return p;
    }

    OperatorPoly parse_factor() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::op: {
                advance();
                return t.dagger ? OperatorPoly::create(t.mode)
                                : OperatorPoly::annihilate(t.mode);
            }
            case Tok::number: {
                advance();
                if (accept(Tok::imag)) return OperatorPoly::scalar(cplx{0, t.value});
                return OperatorPoly::scalar(cplx{t.value, 0});
            }
            case Tok::lparen: {
                // '(' FLOAT ('+'|'-') FLOAT 'i' ')' is a complex literal;
                // anything else after '(' is a parenthesized expression.
                if (auto lit = try_complex_literal()) return OperatorPoly::scalar(*lit);
                expect(Tok::lparen);
                OperatorPoly p = parse_expr();
                expect(Tok::rparen);
                return p;
            }
            default:
                throw ParseError(t.pos, "operator, literal or '('", tok_name(t.kind));
        }
    }

    std::optional<cplx> try_complex_literal() {
        const std::size_t save = pos_;
        auto fail = [&]() -> std::optional<cplx> {
            pos_ = save;
            return std::nullopt;
        };
        if (!accept(Tok::lparen)) return fail();
        double re_sign = 1;
        if (accept(Tok::minus)) re_sign = -1;
        else accept(Tok::plus);
        if (peek().kind != Tok::number) return fail();
        const double re = re_sign * advance().value;
        double im_sign;
        if (accept(Tok::plus)) im_sign = 1;
        else if (accept(Tok::minus)) im_sign = -1;
        else return fail();
        if (peek().kind != Tok::number) return fail();
        const double im = im_sign * advance().value;
        if (!accept(Tok::imag)) return fail();
        if (!accept(Tok::rparen)) return fail();
        return cplx{re, im};
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

std::string fmt(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    assert(ec == std::errc{});
    return std::string(buf, ptr);
}

std::string mono_text(const FactorList& ascending) {
    std::string s;
    for (std::size_t k = 0; k < ascending.size(); ++k) {
        if (k) s += '*';
        s += ascending[k].dagger ? 'A' : 'a';
        s += std::to_string(ascending[k].mode);
    }
    return s;
}

} // namespace

OperatorPoly parse(std::string_view text) {
    return Parser(lex(text)).run();
}

std::string to_string(const OperatorPoly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [stored, coeff] : p.terms()) {
        // emit both blocks with ascending modes; reversing the annihilator
        // block flips the sign by its transposition parity
        FactorList ascending;
        std::size_t n_ann = 0;
        for (const Factor& f : stored)
            if (!f.dagger) ++n_ann;
        ascending.assign(stored.begin(), stored.end() - static_cast<std::ptrdiff_t>(n_ann));
        ascending.insert(ascending.end(), stored.rbegin(),
                         stored.rbegin() + static_cast<std::ptrdiff_t>(n_ann));
        const bool flip = (n_ann * (n_ann - 1) / 2) % 2 == 1;
        cplx c = flip ? -coeff : coeff;

        std::string piece;
        bool negative = false;
        const std::string factors = mono_text(ascending);
        if (c.imag() == 0.0) {
            negative = c.real() < 0;
            const double mag = std::abs(c.real());
            if (factors.empty()) piece = fmt(mag);
            else if (mag == 1.0) piece = factors;
            else piece = fmt(mag) + "*" + factors;
        } else if (c.real() == 0.0) {
            negative = c.imag() < 0;
            piece = fmt(std::abs(c.imag())) + "i";
            if (!factors.empty()) piece += "*" + factors;
        } else {
            piece = "(" + fmt(c.real()) + (c.imag() < 0 ? "-" : "+") +
                    fmt(std::abs(c.imag())) + "i)";
            if (!factors.empty()) piece += "*" + factors;
        }

        if (first) {
            if (negative) out += "-";
            out += piece;
            first = false;
        } else {
            out += negative ? " - " : " + ";
            out += piece;
        }
    }
    return out;
}

} // namespace fmalg
