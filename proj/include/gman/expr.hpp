#pragma once
#include <cctype>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "gman/chart.hpp"
#include "gman/errors.hpp"
#include "gman/field.hpp"

namespace gman {

// Immutable scalar-expression AST: literals, coordinates, + - * /, unary
// minus, integer '^', and {sin, cos, exp, log, sqrt}. Depth capped at 64.
struct Expr {
    enum class Kind { Literal, Coord, Add, Sub, Mul, Div, Neg, Pow, Func };
    Kind kind;
    double literal = 0.0;
    int coord = -1;       // index into the coordinate-name list
    std::string name;     // coordinate or function name
    int exponent = 0;     // Pow
    std::shared_ptr<const Expr> lhs, rhs;
};

using ExprPtr = std::shared_ptr<const Expr>;

namespace detail {

constexpr int kMaxDepth = 64;

inline bool is_func_name(const std::string& s) {
    return s == "sin" || s == "cos" || s == "exp" || s == "log" || s == "sqrt";
}

struct Parser {
    const std::string& text;
    const std::vector<std::string>& names;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    ExprPtr parse_expr(int depth) {
        if (depth > kMaxDepth) throw ParseError("expression nesting exceeds depth 64", pos);
        auto node = parse_term(depth + 1);
        while (true) {
            char c = peek();
            if (c != '+' && c != '-') break;
            ++pos;
            auto rhs = parse_term(depth + 1);
            auto e = std::make_shared<Expr>();
            e->kind = c == '+' ? Expr::Kind::Add : Expr::Kind::Sub;
            e->lhs = node;
            e->rhs = rhs;
            node = e;
        }
        return node;
    }

    ExprPtr parse_term(int depth) {
        if (depth > kMaxDepth) throw ParseError("expression nesting exceeds depth 64", pos);
        auto node = parse_factor(depth + 1);
        while (true) {
            char c = peek();
            if (c != '*' && c != '/') break;
            ++pos;
            auto rhs = parse_factor(depth + 1);
            auto e = std::make_shared<Expr>();
            e->kind = c == '*' ? Expr::Kind::Mul : Expr::Kind::Div;
            e->lhs = node;
            e->rhs = rhs;
            node = e;
        }
        return node;
    }

    ExprPtr parse_factor(int depth) {
        if (depth > kMaxDepth) throw ParseError("expression nesting exceeds depth 64", pos);
        char c = peek();
        ExprPtr node;
        if (c == '-') {
            ++pos;
            auto inner = parse_factor(depth + 1);
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::Neg;
            e->lhs = inner;
            node = e;
        } else if (c == '(') {
            ++pos;
            node = parse_expr(depth + 1);
            if (peek() != ')') throw ParseError("expected ')'", pos);
            ++pos;
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            node = parse_number();
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            node = parse_ident(depth);
        } else {
            throw ParseError(std::string("unexpected character '") + (c ? std::string(1, c) : "end") + "'", pos);
        }
        while (peek() == '^') {
            ++pos;
            int expo = parse_int();
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::Pow;
            e->lhs = node;
            e->exponent = expo;
            node = e;
        }
        return node;
    }

    ExprPtr parse_number() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.' || text[pos] == 'e' ||
                text[pos] == 'E' ||
                ((text[pos] == '+' || text[pos] == '-') && pos > start &&
                 (text[pos - 1] == 'e' || text[pos - 1] == 'E'))))
            ++pos;
        try {
            size_t used = 0;
            double v = std::stod(text.substr(start, pos - start), &used);
            if (used != pos - start) throw std::invalid_argument("trailing");
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::Literal;
            e->literal = v;
            return e;
        } catch (const std::exception&) {
            throw ParseError("malformed number", start);
        }
    }

    int parse_int() {
        skip_ws();
        size_t start = pos;
        if (peek() == '-') ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start || (text[start] == '-' && pos == start + 1))
            throw ParseError("'^' requires an integer exponent", start);
        try {
            return std::stoi(text.substr(start, pos - start));
        } catch (const std::exception&) {
            throw ParseError("integer exponent out of range", start);
        }
    }

    ExprPtr parse_ident(int depth) {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string id = text.substr(start, pos - start);
        if (is_func_name(id)) {
            if (peek() != '(') throw ParseError("expected '(' after function name", pos);
            ++pos;
            auto arg = parse_expr(depth + 1);
            if (peek() != ')') throw ParseError("expected ')'", pos);
            ++pos;
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::Func;
            e->name = id;
            e->lhs = arg;
            return e;
        }
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == id) {
                auto e = std::make_shared<Expr>();
                e->kind = Expr::Kind::Coord;
                e->coord = static_cast<int>(i);
                e->name = id;
                return e;
            }
        throw ParseError("unknown identifier '" + id + "'", start);
    }
};

} // namespace detail

inline ExprPtr parse(const std::string& text, const std::vector<std::string>& coord_names) {
    if (text.empty()) throw ParseError("empty expression", 0);
    detail::Parser p{text, coord_names};
    auto e = p.parse_expr(0);
    p.skip_ws();
    if (p.pos != text.size()) throw ParseError("trailing input", p.pos);
    return e;
}

// Fully parenthesized canonical form; parse(print(e)) is structurally
// equal to e.
inline std::string print_expr(const ExprPtr& e) {
    std::ostringstream os;
    switch (e->kind) {
    case Expr::Kind::Literal: {
        os.precision(17);
        os << e->literal;
        break;
    }
    case Expr::Kind::Coord: os << e->name; break;
    case Expr::Kind::Add: os << "(" << print_expr(e->lhs) << "+" << print_expr(e->rhs) << ")"; break;
    case Expr::Kind::Sub: os << "(" << print_expr(e->lhs) << "-" << print_expr(e->rhs) << ")"; break;
    case Expr::Kind::Mul: os << "(" << print_expr(e->lhs) << "*" << print_expr(e->rhs) << ")"; break;
    case Expr::Kind::Div: os << "(" << print_expr(e->lhs) << "/" << print_expr(e->rhs) << ")"; break;
    case Expr::Kind::Neg: os << "(-" << print_expr(e->lhs) << ")"; break;
    case Expr::Kind::Pow: os << print_expr(e->lhs) << "^" << e->exponent; break;
    case Expr::Kind::Func: os << e->name << "(" << print_expr(e->lhs) << ")"; break;
    }
    return os.str();
}

inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case Expr::Kind::Literal: return a->literal == b->literal;
    case Expr::Kind::Coord: return a->coord == b->coord;
    case Expr::Kind::Neg:
    case Expr::Kind::Func:
        return a->name == b->name && expr_equal(a->lhs, b->lhs);
    case Expr::Kind::Pow: return a->exponent == b->exponent && expr_equal(a->lhs, b->lhs);
    default: return expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs);
    }
}

namespace detail {

inline Jet eval_expr(const Expr& e, std::span<const Jet> coords) {
    switch (e.kind) {
    case Expr::Kind::Literal: return Jet(coords[0].space(), e.literal);
    case Expr::Kind::Coord: return coords[e.coord];
    case Expr::Kind::Add: return eval_expr(*e.lhs, coords) + eval_expr(*e.rhs, coords);
    case Expr::Kind::Sub: return eval_expr(*e.lhs, coords) - eval_expr(*e.rhs, coords);
    case Expr::Kind::Mul: return eval_expr(*e.lhs, coords) * eval_expr(*e.rhs, coords);
    case Expr::Kind::Div: return eval_expr(*e.lhs, coords) / eval_expr(*e.rhs, coords);
    case Expr::Kind::Neg: return -eval_expr(*e.lhs, coords);
    case Expr::Kind::Pow: return powi(eval_expr(*e.lhs, coords), e.exponent);
    case Expr::Kind::Func: {
        Jet a = eval_expr(*e.lhs, coords);
        if (e.name == "sin") return sin(a);
        if (e.name == "cos") return cos(a);
        if (e.name == "exp") return exp(a);
        if (e.name == "log") return log(a);
        return sqrt(a);
    }
    }
    throw Error("eval_expr: unreachable");
}

} // namespace detail

// Expression as a differentiable scalar field; domain violations are
// re-raised with the offending point echoed.
inline ScalarField to_field(const ExprPtr& e, std::shared_ptr<const Chart> chart) {
    return ScalarField{chart, [e, chart](std::span<const Jet> coords) {
                           try {
                               return detail::eval_expr(*e, coords);
                           } catch (const DomainError& err) {
                               std::ostringstream os;
                               os << err.what() << " at point (";
                               for (size_t i = 0; i < coords.size(); ++i)
                                   os << (i ? ", " : "") << chart->names()[i] << "=" << coords[i].value();
                               os << ")";
                               throw DomainError(os.str());
                           }
                       }};
}

} // namespace gman
