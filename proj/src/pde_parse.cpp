#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "mflab/common.hpp"
#include "mflab/pde.hpp"

namespace mflab {

double Expr::eval(double t, double x, double xi) const {
    switch (kind) {
        case Kind::number: return value;
        case Kind::var_t: return t;
        case Kind::var_x: return x;
        case Kind::var_xi: return xi;
        case Kind::add: return a->eval(t, x, xi) + b->eval(t, x, xi);
        case Kind::sub: return a->eval(t, x, xi) - b->eval(t, x, xi);
        case Kind::mul: return a->eval(t, x, xi) * b->eval(t, x, xi);
        case Kind::div: return a->eval(t, x, xi) / b->eval(t, x, xi);
        case Kind::neg: return -a->eval(t, x, xi);
        case Kind::sin: return std::sin(a->eval(t, x, xi));
        case Kind::cos: return std::cos(a->eval(t, x, xi));
        case Kind::exp: return std::exp(a->eval(t, x, xi));
    }
    return 0;
}

bool Expr::uses(Kind k) const {
    if (kind == k) return true;
    if (a && a->uses(k)) return true;
    if (b && b->uses(k)) return true;
    return false;
}

namespace {

std::string fmt_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string serialize_expr(const ExprPtr& e) {
    if (!e) return "(num 0)";
    using K = Expr::Kind;
    switch (e->kind) {
        case K::number: return "(num " + fmt_number(e->value) + ")";
        case K::var_t: return "(t)";
        case K::var_x: return "(x)";
        case K::var_xi: return "(xi)";
        case K::add: return "(add " + serialize_expr(e->a) + " " + serialize_expr(e->b) + ")";
        case K::sub: return "(sub " + serialize_expr(e->a) + " " + serialize_expr(e->b) + ")";
        case K::mul: return "(mul " + serialize_expr(e->a) + " " + serialize_expr(e->b) + ")";
        case K::div: return "(div " + serialize_expr(e->a) + " " + serialize_expr(e->b) + ")";
        case K::neg: return "(neg " + serialize_expr(e->a) + ")";
        case K::sin: return "(sin " + serialize_expr(e->a) + ")";
        case K::cos: return "(cos " + serialize_expr(e->a) + ")";
        case K::exp: return "(exp " + serialize_expr(e->a) + ")";
    }
    return "";
}

bool PdeSpec::is_linear() const {
    for (const ExprPtr& c : coeffs)
        if (c && c->uses(Expr::Kind::var_xi)) return false;
    return true;
}

bool PdeSpec::is_constant_coefficient() const {
    for (const ExprPtr& c : coeffs)
        if (c && (c->uses(Expr::Kind::var_x) || c->uses(Expr::Kind::var_t) ||
                  c->uses(Expr::Kind::var_xi)))
            return false;
    return true;
}

double PdeSpec::coeff_eval(std::size_t l, double t, double x, double xi) const {
    if (l >= coeffs.size() || !coeffs[l]) return 0.0;
    return coeffs[l]->eval(t, x, xi);
}

std::string PdeSpec::serialize() const {
    std::string out = "order " + std::to_string(p) + "\n";
    out += std::string("domain ") + (domain == PdeDomain::torus ? "torus" : "interval") + "\n";
    for (std::size_t l = 0; l <= p; ++l)
        out += "a[" + std::to_string(l) + "] " + serialize_expr(l < coeffs.size() ? coeffs[l] : nullptr) + "\n";
    return out;
}

namespace {

struct Token {
    enum class Type { number, ident, symbol, end };
    Type type = Type::end;
    double num = 0;
    std::string text;
    std::size_t pos = 0;
};

class Lexer {
  public:
    explicit Lexer(const std::string& s) : s_(s) { advance(); }
    const Token& tok() const { return cur_; }
    const Token& peek() {
        if (!has_peek_) {
            peek_ = lex();
            has_peek_ = true;
        }
        return peek_;
    }
    const Token& peek2() {
        peek();
        if (!has_peek2_) {
            peek2_ = lex();
            has_peek2_ = true;
        }
        return peek2_;
    }
    void advance() {
        if (has_peek_) {
            cur_ = peek_;
            peek_ = peek2_;
            has_peek_ = has_peek2_;
            has_peek2_ = false;
        } else {
            cur_ = lex();
        }
    }

  private:
    Token lex() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
        Token t;
        t.pos = i_;
        if (i_ >= s_.size()) {
            t.type = Token::Type::end;
            return t;
        }
        char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i_ + 1 < s_.size() &&
             std::isdigit(static_cast<unsigned char>(s_[i_ + 1])))) {
            const char* start = s_.c_str() + i_;
            char* end = nullptr;
            t.num = std::strtod(start, &end);
            t.text = std::string(start, static_cast<const char*>(end));
            i_ += static_cast<std::size_t>(end - start);
            t.type = Token::Type::number;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_'))
                ++j;
            t.text = s_.substr(i_, j - i_);
            i_ = j;
            t.type = Token::Type::ident;
            return t;
        }
        if (std::string("+-*/()^=").find(c) != std::string::npos) {
            t.text = std::string(1, c);
            i_ = i_ + 1;
            t.type = Token::Type::symbol;
            return t;
        }
        throw PdeParseError(i_, std::string("unexpected character '") + c + "'");
    }

    std::string s_;
    std::size_t i_ = 0;
    Token cur_, peek_, peek2_;
    bool has_peek_ = false, has_peek2_ = false;
};

ExprPtr make(Expr::Kind k, double v = 0, ExprPtr a = nullptr, ExprPtr b = nullptr) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->value = v;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}

class Parser {
  public:
    explicit Parser(const std::string& text) : lx_(text) {}

    PdeSpec parse(PdeDomain domain) {
        expect_ident("dt");
        expect_ident("y");
        expect_symbol("=");
        PdeSpec spec;
        spec.domain = domain;
        while (true) {
            parse_term(spec);
            if (is_symbol("+")) {
                lx_.advance();
                continue;
            }
            break;
        }
        if (lx_.tok().type != Token::Type::end)
            throw PdeParseError(lx_.tok().pos,
                                "expected '+' or end of input, got '" + tok_text() + "'");
        return spec;
    }

  private:
    std::string tok_text() const {
        return lx_.tok().type == Token::Type::end ? "end of input" : lx_.tok().text;
    }

    bool is_symbol(const std::string& s) const {
        return lx_.tok().type == Token::Type::symbol && lx_.tok().text == s;
    }
    bool is_ident(const std::string& s) const {
        return lx_.tok().type == Token::Type::ident && lx_.tok().text == s;
    }
    void expect_symbol(const std::string& s) {
        if (!is_symbol(s))
            throw PdeParseError(lx_.tok().pos, "expected '" + s + "', got '" + tok_text() + "'");
        lx_.advance();
    }
    void expect_ident(const std::string& s) {
        if (!is_ident(s))
            throw PdeParseError(lx_.tok().pos, "expected '" + s + "', got '" + tok_text() + "'");
        lx_.advance();
    }

    void add_coeff(PdeSpec& spec, std::size_t order, ExprPtr coeff) {
        if (spec.coeffs.size() <= order) spec.coeffs.resize(order + 1);
        spec.coeffs[order] =
            spec.coeffs[order] ? make(Expr::Kind::add, 0, spec.coeffs[order], coeff) : coeff;
        spec.p = std::max(spec.p, order);
    }

    // target := "y" | "dx" ["^" INT] "y"; returns the derivative order
    std::size_t parse_target() {
        if (is_ident("y")) {
            lx_.advance();
            return 0;
        }
        if (!is_ident("dx"))
            throw PdeParseError(lx_.tok().pos,
                                "expected derivative target 'dx^k y' or 'y', got '" +
                                    tok_text() + "'");
        lx_.advance();
        std::size_t order = 1;
        if (is_symbol("^")) {
            lx_.advance();
            if (lx_.tok().type != Token::Type::number ||
                lx_.tok().num != std::floor(lx_.tok().num))
                throw PdeParseError(lx_.tok().pos, "expected an integer derivative order");
            order = static_cast<std::size_t>(lx_.tok().num);
            if (order > 4)
                throw PdeParseError(lx_.tok().pos, "derivative order " +
                                                       std::to_string(order) +
                                                       " exceeds the maximum 4");
            lx_.advance();
        }
        expect_ident("y");
        return order;
    }

    void parse_term(PdeSpec& spec) {
        // a bare leading y is always the zeroth-derivative target
        if (is_ident("y")) {
            lx_.advance();
            add_coeff(spec, 0, make(Expr::Kind::number, 1.0));
            return;
        }
        if (is_ident("dx")) {
            std::size_t order = parse_target();
            add_coeff(spec, order, make(Expr::Kind::number, 1.0));
            return;
        }
        ExprPtr coeff = parse_product(true);
        expect_symbol("*");
        std::size_t order = parse_target();
        add_coeff(spec, order, coeff);
    }

    // true when the '*' under the cursor separates the coefficient from the
    // derivative target
    bool star_is_separator() {
        const Token& nxt = lx_.peek();
        if (nxt.type != Token::Type::ident) return false;
        if (nxt.text == "dx") return true;
        if (nxt.text == "y") {
            const Token& after = lx_.peek2();
            if (after.type == Token::Type::end) return true;
            if (after.type == Token::Type::symbol && after.text == "+") return true;
        }
        return false;
    }

    ExprPtr parse_expression() {
        ExprPtr left = parse_product(false);
        while (is_symbol("+") || is_symbol("-")) {
            bool plus = lx_.tok().text == "+";
            lx_.advance();
            ExprPtr right = parse_product(false);
            left = make(plus ? Expr::Kind::add : Expr::Kind::sub, 0, left, right);
        }
        return left;
    }

    ExprPtr parse_product(bool top_level) {
        ExprPtr left = parse_unary(top_level);
        while (is_symbol("*") || is_symbol("/")) {
            bool mul = lx_.tok().text == "*";
            if (mul && top_level && star_is_separator()) break;
            lx_.advance();
            ExprPtr right = parse_unary(top_level);
            left = make(mul ? Expr::Kind::mul : Expr::Kind::div, 0, left, right);
        }
        return left;
    }

    ExprPtr parse_unary(bool top_level) {
        if (is_symbol("-")) {
            lx_.advance();
            return make(Expr::Kind::neg, 0, parse_unary(top_level));
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        const Token& t = lx_.tok();
        if (t.type == Token::Type::number) {
            double v = t.num;
            lx_.advance();
            return make(Expr::Kind::number, v);
        }
        if (t.type == Token::Type::symbol && t.text == "(") {
            lx_.advance();
            ExprPtr e = parse_expression();
            expect_symbol(")");
            return e;
        }
        if (t.type == Token::Type::ident) {
            std::string name = t.text;
            std::size_t pos = t.pos;
            if (name == "t" || name == "x" || name == "y" || name == "pi") {
                lx_.advance();
                if (name == "t") return make(Expr::Kind::var_t);
                if (name == "x") return make(Expr::Kind::var_x);
                if (name == "y") return make(Expr::Kind::var_xi);
                return make(Expr::Kind::number, 3.14159265358979323846);
            }
            if (name == "sin" || name == "cos" || name == "exp") {
                lx_.advance();
                expect_symbol("(");
                ExprPtr arg = parse_expression();
                expect_symbol(")");
                if (name == "sin") return make(Expr::Kind::sin, 0, arg);
                if (name == "cos") return make(Expr::Kind::cos, 0, arg);
                return make(Expr::Kind::exp, 0, arg);
            }
            throw PdeParseError(pos, "unknown identifier '" + name + "'");
        }
        throw PdeParseError(t.pos, "expected a coefficient expression, got '" + tok_text() + "'");
    }

    Lexer lx_;
};

void check_interval_vanishing(const PdeSpec& spec) {
    CounterRng rng(9001);
    for (std::size_t l = 1; l <= spec.p; ++l) {
        if (l >= spec.coeffs.size() || !spec.coeffs[l]) continue;
        for (int s = 0; s < 64; ++s) {
            double t = rng.uniform(0.0, 1.0);
            double xi = rng.uniform(-1.0, 1.0);
            for (double x : {0.0, 1.0})
                if (std::fabs(spec.coeffs[l]->eval(t, x, xi)) > 1e-10)
                    throw std::invalid_argument(
                        "parse_pde: on the interval domain the coefficients of "
                        "dx^" + std::to_string(l) + " y must vanish at x = 0 and x = 1");
        }
    }
}

}  // namespace

PdeSpec parse_pde(const std::string& text, PdeDomain domain) {
    Parser parser(text);
    PdeSpec spec = parser.parse(domain);
    if (spec.coeffs.size() < spec.p + 1) spec.coeffs.resize(spec.p + 1);
    if (domain == PdeDomain::interval) check_interval_vanishing(spec);
    return spec;
}

}  // namespace mflab
