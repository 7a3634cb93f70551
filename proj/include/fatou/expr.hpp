#pragma once

// Expression language for holomorphic functions of z.
//
// Grammar (whitespace-insensitive, no implicit multiplication):
//   expr   := term  { ('+'|'-') term }
//   term   := factor { ('*'|'/') factor }
//   factor := '-' factor | power
//   power  := atom [ '^' factor ]            (right-associative, '^' binds tighter than unary '-')
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//
// Functions: sin cos tan exp log sinh cosh.  Constants: pi, e, i.
// Integer or index-variable exponents are evaluated by repeated squaring
// (entire, no branch cut); anything else uses the principal branch
// exp(w*log z).

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fatou {

using Complex = std::complex<double>;

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class EvalError : public std::runtime_error {
public:
    explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

enum class Func : std::uint8_t { Sin, Cos, Tan, Exp, Log, Sinh, Cosh };

inline const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Tan: return "tan";
        case Func::Exp: return "exp";
        case Func::Log: return "log";
        case Func::Sinh: return "sinh";
        case Func::Cosh: return "cosh";
    }
    return "?";
}

enum class NodeKind : std::uint8_t { Literal, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    NodeKind kind = NodeKind::Literal;
    Complex value{};              // Literal
    bool int_literal = false;     // Literal was a bare integer token
    std::string name;             // Variable
    Func func = Func::Sin;        // Call
    bool int_exponent = false;    // Pow: exponent is a syntactic integer or a variable
    ExprPtr lhs, rhs;             // Negate/Call use lhs only
};

inline ExprPtr make_literal(Complex v, bool is_int = false) {
    auto e = std::make_shared<Expr>();
    e->kind = NodeKind::Literal;
    e->value = v;
    e->int_literal = is_int;
    return e;
}

inline ExprPtr make_variable(std::string name) {
    auto e = std::make_shared<Expr>();
    e->kind = NodeKind::Variable;
    e->name = std::move(name);
    return e;
}

inline ExprPtr make_unary(NodeKind k, ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->lhs = std::move(a);
    return e;
}

inline ExprPtr make_binary(NodeKind k, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    if (k == NodeKind::Pow) {
        const Expr& x = *e->rhs;
        e->int_exponent = (x.kind == NodeKind::Literal && x.int_literal) ||
                          x.kind == NodeKind::Variable;
    }
    return e;
}

inline ExprPtr make_call(Func f, ExprPtr arg) {
    auto e = std::make_shared<Expr>();
    e->kind = NodeKind::Call;
    e->func = f;
    e->lhs = std::move(arg);
    return e;
}

inline bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case NodeKind::Literal:
            return a->value == b->value && a->int_literal == b->int_literal;
        case NodeKind::Variable:
            return a->name == b->name;
        case NodeKind::Negate:
            return structurally_equal(a->lhs, b->lhs);
        case NodeKind::Call:
            return a->func == b->func && structurally_equal(a->lhs, b->lhs);
        case NodeKind::Pow:
            if (a->int_exponent != b->int_exponent) return false;
            [[fallthrough]];
        default:
            return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
    }
}

inline void collect_free_variables(const ExprPtr& e, std::set<std::string>& out) {
    if (!e) return;
    if (e->kind == NodeKind::Variable) out.insert(e->name);
    collect_free_variables(e->lhs, out);
    collect_free_variables(e->rhs, out);
}

inline std::set<std::string> free_variables(const ExprPtr& e) {
    std::set<std::string> out;
    collect_free_variables(e, out);
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline bool is_reserved_name(const std::string& s) {
    static const std::set<std::string> kReserved = {"pi", "e",   "i",   "sin",  "cos",
                                                    "tan", "exp", "log", "sinh", "cosh"};
    return kReserved.count(s) != 0;
}

class Parser {
public:
    Parser(const std::string& text, const std::set<std::string>& vars)
        : text_(text), vars_(vars) {}

    ExprPtr parse() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
        ExprPtr e = expr();
        skip_ws();
        if (pos_ < text_.size())
            throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        return e;
    }

private:
    const std::string& text_;
    const std::set<std::string>& vars_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    int peek() {
        skip_ws();
        return pos_ < text_.size() ? static_cast<unsigned char>(text_[pos_]) : -1;
    }
    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!consume(c))
            throw ParseError(std::string("expected '") + c + "'", pos_);
    }

    ExprPtr expr() {
        ExprPtr lhs = term();
        for (;;) {
            if (consume('+'))
                lhs = make_binary(NodeKind::Add, std::move(lhs), term());
            else if (consume('-'))
                lhs = make_binary(NodeKind::Sub, std::move(lhs), term());
            else
                return lhs;
        }
    }

    ExprPtr term() {
        ExprPtr lhs = factor();
        for (;;) {
            if (consume('*'))
                lhs = make_binary(NodeKind::Mul, std::move(lhs), factor());
            else if (consume('/'))
                lhs = make_binary(NodeKind::Div, std::move(lhs), factor());
            else
                return lhs;
        }
    }

    ExprPtr factor() {
        if (consume('-')) return make_unary(NodeKind::Negate, factor());
        return power();
    }

    ExprPtr power() {
        ExprPtr base = atom();
        if (consume('^')) return make_binary(NodeKind::Pow, std::move(base), factor());
        return base;
    }

    ExprPtr atom() {
        int c = peek();
        if (c < 0) throw ParseError("unexpected end of expression", pos_);
        if (c == '(') {
            ++pos_;
            ExprPtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(c)) return number();
        if (std::isalpha(c) || c == '_') return identifier();
        throw ParseError(std::string("unexpected '") + static_cast<char>(c) + "'", pos_);
    }

    ExprPtr number() {
        std::size_t start = pos_;
        bool has_dot = false, has_exp = false;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            has_dot = true;
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                has_exp = true;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;  // not an exponent; leave the 'e' for the next token
            }
        }
        const std::string tok = text_.substr(start, pos_ - start);
        double v = 0;
        try {
            v = std::stod(tok);
        } catch (const std::exception&) {
            throw ParseError("bad number '" + tok + "'", start);
        }
        bool is_int = !has_dot && !has_exp && std::abs(v) <= 9.007199254740992e15;
        return make_literal(Complex(v, 0.0), is_int);
    }

    ExprPtr identifier() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name = text_.substr(start, pos_ - start);
        if (name == "pi") return make_literal(Complex(M_PI, 0.0));
        if (name == "e") return make_literal(Complex(M_E, 0.0));
        if (name == "i") return make_literal(Complex(0.0, 1.0));
        static const std::map<std::string, Func> kFuncs = {
            {"sin", Func::Sin}, {"cos", Func::Cos},   {"tan", Func::Tan},  {"exp", Func::Exp},
            {"log", Func::Log}, {"sinh", Func::Sinh}, {"cosh", Func::Cosh}};
        auto fit = kFuncs.find(name);
        if (fit != kFuncs.end()) {
            if (peek() != '(')
                throw ParseError("expected '(' after function '" + name + "'", pos_);
            ++pos_;
            ExprPtr arg = expr();
            expect(')');
            return make_call(fit->second, std::move(arg));
        }
        if (vars_.count(name) == 0)
            throw ParseError("unknown identifier '" + name + "'", start);
        return make_variable(name);
    }
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline ExprPtr parse_expression(const std::string& text, const std::set<std::string>& declared_vars) {
    if (declared_vars.empty() || declared_vars.count("z") == 0)
        throw std::invalid_argument("declared variable set must contain 'z'");
    for (const auto& v : declared_vars)
        if (detail::is_reserved_name(v))
            throw std::invalid_argument("variable name '" + v + "' is reserved");
    return detail::Parser(text, declared_vars).parse();
}

// Canonical fully-parenthesized text. parse_expression(format(a)) is
// structurally equal to a for every grammar-expressible tree.
inline std::string format(const ExprPtr& e) {
    if (!e) return "";
    switch (e->kind) {
        case NodeKind::Literal: {
            const Complex v = e->value;
            if (v == Complex(0.0, 1.0)) return "i";
            if (v.imag() == 0.0) {
                if (e->int_literal) return std::to_string(static_cast<long long>(v.real()));
                double re = v.real();
                std::string s = detail::format_double(re);
                if (re == std::rint(re) && std::abs(re) < 9.0e15 &&
                    s.find_first_of(".eE") == std::string::npos)
                    s += ".0";
                return s;
            }
            // Complex-valued literals only arise from hand-built trees.
            return "(" + detail::format_double(v.real()) + "+" + detail::format_double(v.imag()) +
                   "*i)";
        }
        case NodeKind::Variable: return e->name;
        case NodeKind::Negate: return "(-" + format(e->lhs) + ")";
        case NodeKind::Add: return "(" + format(e->lhs) + "+" + format(e->rhs) + ")";
        case NodeKind::Sub: return "(" + format(e->lhs) + "-" + format(e->rhs) + ")";
        case NodeKind::Mul: return "(" + format(e->lhs) + "*" + format(e->rhs) + ")";
        case NodeKind::Div: return "(" + format(e->lhs) + "/" + format(e->rhs) + ")";
        case NodeKind::Pow: return "(" + format(e->lhs) + "^" + format(e->rhs) + ")";
        case NodeKind::Call: return std::string(func_name(e->func)) + "(" + format(e->lhs) + ")";
    }
    return "";
}

// ---------------------------------------------------------------------------
// Jet arithmetic: value plus d/dz, propagated exactly through every op.
// Templated on the scalar so the Nevanlinna integrals can run in long double
// (|e^z| on |z| = 1e4 overflows double but fits comfortably in long double).

template <typename F>
struct JetT {
    std::complex<F> v{};  // value
    std::complex<F> d{};  // derivative with respect to z

    JetT() = default;
    JetT(std::complex<F> value, std::complex<F> deriv) : v(value), d(deriv) {}
    template <typename F2>
    explicit JetT(const std::complex<F2>& value)
        : v(static_cast<F>(value.real()), static_cast<F>(value.imag())), d(0, 0) {}
};

using Jet = JetT<double>;

template <typename F>
JetT<F> operator+(const JetT<F>& a, const JetT<F>& b) {
    return {a.v + b.v, a.d + b.d};
}
template <typename F>
JetT<F> operator-(const JetT<F>& a, const JetT<F>& b) {
    return {a.v - b.v, a.d - b.d};
}
template <typename F>
JetT<F> operator-(const JetT<F>& a) {
    return {-a.v, -a.d};
}
template <typename F>
JetT<F> operator*(const JetT<F>& a, const JetT<F>& b) {
    return {a.v * b.v, a.v * b.d + a.d * b.v};
}

template <typename F>
void check_nonzero_divisor(const std::complex<F>& w) {
    if (w == std::complex<F>(0, 0)) throw EvalError("division by zero");
}

template <typename F>
JetT<F> operator/(const JetT<F>& a, const JetT<F>& b) {
    check_nonzero_divisor(b.v);
    const std::complex<F> q = a.v / b.v;
    return {q, (a.d - q * b.d) / b.v};
}

namespace detail {

template <typename F>
std::complex<F> mul(const std::complex<F>& a, const std::complex<F>& b) {
    return a * b;
}
template <typename F>
std::complex<F> div_checked(const std::complex<F>& a, const std::complex<F>& b) {
    check_nonzero_divisor(b);
    return a / b;
}
template <typename F>
std::complex<F> neg(const std::complex<F>& a) {
    return -a;
}
template <typename F>
JetT<F> neg(const JetT<F>& a) {
    return -a;
}
template <typename F>
JetT<F> mul(const JetT<F>& a, const JetT<F>& b) {
    return a * b;
}
template <typename F>
JetT<F> div_checked(const JetT<F>& a, const JetT<F>& b) {
    return a / b;
}

template <typename F>
std::complex<F> one_value(const std::complex<F>&) {
    return std::complex<F>(1, 0);
}
template <typename F>
JetT<F> one_value(const JetT<F>&) {
    return JetT<F>(std::complex<F>(1, 0), std::complex<F>(0, 0));
}

template <typename F>
std::complex<F> apply_func(Func f, const std::complex<F>& x) {
    switch (f) {
        case Func::Sin: return std::sin(x);
        case Func::Cos: return std::cos(x);
        case Func::Tan: {
            const std::complex<F> c = std::cos(x);
            check_nonzero_divisor(c);
            return std::sin(x) / c;
        }
        case Func::Exp: return std::exp(x);
        case Func::Log:
            if (x == std::complex<F>(0, 0)) throw EvalError("log of zero");
            return std::log(x);
        case Func::Sinh: return std::sinh(x);
        case Func::Cosh: return std::cosh(x);
    }
    return {};
}

template <typename F>
JetT<F> apply_func(Func f, const JetT<F>& x) {
    switch (f) {
        case Func::Sin: return {std::sin(x.v), x.d * std::cos(x.v)};
        case Func::Cos: return {std::cos(x.v), -x.d * std::sin(x.v)};
        case Func::Tan: {
            const std::complex<F> c = std::cos(x.v);
            check_nonzero_divisor(c);
            const std::complex<F> t = std::sin(x.v) / c;
            return {t, x.d / (c * c)};
        }
        case Func::Exp: {
            const std::complex<F> ex = std::exp(x.v);
            return {ex, x.d * ex};
        }
        case Func::Log:
            if (x.v == std::complex<F>(0, 0)) throw EvalError("log of zero");
            return {std::log(x.v), x.d / x.v};
        case Func::Sinh: return {std::sinh(x.v), x.d * std::cosh(x.v)};
        case Func::Cosh: return {std::cosh(x.v), x.d * std::sinh(x.v)};
    }
    return {};
}

template <typename T>
T int_pow(T base, long long n) {
    if (n == 0) return one_value(base);
    if (n < 0) return div_checked(one_value(base), int_pow(base, -n));
    T acc = one_value(base);
    while (n > 0) {
        if (n & 1) acc = mul(acc, base);
        base = mul(base, base);
        n >>= 1;
    }
    return acc;
}

template <typename F>
bool exact_integer(const std::complex<F>& w, long long& out) {
    if (w.imag() != F(0)) return false;
    const F r = w.real();
    if (r != std::rint(r) || std::abs(r) > F(1.0e15)) return false;
    out = static_cast<long long>(r);
    return true;
}

template <typename F>
std::complex<F> pow_value(const std::complex<F>& base, const std::complex<F>& expo) {
    long long n = 0;
    if (exact_integer(expo, n)) return int_pow(base, n);
    if (base == std::complex<F>(0, 0)) throw EvalError("log of zero");
    return std::exp(expo * std::log(base));
}

template <typename F>
JetT<F> pow_value(const JetT<F>& base, const JetT<F>& expo) {
    long long n = 0;
    if (expo.d == std::complex<F>(0, 0) && exact_integer(expo.v, n)) return int_pow(base, n);
    if (base.v == std::complex<F>(0, 0)) throw EvalError("log of zero");
    const JetT<F> lg{std::log(base.v), base.d / base.v};
    return apply_func(Func::Exp, expo * lg);
}

// Seeds: z maps to (z, 1) for jets, to itself for plain values.
template <typename T>
struct Seed;
template <typename F>
struct Seed<std::complex<F>> {
    static std::complex<F> make(const std::complex<F>& z) { return z; }
};
template <typename F>
struct Seed<JetT<F>> {
    static JetT<F> make(const std::complex<F>& z) {
        return {z, std::complex<F>(1, 0)};
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Variable bindings and tree evaluation.

struct Bindings {
    Complex z{};
    std::map<std::string, long long> indices;
    std::map<std::string, Complex> params;

    Complex lookup(const std::string& name) const {
        if (name == "z") return z;
        auto it = indices.find(name);
        if (it != indices.end()) return Complex(static_cast<double>(it->second), 0.0);
        auto pt = params.find(name);
        if (pt != params.end()) return pt->second;
        throw EvalError("unbound variable '" + name + "'");
    }
};

namespace detail {

template <typename T>
T eval_node(const Expr& e, const Bindings& b) {
    switch (e.kind) {
        case NodeKind::Literal: return T(e.value);
        case NodeKind::Variable:
            if (e.name == "z") return Seed<T>::make(b.z);
            return T(b.lookup(e.name));
        case NodeKind::Negate: return neg(eval_node<T>(*e.lhs, b));
        case NodeKind::Add: return eval_node<T>(*e.lhs, b) + eval_node<T>(*e.rhs, b);
        case NodeKind::Sub: return eval_node<T>(*e.lhs, b) - eval_node<T>(*e.rhs, b);
        case NodeKind::Mul: return mul(eval_node<T>(*e.lhs, b), eval_node<T>(*e.rhs, b));
        case NodeKind::Div: return div_checked(eval_node<T>(*e.lhs, b), eval_node<T>(*e.rhs, b));
        case NodeKind::Pow: return pow_value(eval_node<T>(*e.lhs, b), eval_node<T>(*e.rhs, b));
        case NodeKind::Call: return apply_func(e.func, eval_node<T>(*e.lhs, b));
    }
    return {};
}

}  // namespace detail

inline Complex eval(const ExprPtr& ast, const Bindings& b) {
    return detail::eval_node<Complex>(*ast, b);
}

inline Jet eval_with_derivative(const ExprPtr& ast, const Bindings& b) {
    return detail::eval_node<Jet>(*ast, b);
}

}  // namespace fatou
