#include "fatou/expr.hpp"

#include <gtest/gtest.h>

#include <random>

#include "fatou/program.hpp"

using namespace fatou;

namespace {

ExprPtr parse(const std::string& text, std::set<std::string> vars = {"z"}) {
    return parse_expression(text, vars);
}

Bindings bind(Complex z) {
    Bindings b;
    b.z = z;
    return b;
}

TEST(Parse, GrammarForcedShapes) {
    const auto ast = parse("n*(z-a)", {"z", "n", "a"});
    ASSERT_EQ(ast->kind, NodeKind::Mul);
    EXPECT_EQ(ast->lhs->kind, NodeKind::Variable);
    EXPECT_EQ(ast->lhs->name, "n");
    ASSERT_EQ(ast->rhs->kind, NodeKind::Sub);
    EXPECT_EQ(ast->rhs->lhs->name, "z");
    EXPECT_EQ(ast->rhs->rhs->name, "a");

    const auto call = parse("sin(k*z)", {"z", "k"});
    ASSERT_EQ(call->kind, NodeKind::Call);
    EXPECT_EQ(call->func, Func::Sin);
    ASSERT_EQ(call->lhs->kind, NodeKind::Mul);
    EXPECT_EQ(call->lhs->lhs->name, "k");
    EXPECT_EQ(call->lhs->rhs->name, "z");
}

TEST(Parse, Precedence) {
    // ^ above unary minus above * / above + -
    const auto a = parse("-z^2");
    ASSERT_EQ(a->kind, NodeKind::Negate);
    EXPECT_EQ(a->lhs->kind, NodeKind::Pow);

    const auto b = parse("1+2*z");
    ASSERT_EQ(b->kind, NodeKind::Add);
    EXPECT_EQ(b->rhs->kind, NodeKind::Mul);

    // Right-associative power.
    const auto c = parse("z^2^3");
    ASSERT_EQ(c->kind, NodeKind::Pow);
    EXPECT_EQ(c->lhs->kind, NodeKind::Variable);
    EXPECT_EQ(c->rhs->kind, NodeKind::Pow);

    // Function application binds tighter than the power base.
    const auto d = parse("sin(z)^2");
    ASSERT_EQ(d->kind, NodeKind::Pow);
    EXPECT_EQ(d->lhs->kind, NodeKind::Call);

    // Whitespace-insensitive.
    EXPECT_TRUE(structurally_equal(parse(" z ^ 2 + 1 "), parse("z^2+1")));
}

TEST(Parse, IntegerExponentFlag) {
    EXPECT_TRUE(parse("z^2")->int_exponent);
    EXPECT_TRUE(parse("z^n", {"z", "n"})->int_exponent);
    EXPECT_FALSE(parse("z^2.5")->int_exponent);
    EXPECT_FALSE(parse("z^(1/2)")->int_exponent);
}

TEST(Parse, Errors) {
    try {
        parse("z^");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 2u);
    }
    EXPECT_THROW(parse(""), ParseError);
    EXPECT_THROW(parse("   "), ParseError);
    EXPECT_THROW(parse("q+1"), ParseError);          // unknown identifier
    EXPECT_THROW(parse("sin z"), ParseError);        // function needs parentheses
    EXPECT_THROW(parse("z)"), ParseError);           // trailing garbage
    EXPECT_THROW(parse("2*z", {}), std::invalid_argument);
    EXPECT_THROW(parse("n", {"z", "pi"}), std::invalid_argument);  // reserved name
}

TEST(Format, CanonicalForms) {
    EXPECT_EQ(format(make_binary(NodeKind::Mul, make_variable("n"), make_variable("z"))), "(n*z)");
    EXPECT_EQ(format(make_call(Func::Exp,
                               make_binary(NodeKind::Mul, make_variable("n"), make_variable("z")))),
              "exp((n*z))");
    EXPECT_EQ(format(parse("z^2+1")), "((z^2)+1)");
    EXPECT_EQ(format(parse("i*z")), "(i*z)");
}

// Random AST generator used for the round-trip and derivative properties.
ExprPtr random_ast(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> kind(0, depth <= 0 ? 1 : 7);
    std::uniform_int_distribution<int> small(0, 9);
    std::uniform_int_distribution<int> var(0, 2);
    std::uniform_real_distribution<double> real(0.1, 4.0);
    static const char* names[] = {"z", "n", "a"};
    switch (kind(rng)) {
        case 0:
            if (small(rng) < 7) return make_literal(Complex(small(rng), 0), true);
            return make_literal(Complex(real(rng), 0), false);
        case 1: return make_variable(names[var(rng)]);
        case 2: return make_unary(NodeKind::Negate, random_ast(rng, depth - 1));
        case 3:
            return make_binary(NodeKind::Add, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        case 4:
            return make_binary(NodeKind::Sub, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        case 5:
            return make_binary(NodeKind::Mul, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        case 6: {
            std::uniform_int_distribution<int> f(0, 6);
            return make_call(static_cast<Func>(f(rng)), random_ast(rng, depth - 1));
        }
        default:
            return make_binary(NodeKind::Pow, random_ast(rng, depth - 1),
                               make_literal(Complex(small(rng) % 5, 0), true));
    }
}

TEST(Format, RoundTripProperty) {
    std::mt19937 rng(7);
    for (int it = 0; it < 1000; ++it) {
        const ExprPtr ast = random_ast(rng, 8);
        const std::string text = format(ast);
        const ExprPtr back = parse_expression(text, {"z", "n", "a"});
        ASSERT_TRUE(structurally_equal(ast, back)) << text;
    }
}

TEST(Eval, SpecValues) {
    const Complex v = eval(parse("z^2+1"), bind(Complex(1, 1)));
    EXPECT_NEAR(v.real(), 1.0, 1e-15);
    EXPECT_NEAR(v.imag(), 2.0, 1e-15);

    Bindings b = bind(Complex(2, 0));
    b.indices["n"] = 3;
    EXPECT_NEAR(eval(parse("n*z", {"z", "n"}), b).real(), 6.0, 1e-15);

    // |sin(k z)| at k=1, z=i equals sqrt(cosh^2(ky) - cos^2(kx)) with x=0, y=1.
    Bindings bi = bind(Complex(0, 1));
    bi.indices["k"] = 1;
    const double lhs = std::abs(eval(parse("sin(k*z)", {"z", "k"}), bi));
    const double oracle = std::sqrt(std::cosh(1.0) * std::cosh(1.0) - std::cos(0.0) * std::cos(0.0));
    EXPECT_NEAR(lhs, oracle, 1e-12);
    EXPECT_NEAR(lhs, 1.1752011936438014, 1e-12);  // sinh(1)
}

TEST(Eval, Errors) {
    EXPECT_THROW(eval(parse("1/z"), bind(Complex(0, 0))), EvalError);
    EXPECT_THROW(eval(parse("log(z)"), bind(Complex(0, 0))), EvalError);
    EXPECT_THROW(eval(parse("n*z", {"z", "n"}), bind(Complex(1, 0))), EvalError);  // unbound
}

TEST(Eval, IntegerPowerPath) {
    // Integer exponents take the repeated-squaring path: branch-free and
    // matching the unrolled product to relative 1e-12.
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (int it = 0; it < 200; ++it) {
        const Complex z(coord(rng), coord(rng));
        const Complex a = eval(parse("z^4"), bind(z));
        const Complex b = eval(parse("z*z*z*z"), bind(z));
        EXPECT_LE(std::abs(a - b), 1e-12 * (1.0 + std::abs(b)));
    }
    // Negative-real base, integer power: no branch-cut jump.
    const Complex c = eval(parse("z^3"), bind(Complex(-2, 0)));
    EXPECT_NEAR(c.real(), -8.0, 1e-12);
    EXPECT_NEAR(c.imag(), 0.0, 1e-12);
}

TEST(Eval, PrincipalBranchForNonInteger) {
    const Complex v = eval(parse("z^0.5"), bind(Complex(-1, 0)));
    EXPECT_NEAR(v.real(), 0.0, 1e-12);
    EXPECT_NEAR(v.imag(), 1.0, 1e-12);
}

TEST(Jet, SpecValues) {
    const Jet a = eval_with_derivative(parse("z^3"), bind(Complex(2, 0)));
    EXPECT_NEAR(a.v.real(), 8.0, 1e-12);
    EXPECT_NEAR(a.d.real(), 12.0, 1e-12);

    Bindings b = bind(Complex(0, 1));
    b.indices["n"] = 5;
    const Jet j = eval_with_derivative(parse("n*z", {"z", "n"}), b);
    EXPECT_NEAR(j.v.imag(), 5.0, 1e-15);
    EXPECT_NEAR(j.d.real(), 5.0, 1e-15);
}

TEST(Jet, SinExampleAgainstFiniteDifference) {
    Bindings b = bind(Complex(0.7, 0.2));
    b.indices["k"] = 3;
    const auto ast = parse("sin(k*z)", {"z", "k"});
    const Jet j = eval_with_derivative(ast, b);
    const double h = 1e-6;
    Bindings bp = b, bm = b;
    bp.z += h;
    bm.z -= h;
    const Complex fd = (eval(ast, bp) - eval(ast, bm)) / (2 * h);
    EXPECT_LE(std::abs(j.d - fd), 1e-6 * (1.0 + std::abs(j.d)));
}

TEST(Jet, FiniteDifferenceProperty) {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    int accepted = 0;
    while (accepted < 500) {
        const ExprPtr ast = random_ast(rng, 5);
        const Complex z(coord(rng), coord(rng));
        Bindings b = bind(z);
        b.indices["n"] = 3;
        b.params["a"] = Complex(0.5, 0.25);
        Jet j;
        Complex fp, fm;
        const double h = 1e-5;
        try {
            j = eval_with_derivative(ast, b);
            Bindings bp = b, bm = b;
            bp.z += h;
            bm.z -= h;
            fp = eval(ast, bp);
            fm = eval(ast, bm);
        } catch (const EvalError&) {
            continue;
        }
        const Complex fd = (fp - fm) / (2 * h);
        if (!std::isfinite(std::abs(j.v)) || !std::isfinite(std::abs(fd))) continue;
        if (std::abs(j.v) > 100 || std::abs(j.d) > 100 || std::abs(fd) > 200) continue;
        ++accepted;
        ASSERT_LE(std::abs(j.d - fd), 1e-6 * (1.0 + std::abs(j.d))) << format(ast);
    }
}

TEST(Eval, SinIdentityProperty) {
    // | |sin k z|^2 - (cosh^2 ky - cos^2 kx) | <= 1e-9 cosh^2 ky
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> xs(-3.0, 3.0);
    std::uniform_real_distribution<double> ys(-2.0, 2.0);
    std::uniform_int_distribution<int> ks(1, 10);
    const auto ast = parse("sin(k*z)", {"z", "k"});
    for (int it = 0; it < 1000; ++it) {
        const double x = xs(rng), y = ys(rng);
        const int k = ks(rng);
        Bindings b = bind(Complex(x, y));
        b.indices["k"] = k;
        const double lhs = std::norm(eval(ast, b));
        const double ch = std::cosh(k * y);
        const double rhs = ch * ch - std::cos(k * x) * std::cos(k * x);
        ASSERT_LE(std::abs(lhs - rhs), 1e-9 * ch * ch);
    }
}

TEST(Program, MatchesTreeEvaluation) {
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    for (int it = 0; it < 300; ++it) {
        const ExprPtr ast = random_ast(rng, 6);
        const Program prog = compile(ast, {"n", "a"});
        const Complex z(coord(rng), coord(rng));
        Bindings b = bind(z);
        b.indices["n"] = 4;
        b.params["a"] = Complex(0.3, -0.7);
        const Complex slots[2] = {Complex(4, 0), Complex(0.3, -0.7)};
        Complex tree, flat;
        bool tree_err = false, flat_err = false;
        try {
            tree = eval(ast, b);
        } catch (const EvalError&) {
            tree_err = true;
        }
        try {
            flat = run<Complex>(prog, z, slots);
        } catch (const EvalError&) {
            flat_err = true;
        }
        ASSERT_EQ(tree_err, flat_err) << format(ast);
        if (!tree_err && std::isfinite(std::abs(tree))) {
            ASSERT_LE(std::abs(tree - flat), 1e-12 * (1.0 + std::abs(tree))) << format(ast);
        }
    }
}

}  // namespace
