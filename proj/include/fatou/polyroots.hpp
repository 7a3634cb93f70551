#pragma once

// Dense complex polynomials: extraction from bound expression trees,
// arithmetic, and a Durand-Kerner simultaneous root solver.  Exact origin
// zeros are stripped before iterating so multiplicities at 0 never slow the
// solver down or smear the root cluster.

#include <optional>
#include <vector>

#include "fatou/family.hpp"

namespace fatou {

struct Poly {
    std::vector<Complex> c;  // c[k] multiplies z^k

    int degree() const {
        int d = static_cast<int>(c.size()) - 1;
        while (d > 0 && c[d] == Complex(0.0, 0.0)) --d;
        return d;
    }
    void trim() { c.resize(degree() + 1); }

    Complex eval(const Complex& z) const {
        Complex acc{};
        for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
        return acc;
    }

    Poly derivative() const {
        Poly d;
        if (c.size() <= 1) {
            d.c = {Complex(0.0, 0.0)};
            return d;
        }
        d.c.resize(c.size() - 1);
        for (std::size_t k = 1; k < c.size(); ++k)
            d.c[k - 1] = c[k] * static_cast<double>(k);
        return d;
    }
};

inline Poly operator+(const Poly& a, const Poly& b) {
    Poly out;
    out.c.resize(std::max(a.c.size(), b.c.size()), Complex(0.0, 0.0));
    for (std::size_t k = 0; k < a.c.size(); ++k) out.c[k] += a.c[k];
    for (std::size_t k = 0; k < b.c.size(); ++k) out.c[k] += b.c[k];
    return out;
}

inline Poly operator-(const Poly& a, const Poly& b) {
    Poly out;
    out.c.resize(std::max(a.c.size(), b.c.size()), Complex(0.0, 0.0));
    for (std::size_t k = 0; k < a.c.size(); ++k) out.c[k] += a.c[k];
    for (std::size_t k = 0; k < b.c.size(); ++k) out.c[k] -= b.c[k];
    return out;
}

inline Poly operator*(const Poly& a, const Poly& b) {
    Poly out;
    out.c.assign(a.c.size() + b.c.size() - 1, Complex(0.0, 0.0));
    for (std::size_t i = 0; i < a.c.size(); ++i)
        for (std::size_t j = 0; j < b.c.size(); ++j) out.c[i + j] += a.c[i] * b.c[j];
    return out;
}

inline Poly operator*(const Poly& a, const Complex& s) {
    Poly out = a;
    for (auto& v : out.c) v *= s;
    return out;
}

// p(q(z)) by Horner over the coefficients of p.
inline Poly compose(const Poly& p, const Poly& q) {
    Poly acc;
    acc.c = {Complex(0.0, 0.0)};
    for (std::size_t k = p.c.size(); k-- > 0;) {
        acc = acc * q;
        if (acc.c.empty()) acc.c = {Complex(0.0, 0.0)};
        acc.c[0] += p.c[k];
    }
    acc.trim();
    return acc;
}

namespace detail {

constexpr int kMaxPolyDegree = 8192;

// Syntactic polynomial extraction: fails (nullopt) on z-dependent division,
// transcendental calls of z-dependent arguments, or non-integer powers.
inline std::optional<Poly> poly_from_node(const Expr& e, const Bindings& b) {
    switch (e.kind) {
        case NodeKind::Literal: return Poly{{e.value}};
        case NodeKind::Variable:
            if (e.name == "z") return Poly{{Complex(0.0, 0.0), Complex(1.0, 0.0)}};
            return Poly{{b.lookup(e.name)}};
        case NodeKind::Negate: {
            auto a = poly_from_node(*e.lhs, b);
            if (!a) return std::nullopt;
            return *a * Complex(-1.0, 0.0);
        }
        case NodeKind::Add: case NodeKind::Sub: case NodeKind::Mul: {
            auto a = poly_from_node(*e.lhs, b);
            auto c = poly_from_node(*e.rhs, b);
            if (!a || !c) return std::nullopt;
            if (e.kind == NodeKind::Add) return *a + *c;
            if (e.kind == NodeKind::Sub) return *a - *c;
            Poly prod = *a * *c;
            if (prod.degree() > kMaxPolyDegree) return std::nullopt;
            return prod;
        }
        case NodeKind::Div: {
            auto a = poly_from_node(*e.lhs, b);
            auto c = poly_from_node(*e.rhs, b);
            if (!a || !c || c->degree() > 0) return std::nullopt;
            check_nonzero_divisor(c->c[0]);
            return *a * (Complex(1.0, 0.0) / c->c[0]);
        }
        case NodeKind::Pow: {
            auto base = poly_from_node(*e.lhs, b);
            if (!base) return std::nullopt;
            Complex ev;
            try {
                ev = eval(e.rhs, b);
            } catch (const EvalError&) {
                return std::nullopt;
            }
            long long n = 0;
            if (!exact_integer(ev, n) || n < 0) {
                if (base->degree() == 0) return Poly{{pow_value(base->c[0], ev)}};
                return std::nullopt;
            }
            if (n > 0 && base->degree() * n > kMaxPolyDegree) return std::nullopt;
            Poly acc{{Complex(1.0, 0.0)}};
            Poly sq = *base;
            long long m = n;
            while (m > 0) {
                if (m & 1) acc = acc * sq;
                if (m >>= 1) sq = sq * sq;
            }
            return acc;
        }
        case NodeKind::Call: {
            auto a = poly_from_node(*e.lhs, b);
            if (!a || a->degree() > 0) return std::nullopt;
            return Poly{{apply_func(e.func, a->c[0])}};
        }
    }
    return std::nullopt;
}

}  // namespace detail

// Coefficients of the member's expression as a polynomial in z, with index
// and parameter values substituted; nullopt when the member is not
// syntactically polynomial.
inline std::optional<Poly> member_polynomial(const BoundMember& m) {
    Bindings b;
    const auto& names = m.program.slot_names;
    for (std::size_t k = 0; k < names.size(); ++k) b.params[names[k]] = m.slots[k];
    try {
        auto p = detail::poly_from_node(*m.ast, b);
        if (p) p->trim();
        return p;
    } catch (const EvalError&) {
        return std::nullopt;
    }
}

struct RootSolve {
    std::vector<Complex> roots;       // includes origin zeros stripped ahead of iteration
    int origin_multiplicity = 0;      // exact z^k factor
    bool converged = true;
    int iterations = 0;
};

// Durand-Kerner simultaneous iteration.  Initial guesses sit on a circle of
// radius 1 + max |c_k / c_n|; converged when the largest step drops below
// `tol` (default 1e-12), capped at 500 sweeps.
inline RootSolve durand_kerner(Poly p, double tol = 1e-12, int max_iter = 500) {
    RootSolve out;
    p.trim();
    // Exact origin zeros: strip the z^k factor first.
    std::size_t k0 = 0;
    while (k0 + 1 < p.c.size() && p.c[k0] == Complex(0.0, 0.0)) ++k0;
    out.origin_multiplicity = static_cast<int>(k0);
    if (k0 > 0) p.c.erase(p.c.begin(), p.c.begin() + static_cast<long>(k0));
    p.trim();

    const int d = p.degree();
    for (int k = 0; k < out.origin_multiplicity; ++k) out.roots.push_back(Complex(0.0, 0.0));
    if (d == 0) return out;

    const Complex lead = p.c[d];
    double ratio = 0;
    for (int k = 0; k < d; ++k) ratio = std::max(ratio, std::abs(p.c[k] / lead));
    const double radius = 1.0 + ratio;

    std::vector<Complex> r(d);
    for (int k = 0; k < d; ++k) {
        const double th = 2.0 * M_PI * k / d + 0.4;  // offset breaks symmetric stalls
        r[k] = radius * Complex(std::cos(th), std::sin(th));
    }

    bool converged = false;
    int it = 0;
    for (; it < max_iter && !converged; ++it) {
        double max_step = 0;
        for (int i = 0; i < d; ++i) {
            Complex denom = lead;
            for (int j = 0; j < d; ++j)
                if (j != i) denom *= r[i] - r[j];
            if (denom == Complex(0.0, 0.0)) {
                r[i] += Complex(tol * 1e3, tol * 1e3);
                max_step = std::max(max_step, 1.0);
                continue;
            }
            const Complex step = p.eval(r[i]) / denom;
            r[i] -= step;
            max_step = std::max(max_step, std::abs(step));
        }
        converged = max_step < tol;
    }
    out.converged = converged;
    out.iterations = it;

    // A couple of Newton polish steps tighten simple roots toward machine
    // precision without disturbing clustered ones.
    const Poly dp = p.derivative();
    for (auto& root : r) {
        for (int step = 0; step < 2; ++step) {
            const Complex pv = p.eval(root);
            const Complex dv = dp.eval(root);
            if (dv == Complex(0.0, 0.0)) break;
            const Complex next = root - pv / dv;
            if (std::abs(p.eval(next)) <= std::abs(pv)) root = next;
        }
    }
    for (const auto& root : r) out.roots.push_back(root);
    return out;
}

// Order-stable deduplication at the given radius.
inline std::vector<Complex> dedup_points(const std::vector<Complex>& pts, double eps) {
    std::vector<Complex> out;
    for (const Complex& p : pts) {
        bool seen = false;
        for (const Complex& q : out)
            if (std::abs(p - q) <= eps) {
                seen = true;
                break;
            }
        if (!seen) out.push_back(p);
    }
    return out;
}

}  // namespace fatou
