#pragma once

// Flat stack-machine form of an expression tree.  Compiling once per family
// piece keeps the raster sweep's inner loop free of tree walks and name
// lookups; index/parameter values live in a slot array shared per member.

#include <array>
#include <cstdint>
#include <vector>

#include "fatou/expr.hpp"

namespace fatou {

enum class OpCode : std::uint8_t {
    PushConst,
    PushZ,
    PushSlot,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    PowInt,
    Pow,
    Call,
};

struct ProgramOp {
    OpCode code;
    std::int32_t arg = 0;  // slot index, integer exponent, or Func
    Complex k{};           // PushConst payload
};

struct Program {
    std::vector<ProgramOp> ops;
    std::vector<std::string> slot_names;  // order defines the slot array layout
    int max_stack = 0;

    static constexpr int kStackLimit = 64;
};

namespace detail {

inline int compile_node(const Expr& e, const std::vector<std::string>& slots,
                        std::vector<ProgramOp>& out, int depth, int& max_depth) {
    auto grow = [&](int d) {
        if (d > max_depth) max_depth = d;
        if (d > Program::kStackLimit) throw EvalError("expression too deep to compile");
        return d;
    };
    switch (e.kind) {
        case NodeKind::Literal:
            out.push_back({OpCode::PushConst, 0, e.value});
            return grow(depth + 1);
        case NodeKind::Variable: {
            if (e.name == "z") {
                out.push_back({OpCode::PushZ, 0, {}});
                return grow(depth + 1);
            }
            for (std::size_t s = 0; s < slots.size(); ++s) {
                if (slots[s] == e.name) {
                    out.push_back({OpCode::PushSlot, static_cast<std::int32_t>(s), {}});
                    return grow(depth + 1);
                }
            }
            throw EvalError("unbound variable '" + e.name + "'");
        }
        case NodeKind::Negate: {
            int d = compile_node(*e.lhs, slots, out, depth, max_depth);
            out.push_back({OpCode::Neg, 0, {}});
            return d;
        }
        case NodeKind::Call: {
            int d = compile_node(*e.lhs, slots, out, depth, max_depth);
            out.push_back({OpCode::Call, static_cast<std::int32_t>(e.func), {}});
            return d;
        }
        case NodeKind::Pow: {
            compile_node(*e.lhs, slots, out, depth, max_depth);
            // Literal integer exponents get a dedicated opcode.
            const Expr& ex = *e.rhs;
            long long n = 0;
            if (ex.kind == NodeKind::Literal && detail::exact_integer(ex.value, n) &&
                std::abs(n) < (1LL << 30)) {
                out.push_back({OpCode::PowInt, static_cast<std::int32_t>(n), {}});
                return depth + 1;
            }
            compile_node(ex, slots, out, depth + 1, max_depth);
            out.push_back({OpCode::Pow, 0, {}});
            return depth + 1;
        }
        default: {
            compile_node(*e.lhs, slots, out, depth, max_depth);
            compile_node(*e.rhs, slots, out, depth + 1, max_depth);
            OpCode c = OpCode::Add;
            if (e.kind == NodeKind::Sub) c = OpCode::Sub;
            if (e.kind == NodeKind::Mul) c = OpCode::Mul;
            if (e.kind == NodeKind::Div) c = OpCode::Div;
            out.push_back({c, 0, {}});
            return depth + 1;
        }
    }
}

}  // namespace detail

inline Program compile(const ExprPtr& ast, std::vector<std::string> slot_names) {
    Program p;
    p.slot_names = std::move(slot_names);
    int max_depth = 0;
    detail::compile_node(*ast, p.slot_names, p.ops, 0, max_depth);
    p.max_stack = max_depth;
    return p;
}

// T is complex<F> or JetT<F>.  Slot values carry no z-dependence; widening
// from the double-precision slot array is implicit.  The evaluation stack is
// thread-local scratch: zero-filling it per call would dominate the cost of
// small programs in the raster sweep.
template <typename T, typename F>
T run(const Program& p, const std::complex<F>& z, const Complex* slots) {
    static thread_local std::array<T, Program::kStackLimit> stack;
    int top = -1;
    for (const ProgramOp& op : p.ops) {
        switch (op.code) {
            case OpCode::PushConst:
                stack[++top] = T(std::complex<F>(op.k.real(), op.k.imag()));
                break;
            case OpCode::PushZ: stack[++top] = detail::Seed<T>::make(z); break;
            case OpCode::PushSlot:
                stack[++top] = T(std::complex<F>(slots[op.arg].real(), slots[op.arg].imag()));
                break;
            case OpCode::Add:
                stack[top - 1] = stack[top - 1] + stack[top];
                --top;
                break;
            case OpCode::Sub:
                stack[top - 1] = stack[top - 1] - stack[top];
                --top;
                break;
            case OpCode::Mul:
                stack[top - 1] = detail::mul(stack[top - 1], stack[top]);
                --top;
                break;
            case OpCode::Div:
                stack[top - 1] = detail::div_checked(stack[top - 1], stack[top]);
                --top;
                break;
            case OpCode::Neg: stack[top] = detail::neg(stack[top]); break;
            case OpCode::PowInt: stack[top] = detail::int_pow(stack[top], op.arg); break;
            case OpCode::Pow:
                stack[top - 1] = detail::pow_value(stack[top - 1], stack[top]);
                --top;
                break;
            case OpCode::Call:
                stack[top] = detail::apply_func(static_cast<Func>(op.arg), stack[top]);
                break;
        }
    }
    return stack[top];
}

}  // namespace fatou
