#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "statgeo/error.hpp"

namespace statgeo {

/// Scalar arithmetic expression over chart coordinates.
///
/// Nodes live in a flat vector with children stored before their parents;
/// the last node is the root. A FieldExpr is immutable once parsed and can be
/// evaluated concurrently from any number of threads.
///
/// Grammar (standard precedence, `^` right-associative and binding tighter
/// than unary minus):
///
///     expr    := term  (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := ('-' | '+') unary | power
///     power   := primary ('^' unary)?
///     primary := number | coord | func '(' expr ')' | '(' expr ')'
///     func    := neg | sin | cos | exp | log | sqrt | tanh | abs
class FieldExpr {
public:
    enum class Op : std::uint8_t {
        Const, Var,
        Neg, Sin, Cos, Exp, Log, Sqrt, Tanh, Abs,
        Add, Sub, Mul, Div, Pow,
    };

    struct Node {
        Op op = Op::Const;
        double value = 0.0;  // Const
        int var = -1;        // Var: coordinate index
        int lhs = -1;        // unary operand or binary left
        int rhs = -1;        // binary right
        SourceSpan span;
    };

    FieldExpr() : FieldExpr(constant(0.0)) {}

    static FieldExpr parse(std::string_view text, std::span<const std::string> coords);
    static FieldExpr constant(double value);

    double eval(std::span<const double> point) const;

    /// Central-difference gradient with a fixed step.
    std::vector<double> grad_fd(std::span<const double> point, double h) const;
    /// Central-difference gradient with step 1e-5 * max(1, |x_i|).
    std::vector<double> grad_fd(std::span<const double> point) const;

    /// Fully parenthesised infix text; parse(serialize()) reproduces the tree.
    std::string serialize() const;

    bool structurally_equal(const FieldExpr& other) const;
    bool is_constant() const;

    std::size_t arity() const noexcept { return coords_.size(); }
    const std::vector<std::string>& coords() const noexcept { return coords_; }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::string& source() const noexcept { return source_; }

private:
    friend class ExprParser;
    struct Empty {};
    explicit FieldExpr(Empty) {}

    double eval_node(int index, std::span<const double> point) const;
    void serialize_node(int index, std::string& out) const;

    std::vector<Node> nodes_;
    std::vector<std::string> coords_;
    std::string source_;
};

const char* op_name(FieldExpr::Op op);

}  // namespace statgeo
