#include "statgeo/field_expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

namespace statgeo {

namespace {

struct FunctionName {
    std::string_view name;
    FieldExpr::Op op;
};

constexpr std::array<FunctionName, 8> kFunctions{{
    {"neg", FieldExpr::Op::Neg},   {"sin", FieldExpr::Op::Sin},
    {"cos", FieldExpr::Op::Cos},   {"exp", FieldExpr::Op::Exp},
    {"log", FieldExpr::Op::Log},   {"sqrt", FieldExpr::Op::Sqrt},
    {"tanh", FieldExpr::Op::Tanh}, {"abs", FieldExpr::Op::Abs},
}};

bool is_unary(FieldExpr::Op op) {
    return op >= FieldExpr::Op::Neg && op <= FieldExpr::Op::Abs;
}

std::string format_number(double v) {
    char buf[40];
    // %.17g round-trips every finite double.
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

const char* op_name(FieldExpr::Op op) {
    switch (op) {
        case FieldExpr::Op::Const: return "const";
        case FieldExpr::Op::Var: return "var";
        case FieldExpr::Op::Neg: return "neg";
        case FieldExpr::Op::Sin: return "sin";
        case FieldExpr::Op::Cos: return "cos";
        case FieldExpr::Op::Exp: return "exp";
        case FieldExpr::Op::Log: return "log";
        case FieldExpr::Op::Sqrt: return "sqrt";
        case FieldExpr::Op::Tanh: return "tanh";
        case FieldExpr::Op::Abs: return "abs";
        case FieldExpr::Op::Add: return "+";
        case FieldExpr::Op::Sub: return "-";
        case FieldExpr::Op::Mul: return "*";
        case FieldExpr::Op::Div: return "/";
        case FieldExpr::Op::Pow: return "^";
    }
    return "?";
}

class ExprParser {
public:
    ExprParser(std::string_view text, std::span<const std::string> coords)
        : text_(text), coords_(coords) {}

    FieldExpr run() {
        FieldExpr e{FieldExpr::Empty{}};
        out_ = &e.nodes_;
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
        parse_expr();
        skip_ws();
        if (pos_ < text_.size()) {
            throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        }
        e.coords_.assign(coords_.begin(), coords_.end());
        e.source_ = std::string(text_);
        return e;
    }

private:
    using Op = FieldExpr::Op;

    int push(FieldExpr::Node node) {
        out_->push_back(node);
        return static_cast<int>(out_->size()) - 1;
    }

    int push_binary(Op op, int lhs, int rhs) {
        FieldExpr::Node n;
        n.op = op;
        n.lhs = lhs;
        n.rhs = rhs;
        n.span = {(*out_)[lhs].span.begin, (*out_)[rhs].span.end};
        return push(n);
    }

    int push_unary(Op op, int operand, std::size_t begin, std::size_t end) {
        FieldExpr::Node n;
        n.op = op;
        n.lhs = operand;
        n.span = {begin, end};
        return push(n);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int parse_expr() {
        int lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = push_binary(Op::Add, lhs, parse_term());
            } else if (accept('-')) {
                lhs = push_binary(Op::Sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    int parse_term() {
        int lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = push_binary(Op::Mul, lhs, parse_unary());
            } else if (accept('/')) {
                lhs = push_binary(Op::Div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    int parse_unary() {
        skip_ws();
        const std::size_t begin = pos_;
        if (accept('-')) {
            int operand = parse_unary();
            return push_unary(Op::Neg, operand, begin, (*out_)[operand].span.end);
        }
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    int parse_power() {
        int base = parse_primary();
        if (accept('^')) {
            int exponent = parse_unary();
            return push_binary(Op::Pow, base, exponent);
        }
        return base;
    }

    int parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = text_[pos_];
        const std::size_t begin = pos_;
        if (c == '(') {
            ++pos_;
            int inner = parse_expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            const std::string_view ident = text_.substr(begin, pos_ - begin);
            for (const auto& f : kFunctions) {
                if (f.name != ident) continue;
                if (!accept('(')) throw ParseError("expected '(' after " + std::string(ident), pos_);
                int arg = parse_expr();
                if (!accept(')')) throw ParseError("expected ')'", pos_);
                return push_unary(f.op, arg, begin, pos_);
            }
            for (std::size_t i = 0; i < coords_.size(); ++i) {
                if (coords_[i] == ident) {
                    FieldExpr::Node n;
                    n.op = Op::Var;
                    n.var = static_cast<int>(i);
                    n.span = {begin, pos_};
                    return push(n);
                }
            }
            throw UnknownIdentifier(std::string(ident), begin);
        }
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    int parse_number() {
        const std::size_t begin = pos_;
        auto digits = [&] {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            return pos_ - start;
        };
        std::size_t count = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            count += digits();
        }
        if (count == 0) throw ParseError("malformed number", begin);
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = save;  // "2e" is not an exponent
        }
        double value = 0.0;
        const char* first = text_.data() + begin;
        const char* last = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last) throw ParseError("malformed number", begin);
        FieldExpr::Node n;
        n.op = Op::Const;
        n.value = value;
        n.span = {begin, pos_};
        return push(n);
    }

    std::string_view text_;
    std::span<const std::string> coords_;
    std::size_t pos_ = 0;
    std::vector<FieldExpr::Node>* out_ = nullptr;
};

FieldExpr FieldExpr::parse(std::string_view text, std::span<const std::string> coords) {
    return ExprParser(text, coords).run();
}

FieldExpr FieldExpr::constant(double value) {
    FieldExpr e{Empty{}};
    Node c;
    c.op = Op::Const;
    c.value = std::abs(value);
    e.nodes_.push_back(c);
    if (std::signbit(value) && value != 0.0) {
        Node n;
        n.op = Op::Neg;
        n.lhs = 0;
        e.nodes_.push_back(n);
    }
    e.source_ = format_number(value);
    return e;
}

double FieldExpr::eval(std::span<const double> point) const {
    if (!coords_.empty() && point.size() != coords_.size()) {
        throw DomainError("expression over " + std::to_string(coords_.size()) +
                          " coordinates evaluated at a point of dimension " +
                          std::to_string(point.size()));
    }
    return eval_node(static_cast<int>(nodes_.size()) - 1, point);
}

double FieldExpr::eval_node(int index, std::span<const double> point) const {
    const Node& n = nodes_[static_cast<std::size_t>(index)];
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::Var: return point[static_cast<std::size_t>(n.var)];
        default: break;
    }
    const double a = eval_node(n.lhs, point);
    switch (n.op) {
        case Op::Neg: return -a;
        case Op::Sin: return std::sin(a);
        case Op::Cos: return std::cos(a);
        case Op::Exp: return std::exp(a);
        case Op::Tanh: return std::tanh(a);
        case Op::Abs: return std::abs(a);
        case Op::Log:
            if (!(a > 0.0)) throw DomainError("log of non-positive value", n.span);
            return std::log(a);
        case Op::Sqrt:
            if (a < 0.0) throw DomainError("sqrt of negative value", n.span);
            return std::sqrt(a);
        default: break;
    }
    const double b = eval_node(n.rhs, point);
    switch (n.op) {
        case Op::Add: return a + b;
        case Op::Sub: return a - b;
        case Op::Mul: return a * b;
        case Op::Div:
            if (b == 0.0) throw DomainError("division by zero", n.span);
            return a / b;
        case Op::Pow:
            if (a == 0.0 && b < 0.0) throw DomainError("division by zero (zero to negative power)", n.span);
            if (a < 0.0 && b != std::floor(b)) {
                throw DomainError("negative base with non-integer exponent", n.span);
            }
            return std::pow(a, b);
        default: break;
    }
    return 0.0;  // unreachable
}

std::vector<double> FieldExpr::grad_fd(std::span<const double> point, double h) const {
    if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
    std::vector<double> probe(point.begin(), point.end());
    std::vector<double> grad(point.size(), 0.0);
    for (std::size_t i = 0; i < point.size(); ++i) {
        probe[i] = point[i] + h;
        const double up = eval(probe);
        probe[i] = point[i] - h;
        const double down = eval(probe);
        probe[i] = point[i];
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

std::vector<double> FieldExpr::grad_fd(std::span<const double> point) const {
    std::vector<double> probe(point.begin(), point.end());
    std::vector<double> grad(point.size(), 0.0);
    for (std::size_t i = 0; i < point.size(); ++i) {
        const double h = 1e-5 * std::max(1.0, std::abs(point[i]));
        probe[i] = point[i] + h;
        const double up = eval(probe);
        probe[i] = point[i] - h;
        const double down = eval(probe);
        probe[i] = point[i];
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

std::string FieldExpr::serialize() const {
    std::string out;
    serialize_node(static_cast<int>(nodes_.size()) - 1, out);
    return out;
}

void FieldExpr::serialize_node(int index, std::string& out) const {
    const Node& n = nodes_[static_cast<std::size_t>(index)];
    if (n.op == Op::Const) {
        out += format_number(n.value);
    } else if (n.op == Op::Var) {
        out += coords_[static_cast<std::size_t>(n.var)];
    } else if (is_unary(n.op)) {
        out += op_name(n.op);
        out += '(';
        serialize_node(n.lhs, out);
        out += ')';
    } else {
        out += '(';
        serialize_node(n.lhs, out);
        out += ' ';
        out += op_name(n.op);
        out += ' ';
        serialize_node(n.rhs, out);
        out += ')';
    }
}

bool FieldExpr::structurally_equal(const FieldExpr& other) const {
    if (nodes_.size() != other.nodes_.size()) return false;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& a = nodes_[i];
        const Node& b = other.nodes_[i];
        if (a.op != b.op || a.lhs != b.lhs || a.rhs != b.rhs) return false;
        if (a.op == Op::Const && a.value != b.value) return false;
        if (a.op == Op::Var && coords_[static_cast<std::size_t>(a.var)] !=
                                   other.coords_[static_cast<std::size_t>(b.var)]) {
            return false;
        }
    }
    return true;
}

bool FieldExpr::is_constant() const {
    return std::none_of(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.op == Op::Var; });
}

}  // namespace statgeo
