#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "statgeo/field_expr.hpp"

using statgeo::DomainError;
using statgeo::FieldExpr;
using statgeo::ParseError;
using statgeo::UnknownIdentifier;

namespace {

const std::vector<std::string> kXY = {"x", "y"};

double eval(const std::string& text, double x = 0.0, double y = 0.0) {
    const double p[] = {x, y};
    return FieldExpr::parse(text, kXY).eval(p);
}

TEST(FieldExpr, RespectsPrecedenceAndAssociativity) {
    EXPECT_DOUBLE_EQ(eval("1 + 2 * 3"), 7.0);
    EXPECT_DOUBLE_EQ(eval("(1 + 2) * 3"), 9.0);
    EXPECT_DOUBLE_EQ(eval("2 ^ 3 ^ 2"), 512.0);
    EXPECT_DOUBLE_EQ(eval("-2 ^ 2"), -4.0);
    EXPECT_DOUBLE_EQ(eval("8 / 4 / 2"), 1.0);
    EXPECT_DOUBLE_EQ(eval("10 - 4 - 3"), 3.0);
    EXPECT_DOUBLE_EQ(eval("2 ^ -1"), 0.5);
}

TEST(FieldExpr, EvaluatesCoordinatesAndFunctions) {
    EXPECT_DOUBLE_EQ(eval("x * y + 1", 2.0, 3.0), 7.0);
    EXPECT_NEAR(eval("sin(x)^2 + cos(x)^2", 0.7), 1.0, 1e-15);
    EXPECT_NEAR(eval("exp(log(y))", 0.0, 2.5), 2.5, 1e-15);
    EXPECT_DOUBLE_EQ(eval("sqrt(x) + abs(y)", 4.0, -3.0), 5.0);
    EXPECT_NEAR(eval("tanh(x)", 0.3), std::tanh(0.3), 1e-16);
    EXPECT_DOUBLE_EQ(eval("neg(x)", 2.0), -2.0);
    EXPECT_DOUBLE_EQ(eval("1.5e2 + .5"), 150.5);
}

TEST(FieldExpr, ReportsSyntaxErrorsWithOffsets) {
    try {
        FieldExpr::parse("1 + * 2", kXY);
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 4u);
    }
    EXPECT_THROW(FieldExpr::parse("", kXY), ParseError);
    EXPECT_THROW(FieldExpr::parse("(x + 1", kXY), ParseError);
    EXPECT_THROW(FieldExpr::parse("sin x", kXY), ParseError);
    EXPECT_THROW(FieldExpr::parse("1 2", kXY), ParseError);
    EXPECT_THROW(FieldExpr::parse("1e", kXY), ParseError);
}

TEST(FieldExpr, RejectsUnknownNames) {
    try {
        FieldExpr::parse("x + z", kXY);
        FAIL() << "expected an unknown identifier";
    } catch (const UnknownIdentifier& e) {
        EXPECT_EQ(e.name(), "z");
        EXPECT_EQ(e.offset(), 4u);
    }
    EXPECT_THROW(FieldExpr::parse("foo(x)", kXY), UnknownIdentifier);
}

TEST(FieldExpr, RaisesDomainErrorsWithSpans) {
    const double p[] = {-1.0, 0.0};
    const FieldExpr e = FieldExpr::parse("1 + log(x)", kXY);
    try {
        e.eval(p);
        FAIL() << "expected a domain error";
    } catch (const DomainError& err) {
        EXPECT_EQ(err.span().begin, 4u);
    }
    EXPECT_THROW(eval("sqrt(x)", -1.0), DomainError);
    EXPECT_THROW(eval("1 / y"), DomainError);
    EXPECT_THROW(eval("x ^ 0.5", -2.0), DomainError);
    EXPECT_THROW(eval("y ^ -1"), DomainError);
}

TEST(FieldExpr, SerializeRoundTripsTheTree) {
    const std::vector<std::string> samples = {
        "1 + 2 * x", "-x ^ 2", "2 ^ 3 ^ y", "sin(x) / (1 + y ^ 2)", "exp(-(x - 1)^2) * cos(y)", "abs(x - y) - - 3",
    };
    for (const auto& text : samples) {
        const FieldExpr a = FieldExpr::parse(text, kXY);
        const FieldExpr b = FieldExpr::parse(a.serialize(), kXY);
        EXPECT_TRUE(a.structurally_equal(b)) << text << " -> " << a.serialize();
        const double p[] = {0.3, -0.7};
        EXPECT_EQ(a.eval(p), b.eval(p)) << text;
    }
}

TEST(FieldExpr, RandomTreesRoundTrip) {
    std::mt19937_64 rng(3);
    const std::vector<std::string> atoms = {"x", "y", "2", "0.5", "3.25"};
    const std::vector<std::string> binary = {"+", "-", "*", "/", "^"};
    const std::vector<std::string> unary = {"sin", "cos", "tanh", "abs", "neg"};
    std::function<std::string(int)> grow = [&](int depth) -> std::string {
        std::uniform_int_distribution<int> pick(0, depth > 0 ? 2 : 0);
        switch (pick(rng)) {
            case 0: return atoms[rng() % atoms.size()];
            case 1: return unary[rng() % unary.size()] + "(" + grow(depth - 1) + ")";
            default: return "(" + grow(depth - 1) + " " + binary[rng() % binary.size()] + " " + grow(depth - 1) + ")";
        }
    };
    for (int k = 0; k < 200; ++k) {
        const FieldExpr a = FieldExpr::parse(grow(4), kXY);
        EXPECT_TRUE(a.structurally_equal(FieldExpr::parse(a.serialize(), kXY))) << a.serialize();
    }
}

TEST(FieldExpr, GradientMatchesAnalyticDerivative) {
    const FieldExpr e = FieldExpr::parse("x^2 * y + sin(y)", kXY);
    const double p[] = {1.5, 0.4};
    const auto g = e.grad_fd(p);
    EXPECT_NEAR(g[0], 2 * 1.5 * 0.4, 1e-9);
    EXPECT_NEAR(g[1], 1.5 * 1.5 + std::cos(0.4), 1e-9);
    EXPECT_THROW(e.grad_fd(p, 0.0), DomainError);
}

TEST(FieldExpr, ConstantsAreRecognised) {
    EXPECT_TRUE(FieldExpr::parse("2 * 3 + 1", kXY).is_constant());
    EXPECT_FALSE(FieldExpr::parse("2 * x", kXY).is_constant());
    EXPECT_DOUBLE_EQ(FieldExpr::constant(4.5).eval({}), 4.5);
}

TEST(FieldExpr, ConcurrentEvaluationIsConsistent) {
    const FieldExpr e = FieldExpr::parse("exp(-x^2) * cos(3*y) + x*y", kXY);
    std::vector<double> serial(1000), parallel(1000);
    for (int i = 0; i < 1000; ++i) {
        const double p[] = {i * 1e-3, 1.0 - i * 2e-3};
        serial[i] = e.eval(p);
    }
#pragma omp parallel for
    for (int i = 0; i < 1000; ++i) {
        const double p[] = {i * 1e-3, 1.0 - i * 2e-3};
        parallel[i] = e.eval(p);
    }
    EXPECT_EQ(serial, parallel);
}

}  // namespace
