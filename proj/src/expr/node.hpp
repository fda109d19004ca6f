#pragma once

#include "dsolkit/expr.hpp"

namespace dsolkit {

namespace detail {

struct Node {
    ExprKind kind;
    double value = 0.0;  // constant value or Pow exponent
    std::string name;    // variable name
    std::vector<Expr> operands;
    std::uint64_t hash = 0;
    std::size_t size = 1;
};

bool is_unary_function(ExprKind kind);
bool is_integer(double v);

}  // namespace detail

Expr make_node(ExprKind kind, double value, std::vector<Expr> operands);

// Smart constructors: trivially simplify while building.
namespace build {
Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b);
Expr div(const Expr& a, const Expr& b);
Expr neg(const Expr& a);
Expr pow(const Expr& base, double exponent);
Expr unary(ExprKind kind, const Expr& a);
}  // namespace build

}  // namespace dsolkit
