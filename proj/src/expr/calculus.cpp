#include "node.hpp"

#include <algorithm>
#include <stdexcept>

namespace dsolkit {

Expr differentiate(const Expr& e, std::string_view variable) {
    using namespace build;
    switch (e.kind()) {
        case ExprKind::Constant:
            return Expr();
        case ExprKind::Variable:
            return Expr::constant(e.variable_name() == variable ? 1.0 : 0.0);
        default:
            break;
    }
    const Expr& u = e.operand(0);
    const Expr du = differentiate(u, variable);
    switch (e.kind()) {
        case ExprKind::Neg:
            return neg(du);
        case ExprKind::Sin:
            return mul(unary(ExprKind::Cos, u), du);
        case ExprKind::Cos:
            return neg(mul(unary(ExprKind::Sin, u), du));
        case ExprKind::Exp:
            return mul(e, du);
        case ExprKind::Log:
            return div(du, u);
        case ExprKind::Sqrt:
            return div(du, mul(Expr::constant(2.0), e));
        case ExprKind::Pow: {
            const double c = e.exponent();
            return mul(mul(Expr::constant(c), build::pow(u, c - 1.0)), du);
        }
        default:
            break;
    }
    const Expr& v = e.operand(1);
    const Expr dv = differentiate(v, variable);
    switch (e.kind()) {
        case ExprKind::Add:
            return add(du, dv);
        case ExprKind::Sub:
            return sub(du, dv);
        case ExprKind::Mul:
            return add(mul(du, v), mul(u, dv));
        case ExprKind::Div:
            if (dv.is_constant(0.0))
                return div(du, v);
            return div(sub(mul(du, v), mul(u, dv)), build::pow(v, 2.0));
        default:
            throw std::logic_error("differentiate: unknown node kind");
    }
}

std::vector<Expr> gradient(const Expr& e, std::span<const std::string> variables) {
    std::vector<Expr> g;
    g.reserve(variables.size());
    for (const std::string& v : variables)
        g.push_back(differentiate(e, v));
    return g;
}

Expr substitute(const Expr& e, const Bindings& bindings) {
    if (e.kind() == ExprKind::Variable) {
        auto it = bindings.find(e.variable_name());
        return it == bindings.end() ? e : it->second;
    }
    if (e.operand_count() == 0)
        return e;
    std::vector<Expr> ops;
    ops.reserve(e.operand_count());
    bool changed = false;
    for (std::size_t i = 0; i < e.operand_count(); ++i) {
        ops.push_back(substitute(e.operand(i), bindings));
        changed = changed || !structurally_equal(ops.back(), e.operand(i));
    }
    if (!changed)
        return e;
    return make_node(e.kind(), e.kind() == ExprKind::Pow ? e.exponent() : 0.0, std::move(ops));
}

Expr substitute(const Expr& e, const Bindings& bindings, std::span<const std::string> declared) {
    for (const auto& [name, replacement] : bindings)
        for (const std::string& v : replacement.free_variables())
            if (std::find(declared.begin(), declared.end(), v) == declared.end())
                throw std::invalid_argument("substitute: replacement for '" + name +
                                            "' uses unknown variable '" + v + "'");
    return substitute(e, bindings);
}

}  // namespace dsolkit
