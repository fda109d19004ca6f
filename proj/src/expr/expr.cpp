#include "node.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace dsolkit {

ParseError::ParseError(std::size_t position, const std::string& message)
    : std::runtime_error("parse error at position " + std::to_string(position) + ": " + message),
      position_(position) {}

UnboundVariable::UnboundVariable(const std::string& name)
    : std::runtime_error("unbound variable '" + name + "'") {}

Point::Point(std::vector<std::string> names, std::vector<double> values)
    : Point(std::make_shared<const std::vector<std::string>>(std::move(names)), std::move(values)) {}

Point::Point(std::shared_ptr<const std::vector<std::string>> names, std::vector<double> values)
    : names_(std::move(names)), values_(std::move(values)) {
    if (names_->size() != values_.size())
        throw std::invalid_argument("point: names and values differ in length");
}

const double* Point::find(std::string_view name) const {
    for (std::size_t i = 0; i < values_.size(); ++i)
        if ((*names_)[i] == name)
            return &values_[i];
    return nullptr;
}

double Point::operator[](std::string_view name) const {
    if (const double* v = find(name))
        return *v;
    throw UnboundVariable(std::string(name));
}

namespace detail {

bool is_unary_function(ExprKind kind) {
    switch (kind) {
        case ExprKind::Sin:
        case ExprKind::Cos:
        case ExprKind::Exp:
        case ExprKind::Log:
        case ExprKind::Sqrt:
            return true;
        default:
            return false;
    }
}

bool is_integer(double v) {
    return std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15;
}

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h * 0xff51afd7ed558ccdULL;
}

std::uint64_t hash_string(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

}  // namespace detail

Expr make_node(ExprKind kind, double value, std::vector<Expr> operands) {
    auto node = std::make_shared<detail::Node>();
    node->kind = kind;
    node->value = value == 0.0 ? 0.0 : value;  // fold -0.0
    node->operands = std::move(operands);
    std::uint64_t h = detail::mix(0x1234567ULL, static_cast<std::uint64_t>(kind));
    if (kind == ExprKind::Constant || kind == ExprKind::Pow)
        h = detail::mix(h, std::bit_cast<std::uint64_t>(node->value));
    for (const Expr& op : node->operands) {
        h = detail::mix(h, op.structural_hash());
        node->size += op.size();
    }
    node->hash = h;
    return Expr(std::move(node));
}

Expr::Expr() {
    static const std::shared_ptr<const detail::Node> zero = [] {
        auto n = std::make_shared<detail::Node>();
        n->kind = ExprKind::Constant;
        n->hash = detail::mix(detail::mix(0x1234567ULL, 0), std::bit_cast<std::uint64_t>(0.0));
        return n;
    }();
    node_ = zero;
}

Expr::Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) {
    if (value == 0.0)
        return Expr();
    return make_node(ExprKind::Constant, value, {});
}

Expr Expr::variable(std::string name) {
    auto node = std::make_shared<detail::Node>();
    node->kind = ExprKind::Variable;
    node->hash = detail::mix(detail::mix(0x1234567ULL, static_cast<std::uint64_t>(ExprKind::Variable)),
                             detail::hash_string(name));
    node->name = std::move(name);
    return Expr(std::move(node));
}

ExprKind Expr::kind() const { return node_->kind; }
bool Expr::is_constant(double value) const { return is_constant() && node_->value == value; }

double Expr::constant_value() const {
    if (!is_constant())
        throw std::logic_error("constant_value() on non-constant expression");
    return node_->value;
}

const std::string& Expr::variable_name() const {
    if (kind() != ExprKind::Variable)
        throw std::logic_error("variable_name() on non-variable expression");
    return node_->name;
}

double Expr::exponent() const {
    if (kind() != ExprKind::Pow)
        throw std::logic_error("exponent() on non-power expression");
    return node_->value;
}

std::size_t Expr::operand_count() const { return node_->operands.size(); }
const Expr& Expr::operand(std::size_t i) const { return node_->operands.at(i); }
std::size_t Expr::size() const { return node_->size; }
std::uint64_t Expr::structural_hash() const { return node_->hash; }

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_)
        return true;
    const detail::Node& x = *a.node_;
    const detail::Node& y = *b.node_;
    if (x.hash != y.hash || x.kind != y.kind || x.size != y.size)
        return false;
    switch (x.kind) {
        case ExprKind::Constant:
            return x.value == y.value;
        case ExprKind::Variable:
            return x.name == y.name;
        case ExprKind::Pow:
            if (x.value != y.value)
                return false;
            break;
        default:
            break;
    }
    for (std::size_t i = 0; i < x.operands.size(); ++i)
        if (!structurally_equal(x.operands[i], y.operands[i]))
            return false;
    return true;
}

double Expr::eval(std::span<const std::string> names, std::span<const double> values) const {
    const detail::Node& n = *node_;
    switch (n.kind) {
        case ExprKind::Constant:
            return n.value;
        case ExprKind::Variable:
            for (std::size_t i = 0; i < names.size(); ++i)
                if (names[i] == n.name)
                    return values[i];
            throw UnboundVariable(n.name);
        default:
            break;
    }
    const double a = n.operands[0].eval(names, values);
    switch (n.kind) {
        case ExprKind::Neg:
            return -a;
        case ExprKind::Sin:
            return std::sin(a);
        case ExprKind::Cos:
            return std::cos(a);
        case ExprKind::Exp:
            return std::exp(a);
        case ExprKind::Log:
            return a > 0.0 ? std::log(a) : std::numeric_limits<double>::quiet_NaN();
        case ExprKind::Sqrt:
            return a >= 0.0 ? std::sqrt(a) : std::numeric_limits<double>::quiet_NaN();
        case ExprKind::Pow:
            if (a == 0.0 && n.value < 0.0)
                return std::numeric_limits<double>::quiet_NaN();
            return std::pow(a, n.value);
        default:
            break;
    }
    const double b = n.operands[1].eval(names, values);
    switch (n.kind) {
        case ExprKind::Add:
            return a + b;
        case ExprKind::Sub:
            return a - b;
        case ExprKind::Mul:
            return a * b;
        case ExprKind::Div:
            return b == 0.0 ? std::numeric_limits<double>::quiet_NaN() : a / b;
        default:
            throw std::logic_error("eval: unknown node kind");
    }
}

double Expr::eval(const Point& point) const { return eval(point.names(), point.values()); }

namespace {

void collect_variables(const Expr& e, std::set<std::string>& out) {
    if (e.kind() == ExprKind::Variable) {
        out.insert(e.variable_name());
        return;
    }
    for (std::size_t i = 0; i < e.operand_count(); ++i)
        collect_variables(e.operand(i), out);
}

}  // namespace

std::set<std::string> Expr::free_variables() const {
    std::set<std::string> out;
    collect_variables(*this, out);
    return out;
}

Expr operator+(const Expr& a, const Expr& b) { return make_node(ExprKind::Add, 0.0, {a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return make_node(ExprKind::Sub, 0.0, {a, b}); }
Expr operator*(const Expr& a, const Expr& b) { return make_node(ExprKind::Mul, 0.0, {a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return make_node(ExprKind::Div, 0.0, {a, b}); }
Expr operator-(const Expr& a) { return make_node(ExprKind::Neg, 0.0, {a}); }
Expr pow(const Expr& base, double exponent) { return make_node(ExprKind::Pow, exponent, {base}); }
Expr sin(const Expr& e) { return make_node(ExprKind::Sin, 0.0, {e}); }
Expr cos(const Expr& e) { return make_node(ExprKind::Cos, 0.0, {e}); }
Expr exp(const Expr& e) { return make_node(ExprKind::Exp, 0.0, {e}); }
Expr log(const Expr& e) { return make_node(ExprKind::Log, 0.0, {e}); }
Expr sqrt(const Expr& e) { return make_node(ExprKind::Sqrt, 0.0, {e}); }

std::vector<std::string> numbered_names(std::string_view prefix, std::size_t count) {
    std::vector<std::string> names;
    names.reserve(count);
    for (std::size_t i = 1; i <= count; ++i)
        names.push_back(std::string(prefix) + std::to_string(i));
    return names;
}

namespace build {

Expr add(const Expr& a, const Expr& b) {
    if (a.is_constant(0.0))
        return b;
    if (b.is_constant(0.0))
        return a;
    if (a.is_constant() && b.is_constant())
        return Expr::constant(a.constant_value() + b.constant_value());
    return a + b;
}

Expr sub(const Expr& a, const Expr& b) {
    if (b.is_constant(0.0))
        return a;
    if (a.is_constant(0.0))
        return neg(b);
    if (a.is_constant() && b.is_constant())
        return Expr::constant(a.constant_value() - b.constant_value());
    return a - b;
}

Expr mul(const Expr& a, const Expr& b) {
    if (a.is_constant(0.0) || b.is_constant(0.0))
        return Expr();
    if (a.is_constant(1.0))
        return b;
    if (b.is_constant(1.0))
        return a;
    if (a.is_constant(-1.0))
        return neg(b);
    if (b.is_constant(-1.0))
        return neg(a);
    if (a.is_constant() && b.is_constant())
        return Expr::constant(a.constant_value() * b.constant_value());
    return a * b;
}

Expr div(const Expr& a, const Expr& b) {
    if (b.is_constant(1.0))
        return a;
    if (a.is_constant(0.0) && !b.is_constant(0.0))
        return Expr();
    if (a.is_constant() && b.is_constant() && b.constant_value() != 0.0)
        return Expr::constant(a.constant_value() / b.constant_value());
    return a / b;
}

Expr neg(const Expr& a) {
    if (a.is_constant())
        return Expr::constant(-a.constant_value());
    if (a.kind() == ExprKind::Neg)
        return a.operand(0);
    return -a;
}

Expr pow(const Expr& base, double exponent) {
    if (exponent == 0.0)
        return Expr::constant(1.0);
    if (exponent == 1.0)
        return base;
    if (base.is_constant()) {
        const double v = std::pow(base.constant_value(), exponent);
        if (std::isfinite(v))
            return Expr::constant(v);
    }
    return dsolkit::pow(base, exponent);
}

Expr unary(ExprKind kind, const Expr& a) {
    Expr e = make_node(kind, 0.0, {a});
    if (a.is_constant()) {
        const double v = e.eval(std::span<const std::string>{}, std::span<const double>{});
        if (std::isfinite(v))
            return Expr::constant(v);
    }
    return e;
}

}  // namespace build

}  // namespace dsolkit
