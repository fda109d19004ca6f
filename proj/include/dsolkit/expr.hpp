#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dsolkit {

namespace detail {
struct Node;
}

/// Kinds of expression tree nodes.
enum class ExprKind {
    Constant,
    Variable,
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Add,
    Sub,
    Mul,
    Div,
    Pow,  // base ^ constant exponent
};

/// Thrown by parse() with the zero-based character offset of the problem.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t position, const std::string& message);
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Thrown when an expression references a variable the point does not bind.
class UnboundVariable : public std::runtime_error {
public:
    explicit UnboundVariable(const std::string& name);
};

/// Variable-name to value binding.
class Point {
public:
    Point() = default;
    Point(std::vector<std::string> names, std::vector<double> values);
    Point(std::shared_ptr<const std::vector<std::string>> names, std::vector<double> values);

    std::size_t dimension() const { return values_.size(); }
    const std::vector<std::string>& names() const { return *names_; }
    std::span<const double> values() const { return values_; }
    double value(std::size_t i) const { return values_[i]; }

    /// Throws UnboundVariable when the name is not bound.
    double operator[](std::string_view name) const;
    const double* find(std::string_view name) const;

private:
    std::shared_ptr<const std::vector<std::string>> names_ =
        std::make_shared<const std::vector<std::string>>();
    std::vector<double> values_;
};

/// Immutable symbolic expression over named real variables.
///
/// Copies share structure. Evaluation is a pure function of the tree and
/// the point, so an Expr may be evaluated concurrently from any thread.
/// Domain violations (pole of a division, log of a non-positive number, ...)
/// evaluate to a non-finite value rather than throwing.
class Expr {
public:
    /// The constant zero.
    Expr();

    static Expr constant(double value);
    static Expr variable(std::string name);

    ExprKind kind() const;
    bool is_constant() const { return kind() == ExprKind::Constant; }
    bool is_constant(double value) const;
    double constant_value() const;
    const std::string& variable_name() const;
    /// Exponent of a Pow node.
    double exponent() const;
    std::size_t operand_count() const;
    const Expr& operand(std::size_t i) const;

    /// Number of nodes in the tree (shared subtrees counted once per use).
    std::size_t size() const;
    std::uint64_t structural_hash() const;

    double eval(const Point& point) const;
    double eval(std::span<const std::string> names, std::span<const double> values) const;

    std::set<std::string> free_variables() const;

    /// Parseable text form. Constants use the shortest exact representation.
    std::string to_string() const;

    friend bool structurally_equal(const Expr& a, const Expr& b);

private:
    explicit Expr(std::shared_ptr<const detail::Node> node);
    std::shared_ptr<const detail::Node> node_;

    friend struct detail::Node;
    friend Expr make_node(ExprKind kind, double value, std::vector<Expr> operands);
};

bool structurally_equal(const Expr& a, const Expr& b);

// Raw constructors. No simplification is performed.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, double exponent);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr sqrt(const Expr& e);

/// Parse text over the declared variables. Identifiers must be declared
/// variables or one of sin, cos, exp, log, sqrt.
Expr parse(std::string_view text, std::span<const std::string> variables);
Expr parse(std::string_view text, std::initializer_list<std::string> variables);

/// Exact partial derivative with respect to `variable`.
Expr differentiate(const Expr& e, std::string_view variable);
std::vector<Expr> gradient(const Expr& e, std::span<const std::string> variables);

using Bindings = std::map<std::string, Expr, std::less<>>;

/// Simultaneous substitution of variables by expressions.
Expr substitute(const Expr& e, const Bindings& bindings);
/// As above; throws std::invalid_argument if a replacement uses a variable
/// outside `declared`.
Expr substitute(const Expr& e, const Bindings& bindings, std::span<const std::string> declared);

/// Value-preserving normalization: constant folding, 0/1 identities,
/// collection of like terms and like factors.
Expr simplify(const Expr& e);

/// Names x1..xn (or any prefix).
std::vector<std::string> numbered_names(std::string_view prefix, std::size_t count);

}  // namespace dsolkit
