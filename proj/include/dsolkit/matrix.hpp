#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dsolkit/expr.hpp"

namespace dsolkit {

/// Thrown when an expression evaluates to a non-finite value.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a symbolic entry grows past the configured node cap.
class ExpressionSwell : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultEntrySizeCap = 10000;

/// Dense matrix of expressions. Arithmetic simplifies every resulting entry.
class ExprMatrix {
public:
    ExprMatrix() = default;
    ExprMatrix(std::size_t rows, std::size_t cols);

    static ExprMatrix identity(std::size_t n);
    static ExprMatrix from_values(const Eigen::MatrixXd& values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    const Expr& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    Expr& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    ExprMatrix transpose() const;
    ExprMatrix scaled(const Expr& factor) const;
    ExprMatrix simplified() const;
    ExprMatrix substituted(const Bindings& bindings) const;

    /// Largest entry size in nodes.
    std::size_t max_entry_size() const;

    /// Throws EvaluationError on a non-finite entry.
    Eigen::MatrixXd evaluate(const Point& p) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Expr> data_;
};

/// Product with per-entry simplification; throws ExpressionSwell when an
/// entry exceeds `cap` nodes.
ExprMatrix multiply(const ExprMatrix& a, const ExprMatrix& b, std::size_t cap = kDefaultEntrySizeCap);
ExprMatrix add(const ExprMatrix& a, const ExprMatrix& b);
ExprMatrix subtract(const ExprMatrix& a, const ExprMatrix& b);

}  // namespace dsolkit
