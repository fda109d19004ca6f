#include "dsolkit/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dsolkit {

ExprMatrix::ExprMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

ExprMatrix ExprMatrix::identity(std::size_t n) {
    ExprMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = Expr::constant(1.0);
    return m;
}

ExprMatrix ExprMatrix::from_values(const Eigen::MatrixXd& values) {
    ExprMatrix m(static_cast<std::size_t>(values.rows()), static_cast<std::size_t>(values.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            m(i, j) = Expr::constant(values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    return m;
}

ExprMatrix ExprMatrix::transpose() const {
    ExprMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t(j, i) = (*this)(i, j);
    return t;
}

ExprMatrix ExprMatrix::scaled(const Expr& factor) const {
    ExprMatrix m(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k)
        m.data_[k] = simplify(factor * data_[k]);
    return m;
}

ExprMatrix ExprMatrix::simplified() const {
    ExprMatrix m(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k)
        m.data_[k] = simplify(data_[k]);
    return m;
}

ExprMatrix ExprMatrix::substituted(const Bindings& bindings) const {
    ExprMatrix m(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k)
        m.data_[k] = substitute(data_[k], bindings);
    return m;
}

std::size_t ExprMatrix::max_entry_size() const {
    std::size_t s = 0;
    for (const Expr& e : data_)
        s = std::max(s, e.size());
    return s;
}

Eigen::MatrixXd ExprMatrix::evaluate(const Point& p) const {
    Eigen::MatrixXd m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) {
            const double v = (*this)(i, j).eval(p);
            if (!std::isfinite(v))
                throw EvaluationError("entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                      ") is not finite at the evaluation point");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    return m;
}

ExprMatrix multiply(const ExprMatrix& a, const ExprMatrix& b, std::size_t cap) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("multiply: dimension mismatch");
    ExprMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            Expr acc;
            bool any = false;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                if (a(i, k).is_constant(0.0) || b(k, j).is_constant(0.0))
                    continue;
                Expr term = a(i, k) * b(k, j);
                acc = any ? acc + term : term;
                any = true;
            }
            c(i, j) = simplify(acc);
            if (c(i, j).size() > cap)
                throw ExpressionSwell("matrix product entry (" + std::to_string(i + 1) + "," +
                                      std::to_string(j + 1) + ") has " + std::to_string(c(i, j).size()) +
                                      " nodes, above the cap of " + std::to_string(cap));
        }
    return c;
}

ExprMatrix add(const ExprMatrix& a, const ExprMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("add: dimension mismatch");
    ExprMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            c(i, j) = simplify(a(i, j) + b(i, j));
    return c;
}

ExprMatrix subtract(const ExprMatrix& a, const ExprMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("subtract: dimension mismatch");
    ExprMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            c(i, j) = simplify(a(i, j) - b(i, j));
    return c;
}

}  // namespace dsolkit
