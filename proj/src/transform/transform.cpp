#include "dsolkit/transform.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace dsolkit {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string entry_name(std::size_t i, std::size_t j) {
    return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

std::vector<Point> region_samples(const std::vector<std::string>& variables, const TransformOptions& options) {
    const SampleRegion region = options.region ? *options.region : SampleRegion::cube(variables);
    if (region.variables != variables)
        throw std::invalid_argument("transform: region variables do not match the matrix variables");
    return region.sample();
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Every non-constant entry of `a` must be a kernel-gradient function of J.
void require_casimir_entries(const std::string& op, const StructureMatrix& j, const ExprMatrix& a,
                             const std::vector<Point>& samples, double tol) {
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) {
            if (a(r, c).is_constant())
                continue;
            VerificationReport rep = verify_casimir(j, a(r, c), samples, tol);
            if (!rep.passed)
                throw HypothesisError(op + ": entry " + entry_name(r, c) + " of A is not a Casimir of J; " +
                                          summarize(rep),
                                      rep);
        }
}

void require_symmetry(const std::string& op, const CasimirMatrix& a, Symmetry expected,
                      const std::vector<Point>& samples, double tol) {
    if (a.symmetry() != expected) {
        const char* name = expected == Symmetry::Skew ? "skew-symmetric" : "symmetric";
        throw HypothesisError(op + ": A must be declared " + std::string(name));
    }
    const double sign = expected == Symmetry::Skew ? -1.0 : 1.0;
    for (const Point& p : samples) {
        const Eigen::MatrixXd m = a.entries().evaluate(p);
        const double dev = max_abs(m - sign * m.transpose());
        if (dev > tol * std::max(1.0, max_abs(m)))
            throw HypothesisError(op + ": A violates its declared symmetry by " + fmt(dev));
    }
}

void require_commutes(const std::string& op, const StructureMatrix& j, const CasimirMatrix& a,
                      const std::vector<Point>& samples, double tol) {
    for (const Point& p : samples) {
        const Eigen::MatrixXd jm = j.evaluate(p);
        const Eigen::MatrixXd am = a.entries().evaluate(p);
        const double dev = max_abs(am * jm - jm * am);
        if (dev > tol * std::max(1.0, max_abs(am) * max_abs(jm)))
            throw HypothesisError(op + ": A does not commute with J, max |AJ - JA| = " + fmt(dev));
    }
}

void require_dimension(const std::string& op, const StructureMatrix& j, const CasimirMatrix& a) {
    if (a.dimension() != j.dimension())
        throw std::invalid_argument(op + ": A and J have different dimensions");
}

// Checks numeric skew-symmetry of the full product before keeping only its
// upper triangle, then verifies the distinguished property.
TransformResult finish(const std::string& op, const ExprMatrix& m, const std::vector<std::string>& variables,
                       const std::vector<Point>& samples, const TransformOptions& options,
                       std::vector<std::string> warnings = {}) {
    for (const Point& p : samples) {
        Eigen::MatrixXd v;
        try {
            v = m.evaluate(p);
        } catch (const EvaluationError&) {
            continue;
        }
        const double dev = max_abs(v + v.transpose());
        if (dev > options.hypothesis_tol * std::max(1.0, max_abs(v)))
            throw HypothesisError(op + ": result is not skew-symmetric, max |M + M^T| = " + fmt(dev));
    }
    StructureMatrix out = structure_from_upper(m, variables);
    VerificationReport report = verify_dsolution(out, samples, options.tol);
    return {std::move(out), std::move(report), std::move(warnings)};
}

ExprMatrix power_product(const ExprMatrix& left, const ExprMatrix& right, unsigned m, std::size_t cap) {
    // (left right)^m left
    ExprMatrix acc = left;
    for (unsigned k = 0; k < m; ++k)
        acc = multiply(multiply(left, right, cap), acc, cap);
    return acc;
}

Bindings generator_bindings(const std::vector<Expr>& generators) {
    Bindings bind;
    const auto y = numbered_names("y", generators.size());
    for (std::size_t m = 0; m < generators.size(); ++m)
        bind.emplace(y[m], generators[m]);
    return bind;
}

// Rewrites an expression in y1..yk over the coordinates via the generators.
Expr over_generators(const Expr& e, const std::vector<Expr>& generators, const std::string& who) {
    const auto y = numbered_names("y", generators.size());
    for (const std::string& v : e.free_variables())
        if (std::find(y.begin(), y.end(), v) == y.end())
            throw std::invalid_argument(who + ": '" + v + "' is not one of y1..y" + std::to_string(y.size()));
    return simplify(substitute(e, generator_bindings(generators)));
}

void check_rank_constancy(const std::string& op, const StructureMatrix& j, const std::vector<Point>& samples,
                          std::vector<std::string>& warnings, std::size_t index) {
    const RankProfile prof = rank_profile(j, samples);
    const std::string which = "input " + std::to_string(index + 1);
    if (prof.counts.size() > 1)
        warnings.push_back(op + ": " + which + " does not have constant rank on the samples");
    if (prof.max_rank() < 2)
        warnings.push_back(op + ": " + which + " has rank below 2 on the samples");
}

void require_dsolution_input(const std::string& op, const StructureMatrix& j, const std::vector<Point>& samples,
                             double tol, std::size_t index) {
    VerificationReport rep = verify_dsolution(j, samples, tol);
    if (!rep.passed)
        throw HypothesisError(op + ": input " + std::to_string(index + 1) + " is not a D-solution; " + summarize(rep),
                              rep);
}

void require_shared(const std::string& op, const std::vector<StructureMatrix>& matrices, const CasimirSet& shared,
                    const std::vector<Point>& samples, double tol) {
    for (std::size_t k = 0; k < matrices.size(); ++k)
        for (const Expr& f : shared.functions()) {
            VerificationReport rep = verify_casimir(matrices[k], f, samples, tol);
            if (!rep.passed)
                throw HypothesisError(op + ": shared generator " + f.to_string() + " is not a Casimir of input " +
                                          std::to_string(k + 1) + "; " + summarize(rep),
                                      rep);
        }
}

void require_same_space(const std::string& op, const std::vector<StructureMatrix>& matrices) {
    if (matrices.empty())
        throw std::invalid_argument(op + ": at least one matrix is required");
    for (const StructureMatrix& m : matrices)
        if (m.variables() != matrices.front().variables())
            throw std::invalid_argument(op + ": all matrices must share dimension and variables");
}

}  // namespace

MatrixPolynomial MatrixPolynomial::odd(std::vector<double> coefficients) {
    return {Parity::Odd, std::move(coefficients)};
}

MatrixPolynomial MatrixPolynomial::even(std::vector<double> coefficients) {
    return {Parity::Even, std::move(coefficients)};
}

std::size_t MatrixPolynomial::degree() const {
    if (coefficients.empty())
        return 0;
    return 2 * coefficients.size() - (parity == Parity::Odd ? 1 : 0);
}

CasimirMatrix::CasimirMatrix(ExprMatrix entries, Symmetry symmetry)
    : entries_(std::move(entries)), symmetry_(symmetry) {
    if (entries_.rows() != entries_.cols())
        throw std::invalid_argument("casimir matrix: must be square");
    if (symmetry_ == Symmetry::General)
        return;
    const double sign = symmetry_ == Symmetry::Skew ? 1.0 : -1.0;
    for (std::size_t i = 0; i < entries_.rows(); ++i)
        for (std::size_t j = i; j < entries_.cols(); ++j) {
            const Expr gap = simplify(entries_(i, j) + Expr::constant(sign) * entries_(j, i));
            if (!gap.is_constant(0.0))
                throw std::invalid_argument("casimir matrix: entries " + entry_name(i, j) + " and " +
                                            entry_name(j, i) + " break the declared symmetry");
        }
}

CasimirMatrix CasimirMatrix::from_generators(const ExprMatrix& entries, const std::vector<Expr>& generators,
                                             Symmetry symmetry) {
    ExprMatrix m(entries.rows(), entries.cols());
    for (std::size_t i = 0; i < entries.rows(); ++i)
        for (std::size_t j = 0; j < entries.cols(); ++j)
            m(i, j) = over_generators(entries(i, j), generators, "casimir matrix");
    return CasimirMatrix(std::move(m), symmetry);
}

CasimirMatrix CasimirMatrix::constant(const Eigen::MatrixXd& values, Symmetry symmetry) {
    return CasimirMatrix(ExprMatrix::from_values(values), symmetry);
}

CasimirMatrix CasimirMatrix::scalar(std::size_t n, const Expr& f, const std::vector<Expr>& generators) {
    const Expr value = over_generators(f, generators, "casimir matrix");
    ExprMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = value;
    return CasimirMatrix(std::move(m), Symmetry::Symmetric);
}

CoordinateChange CoordinateChange::linear(const Eigen::MatrixXd& a, std::vector<std::string> old_variables,
                                          std::vector<std::string> new_variables) {
    const auto n = static_cast<Eigen::Index>(old_variables.size());
    if (a.rows() != n || a.cols() != n || static_cast<Eigen::Index>(new_variables.size()) != n)
        throw std::invalid_argument("linear change: dimension mismatch");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible())
        throw std::invalid_argument("linear change: matrix is singular");
    const Eigen::MatrixXd inv = lu.inverse();
    auto rows = [](const Eigen::MatrixXd& m, const std::vector<std::string>& vars) {
        std::vector<Expr> out;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            Expr acc;
            for (Eigen::Index k = 0; k < m.cols(); ++k)
                if (m(i, k) != 0.0)
                    acc = acc + Expr::constant(m(i, k)) * Expr::variable(vars[static_cast<std::size_t>(k)]);
            out.push_back(simplify(acc));
        }
        return out;
    };
    CoordinateChange c;
    c.forward = rows(a, old_variables);
    c.inverse = rows(inv, new_variables);
    c.old_variables = std::move(old_variables);
    c.new_variables = std::move(new_variables);
    return c;
}

CoordinateChange CoordinateChange::identity(std::vector<std::string> variables) {
    CoordinateChange c;
    for (const std::string& v : variables) {
        c.forward.push_back(Expr::variable(v));
        c.inverse.push_back(Expr::variable(v));
    }
    c.old_variables = variables;
    c.new_variables = std::move(variables);
    return c;
}

ExprMatrix matrix_poly(const StructureMatrix& j, const MatrixPolynomial& p, std::size_t cap) {
    if (p.coefficients.empty())
        throw std::invalid_argument("matrix_poly: empty coefficient list");
    const ExprMatrix& jm = j.entries();
    const std::size_t n = j.dimension();
    const ExprMatrix j2 = multiply(jm, jm, cap);
    auto scalar_identity = [n](double c) {
        ExprMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = Expr::constant(c);
        return m;
    };
    // Horner in J^2: c0 + J^2 (c1 + J^2 (c2 + ...)).
    ExprMatrix acc = scalar_identity(p.coefficients.back());
    for (std::size_t k = p.coefficients.size() - 1; k-- > 0;)
        acc = add(scalar_identity(p.coefficients[k]), multiply(j2, acc, cap));
    return multiply(p.parity == MatrixPolynomial::Parity::Odd ? jm : j2, acc, cap);
}

TransformResult thm1_skew_sandwich(const StructureMatrix& j, const CasimirMatrix& a, const MatrixPolynomial& p,
                                   unsigned m, const TransformOptions& options) {
    const std::string op = "thm1a";
    if (p.parity != MatrixPolynomial::Parity::Odd)
        throw std::invalid_argument(op + ": P must be an odd polynomial");
    require_dimension(op, j, a);
    const auto samples = region_samples(j.variables(), options);
    require_symmetry(op, a, Symmetry::Skew, samples, options.hypothesis_tol);
    require_casimir_entries(op, j, a.entries(), samples, options.hypothesis_tol);
    const ExprMatrix pj = matrix_poly(j, p, options.entry_cap);
    return finish(op, power_product(pj, a.entries(), m, options.entry_cap), j.variables(), samples, options);
}

TransformResult thm1_commuting_sym(const StructureMatrix& j, const CasimirMatrix& a, const MatrixPolynomial& p,
                                   unsigned m, const TransformOptions& options) {
    const std::string op = "thm1b";
    if (p.parity != MatrixPolynomial::Parity::Odd)
        throw std::invalid_argument(op + ": P must be an odd polynomial");
    if (m % 2 == 0)
        throw std::invalid_argument(op + ": m must be odd");
    require_dimension(op, j, a);
    const auto samples = region_samples(j.variables(), options);
    require_symmetry(op, a, Symmetry::Symmetric, samples, options.hypothesis_tol);
    require_casimir_entries(op, j, a.entries(), samples, options.hypothesis_tol);
    require_commutes(op, j, a, samples, options.hypothesis_tol);
    const ExprMatrix ap = multiply(a.entries(), matrix_poly(j, p, options.entry_cap), options.entry_cap);
    ExprMatrix acc = ap;
    for (unsigned k = 1; k < m; ++k)
        acc = multiply(ap, acc, options.entry_cap);
    return finish(op, acc, j.variables(), samples, options);
}

TransformResult thm1_conjugate(const StructureMatrix& j, const CasimirMatrix& a, const MatrixPolynomial& p,
                               const TransformOptions& options) {
    const std::string op = "thm1c";
    if (p.parity != MatrixPolynomial::Parity::Odd)
        throw std::invalid_argument(op + ": P must be an odd polynomial");
    require_dimension(op, j, a);
    const auto samples = region_samples(j.variables(), options);
    require_casimir_entries(op, j, a.entries(), samples, options.hypothesis_tol);
    require_commutes(op, j, a, samples, options.hypothesis_tol);
    const ExprMatrix pj = matrix_poly(j, p, options.entry_cap);
    const ExprMatrix out =
        multiply(multiply(a.entries(), pj, options.entry_cap), a.entries().transpose(), options.entry_cap);
    return finish(op, out, j.variables(), samples, options);
}

TransformResult thm1_even_sandwich(const StructureMatrix& j, const CasimirMatrix& a, const MatrixPolynomial& q,
                                   unsigned m, const TransformOptions& options) {
    const std::string op = "thm1d";
    if (q.parity != MatrixPolynomial::Parity::Even)
        throw std::invalid_argument(op + ": Q must be an even polynomial without constant term");
    if (m % 2 == 0)
        throw std::invalid_argument(op + ": m must be odd");
    require_dimension(op, j, a);
    const auto samples = region_samples(j.variables(), options);
    require_symmetry(op, a, Symmetry::Skew, samples, options.hypothesis_tol);
    require_casimir_entries(op, j, a.entries(), samples, options.hypothesis_tol);
    const ExprMatrix qj = matrix_poly(j, q, options.entry_cap);
    return finish(op, power_product(qj, a.entries(), m, options.entry_cap), j.variables(), samples, options);
}

TransformResult scale_by_casimir(const StructureMatrix& j, const Expr& eta, const CasimirSet& casimirs,
                                 const TransformOptions& options) {
    const std::string op = "scale";
    const auto samples = region_samples(j.variables(), options);
    require_shared(op, {j}, casimirs, samples, options.hypothesis_tol);
    const auto generators = casimirs.functions();
    const Expr factor = over_generators(eta, generators, op);
    return finish(op, j.entries().scaled(factor), j.variables(), samples, options);
}

TransformResult change_coordinates(const StructureMatrix& j, const CoordinateChange& change, bool casimir_jacobian,
                                   const TransformOptions& options) {
    const std::string op = "change";
    const std::size_t n = j.dimension();
    if (change.old_variables != j.variables())
        throw std::invalid_argument(op + ": old variables must match the matrix variables");
    if (change.forward.size() != n || change.inverse.size() != n || change.new_variables.size() != n)
        throw std::invalid_argument(op + ": forward, inverse and new variables must all have n entries");
    const auto samples = region_samples(j.variables(), options);
    auto new_names = std::make_shared<const std::vector<std::string>>(change.new_variables);

    std::vector<Point> mapped;
    for (const Point& p : samples) {
        std::vector<double> y(n), back(n);
        for (std::size_t i = 0; i < n; ++i)
            y[i] = change.forward[i].eval(p);
        Point q(new_names, y);
        double dev = 0.0, scale = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            back[i] = change.inverse[i].eval(q);
            dev = std::max(dev, std::abs(back[i] - p.value(i)));
            scale = std::max(scale, std::abs(p.value(i)));
        }
        if (!(dev <= 1e-9 * scale))
            throw HypothesisError(op + ": inverse map does not invert the forward map, deviation " + fmt(dev));
        mapped.push_back(std::move(q));
    }

    ExprMatrix jac(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            jac(i, k) = simplify(differentiate(change.forward[i], j.variables()[k]));
    if (casimir_jacobian)
        require_casimir_entries(op, j, jac, samples, options.hypothesis_tol);

    const ExprMatrix pushed = multiply(multiply(jac, j.entries(), options.entry_cap), jac.transpose(),
                                       options.entry_cap);
    Bindings back;
    for (std::size_t i = 0; i < n; ++i)
        back.emplace(j.variables()[i], change.inverse[i]);
    return finish(op, pushed.substituted(back).simplified(), change.new_variables, mapped, options);
}

TransformResult sum(const StructureMatrix& j1, const StructureMatrix& j2, const CasimirSet& shared,
                    const TransformOptions& options) {
    const std::string op = "sum";
    const std::vector<StructureMatrix> inputs{j1, j2};
    require_same_space(op, inputs);
    const auto samples = region_samples(j1.variables(), options);
    std::vector<std::string> warnings;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        require_dsolution_input(op, inputs[k], samples, options.hypothesis_tol, k);
        check_rank_constancy(op, inputs[k], samples, warnings, k);
    }
    require_shared(op, inputs, shared, samples, options.hypothesis_tol);
    return finish(op, add(j1.entries(), j2.entries()), j1.variables(), samples, options, std::move(warnings));
}

TransformResult alternating_product(const std::vector<StructureMatrix>& matrices, const CasimirSet& shared,
                                    const TransformOptions& options) {
    const std::string op = "altprod";
    require_same_space(op, matrices);
    const auto samples = region_samples(matrices.front().variables(), options);
    std::vector<std::string> warnings;
    for (std::size_t k = 0; k < matrices.size(); ++k) {
        require_dsolution_input(op, matrices[k], samples, options.hypothesis_tol, k);
        check_rank_constancy(op, matrices[k], samples, warnings, k);
    }
    require_shared(op, matrices, shared, samples, options.hypothesis_tol);
    ExprMatrix forward = matrices.front().entries();
    ExprMatrix backward = matrices.back().entries();
    const std::size_t p = matrices.size();
    for (std::size_t k = 1; k < p; ++k) {
        forward = multiply(forward, matrices[k].entries(), options.entry_cap);
        backward = multiply(backward, matrices[p - 1 - k].entries(), options.entry_cap);
    }
    const ExprMatrix out = p % 2 == 1 ? add(forward, backward) : subtract(forward, backward);
    return finish(op, out, matrices.front().variables(), samples, options, std::move(warnings));
}

}  // namespace dsolkit
