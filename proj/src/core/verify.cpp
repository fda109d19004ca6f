#include "dsolkit/poisson.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <cstdio>
#include <limits>

namespace dsolkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxDiagnostics = 5;

std::string format_point(const Point& p) {
    std::string s = "(";
    char buf[40];
    for (std::size_t i = 0; i < p.dimension(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", p.value(i));
        s += (i ? ", " : "") + p.names()[i] + "=" + buf;
    }
    return s + ")";
}

VerificationReport start_report(std::string property, std::size_t samples, double tol) {
    VerificationReport r;
    r.property = std::move(property);
    r.samples = samples;
    r.tolerance = tol;
    return r;
}

void record(VerificationReport& r, double residual, const Point& p, std::vector<std::size_t> index) {
    if (std::isnan(residual))
        residual = kInf;
    if (residual > r.max_residual || r.worst_point.empty()) {
        r.max_residual = residual;
        r.worst_point.assign(p.values().begin(), p.values().end());
        r.worst_index = std::move(index);
    }
}

void note_singular(VerificationReport& r, const Point& p, const std::string& what, std::size_t& count) {
    if (count++ < kMaxDiagnostics)
        r.diagnostics.push_back("singular evaluation at " + format_point(p) + ": " + what);
    record(r, kInf, p, {});
}

void finish(VerificationReport& r, std::size_t singular) {
    if (singular > kMaxDiagnostics)
        r.diagnostics.push_back(std::to_string(singular) + " singular sample points in total");
    r.passed = r.max_residual <= r.tolerance;
}

// Symbolic first partials of the upper-triangle entries, shared by the
// Jacobi and distinguished checks.
class EntryCalculus {
public:
    explicit EntryCalculus(const StructureMatrix& j) : j_(j), n_(j.dimension()), partials_(n_) {
        for (std::size_t l = 0; l < n_; ++l) {
            partials_[l] = ExprMatrix(n_, n_);
            for (std::size_t a = 0; a < n_; ++a)
                for (std::size_t b = a + 1; b < n_; ++b)
                    partials_[l](a, b) = simplify(differentiate(j(a, b), j.variables()[l]));
        }
    }

    struct Values {
        Eigen::MatrixXd matrix;
        // partial[l](a, b) = d J_ab / d x_l, full skew matrices
        std::vector<Eigen::MatrixXd> partial;
    };

    Values evaluate(const Point& p) const {
        Values v;
        v.matrix = j_.evaluate(p);
        v.partial.resize(n_);
        for (std::size_t l = 0; l < n_; ++l) {
            Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n_, n_);
            for (std::size_t a = 0; a < n_; ++a)
                for (std::size_t b = a + 1; b < n_; ++b) {
                    const double x = partials_[l](a, b).eval(p);
                    if (!std::isfinite(x))
                        throw EvaluationError("derivative of entry (" + std::to_string(a + 1) + "," +
                                              std::to_string(b + 1) + ") is not finite");
                    d(a, b) = x;
                    d(b, a) = -x;
                }
            v.partial[l] = std::move(d);
        }
        return v;
    }

    std::size_t dimension() const { return n_; }

private:
    const StructureMatrix& j_;
    std::size_t n_;
    std::vector<ExprMatrix> partials_;
};

double cyclic_sum(const EntryCalculus::Values& v, std::size_t i, std::size_t j, std::size_t k) {
    const Eigen::MatrixXd& m = v.matrix;
    double s = 0.0;
    for (std::size_t l = 0; l < v.partial.size(); ++l) {
        const Eigen::MatrixXd& d = v.partial[l];
        s += m(l, i) * d(j, k) + m(l, j) * d(k, i) + m(l, k) * d(i, j);
    }
    return s;
}

void scan_jacobi(const EntryCalculus::Values& v, const Point& p, VerificationReport& r) {
    const std::size_t n = v.matrix.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                record(r, std::abs(cyclic_sum(v, i, j, k)), p, {i, j, k});
}

void scan_kernel_gradient(const EntryCalculus::Values& v, const Point& p, VerificationReport& r) {
    const std::size_t n = v.matrix.rows();
    Eigen::VectorXd grad(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            for (std::size_t l = 0; l < n; ++l)
                grad(l) = v.partial[l](a, b);
            const double res = (v.matrix * grad).cwiseAbs().maxCoeff();
            record(r, res, p, {a, b});
        }
}

void check_variables(const StructureMatrix& j, const std::vector<Point>& samples) {
    if (!samples.empty() && samples.front().names() != j.variables())
        throw std::invalid_argument("verification: sample variables do not match the matrix variables");
}

}  // namespace

std::string summarize(const VerificationReport& r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", r.max_residual);
    std::string s = r.property + ": " + (r.passed ? "pass" : "fail") + ", max residual " + buf;
    if (!r.worst_index.empty()) {
        s += " at index (";
        for (std::size_t k = 0; k < r.worst_index.size(); ++k)
            s += (k ? "," : "") + std::to_string(r.worst_index[k] + 1);
        s += ")";
    }
    if (!r.worst_point.empty()) {
        s += " point (";
        for (std::size_t k = 0; k < r.worst_point.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", r.worst_point[k]);
            s += (k ? ", " : "") + std::string(buf);
        }
        s += ")";
    }
    return s;
}

double jacobi_residual(const StructureMatrix& j, std::size_t a, std::size_t b, std::size_t c, const Point& p) {
    const std::size_t n = j.dimension();
    if (a >= n || b >= n || c >= n)
        throw std::out_of_range("jacobi_residual: index out of range");
    const Eigen::MatrixXd m = j.evaluate(p);
    double s = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        const std::string& x = j.variables()[l];
        auto d = [&](std::size_t r, std::size_t q) {
            const double v = simplify(differentiate(j(r, q), x)).eval(p);
            if (!std::isfinite(v))
                throw EvaluationError("jacobi_residual: singular derivative");
            return v;
        };
        s += m(l, a) * d(b, c) + m(l, b) * d(c, a) + m(l, c) * d(a, b);
    }
    return s;
}

Eigen::VectorXd kg_residual(const StructureMatrix& j, const Expr& f, const Point& p) {
    const std::size_t n = j.dimension();
    Eigen::VectorXd grad(n);
    for (std::size_t l = 0; l < n; ++l) {
        grad(l) = differentiate(f, j.variables()[l]).eval(p);
        if (!std::isfinite(grad(l)))
            throw EvaluationError("kg_residual: gradient is not finite");
    }
    return j.evaluate(p) * grad;
}

VerificationReport verify_jacobi(const StructureMatrix& j, const std::vector<Point>& samples, double tol) {
    check_variables(j, samples);
    VerificationReport r = start_report("jacobi", samples.size(), tol);
    EntryCalculus calc(j);
    std::size_t singular = 0;
    for (const Point& p : samples) {
        try {
            scan_jacobi(calc.evaluate(p), p, r);
        } catch (const EvaluationError& e) {
            note_singular(r, p, e.what(), singular);
        }
    }
    finish(r, singular);
    return r;
}

VerificationReport verify_jacobi(const StructureMatrix& j, const SampleRegion& region, double tol) {
    return verify_jacobi(j, region.sample(), tol);
}

VerificationReport verify_casimir(const StructureMatrix& j, const Expr& f, const std::vector<Point>& samples,
                                  double tol) {
    check_variables(j, samples);
    VerificationReport r = start_report("casimir", samples.size(), tol);
    const std::size_t n = j.dimension();
    std::vector<Expr> grad(n);
    for (std::size_t l = 0; l < n; ++l)
        grad[l] = simplify(differentiate(f, j.variables()[l]));
    std::size_t singular = 0;
    for (const Point& p : samples) {
        try {
            Eigen::VectorXd g(n);
            for (std::size_t l = 0; l < n; ++l) {
                g(l) = grad[l].eval(p);
                if (!std::isfinite(g(l)))
                    throw EvaluationError("gradient component " + std::to_string(l + 1) + " is not finite");
            }
            const Eigen::VectorXd res = j.evaluate(p) * g;
            Eigen::Index row = 0;
            const double worst = res.cwiseAbs().maxCoeff(&row);
            record(r, worst, p, {static_cast<std::size_t>(row)});
        } catch (const EvaluationError& e) {
            note_singular(r, p, e.what(), singular);
        }
    }
    finish(r, singular);
    return r;
}

VerificationReport verify_casimir(const StructureMatrix& j, const Expr& f, const SampleRegion& region, double tol) {
    return verify_casimir(j, f, region.sample(), tol);
}

VerificationReport verify_dsolution(const StructureMatrix& j, const std::vector<Point>& samples, double tol) {
    check_variables(j, samples);
    VerificationReport kg = start_report("dsolution", samples.size(), tol);
    VerificationReport jac = start_report("jacobi", samples.size(), tol);
    EntryCalculus calc(j);
    std::size_t singular = 0;
    for (const Point& p : samples) {
        try {
            const auto values = calc.evaluate(p);
            scan_kernel_gradient(values, p, kg);
            scan_jacobi(values, p, jac);
        } catch (const EvaluationError& e) {
            note_singular(kg, p, e.what(), singular);
        }
    }
    finish(kg, singular);
    finish(jac, 0);
    char buf[160];
    std::snprintf(buf, sizeof buf, "kernel-gradient max residual %.17g; jacobi max residual %.17g",
                  kg.max_residual, jac.max_residual);
    kg.diagnostics.push_back(buf);
    if (jac.max_residual > kg.max_residual) {
        kg.max_residual = jac.max_residual;
        kg.worst_point = jac.worst_point;
        kg.worst_index = jac.worst_index;
        kg.diagnostics.push_back("worst residual comes from the Jacobi identity");
    }
    kg.passed = kg.max_residual <= tol;
    return kg;
}

VerificationReport verify_dsolution(const StructureMatrix& j, const SampleRegion& region, double tol) {
    return verify_dsolution(j, region.sample(), tol);
}

RankEstimate rank_of(const Eigen::MatrixXd& m, double tol) {
    RankEstimate est;
    if (m.size() == 0)
        return est;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const Eigen::VectorXd& s = svd.singularValues();
    const double smax = s.maxCoeff();
    if (smax <= tol)
        return est;
    int count = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol * smax)
            ++count;
    est.numerical_rank = count;
    est.rank = count - count % 2;
    return est;
}

RankEstimate rank_at(const StructureMatrix& j, const Point& p, double tol) { return rank_of(j.evaluate(p), tol); }

int RankProfile::max_rank() const { return counts.empty() ? 0 : counts.rbegin()->first; }
int RankProfile::min_rank() const { return counts.empty() ? 0 : counts.begin()->first; }

RankProfile rank_profile(const StructureMatrix& j, const std::vector<Point>& samples, double tol) {
    check_variables(j, samples);
    RankProfile prof;
    for (const Point& p : samples) {
        try {
            const RankEstimate est = rank_at(j, p, tol);
            ++prof.counts[est.rank];
            if (est.odd_before_rounding())
                ++prof.odd_warnings;
        } catch (const EvaluationError&) {
            ++prof.singular_points;
        }
    }
    return prof;
}

RankProfile rank_profile(const StructureMatrix& j, const SampleRegion& region, double tol) {
    return rank_profile(j, region.sample(), tol);
}

Eigen::MatrixXd find_linear_casimirs(const StructureMatrix& j, const std::vector<Point>& samples, double tol) {
    check_variables(j, samples);
    const auto n = static_cast<Eigen::Index>(j.dimension());
    std::vector<Eigen::MatrixXd> blocks;
    for (const Point& p : samples) {
        try {
            blocks.push_back(j.evaluate(p));
        } catch (const EvaluationError&) {
        }
    }
    Eigen::MatrixXd stacked(static_cast<Eigen::Index>(blocks.size()) * n + n, n);
    stacked.setZero();  // the trailing zero block keeps the system at least n x n
    for (std::size_t k = 0; k < blocks.size(); ++k)
        stacked.block(static_cast<Eigen::Index>(k) * n, 0, n, n) = blocks[k];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double threshold = tol * std::max(1.0, s.size() ? s.maxCoeff() : 0.0);
    std::vector<Eigen::Index> null_columns;
    for (Eigen::Index i = 0; i < n; ++i)
        if (s(i) <= threshold)
            null_columns.push_back(i);
    Eigen::MatrixXd basis(n, static_cast<Eigen::Index>(null_columns.size()));
    for (std::size_t c = 0; c < null_columns.size(); ++c)
        basis.col(static_cast<Eigen::Index>(c)) = svd.matrixV().col(null_columns[c]);
    return basis;
}

Eigen::MatrixXd find_linear_casimirs(const StructureMatrix& j, const SampleRegion& region, double tol) {
    return find_linear_casimirs(j, region.sample(), tol);
}

int gradient_rank(const std::vector<Expr>& functions, const std::vector<std::string>& variables, const Point& p,
                  double tol) {
    Eigen::MatrixXd g(functions.size(), variables.size());
    for (std::size_t r = 0; r < functions.size(); ++r)
        for (std::size_t c = 0; c < variables.size(); ++c) {
            const double v = differentiate(functions[r], variables[c]).eval(p);
            if (!std::isfinite(v))
                throw EvaluationError("gradient_rank: gradient is not finite");
            g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    if (g.size() == 0)
        return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
    const Eigen::VectorXd& s = svd.singularValues();
    const double smax = s.maxCoeff();
    if (smax <= tol)
        return 0;
    int count = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol * smax)
            ++count;
    return count;
}

}  // namespace dsolkit
