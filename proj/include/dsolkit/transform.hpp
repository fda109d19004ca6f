#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsolkit/poisson.hpp"

namespace dsolkit {

/// Raised when a hypothesis of a closure operation fails on the sample
/// region. Carries the failing report when there is one.
class HypothesisError : public std::runtime_error {
public:
    HypothesisError(const std::string& message, std::optional<VerificationReport> report = std::nullopt)
        : std::runtime_error(message), report_(std::move(report)) {}
    const std::optional<VerificationReport>& report() const { return report_; }

private:
    std::optional<VerificationReport> report_;
};

/// Odd polynomial sum_k c[k] J^(2k+1) or even polynomial sum_k c[k] J^(2k+2).
/// Even polynomials have no constant term by construction.
struct MatrixPolynomial {
    enum class Parity { Odd, Even };
    Parity parity = Parity::Odd;
    std::vector<double> coefficients;

    static MatrixPolynomial odd(std::vector<double> coefficients);
    static MatrixPolynomial even(std::vector<double> coefficients);
    /// Highest power of J.
    std::size_t degree() const;
};

enum class Symmetry { Skew, Symmetric, General };

/// Matrix of functions of Casimir generators, expressed over the coordinates.
class CasimirMatrix {
public:
    /// `entries` are expressions in y1..yk, where y_m stands for generators[m-1].
    /// Throws std::invalid_argument when the declared symmetry does not hold
    /// after simplification.
    static CasimirMatrix from_generators(const ExprMatrix& entries, const std::vector<Expr>& generators,
                                         Symmetry symmetry);
    static CasimirMatrix constant(const Eigen::MatrixXd& values, Symmetry symmetry);
    /// f(D) times the identity.
    static CasimirMatrix scalar(std::size_t n, const Expr& f, const std::vector<Expr>& generators);

    const ExprMatrix& entries() const { return entries_; }
    Symmetry symmetry() const { return symmetry_; }
    std::size_t dimension() const { return entries_.rows(); }

private:
    CasimirMatrix(ExprMatrix entries, Symmetry symmetry);
    ExprMatrix entries_;
    Symmetry symmetry_;
};

/// y = forward(x), x = inverse(y).
struct CoordinateChange {
    std::vector<std::string> old_variables;
    std::vector<std::string> new_variables;
    std::vector<Expr> forward;
    std::vector<Expr> inverse;

    /// y = A x with A invertible.
    static CoordinateChange linear(const Eigen::MatrixXd& a, std::vector<std::string> old_variables,
                                   std::vector<std::string> new_variables);
    static CoordinateChange identity(std::vector<std::string> variables);
};

struct TransformOptions {
    /// Region for hypothesis checks and the output report; unit cube over the
    /// input variables when omitted.
    std::optional<SampleRegion> region;
    double hypothesis_tol = kDefaultTolerance;
    double tol = kDefaultTolerance;
    std::size_t entry_cap = kDefaultEntrySizeCap;
};

struct TransformResult {
    StructureMatrix matrix;
    /// D-solution report of the output.
    VerificationReport report;
    std::vector<std::string> warnings;
};

/// Horner evaluation of P(J) with per-entry simplification.
ExprMatrix matrix_poly(const StructureMatrix& j, const MatrixPolynomial& p,
                       std::size_t cap = kDefaultEntrySizeCap);

/// (P(J) A)^m P(J) with A skew.
TransformResult thm1_skew_sandwich(const StructureMatrix& j, const CasimirMatrix& a, const MatrixPolynomial& p,
                                   unsigned m, const TransformOptions& options = {});

/// (A P(J))^m with A symmetric commuting with J and m odd.
TransformResult thm1_commuting_sym(const StructureMatrix& j, const CasimirMatrix& a, const MatrixPolynomial& p,
                                   unsigned m, const TransformOptions& options = {});

/// A P(J) A^T with A commuting with J.
TransformResult thm1_conjugate(const StructureMatrix& j, const CasimirMatrix& a, const MatrixPolynomial& p,
                               const TransformOptions& options = {});

/// (Q(J) A)^m Q(J) with A skew, Q even and m odd.
TransformResult thm1_even_sandwich(const StructureMatrix& j, const CasimirMatrix& a, const MatrixPolynomial& q,
                                   unsigned m, const TransformOptions& options = {});

/// eta(D_1..D_k) J where `eta` is an expression in y1..yk.
TransformResult scale_by_casimir(const StructureMatrix& j, const Expr& eta, const CasimirSet& casimirs,
                                 const TransformOptions& options = {});

/// A J A^T with A the Jacobian of the forward map, rewritten in the new
/// coordinates. The output report is computed at the images of the region
/// samples.
TransformResult change_coordinates(const StructureMatrix& j, const CoordinateChange& change, bool casimir_jacobian,
                                   const TransformOptions& options = {});

TransformResult sum(const StructureMatrix& j1, const StructureMatrix& j2, const CasimirSet& shared,
                    const TransformOptions& options = {});

/// J1 ... Jp + (-1)^(p+1) Jp ... J1.
TransformResult alternating_product(const std::vector<StructureMatrix>& matrices, const CasimirSet& shared,
                                    const TransformOptions& options = {});

}  // namespace dsolkit
