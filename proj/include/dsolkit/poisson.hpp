#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsolkit/expr.hpp"
#include "dsolkit/matrix.hpp"

namespace dsolkit {

/// Upper-triangle entry with zero-based indices, i < j.
struct UpperEntry {
    std::size_t i;
    std::size_t j;
    Expr value;
};

/// Skew-symmetric n x n matrix of expressions over n named coordinates.
///
/// Skew-symmetry is structural: only the strict upper triangle is supplied,
/// entry(j, i) is the negation of entry(i, j) and the diagonal is zero.
class StructureMatrix {
public:
    /// Zero matrix over the given coordinates.
    explicit StructureMatrix(std::vector<std::string> variables);

    std::size_t dimension() const { return variables_.size(); }
    const std::vector<std::string>& variables() const { return variables_; }

    const Expr& operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
    const ExprMatrix& entries() const { return entries_; }

    std::vector<UpperEntry> upper_entries() const;

    /// Throws EvaluationError on a non-finite entry.
    Eigen::MatrixXd evaluate(const Point& p) const { return entries_.evaluate(p); }

private:
    friend StructureMatrix make_matrix(std::size_t, std::vector<std::string>, const std::vector<UpperEntry>&);
    std::vector<std::string> variables_;
    ExprMatrix entries_;
};

/// Builds a structure matrix from its strict upper triangle. Unlisted
/// entries are zero. Throws std::invalid_argument on out-of-range or
/// duplicate indices, or an entry using an undeclared variable.
StructureMatrix make_matrix(std::size_t n, std::vector<std::string> variables, const std::vector<UpperEntry>& upper);

/// Wraps the upper triangle of a square matrix. Callers are responsible for
/// checking that `m` is skew-symmetric; see transform.hpp.
StructureMatrix structure_from_upper(const ExprMatrix& m, std::vector<std::string> variables);

struct Interval {
    double lo;
    double hi;
};

/// Box domain with exclusions |g(x)| >= margin and a seeded sampler.
struct SampleRegion {
    std::vector<std::string> variables;
    std::vector<Interval> box;
    std::vector<Expr> exclusions;
    double margin = 0.05;
    std::size_t samples = 200;
    std::uint64_t seed = 42;

    static SampleRegion cube(std::vector<std::string> variables, double lo = -1.0, double hi = 1.0,
                             std::size_t samples = 200, std::uint64_t seed = 42);

    /// Exactly `samples` points inside the box satisfying every exclusion.
    /// Identical seeds give bit-identical points. Throws std::runtime_error if
    /// rejection sampling cannot find enough admissible points.
    std::vector<Point> sample() const;

    bool admits(const Point& p) const;
};

struct VerificationReport {
    std::string property;
    bool passed = true;
    double max_residual = 0.0;
    std::vector<double> worst_point;
    /// Zero-based index tuple where the worst residual occurred.
    std::vector<std::size_t> worst_index;
    std::size_t samples = 0;
    double tolerance = 0.0;
    std::vector<std::string> diagnostics;
};

/// One line: property, verdict, max residual, worst index (1-based) and point.
std::string summarize(const VerificationReport& report);

inline constexpr double kDefaultTolerance = 1e-9;
inline constexpr double kDefaultRankTolerance = 1e-8;

enum class CasimirStatus { Claimed, Verified };

struct CasimirEntry {
    Expr function;
    CasimirStatus status = CasimirStatus::Claimed;
    std::optional<VerificationReport> report;
};

/// Ordered generators of a Casimir set. Entries start out claimed and are
/// promoted only by verify().
class CasimirSet {
public:
    CasimirSet() = default;
    explicit CasimirSet(const std::vector<Expr>& functions);

    void add(Expr function);
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const CasimirEntry& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<CasimirEntry>& entries() const { return entries_; }
    std::vector<Expr> functions() const;

    /// Runs verify_casimir on every generator, attaching the reports.
    /// Returns true when all generators pass.
    bool verify(const StructureMatrix& j, const std::vector<Point>& samples, double tol = kDefaultTolerance);
    bool all_verified() const;

private:
    std::vector<CasimirEntry> entries_;
};

/// Jacobi cyclic sum at p for zero-based indices (i, j, k).
double jacobi_residual(const StructureMatrix& j, std::size_t a, std::size_t b, std::size_t c, const Point& p);

/// J(p) * grad f(p).
Eigen::VectorXd kg_residual(const StructureMatrix& j, const Expr& f, const Point& p);

VerificationReport verify_jacobi(const StructureMatrix& j, const std::vector<Point>& samples,
                                 double tol = kDefaultTolerance);
VerificationReport verify_jacobi(const StructureMatrix& j, const SampleRegion& region, double tol = kDefaultTolerance);

VerificationReport verify_casimir(const StructureMatrix& j, const Expr& f, const std::vector<Point>& samples,
                                  double tol = kDefaultTolerance);
VerificationReport verify_casimir(const StructureMatrix& j, const Expr& f, const SampleRegion& region,
                                  double tol = kDefaultTolerance);

/// Distinguished check: every entry is a kernel-gradient function of J, and
/// J satisfies the Jacobi identity. The reported residual is the larger of
/// the two maxima.
VerificationReport verify_dsolution(const StructureMatrix& j, const std::vector<Point>& samples,
                                    double tol = kDefaultTolerance);
VerificationReport verify_dsolution(const StructureMatrix& j, const SampleRegion& region,
                                    double tol = kDefaultTolerance);

struct RankEstimate {
    /// Even rank reported to callers.
    int rank = 0;
    /// Singular-value count before rounding down to even.
    int numerical_rank = 0;
    bool odd_before_rounding() const { return numerical_rank % 2 != 0; }
};

/// Singular values above tol * sigma_max are counted; rank 0 when
/// sigma_max <= tol.
RankEstimate rank_at(const StructureMatrix& j, const Point& p, double tol = kDefaultRankTolerance);
RankEstimate rank_of(const Eigen::MatrixXd& m, double tol = kDefaultRankTolerance);

struct RankProfile {
    std::map<int, std::size_t> counts;
    std::size_t odd_warnings = 0;
    std::size_t singular_points = 0;
    int max_rank() const;
    int min_rank() const;
};

RankProfile rank_profile(const StructureMatrix& j, const std::vector<Point>& samples,
                         double tol = kDefaultRankTolerance);
RankProfile rank_profile(const StructureMatrix& j, const SampleRegion& region, double tol = kDefaultRankTolerance);

/// Orthonormal basis of {a : J(x) a = 0 at every sample}, from the SVD of
/// the stacked sample matrices. Columns of the result are basis vectors.
Eigen::MatrixXd find_linear_casimirs(const StructureMatrix& j, const std::vector<Point>& samples,
                                     double tol = kDefaultRankTolerance);
Eigen::MatrixXd find_linear_casimirs(const StructureMatrix& j, const SampleRegion& region,
                                     double tol = kDefaultRankTolerance);

/// Numerical rank of the stacked gradients of `functions` at p.
int gradient_rank(const std::vector<Expr>& functions, const std::vector<std::string>& variables, const Point& p,
                  double tol = kDefaultRankTolerance);

}  // namespace dsolkit
