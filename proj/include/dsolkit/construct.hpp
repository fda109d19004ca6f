#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "dsolkit/poisson.hpp"

namespace dsolkit {

/// Skew array of functions keyed by zero-based (i, j) with i < j.
using PsiMap = std::map<std::pair<std::size_t, std::size_t>, Expr>;

/// Linear-Casimir family over x1..xn. Casimirs are
/// D_l = x_l - sum_k a[l - rho][k] x_k for l = rho..n-1 (zero-based), and the
/// psi functions are expressions in y1..y_{n-rho}, with y_m bound to D_{rho+m}.
struct DPsiSpec {
    std::size_t n = 0;
    std::size_t rho = 0;
    /// (n - rho) rows of rho coefficients.
    std::vector<std::vector<double>> a;
    PsiMap psi;
    /// Zero-based: coordinate i of the unpermuted matrix becomes coordinate
    /// permutation[i].
    std::optional<std::vector<std::size_t>> permutation;

    /// Throws std::invalid_argument when the spec is inconsistent.
    void validate() const;
};

struct Construction {
    StructureMatrix matrix;
    CasimirSet casimirs;
};

Construction build_dpsi(const DPsiSpec& spec);

struct ConstantEntry {
    std::size_t i;
    std::size_t j;
    double value;
};

StructureMatrix build_constant(std::size_t n, const std::vector<ConstantEntry>& upper);

/// Block-diagonal matrix with k canonical 2x2 blocks followed by zeros.
StructureMatrix build_symplectic(std::size_t n, std::size_t blocks);

/// eta(a1 x1 + a2 x2 + a3 x3) times the constant cross-product matrix.
/// `eta` is an expression in the single variable "y".
StructureMatrix build_3d_family(double a1, double a2, double a3, const Expr& eta);

/// Casimirs D_i = x_i - mu_i(x_1..x_rho) for i = rho..n-1 (zero-based).
struct NonlinearAnsatzSpec {
    std::size_t n = 0;
    std::size_t rho = 0;
    std::vector<Expr> mu;
    PsiMap psi;

    void validate() const;
};

struct AnsatzResult {
    StructureMatrix matrix;
    CasimirSet casimirs;
    VerificationReport report;
};

/// The D-solution report is computed on `region`; the unit cube with the
/// default sample count when omitted.
AnsatzResult build_nonlinear_ansatz(const NonlinearAnsatzSpec& spec,
                                    const std::optional<SampleRegion>& region = std::nullopt);

struct Example5 {
    StructureMatrix matrix;
    CasimirSet casimirs;
    SampleRegion region;
};

/// First row (x3/x2)^(k-1), zero elsewhere above the diagonal.
Example5 build_example5(std::size_t n);

/// Named instances used by tests, the acceptance suite and `fixtures`.
namespace fixtures {

struct Fixture {
    std::string name;
    StructureMatrix matrix;
    CasimirSet casimirs;
    SampleRegion region;
};

/// Constant rank-2 matrix in dimension 3 and a rank-4 matrix in dimension 5.
Fixture example1_rank2();
Fixture example1_rank4();
/// psi is an expression in y1.
DPsiSpec example2_spec(const Expr& psi);
Fixture example2(const Expr& psi);
Fixture example3();
/// psi is an expression in y1.
Fixture example4(const Expr& psi);
Fixture example5(std::size_t n);
Fixture theorem5(double a1, double a2, double a3, const Expr& eta);

/// The set shipped by the `fixtures` subcommand.
std::vector<Fixture> all();

}  // namespace fixtures

}  // namespace dsolkit
