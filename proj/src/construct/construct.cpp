#include "dsolkit/construct.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace dsolkit {

namespace {

void validate_psi(const PsiMap& psi, std::size_t rho, const std::vector<std::string>& y, const char* who) {
    for (const auto& [key, value] : psi) {
        if (key.first >= key.second || key.second >= rho)
            throw std::invalid_argument(std::string(who) + ": psi index (" + std::to_string(key.first + 1) + "," +
                                        std::to_string(key.second + 1) + ") is not strictly upper triangular in " +
                                        std::to_string(rho) + "x" + std::to_string(rho));
        for (const std::string& v : value.free_variables())
            if (std::find(y.begin(), y.end(), v) == y.end())
                throw std::invalid_argument(std::string(who) + ": psi uses undeclared variable '" + v + "'");
    }
}

// Full skew rho x rho matrix of psi with y bound to `casimirs`.
ExprMatrix psi_block(const PsiMap& psi, std::size_t rho, const std::vector<Expr>& casimirs) {
    Bindings bind;
    const auto y = numbered_names("y", casimirs.size());
    for (std::size_t m = 0; m < casimirs.size(); ++m)
        bind.emplace(y[m], casimirs[m]);
    ExprMatrix block(rho, rho);
    for (const auto& [key, value] : psi) {
        const Expr e = simplify(substitute(value, bind));
        block(key.first, key.second) = e;
        block(key.second, key.first) = simplify(-e);
    }
    return block;
}

// Full n x n matrix with blocks [[P, P G^T], [G P, G P G^T]] where P is the
// psi block and G is (n - rho) x rho.
ExprMatrix extend_block(const ExprMatrix& p, const ExprMatrix& g) {
    const std::size_t rho = p.rows();
    const std::size_t n = rho + g.rows();
    const ExprMatrix upper_right = multiply(p, g.transpose());
    const ExprMatrix lower_right = multiply(g, upper_right);
    ExprMatrix full(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i < rho && j < rho)
                full(i, j) = p(i, j);
            else if (i < rho)
                full(i, j) = upper_right(i, j - rho);
            else if (j < rho)
                full(i, j) = simplify(-upper_right(j, i - rho));
            else
                full(i, j) = lower_right(i - rho, j - rho);
        }
    return full;
}

}  // namespace

void DPsiSpec::validate() const {
    if (n < 3)
        throw std::invalid_argument("dpsi: n must be at least 3");
    if (rho < 1 || rho > n)
        throw std::invalid_argument("dpsi: rho must satisfy 1 <= rho <= n");
    if (a.size() != n - rho)
        throw std::invalid_argument("dpsi: expected " + std::to_string(n - rho) + " coefficient rows, got " +
                                    std::to_string(a.size()));
    for (const auto& row : a)
        if (row.size() != rho)
            throw std::invalid_argument("dpsi: every coefficient row needs " + std::to_string(rho) + " entries");
    validate_psi(psi, rho, numbered_names("y", n - rho), "dpsi");
    if (permutation) {
        if (permutation->size() != n)
            throw std::invalid_argument("dpsi: permutation must have n entries");
        std::set<std::size_t> seen(permutation->begin(), permutation->end());
        if (seen.size() != n || *seen.rbegin() >= n)
            throw std::invalid_argument("dpsi: permutation is not a bijection of 1..n");
    }
}

Construction build_dpsi(const DPsiSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n;
    const std::size_t rho = spec.rho;
    const auto x = numbered_names("x", n);

    std::vector<Expr> casimirs;
    ExprMatrix g(n - rho, rho);
    for (std::size_t l = 0; l < n - rho; ++l) {
        Expr d = Expr::variable(x[rho + l]);
        for (std::size_t k = 0; k < rho; ++k) {
            g(l, k) = Expr::constant(spec.a[l][k]);
            if (spec.a[l][k] != 0.0)
                d = d - Expr::constant(spec.a[l][k]) * Expr::variable(x[k]);
        }
        casimirs.push_back(simplify(d));
    }

    ExprMatrix full = extend_block(psi_block(spec.psi, rho, casimirs), g);

    if (spec.permutation) {
        const auto& sigma = *spec.permutation;
        Bindings rename;
        for (std::size_t i = 0; i < n; ++i)
            rename.emplace(x[i], Expr::variable(x[sigma[i]]));
        ExprMatrix permuted(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                permuted(sigma[i], sigma[j]) = simplify(substitute(full(i, j), rename));
        full = permuted;
        for (Expr& d : casimirs)
            d = simplify(substitute(d, rename));
    }

    return {structure_from_upper(full, x), CasimirSet(casimirs)};
}

StructureMatrix build_constant(std::size_t n, const std::vector<ConstantEntry>& upper) {
    std::vector<UpperEntry> entries;
    for (const ConstantEntry& e : upper)
        if (e.value != 0.0)
            entries.push_back({e.i, e.j, Expr::constant(e.value)});
    return make_matrix(n, numbered_names("x", n), entries);
}

StructureMatrix build_symplectic(std::size_t n, std::size_t blocks) {
    if (2 * blocks > n)
        throw std::invalid_argument("build_symplectic: too many blocks for dimension " + std::to_string(n));
    std::vector<ConstantEntry> upper;
    for (std::size_t b = 0; b < blocks; ++b)
        upper.push_back({2 * b, 2 * b + 1, 1.0});
    return build_constant(n, upper);
}

StructureMatrix build_3d_family(double a1, double a2, double a3, const Expr& eta) {
    for (const std::string& v : eta.free_variables())
        if (v != "y")
            throw std::invalid_argument("build_3d_family: eta must be an expression in y, found '" + v + "'");
    const auto x = numbered_names("x", 3);
    Expr d;
    bool any = false;
    const double a[3] = {a1, a2, a3};
    for (std::size_t k = 0; k < 3; ++k) {
        if (a[k] == 0.0)
            continue;
        const Expr term = Expr::constant(a[k]) * Expr::variable(x[k]);
        d = any ? d + term : term;
        any = true;
    }
    const Expr scale = simplify(substitute(eta, {{"y", simplify(d)}}));
    auto entry = [&](double c) { return simplify(Expr::constant(c) * scale); };
    std::vector<UpperEntry> upper;
    if (a3 != 0.0)
        upper.push_back({0, 1, entry(a3)});
    if (a2 != 0.0)
        upper.push_back({0, 2, entry(-a2)});
    if (a1 != 0.0)
        upper.push_back({1, 2, entry(a1)});
    return make_matrix(3, x, upper);
}

void NonlinearAnsatzSpec::validate() const {
    if (n < 3)
        throw std::invalid_argument("ansatz: n must be at least 3");
    if (rho < 1 || rho >= n)
        throw std::invalid_argument("ansatz: rho must satisfy 1 <= rho < n");
    if (mu.size() != n - rho)
        throw std::invalid_argument("ansatz: expected " + std::to_string(n - rho) + " mu functions");
    const auto leading = numbered_names("x", rho);
    for (const Expr& m : mu)
        for (const std::string& v : m.free_variables())
            if (std::find(leading.begin(), leading.end(), v) == leading.end())
                throw std::invalid_argument("ansatz: mu may only depend on x1..x" + std::to_string(rho) +
                                            ", found '" + v + "'");
    validate_psi(psi, rho, numbered_names("y", n - rho), "ansatz");
}

AnsatzResult build_nonlinear_ansatz(const NonlinearAnsatzSpec& spec, const std::optional<SampleRegion>& region) {
    spec.validate();
    const std::size_t n = spec.n;
    const std::size_t rho = spec.rho;
    const auto x = numbered_names("x", n);
    std::vector<Expr> casimirs;
    ExprMatrix g(n - rho, rho);
    for (std::size_t l = 0; l < n - rho; ++l) {
        casimirs.push_back(simplify(Expr::variable(x[rho + l]) - spec.mu[l]));
        for (std::size_t k = 0; k < rho; ++k)
            g(l, k) = simplify(differentiate(spec.mu[l], x[k]));
    }
    StructureMatrix m = structure_from_upper(extend_block(psi_block(spec.psi, rho, casimirs), g), x);
    const SampleRegion r = region ? *region : SampleRegion::cube(x);
    VerificationReport report = verify_dsolution(m, r);
    return {std::move(m), CasimirSet(casimirs), std::move(report)};
}

Example5 build_example5(std::size_t n) {
    if (n < 3)
        throw std::invalid_argument("build_example5: n must be at least 3");
    const auto x = numbered_names("x", n);
    const Expr ratio = Expr::variable(x[2]) / Expr::variable(x[1]);
    std::vector<UpperEntry> upper;
    for (std::size_t k = 1; k < n; ++k)
        upper.push_back({0, k, simplify(k == 1 ? ratio : pow(ratio, static_cast<double>(k)))});
    CasimirSet casimirs;
    casimirs.add(simplify(ratio));
    for (std::size_t i = 3; i < n; ++i)
        casimirs.add(simplify(ratio * Expr::variable(x[i - 1]) - Expr::variable(x[i])));
    SampleRegion region = SampleRegion::cube(x);
    region.exclusions = {Expr::variable(x[1]), Expr::variable(x[2])};
    region.margin = 0.25;
    return {make_matrix(n, x, upper), std::move(casimirs), std::move(region)};
}

namespace fixtures {

Fixture example1_rank2() {
    return {"example1_rank2", build_constant(3, {{0, 1, 1.0}, {0, 2, -2.0}, {1, 2, 3.0}}), {},
            SampleRegion::cube(numbered_names("x", 3))};
}

Fixture example1_rank4() {
    return {"example1_rank4", build_symplectic(5, 2), {}, SampleRegion::cube(numbered_names("x", 5))};
}

DPsiSpec example2_spec(const Expr& psi) {
    DPsiSpec spec;
    spec.n = 4;
    spec.rho = 2;
    spec.a = {{0.0, -1.0}, {-1.0, -1.0}};
    spec.psi = {{{0, 1}, psi}};
    return spec;
}

Fixture example2(const Expr& psi) {
    Construction c = build_dpsi(example2_spec(psi));
    return {"example2", std::move(c.matrix), std::move(c.casimirs), SampleRegion::cube(numbered_names("x", 4))};
}

Fixture example3() {
    DPsiSpec spec;
    spec.n = 4;
    spec.rho = 3;
    spec.a = {{0.0, -1.0, 0.0}};
    const Expr y = Expr::variable("y1");
    spec.psi = {{{0, 1}, y}, {{0, 2}, pow(y, 2.0)}};
    Construction c = build_dpsi(spec);
    const auto x = numbered_names("x", 4);
    c.casimirs.add(parse("x3 + x2*x4 + x4^2", x));
    return {"example3", std::move(c.matrix), std::move(c.casimirs), SampleRegion::cube(x)};
}

Fixture example4(const Expr& psi) {
    NonlinearAnsatzSpec spec;
    spec.n = 3;
    spec.rho = 2;
    spec.mu = {parse("x1*x2", numbered_names("x", 2))};
    spec.psi = {{{0, 1}, psi}};
    AnsatzResult r = build_nonlinear_ansatz(spec);
    return {"example4", std::move(r.matrix), std::move(r.casimirs), SampleRegion::cube(numbered_names("x", 3))};
}

Fixture example5(std::size_t n) {
    Example5 e = build_example5(n);
    return {"example5_n" + std::to_string(n), std::move(e.matrix), std::move(e.casimirs), std::move(e.region)};
}

Fixture theorem5(double a1, double a2, double a3, const Expr& eta) {
    CasimirSet casimirs;
    const auto x = numbered_names("x", 3);
    Expr d = simplify(Expr::constant(a1) * Expr::variable(x[0]) + Expr::constant(a2) * Expr::variable(x[1]) +
                      Expr::constant(a3) * Expr::variable(x[2]));
    casimirs.add(d);
    return {"theorem5", build_3d_family(a1, a2, a3, eta), std::move(casimirs), SampleRegion::cube(x)};
}

std::vector<Fixture> all() {
    const Expr y1 = Expr::variable("y1");
    std::vector<Fixture> out;
    out.push_back(example1_rank2());
    out.push_back(example1_rank4());
    Fixture e2 = example2(simplify(sin(y1) + Expr::constant(0.5) * y1));
    out.push_back(std::move(e2));
    out.push_back(example3());
    out.push_back(example4(y1));
    for (std::size_t n = 3; n <= 6; ++n)
        out.push_back(example5(n));
    Fixture t5 = theorem5(1.0, 2.0, 3.0, exp(Expr::variable("y")));
    t5.name = "theorem5_exp";
    out.push_back(std::move(t5));
    Fixture t5b = theorem5(1.0, 1.0, 1.0, pow(Expr::variable("y"), 2.0));
    t5b.name = "theorem5_square";
    out.push_back(std::move(t5b));
    return out;
}

}  // namespace fixtures

}  // namespace dsolkit
