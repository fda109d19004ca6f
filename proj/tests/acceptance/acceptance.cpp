// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "dsolkit/construct.hpp"
#include "dsolkit/darboux.hpp"
#include "dsolkit/dynamics.hpp"
#include "dsolkit/transform.hpp"
#include "support/closure.hpp"
#include "support/support.hpp"

using namespace dsolkit;
using testsupport::max_abs;
using testsupport::Rng;

namespace {

struct Outcome {
    bool passed = true;
    std::ostringstream detail;
    std::vector<std::string> failures;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            passed = false;
            failures.push_back(what);
        }
    }
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// 1. Bundled examples verify; Example 4 does not.
void fixtures_suite(Outcome& o) {
    std::size_t checked = 0;
    double worst = 0.0;
    for (const fixtures::Fixture& f : fixtures::all()) {
        if (f.name == "example4")
            continue;
        SampleRegion region = f.region;
        region.samples = 200;
        const auto pts = region.sample();
        const VerificationReport jac = verify_jacobi(f.matrix, pts, 1e-8);
        const VerificationReport ds = verify_dsolution(f.matrix, pts, 1e-8);
        o.require(jac.passed, f.name + " " + summarize(jac));
        o.require(ds.passed, f.name + " " + summarize(ds));
        worst = std::max({worst, jac.max_residual, ds.max_residual});
        ++checked;
    }
    const fixtures::Fixture e4 = fixtures::example4(Expr::constant(1.0));
    const VerificationReport ds4 = verify_dsolution(e4.matrix, SampleRegion::cube(e4.matrix.variables()), 1e-8);
    o.require(!ds4.passed && ds4.max_residual >= 0.1, "example4 " + summarize(ds4));
    const Expr d3 = parse("x3 - x1*x2", e4.matrix.variables());
    const VerificationReport c4 = verify_casimir(e4.matrix, d3, SampleRegion::cube(e4.matrix.variables()), 1e-10);
    o.require(c4.passed, "example4 D3 " + summarize(c4));
    o.detail << checked << " fixtures, worst residual " << sci(worst) << "; example4 residual "
             << sci(ds4.max_residual) << ", D3 residual " << sci(c4.max_residual);
}

// 2. Random linear-Casimir constructions.
void dpsi_suite(Outcome& o) {
    Rng rng(31415);
    double worst = 0.0, worst_block = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const DPsiSpec spec = testsupport::random_dpsi(rng, 3, 7, trial % 2 == 1);
        Construction c = build_dpsi(spec);
        const auto pts = SampleRegion::cube(c.matrix.variables(), -1, 1, 200, 100 + trial).sample();
        const VerificationReport r = verify_dsolution(c.matrix, pts);
        o.require(r.passed, "trial " + std::to_string(trial) + " " + summarize(r));
        worst = std::max(worst, r.max_residual);
        o.require(c.casimirs.size() == spec.n - spec.rho, "trial " + std::to_string(trial) + " casimir count");
        o.require(c.casimirs.verify(c.matrix, pts, 1e-9), "trial " + std::to_string(trial) + " casimirs");
        const int rho = static_cast<int>(spec.rho);
        const int max_rank = rank_profile(c.matrix, pts).max_rank();
        o.require(max_rank <= rho - rho % 2, "trial " + std::to_string(trial) + " rank " + std::to_string(max_rank));

        // Block identities hold for the unpermuted layout.
        if (spec.permutation || spec.rho == spec.n)
            continue;
        const auto r0 = static_cast<Eigen::Index>(spec.rho);
        const auto k = static_cast<Eigen::Index>(spec.n - spec.rho);
        Eigen::MatrixXd g(k, r0);
        for (Eigen::Index l = 0; l < k; ++l)
            for (Eigen::Index m = 0; m < r0; ++m)
                g(l, m) = spec.a[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)];
        for (const Point& p : pts) {
            const Eigen::MatrixXd m = c.matrix.evaluate(p);
            const Eigen::MatrixXd pb = m.topLeftCorner(r0, r0);
            const double scale = std::max(1.0, max_abs(m));
            const double gap = std::max({max_abs(m.topRightCorner(r0, k) - pb * g.transpose()),
                                         max_abs(m.bottomLeftCorner(k, r0) - g * pb),
                                         max_abs(m.bottomRightCorner(k, k) - g * pb * g.transpose())}) /
                               scale;
            worst_block = std::max(worst_block, gap);
        }
    }
    o.require(worst_block <= 1e-12, "block identity gap " + sci(worst_block));
    o.detail << "50 draws, worst residual " << sci(worst) << ", block gap " << sci(worst_block);
}

// 3. Example 3 rank is 2 off the hyperplane x2 + x4 = 0 and 0 on it.
void rank_suite(Outcome& o) {
    const fixtures::Fixture e3 = fixtures::example3();
    const auto& x = e3.matrix.variables();
    SampleRegion box = SampleRegion::cube(x, -1, 1, 1000, 7);
    box.margin = 0.0;
    const RankProfile prof = rank_profile(e3.matrix, box);
    const auto two = prof.counts.count(2) ? prof.counts.at(2) : 0;
    const double fraction = static_cast<double>(two) / 1000.0;
    o.require(fraction >= 0.95, "rank-2 fraction " + sci(fraction));

    Rng rng(8);
    int zero = 0;
    for (int k = 0; k < 10; ++k) {
        const double x2 = rng.uniform(-1, 1);
        const Point p(x, {rng.uniform(-1, 1), x2, rng.uniform(-1, 1), -x2});
        zero += rank_at(e3.matrix, p).rank == 0;
    }
    o.require(zero == 10, std::to_string(zero) + "/10 hyperplane points have rank 0");
    o.detail << "rank 2 at " << sci(100 * fraction) << "% of samples, rank 0 at " << zero << "/10 hyperplane points";
}

// 4. Closure operations on D-solution inputs.
void closure_suite(Outcome& o) {
    Rng rng(2718);
    struct Input {
        StructureMatrix matrix;
        CasimirSet casimirs;
        TransformOptions options;
    };
    auto options_for = [](const std::vector<std::string>& vars, int trial) {
        TransformOptions t;
        t.region = SampleRegion::cube(vars, -1, 1, 60, static_cast<std::uint64_t>(trial));
        t.tol = 1e-7;
        return t;
    };
    auto draw = [&](int trial) {
        Construction c = build_dpsi(testsupport::small_dpsi(rng));
        TransformOptions t = options_for(c.matrix.variables(), trial);
        return Input{testsupport::unit_scale(c.matrix, *t.region), std::move(c.casimirs), std::move(t)};
    };
    std::map<std::string, int> passes;
    double worst = 0.0;
    auto record = [&](const std::string& op, int trial, const TransformResult& r) {
        o.require(r.report.passed, op + " trial " + std::to_string(trial) + " " + summarize(r.report));
        passes[op] += r.report.passed;
        worst = std::max(worst, r.report.max_residual);
    };

    for (int trial = 0; trial < 20; ++trial) {
        const Input in = draw(trial);
        const auto a = testsupport::random_skew_casimir(rng, in.matrix.dimension(), in.casimirs.functions());
        const auto m = static_cast<unsigned>(rng.integer(0, 2));
        record("thm1a", trial,
               thm1_skew_sandwich(in.matrix, a, testsupport::random_odd(rng, m < 2), m, in.options));
    }
    for (int trial = 0; trial < 20; ++trial) {
        const Input in = draw(trial);
        const auto gens = in.casimirs.functions();
        const auto a = CasimirMatrix::scalar(in.matrix.dimension(),
                                             testsupport::random_generator_function(rng, gens.size()), gens);
        const unsigned m = rng.coin() ? 1u : 3u;
        record("thm1b", trial,
               thm1_commuting_sym(in.matrix, a, testsupport::random_odd(rng, m == 1), m, in.options));
    }
    for (int trial = 0; trial < 20; ++trial) {
        const Input in = draw(trial);
        const std::size_t n = in.matrix.dimension();
        std::vector<Expr> gens = in.casimirs.functions();
        const Expr f = testsupport::random_generator_function(rng, gens.size());
        const Expr g = testsupport::random_generator_function(rng, gens.size());
        ExprMatrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                gens.push_back(in.matrix(i, j));
                const Expr yj = Expr::variable("y" + std::to_string(gens.size()));
                a(i, j) = g * yj;
                a(j, i) = -(g * yj);
            }
        for (std::size_t i = 0; i < n; ++i)
            a(i, i) = f;
        const auto am = CasimirMatrix::from_generators(a, gens, Symmetry::General);
        record("thm1c", trial, thm1_conjugate(in.matrix, am, testsupport::random_odd(rng, false), in.options));
    }
    for (int trial = 0; trial < 20; ++trial) {
        const Input in = draw(trial);
        const auto a = testsupport::random_skew_casimir(rng, in.matrix.dimension(), in.casimirs.functions());
        record("thm1d", trial,
               thm1_even_sandwich(in.matrix, a, MatrixPolynomial::even({rng.uniform(0.5, 1.0)}), 1, in.options));
    }
    for (int trial = 0; trial < 20; ++trial) {
        const Input in = draw(trial);
        record("scale", trial,
               scale_by_casimir(in.matrix, testsupport::random_generator_function(rng, in.casimirs.size()),
                                in.casimirs, in.options));
    }
    for (int trial = 0; trial < 20; ++trial) {
        DPsiSpec spec = testsupport::small_dpsi(rng);
        const Construction c1 = build_dpsi(spec);
        for (auto& [key, value] : spec.psi)
            value = testsupport::random_psi(rng, spec.n - spec.rho);
        const Construction c2 = build_dpsi(spec);
        const auto t = options_for(c1.matrix.variables(), trial);
        record("sum", trial,
               sum(testsupport::unit_scale(c1.matrix, *t.region), testsupport::unit_scale(c2.matrix, *t.region),
                   c1.casimirs, t));
    }
    for (int trial = 0; trial < 20; ++trial) {
        DPsiSpec spec = testsupport::small_dpsi(rng);
        const auto t = options_for(numbered_names("x", spec.n), trial);
        std::vector<StructureMatrix> ms;
        CasimirSet shared;
        const int p = rng.integer(1, 3);
        for (int k = 0; k < p; ++k) {
            for (auto& [key, value] : spec.psi)
                value = testsupport::random_psi(rng, spec.n - spec.rho);
            Construction c = build_dpsi(spec);
            shared = c.casimirs;
            ms.push_back(testsupport::unit_scale(c.matrix, *t.region));
        }
        record("altprod", trial, alternating_product(ms, shared, t));
    }

    // Exact identities: J alone doubles, an equal pair cancels.
    const Construction c = build_dpsi(fixtures::example2_spec(parse("sin(y1) + y2", {"y1", "y2"})));
    const TransformResult single = alternating_product({c.matrix}, c.casimirs);
    const TransformResult pair = alternating_product({c.matrix, c.matrix}, c.casimirs);
    bool exact = true;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            exact = exact && structurally_equal(single.matrix(i, j), simplify(Expr::constant(2.0) * c.matrix(i, j)));
            exact = exact && pair.matrix(i, j).is_constant(0.0);
        }
    o.require(exact, "alternating product identities are not exact");

    for (const auto& [op, count] : passes)
        o.detail << op << ' ' << count << "/20 ";
    o.detail << "worst residual " << sci(worst) << (exact ? ", altprod identities exact" : "");
}

double projection_residual(const Eigen::MatrixXd& basis, const Eigen::VectorXd& v) {
    return (v - basis * (basis.transpose() * v)).norm();
}

// 5. Linear-Casimir search.
void nullspace_suite(Outcome& o) {
    const StructureMatrix e2 = fixtures::example2(parse("sin(y1) + y2", {"y1", "y2"})).matrix;
    const Eigen::MatrixXd basis = find_linear_casimirs(e2, SampleRegion::cube(e2.variables()));
    o.require(basis.cols() == 2, "example2 basis dimension " + std::to_string(basis.cols()));
    double worst = 0.0;
    if (basis.cols() == 2) {
        worst = std::max(projection_residual(basis, Eigen::Vector4d(0, 1, 1, 0)),
                         projection_residual(basis, Eigen::Vector4d(1, 1, 0, 1)));
        o.require(worst <= 1e-8, "projection residual " + sci(worst));
    }
    for (std::size_t n = 3; n <= 6; ++n) {
        const Example5 e = build_example5(n);
        const auto dim = find_linear_casimirs(e.matrix, e.region).cols();
        o.require(dim == 0, "example5 n=" + std::to_string(n) + " dimension " + std::to_string(dim));
    }
    o.detail << "example2 dimension " << basis.cols() << ", projection residual " << sci(worst)
             << "; example5 n=3..6 dimension 0";
}

// 6. Darboux charts and dynamics equivariance.
void darboux_suite(Outcome& o) {
    const auto x = numbered_names("x", 3);
    const auto z = numbered_names("y", 3);
    const std::vector<std::string> y{"y"};
    const std::vector<Expr> etas = {exp(Expr::variable("y")), parse("1 + y^2", y), parse("2 + sin(y)", y),
                                    parse("-1.5 - cos(3*y)", y), parse("exp(-0.5*y) * (1 + 0.25*y^2)", y),
                                    parse("(exp(y) + exp(-y))/2", y)};
    Rng rng(1234);
    double dev = 0.0, trip = 0.0, equi = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        double a[3];
        do {
            for (double& v : a)
                v = rng.coin(0.25) ? 0.0 : rng.uniform(-2.0, 2.0);
        } while (a[0] == 0.0 && a[1] == 0.0 && a[2] == 0.0);
        const Expr eta = rng.pick(etas);
        const DarbouxChart c =
            darboux_reduce_3d(a[0], a[1], a[2], eta, SampleRegion::cube(x, -1, 1, 200, static_cast<std::uint64_t>(trial)));
        dev = std::max(dev, c.canonical_deviation);
        trip = std::max(trip, c.roundtrip_error);

        // Equivariance over unit time on a subset of the charts.
        if (trial % 5 != 0)
            continue;
        const StructureMatrix j = build_3d_family(a[0], a[1], a[2], eta);
        const Expr h = parse("x1^2/2 + x2*x3 + x3^2/4", x);
        Bindings back;
        for (std::size_t i = 0; i < 3; ++i)
            back.emplace(x[i], c.inverse[i]);
        const Expr hz = simplify(substitute(h, back));
        const StructureMatrix canon = make_matrix(3, z, {{0, 1, Expr::constant(1.0)}});
        const Point x0(x, {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)});
        std::vector<double> z0(3);
        for (std::size_t i = 0; i < 3; ++i)
            z0[i] = c.forward[i].eval(x0);
        const Trajectory tx = integrate(j, h, x0, 1e-3, 1000);
        const Trajectory tz = integrate(canon, hz, Point(z, z0), 1e-3, 1000);
        for (std::size_t k = 0; k <= 1000; k += 50) {
            const Point p = tx.point(k);
            for (std::size_t i = 0; i < 3; ++i)
                equi = std::max(equi,
                                std::abs(c.forward[i].eval(p) - tz.states[k](static_cast<Eigen::Index>(i))));
        }
    }
    o.require(dev <= 1e-10, "canonical deviation " + sci(dev));
    o.require(trip <= 1e-9, "roundtrip error " + sci(trip));
    o.require(equi <= 1e-6, "equivariance gap " + sci(equi));
    o.detail << "25 charts, deviation " << sci(dev) << ", roundtrip " << sci(trip) << ", equivariance " << sci(equi);
}

double oscillator_error(double h, std::size_t steps) {
    const auto x = numbered_names("x", 3);
    const Trajectory t = integrate(build_symplectic(3, 1), parse("(x1^2 + x2^2)/2", x), Point(x, {1, 0, 0.7}), h, steps);
    const double time = t.time(steps);
    const Eigen::Vector3d exact(std::cos(time), -std::sin(time), 0.7);
    return (t.states.back() - exact).cwiseAbs().maxCoeff();
}

// 7. Symbolic derivatives against central differences; integrator order.
void numerics_suite(Outcome& o) {
    const auto vars = numbered_names("x", 3);
    Rng rng(20240611);
    int checked = 0;
    double worst = 0.0;
    for (int attempt = 0; checked < 1000 && attempt < 5000; ++attempt) {
        const Expr e = testsupport::random_expr(rng, vars, 4);
        const Point p(vars, {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)});
        const std::string& v = rng.pick(vars);
        const double f = e.eval(p);
        const double d = differentiate(e, v).eval(p);
        if (!std::isfinite(f) || !std::isfinite(d) || std::abs(f) > 1e6)
            continue;
        const double fd = testsupport::central_difference(e, p, v, 1e-5);
        worst = std::max(worst, std::abs(d - fd) / (1.0 + std::abs(d)));
        ++checked;
    }
    o.require(checked == 1000, "only " + std::to_string(checked) + " finite cases");
    o.require(worst <= 1e-5, "derivative gap " + sci(worst));
    const double ratio = oscillator_error(0.1, 10) / oscillator_error(0.05, 20);
    o.require(ratio >= 8.0 && ratio <= 24.0, "order ratio " + sci(ratio));
    o.detail << checked << " derivative cases, worst relative gap " << sci(worst) << "; order ratio " << sci(ratio);
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {"1 fixtures", fixtures_suite},     {"2 dpsi-random", dpsi_suite}, {"3 rank-structure", rank_suite},
        {"4 closure", closure_suite},       {"5 linear-casimirs", nullspace_suite},
        {"6 darboux", darboux_suite},       {"7 numerics", numerics_suite}};
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !o.passed;
        std::cout << (o.passed ? "PASS " : "FAIL ") << name << " (" << sci(secs) << " s): " << o.detail.str();
        for (std::size_t k = 0; k < o.failures.size() && k < 3; ++k)
            std::cout << (k ? "; " : " | failed: ") << o.failures[k];
        if (o.failures.size() > 3)
            std::cout << "; " << o.failures.size() - 3 << " more";
        std::cout << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
