#include <gtest/gtest.h>

#include <cmath>

#include "dsolkit/construct.hpp"
#include "dsolkit/darboux.hpp"
#include "dsolkit/dynamics.hpp"

using namespace dsolkit;

namespace {

const std::vector<std::string> kX3 = numbered_names("x", 3);
const std::vector<std::string> kX4 = numbered_names("x", 4);
const std::vector<std::string> kY3 = numbered_names("y", 3);

double oscillator_error(double h, std::size_t steps) {
    const StructureMatrix j = build_symplectic(3, 1);
    const Trajectory t = integrate(j, parse("(x1^2 + x2^2)/2", kX3), Point(kX3, {1, 0, 0.7}), h, steps);
    const double time = t.time(steps);
    const Eigen::Vector3d exact(std::cos(time), -std::sin(time), 0.7);
    return (t.states.back() - exact).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Integrate, OscillatorCircleWithFrozenCasimir) {
    const StructureMatrix j = build_symplectic(3, 1);
    const Trajectory t = integrate(j, parse("(x1^2 + x2^2)/2", kX3), Point(kX3, {1, 0, 0.7}), 1e-2, 100);
    ASSERT_EQ(t.states.size(), 101u);
    for (std::size_t k = 0; k <= 100; ++k) {
        const double time = t.time(k);
        EXPECT_NEAR(t.states[k](0), std::cos(time), 1e-9);
        EXPECT_NEAR(t.states[k](1), -std::sin(time), 1e-9);
        EXPECT_EQ(t.states[k](2), 0.7);
    }
}

TEST(Integrate, Theorem5PivotCoordinateIsConstant) {
    const StructureMatrix j = build_3d_family(0, 0, 1, exp(Expr::variable("y")));
    const Trajectory t =
        integrate(j, parse("x1^2 + x1*x2 + sin(x3) + x2^3", kX3), Point(kX3, {0.2, -0.4, 0.6}), 1e-3, 500);
    for (const Eigen::VectorXd& x : t.states)
        EXPECT_EQ(x(2), 0.6);
}

TEST(Integrate, RejectsBadInput) {
    const StructureMatrix j = build_symplectic(3, 1);
    const Expr h = parse("x1", kX3);
    EXPECT_THROW(integrate(j, h, Point(kX3, {0, 0, 0}), 0.0, 10), std::invalid_argument);
    EXPECT_THROW(integrate(j, h, Point(kX4, {0, 0, 0, 0}), 0.1, 10), std::invalid_argument);
}

TEST(Integrate, NonFiniteStateReportsStep) {
    // x1' = x1^2 blows up at t = 1 from x1 = 1.
    const StructureMatrix j = build_symplectic(3, 1);
    try {
        integrate(j, parse("x1^2*x2", kX3), Point(kX3, {1, 0, 0}), 0.05, 1000);
        FAIL() << "expected IntegrationError";
    } catch (const IntegrationError& e) {
        EXPECT_GT(e.step(), 10u);
        EXPECT_LT(e.step(), 1000u);
    }
}

TEST(Conservation, Example2CasimirsAtSmallStep) {
    const fixtures::Fixture f = fixtures::example2(parse("sin(y1) + y2", {"y1", "y2"}));
    const Expr h = parse("x1", kX4);
    const Trajectory t = integrate(f.matrix, h, Point(kX4, {0.3, -0.2, 0.5, 0.1}), 1e-3, 1000);
    const ConservationReport r = conservation_report(t, f.matrix, h, f.casimirs);
    ASSERT_EQ(r.invariants.size(), 3u);
    EXPECT_EQ(r.invariants[0].name, "H");
    for (std::size_t k = 1; k < 3; ++k)
        EXPECT_LE(r.invariants[k].drift, 1e-7) << r.invariants[k].name;
    // x1' = J11 = 0, so H = x1 stays fixed.
    EXPECT_EQ(r.invariants[0].drift, 0.0);
}

TEST(Conservation, ZeroHamiltonianIsStationary) {
    const fixtures::Fixture f = fixtures::example3();
    const Trajectory t = integrate(f.matrix, Expr::constant(0.0), Point(kX4, {0.1, 0.2, 0.3, 0.4}), 0.1, 20);
    for (const Eigen::VectorXd& x : t.states)
        EXPECT_EQ((x - t.states.front()).cwiseAbs().maxCoeff(), 0.0);
    const ConservationReport r = conservation_report(t, f.matrix, Expr::constant(0.0), f.casimirs);
    for (const InvariantDrift& d : r.invariants) {
        EXPECT_EQ(d.drift, 0.0);
        EXPECT_EQ(d.drift_half, 0.0);
        EXPECT_TRUE(std::isnan(d.ratio));
    }
}

TEST(Conservation, OscillatorEnergyDriftMatchesAmplificationFactor) {
    // For RK4 on the oscillator |R(ih)|^2 = 1 - h^6/72 + O(h^8), so the energy
    // after time T is H0 (1 - h^6/72)^(T/h) and the drift is about H0 T h^5 / 72.
    const StructureMatrix j = build_symplectic(3, 1);
    const Expr h = parse("(x1^2 + x2^2)/2", kX3);
    const double step = 0.1;
    const std::size_t steps = 100;
    const Trajectory t = integrate(j, h, Point(kX3, {1, 0, 0.7}), step, steps);
    const ConservationReport r = conservation_report(t, j, h, CasimirSet({Expr::variable("x3")}));
    const double a2 = 1.0 - std::pow(step, 6) / 72.0;
    double exact_factor = 1.0;
    for (std::size_t k = 0; k < steps; ++k)
        exact_factor *= a2;
    const double predicted = 0.5 * (1.0 - exact_factor);
    EXPECT_NEAR(r.invariants[0].drift, predicted, 0.02 * predicted);
    EXPECT_NEAR(r.invariants[0].ratio, 32.0, 2.0);
    EXPECT_EQ(r.invariants[1].drift, 0.0);
}

TEST(Conservation, OscillatorStateErrorIsFourthOrder) {
    const double ratio = oscillator_error(0.1, 10) / oscillator_error(0.05, 20);
    EXPECT_GE(ratio, 8.0);
    EXPECT_LE(ratio, 24.0);
    EXPECT_NEAR(std::log2(ratio), 4.0, 0.2);
}

TEST(Conservation, NonlinearCasimirDriftIsFourthOrder) {
    // Canonical block pushed forward by x3 -> x3 + x1^2; the Casimir becomes
    // x3 - x1^2, which the integrator does not preserve exactly.
    const StructureMatrix j = make_matrix(3, kX3, {{0, 1, Expr::constant(1.0)}, {1, 2, parse("-2*x1", kX3)}});
    const CasimirSet casimirs({parse("x3 - x1^2", kX3)});
    ASSERT_TRUE(verify_jacobi(j, SampleRegion::cube(kX3)).passed);
    ASSERT_TRUE(verify_casimir(j, casimirs[0].function, SampleRegion::cube(kX3)).passed);
    const Expr h = parse("(x1^2 + x2^2)/2 + x3", kX3);
    const Trajectory t = integrate(j, h, Point(kX3, {0.5, 0.2, 0.1}), 0.05, 20);
    const ConservationReport r = conservation_report(t, j, h, casimirs);
    const InvariantDrift& c = r.invariants[1];
    EXPECT_GT(c.drift, 0.0);
    EXPECT_NEAR(c.slope, 4.0, 0.5) << c.drift << " " << c.drift_half;
}

TEST(Conservation, DarbouxEquivariance) {
    const Expr eta = parse("2 + sin(y)", {"y"});
    const double a1 = 0.5, a2 = -1.0, a3 = 0.75;
    const StructureMatrix j = build_3d_family(a1, a2, a3, eta);
    const DarbouxChart chart = darboux_reduce_3d(a1, a2, a3, eta, SampleRegion::cube(kX3));
    const Expr h = parse("x1^2/2 + x2*x3 + x3^2/4", kX3);

    Bindings back;
    for (std::size_t i = 0; i < 3; ++i)
        back.emplace(kX3[i], chart.inverse[i]);
    const Expr hz = simplify(substitute(h, back));
    const StructureMatrix canon = make_matrix(3, kY3, {{0, 1, Expr::constant(1.0)}});

    const Point x0(kX3, {0.3, -0.4, 0.2});
    std::vector<double> z0(3);
    for (std::size_t i = 0; i < 3; ++i)
        z0[i] = chart.forward[i].eval(x0);

    const Trajectory tx = integrate(j, h, x0, 1e-3, 1000);
    const Trajectory tz = integrate(canon, hz, Point(kY3, z0), 1e-3, 1000);
    double worst = 0.0;
    for (std::size_t k = 0; k <= 1000; k += 50) {
        const Point p = tx.point(k);
        for (std::size_t i = 0; i < 3; ++i)
            worst = std::max(worst, std::abs(chart.forward[i].eval(p) - tz.states[k](static_cast<Eigen::Index>(i))));
    }
    EXPECT_LE(worst, 1e-6);
}
