#include "dsolkit/darboux.hpp"

#include <algorithm>
#include <cmath>

#include "dsolkit/construct.hpp"

namespace dsolkit {

Expr casimir_of_family(double a1, double a2, double a3) {
    const auto x = numbered_names("x", 3);
    const double a[3] = {a1, a2, a3};
    Expr d;
    for (std::size_t k = 0; k < 3; ++k)
        if (a[k] != 0.0)
            d = d + Expr::constant(a[k]) * Expr::variable(x[k]);
    return simplify(d);
}

DarbouxChart darboux_reduce_3d(double a1, double a2, double a3, const Expr& eta, const SampleRegion& region,
                               double tol) {
    const double a[3] = {a1, a2, a3};
    if (a1 == 0.0 && a2 == 0.0 && a3 == 0.0)
        throw std::invalid_argument("darboux: the coefficient vector is zero");
    const auto x = numbered_names("x", 3);
    const auto y = numbered_names("y", 3);
    if (region.variables != x)
        throw std::invalid_argument("darboux: region must be over x1, x2, x3");

    const Expr casimir = casimir_of_family(a1, a2, a3);
    const Expr eta_x = simplify(substitute(eta, {{"y", casimir}}));
    const auto samples = region.sample();
    // A sign change on the connected box implies a zero between samples.
    int sign = 0;
    for (const Point& p : samples) {
        const double v = eta_x.eval(p);
        if (!(std::abs(v) >= 10.0 * tol))
            throw HypothesisError("darboux: eta vanishes on the region, |eta| = " + std::to_string(std::abs(v)));
        const int s = v > 0 ? 1 : -1;
        if (sign != 0 && s != sign)
            throw HypothesisError("darboux: eta changes sign on the region");
        sign = s;
    }

    std::size_t q = 0;
    for (std::size_t k = 1; k < 3; ++k)
        if (std::abs(a[k]) > std::abs(a[q]))
            q = k;
    std::size_t others[2];
    for (std::size_t k = 0, c = 0; k < 3; ++k)
        if (k != q)
            others[c++] = k;
    const std::size_t p1 = others[0], p2 = others[1];
    // Orientation making {y1, y2} = +1 under the constant factor matrix.
    const double s = q == 1 ? -1.0 : 1.0;

    const Expr aq = Expr::constant(a[q]);
    CoordinateChange change;
    change.old_variables = x;
    change.new_variables = y;
    change.forward = {simplify(Expr::constant(s) * Expr::variable(x[p1]) / (aq * eta_x)),
                      Expr::variable(x[p2]), casimir};
    const Expr eta_y = simplify(substitute(eta, {{"y", Expr::variable(y[2])}}));
    const Expr xp1 = simplify(Expr::constant(s * a[q]) * Expr::variable(y[0]) * eta_y);
    const Expr xp2 = Expr::variable(y[1]);
    const Expr xq = simplify((Expr::variable(y[2]) - Expr::constant(a[p1]) * xp1 - Expr::constant(a[p2]) * xp2) / aq);
    change.inverse.resize(3);
    change.inverse[p1] = xp1;
    change.inverse[p2] = xp2;
    change.inverse[q] = xq;

    TransformOptions options;
    options.region = region;
    options.tol = tol;
    TransformResult result = change_coordinates(build_3d_family(a1, a2, a3, eta), change, false, options);

    DarbouxChart chart{change.forward, change.inverse, std::move(result.matrix), region, casimir, q, 0.0, 0.0};
    Eigen::MatrixXd canonical = Eigen::MatrixXd::Zero(3, 3);
    canonical(0, 1) = 1.0;
    canonical(1, 0) = -1.0;
    auto names = std::make_shared<const std::vector<std::string>>(y);
    for (const Point& p : samples) {
        std::vector<double> z(3);
        for (std::size_t i = 0; i < 3; ++i)
            z[i] = chart.forward[i].eval(p);
        const Point zp(names, z);
        for (std::size_t i = 0; i < 3; ++i)
            chart.roundtrip_error = std::max(chart.roundtrip_error, std::abs(chart.inverse[i].eval(zp) - p.value(i)));
        chart.canonical_deviation =
            std::max(chart.canonical_deviation, (chart.reduced.evaluate(zp) - canonical).cwiseAbs().maxCoeff());
    }
    return chart;
}

}  // namespace dsolkit
