#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dsolkit/construct.hpp"
#include "dsolkit/expr.hpp"

namespace testsupport {

using dsolkit::Expr;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
    bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[static_cast<std::size_t>(integer(0, static_cast<int>(items.size()) - 1))];
    }

private:
    std::mt19937_64 gen_;
};

/// Random expression whose functions stay inside their domains on
/// moderate boxes: log and sqrt see 1 + u^2, divisors are 2 + sin(u).
inline Expr random_expr(Rng& rng, const std::vector<std::string>& vars, int depth) {
    if (depth <= 0 || rng.coin(0.2)) {
        if (rng.coin(0.3))
            return Expr::constant(std::round(rng.uniform(-3.0, 3.0) * 4.0) / 4.0);
        return Expr::variable(rng.pick(vars));
    }
    auto sub = [&] { return random_expr(rng, vars, depth - 1); };
    switch (rng.integer(0, 11)) {
    case 0:
        return sub() + sub();
    case 1:
        return sub() - sub();
    case 2:
    case 3:
        return sub() * sub();
    case 4:
        return sub() / (Expr::constant(2.0) + dsolkit::sin(sub()));
    case 5:
        return -sub();
    case 6:
        return dsolkit::sin(sub());
    case 7:
        return dsolkit::cos(sub());
    case 8:
        return dsolkit::exp(Expr::constant(0.5) * dsolkit::sin(sub()));
    case 9: {
        const Expr u = sub();
        return dsolkit::log(Expr::constant(1.0) + u * u);
    }
    case 10: {
        const Expr u = sub();
        return dsolkit::sqrt(Expr::constant(1.0) + u * u);
    }
    default: {
        static const std::vector<double> exponents{2.0, 3.0, -1.0, -2.0, 0.5};
        const double e = rng.pick(exponents);
        if (e < 0.0 || e == 0.5)
            return dsolkit::pow(Expr::constant(1.5) + dsolkit::cos(sub()), e);
        return dsolkit::pow(sub(), e);
    }
    }
}

/// Psi functions mixing polynomial and trigonometric terms in y1..yk.
inline Expr random_psi(Rng& rng, std::size_t k) {
    const double c0 = rng.uniform(-1.0, 1.0);
    if (k == 0)
        return Expr::constant(c0);
    const auto y = dsolkit::numbered_names("y", k);
    auto var = [&] { return Expr::variable(rng.pick(y)); };
    Expr e = Expr::constant(c0) + Expr::constant(rng.uniform(-1.0, 1.0)) * var();
    if (rng.coin())
        e = e + Expr::constant(rng.uniform(-1.0, 1.0)) * var() * var();
    if (rng.coin())
        e = e + Expr::constant(rng.uniform(-1.0, 1.0)) * dsolkit::sin(var());
    if (rng.coin())
        e = e + dsolkit::cos(Expr::constant(rng.uniform(-1.0, 1.0)) * var());
    return dsolkit::simplify(e);
}

inline dsolkit::DPsiSpec random_dpsi(Rng& rng, int min_n = 3, int max_n = 7, bool permute = false) {
    dsolkit::DPsiSpec spec;
    spec.n = static_cast<std::size_t>(rng.integer(min_n, max_n));
    spec.rho = static_cast<std::size_t>(rng.integer(1, static_cast<int>(spec.n)));
    for (std::size_t l = spec.rho; l < spec.n; ++l) {
        std::vector<double> row;
        for (std::size_t k = 0; k < spec.rho; ++k)
            row.push_back(rng.coin(0.3) ? 0.0 : std::round(rng.uniform(-2.0, 2.0) * 4.0) / 4.0);
        spec.a.push_back(row);
    }
    for (std::size_t i = 0; i < spec.rho; ++i)
        for (std::size_t j = i + 1; j < spec.rho; ++j)
            if (rng.coin(0.8))
                spec.psi[{i, j}] = random_psi(rng, spec.n - spec.rho);
    if (permute) {
        std::vector<std::size_t> sigma(spec.n);
        for (std::size_t i = 0; i < spec.n; ++i)
            sigma[i] = i;
        for (std::size_t i = spec.n; i-- > 1;)
            std::swap(sigma[i], sigma[static_cast<std::size_t>(rng.integer(0, static_cast<int>(i)))]);
        spec.permutation = sigma;
    }
    return spec;
}

/// Central difference (f(p + h e) - f(p - h e)) / 2h along `var`.
inline double central_difference(const Expr& f, const dsolkit::Point& p, const std::string& var, double h) {
    const std::vector<double> values(p.values().begin(), p.values().end());
    std::size_t idx = 0;
    while (p.names()[idx] != var)
        ++idx;
    auto at = [&](double shift) {
        std::vector<double> v = values;
        v[idx] += shift;
        return f.eval(dsolkit::Point(p.names(), v));
    };
    return (at(h) - at(-h)) / (2 * h);
}

}  // namespace testsupport
