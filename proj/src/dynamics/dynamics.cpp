#include "dsolkit/dynamics.hpp"

#include <cmath>
#include <limits>

namespace dsolkit {

namespace {

class VectorField {
public:
    VectorField(const StructureMatrix& j, const Expr& hamiltonian)
        : j_(j), names_(std::make_shared<const std::vector<std::string>>(j.variables())) {
        for (const std::string& v : j.variables())
            grad_.push_back(simplify(differentiate(hamiltonian, v)));
    }

    Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
        const Point p(names_, std::vector<double>(x.data(), x.data() + x.size()));
        Eigen::VectorXd g(x.size());
        for (Eigen::Index l = 0; l < x.size(); ++l)
            g(l) = grad_[static_cast<std::size_t>(l)].eval(p);
        return j_.evaluate(p) * g;
    }

private:
    const StructureMatrix& j_;
    std::shared_ptr<const std::vector<std::string>> names_;
    std::vector<Expr> grad_;
};

double max_drift(const Trajectory& t, const Expr& f) {
    const double f0 = f.eval(t.point(0));
    double worst = 0.0;
    for (std::size_t k = 1; k < t.states.size(); ++k)
        worst = std::max(worst, std::abs(f.eval(t.point(k)) - f0));
    return worst;
}

}  // namespace

Point Trajectory::point(std::size_t k) const {
    const Eigen::VectorXd& x = states.at(k);
    return Point(variables, std::vector<double>(x.data(), x.data() + x.size()));
}

Trajectory integrate(const StructureMatrix& j, const Expr& hamiltonian, const Point& x0, double h, std::size_t steps) {
    if (!(h > 0.0))
        throw std::invalid_argument("integrate: step size must be positive");
    if (x0.names() != j.variables())
        throw std::invalid_argument("integrate: initial point variables do not match the matrix");
    const VectorField f(j, hamiltonian);
    Trajectory t;
    t.variables = j.variables();
    t.h = h;
    t.steps = steps;
    t.states.reserve(steps + 1);
    t.states.emplace_back(Eigen::Map<const Eigen::VectorXd>(x0.values().data(),
                                                            static_cast<Eigen::Index>(x0.dimension())));
    for (std::size_t k = 0; k < steps; ++k) {
        const Eigen::VectorXd& x = t.states.back();
        Eigen::VectorXd next;
        try {
            const Eigen::VectorXd k1 = f(x);
            const Eigen::VectorXd k2 = f(x + 0.5 * h * k1);
            const Eigen::VectorXd k3 = f(x + 0.5 * h * k2);
            const Eigen::VectorXd k4 = f(x + h * k3);
            next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } catch (const EvaluationError& e) {
            throw IntegrationError("integrate: step " + std::to_string(k + 1) + ": " + e.what(), k + 1);
        }
        if (!next.allFinite())
            throw IntegrationError("integrate: non-finite state at step " + std::to_string(k + 1), k + 1);
        t.states.push_back(std::move(next));
    }
    return t;
}

ConservationReport conservation_report(const Trajectory& trajectory, const StructureMatrix& j,
                                       const Expr& hamiltonian, const CasimirSet& casimirs) {
    for (const Eigen::VectorXd& x : trajectory.states)
        if (!x.allFinite())
            throw std::invalid_argument("conservation_report: trajectory has non-finite states");
    const Trajectory half = integrate(j, hamiltonian, trajectory.point(0), trajectory.h / 2.0, 2 * trajectory.steps);
    ConservationReport report;
    report.h = trajectory.h;
    report.steps = trajectory.steps;
    auto add = [&](std::string name, const Expr& f) {
        InvariantDrift d;
        d.name = std::move(name);
        d.function = f;
        d.drift = max_drift(trajectory, f);
        d.drift_half = max_drift(half, f);
        if (d.drift == 0.0 && d.drift_half == 0.0)
            d.ratio = std::numeric_limits<double>::quiet_NaN();
        else
            d.ratio = d.drift / d.drift_half;
        d.slope = std::log2(d.ratio);
        report.invariants.push_back(std::move(d));
    };
    add("H", hamiltonian);
    const auto functions = casimirs.functions();
    for (std::size_t k = 0; k < functions.size(); ++k)
        add("C" + std::to_string(k + 1), functions[k]);
    return report;
}

}  // namespace dsolkit
