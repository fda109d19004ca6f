#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dsolkit/poisson.hpp"

namespace dsolkit {

/// Raised when the flow produces a non-finite state.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& message, std::size_t step) : std::runtime_error(message), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

struct Trajectory {
    std::vector<std::string> variables;
    double h = 0.0;
    std::size_t steps = 0;
    /// steps + 1 states on the uniform grid t_k = k h.
    std::vector<Eigen::VectorXd> states;

    double time(std::size_t k) const { return static_cast<double>(k) * h; }
    Point point(std::size_t k) const;
};

/// Classical fourth-order Runge-Kutta on x' = J(x) grad H(x).
Trajectory integrate(const StructureMatrix& j, const Expr& hamiltonian, const Point& x0, double h, std::size_t steps);

struct InvariantDrift {
    std::string name;
    Expr function;
    /// max_k |f(x_k) - f(x_0)| at step h.
    double drift = 0.0;
    /// Same quantity for the rerun at h/2 over the same time span.
    double drift_half = 0.0;
    /// drift / drift_half; NaN when both vanish.
    double ratio = 0.0;
    /// log2(ratio), the observed order.
    double slope = 0.0;
};

struct ConservationReport {
    double h = 0.0;
    std::size_t steps = 0;
    /// Hamiltonian first, then the Casimir generators in order.
    std::vector<InvariantDrift> invariants;
};

ConservationReport conservation_report(const Trajectory& trajectory, const StructureMatrix& j,
                                       const Expr& hamiltonian, const CasimirSet& casimirs);

}  // namespace dsolkit
