#pragma once

#include <vector>

#include "dsolkit/poisson.hpp"
#include "dsolkit/transform.hpp"

namespace dsolkit {

/// Chart taking the three-dimensional family to the canonical block
/// [[0,1,0],[-1,0,0],[0,0,0]]. New coordinates are named y1, y2, y3.
struct DarbouxChart {
    std::vector<Expr> forward;
    std::vector<Expr> inverse;
    StructureMatrix reduced;
    SampleRegion region;
    Expr casimir;
    /// Zero-based index of the coordinate eliminated in favour of the Casimir.
    std::size_t pivot = 0;
    /// Largest |reduced - canonical| entry over the mapped samples.
    double canonical_deviation = 0.0;
    /// Largest |inverse(forward(x)) - x| component over the samples.
    double roundtrip_error = 0.0;
};

/// Throws std::invalid_argument when every a_i is zero and HypothesisError
/// when |eta(a.x)| < 10 tol at some sample of `region`.
DarbouxChart darboux_reduce_3d(double a1, double a2, double a3, const Expr& eta, const SampleRegion& region,
                               double tol = kDefaultTolerance);

/// a1 x1 + a2 x2 + a3 x3, the zero expression when a = 0.
Expr casimir_of_family(double a1, double a2, double a3);

}  // namespace dsolkit
