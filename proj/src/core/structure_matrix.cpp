#include "dsolkit/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace dsolkit {

StructureMatrix::StructureMatrix(std::vector<std::string> variables)
    : variables_(std::move(variables)), entries_(variables_.size(), variables_.size()) {
    if (variables_.size() < 2)
        throw std::invalid_argument("structure matrix: dimension must be at least 2");
    std::set<std::string> unique(variables_.begin(), variables_.end());
    if (unique.size() != variables_.size())
        throw std::invalid_argument("structure matrix: duplicate variable names");
}

std::vector<UpperEntry> StructureMatrix::upper_entries() const {
    std::vector<UpperEntry> out;
    for (std::size_t i = 0; i < dimension(); ++i)
        for (std::size_t j = i + 1; j < dimension(); ++j)
            if (!entries_(i, j).is_constant(0.0))
                out.push_back({i, j, entries_(i, j)});
    return out;
}

StructureMatrix make_matrix(std::size_t n, std::vector<std::string> variables, const std::vector<UpperEntry>& upper) {
    if (variables.size() != n)
        throw std::invalid_argument("make_matrix: expected " + std::to_string(n) + " variables, got " +
                                    std::to_string(variables.size()));
    StructureMatrix m(std::move(variables));
    std::vector<bool> seen(n * n, false);
    for (const UpperEntry& e : upper) {
        if (e.i >= e.j || e.j >= n)
            throw std::invalid_argument("make_matrix: entry (" + std::to_string(e.i + 1) + "," +
                                        std::to_string(e.j + 1) + ") is not in the strict upper triangle of a " +
                                        std::to_string(n) + "x" + std::to_string(n) + " matrix");
        if (seen[e.i * n + e.j])
            throw std::invalid_argument("make_matrix: duplicate entry (" + std::to_string(e.i + 1) + "," +
                                        std::to_string(e.j + 1) + ")");
        seen[e.i * n + e.j] = true;
        for (const std::string& v : e.value.free_variables())
            if (std::find(m.variables_.begin(), m.variables_.end(), v) == m.variables_.end())
                throw std::invalid_argument("make_matrix: entry (" + std::to_string(e.i + 1) + "," +
                                            std::to_string(e.j + 1) + ") uses undeclared variable '" + v + "'");
        m.entries_(e.i, e.j) = e.value;
        m.entries_(e.j, e.i) = simplify(-e.value);
    }
    return m;
}

StructureMatrix structure_from_upper(const ExprMatrix& m, std::vector<std::string> variables) {
    if (m.rows() != m.cols() || m.rows() != variables.size())
        throw std::invalid_argument("structure_from_upper: matrix must be square over the given variables");
    std::vector<UpperEntry> upper;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j)
            if (!m(i, j).is_constant(0.0))
                upper.push_back({i, j, m(i, j)});
    const std::size_t n = variables.size();
    return make_matrix(n, std::move(variables), upper);
}

SampleRegion SampleRegion::cube(std::vector<std::string> variables, double lo, double hi, std::size_t samples,
                                std::uint64_t seed) {
    SampleRegion r;
    r.box.assign(variables.size(), Interval{lo, hi});
    r.variables = std::move(variables);
    r.samples = samples;
    r.seed = seed;
    return r;
}

bool SampleRegion::admits(const Point& p) const {
    for (std::size_t i = 0; i < box.size(); ++i)
        if (!(p.value(i) >= box[i].lo && p.value(i) <= box[i].hi))
            return false;
    for (const Expr& g : exclusions) {
        const double v = g.eval(p);
        if (!std::isfinite(v) || std::abs(v) < margin)
            return false;
    }
    return true;
}

std::vector<Point> SampleRegion::sample() const {
    if (box.size() != variables.size())
        throw std::invalid_argument("region: box has " + std::to_string(box.size()) + " intervals for " +
                                    std::to_string(variables.size()) + " variables");
    for (const Interval& iv : box)
        if (!(iv.lo <= iv.hi))
            throw std::invalid_argument("region: interval with lo > hi");
    auto names = std::make_shared<const std::vector<std::string>>(variables);
    std::mt19937_64 gen(seed);
    // 53 random bits -> [0, 1), independent of the standard library's distributions.
    auto uniform = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    std::vector<Point> points;
    points.reserve(samples);
    const std::size_t max_attempts = 10000 * std::max<std::size_t>(samples, 1);
    std::size_t attempts = 0;
    while (points.size() < samples) {
        if (++attempts > max_attempts)
            throw std::runtime_error("region: could not draw " + std::to_string(samples) +
                                     " points satisfying the exclusions");
        std::vector<double> x(box.size());
        for (std::size_t i = 0; i < box.size(); ++i)
            x[i] = box[i].lo + uniform() * (box[i].hi - box[i].lo);
        Point p(names, std::move(x));
        if (admits(p))
            points.push_back(std::move(p));
    }
    return points;
}

CasimirSet::CasimirSet(const std::vector<Expr>& functions) {
    for (const Expr& f : functions)
        add(f);
}

void CasimirSet::add(Expr function) { entries_.push_back({std::move(function), CasimirStatus::Claimed, std::nullopt}); }

std::vector<Expr> CasimirSet::functions() const {
    std::vector<Expr> out;
    for (const CasimirEntry& e : entries_)
        out.push_back(e.function);
    return out;
}

bool CasimirSet::verify(const StructureMatrix& j, const std::vector<Point>& samples, double tol) {
    bool all = true;
    for (CasimirEntry& e : entries_) {
        e.report = verify_casimir(j, e.function, samples, tol);
        e.status = e.report->passed ? CasimirStatus::Verified : CasimirStatus::Claimed;
        all = all && e.report->passed;
    }
    return all;
}

bool CasimirSet::all_verified() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const CasimirEntry& e) { return e.status == CasimirStatus::Verified; });
}

}  // namespace dsolkit
