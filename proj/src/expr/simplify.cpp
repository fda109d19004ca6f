#include "node.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace dsolkit {

namespace {

// Coefficients below this fraction of the largest contribution are treated
// as cancellation residue and dropped.
constexpr double kCancellation = 1e-14;

bool is_sum(const Expr& e) { return e.kind() == ExprKind::Add || e.kind() == ExprKind::Sub; }

struct Factor {
    Expr atom;
    double exponent;
    std::string key;
};

// coefficient * prod(atom_i ^ exponent_i); exponents of sum atoms are integers.
struct ProductForm {
    double numerator = 1.0;
    double denominator = 1.0;
    bool zero = false;
    std::vector<Factor> factors;

    double coefficient() const { return zero ? 0.0 : numerator / denominator; }

    void scale(double v, double exponent) {
        if (v == 0.0) {
            if (exponent > 0) {
                zero = true;
                return;
            }
            add(Expr(), exponent);
            return;
        }
        if (exponent > 0)
            numerator *= std::pow(v, exponent);
        else
            denominator *= std::pow(v, -exponent);
    }

    void add(const Expr& atom, double exponent) {
        for (Factor& f : factors)
            if (structurally_equal(f.atom, atom)) {
                f.exponent += exponent;
                return;
            }
        factors.push_back({atom, exponent, {}});
    }

    // exp(a)^p exp(b)^q -> exp(p a + q b).
    void merge_exponentials() {
        Expr arg;
        std::size_t count = 0;
        for (const Factor& f : factors) {
            if (f.atom.kind() != ExprKind::Exp || f.exponent == 0.0)
                continue;
            const Expr term = f.exponent == 1.0 ? f.atom.operand(0) : Expr::constant(f.exponent) * f.atom.operand(0);
            arg = count++ ? arg + term : term;
        }
        if (count < 2)
            return;
        std::erase_if(factors, [](const Factor& f) { return f.atom.kind() == ExprKind::Exp; });
        const Expr merged = simplify(arg);
        if (merged.is_constant()) {
            const double v = std::exp(merged.constant_value());
            if (std::isfinite(v) && v != 0.0) {
                scale(v, 1.0);
                return;
            }
        }
        add(build::unary(ExprKind::Exp, merged), 1.0);
    }

    // Drops cancelled factors and orders the rest canonically.
    void finalize() {
        merge_exponentials();
        std::erase_if(factors, [](const Factor& f) { return f.exponent == 0.0; });
        for (Factor& f : factors)
            f.key = f.atom.to_string();
        std::sort(factors.begin(), factors.end(), [](const Factor& a, const Factor& b) {
            return a.key != b.key ? a.key < b.key : a.exponent < b.exponent;
        });
    }
};

// Product of factors without coefficient; Constant 1 when empty.
Expr rebuild_term(const std::vector<Factor>& factors, double coefficient) {
    Expr num, den;
    bool has_num = false, has_den = false;
    for (const Factor& f : factors) {
        const double e = std::abs(f.exponent);
        Expr power = e == 1.0 ? f.atom : pow(f.atom, e);
        Expr& target = f.exponent > 0 ? num : den;
        bool& has = f.exponent > 0 ? has_num : has_den;
        target = has ? target * power : power;
        has = true;
    }
    if (coefficient != 1.0) {
        if (coefficient == -1.0 && has_num)
            return has_den ? (-num) / den : -num;
        num = has_num ? Expr::constant(coefficient) * num : Expr::constant(coefficient);
        has_num = true;
    }
    if (!has_num)
        num = Expr::constant(1.0);
    return has_den ? num / den : num;
}

struct Term {
    Expr expr;
    std::vector<Factor> factors;
    double coefficient;
    double magnitude;
    std::string key;
};

struct SumForm {
    double constant = 0.0;
    double constant_magnitude = 0.0;
    std::vector<Term> terms;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> index;
    bool finalized = false;

    void add_constant(double v) {
        constant += v;
        constant_magnitude = std::max(constant_magnitude, std::abs(v));
    }

    void add_term(const std::vector<Factor>& factors, double coefficient) {
        const Expr term = rebuild_term(factors, 1.0);
        const std::uint64_t h = term.structural_hash();
        auto& bucket = index[h];
        for (std::size_t i : bucket) {
            if (structurally_equal(terms[i].expr, term)) {
                terms[i].coefficient += coefficient;
                terms[i].magnitude = std::max(terms[i].magnitude, std::abs(coefficient));
                return;
            }
        }
        bucket.push_back(terms.size());
        terms.push_back({term, factors, coefficient, std::abs(coefficient), {}});
    }

    void finalize() {
        if (finalized)
            return;
        finalized = true;
        std::erase_if(terms, [](const Term& t) {
            return t.coefficient == 0.0 || std::abs(t.coefficient) <= kCancellation * t.magnitude;
        });
        if (std::abs(constant) <= kCancellation * constant_magnitude)
            constant = 0.0;
        for (Term& t : terms) {
            std::string key;
            for (const Factor& f : t.factors) {
                key += f.key;
                key += '^';
                key += std::to_string(f.exponent);
                key += ';';
            }
            t.key = std::move(key);
        }
        std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.key < b.key; });
        index.clear();
    }

    void negate() {
        constant = -constant;
        for (Term& t : terms)
            t.coefficient = -t.coefficient;
    }

    Expr rebuild() const {
        if (terms.empty())
            return Expr::constant(constant);
        Expr acc = rebuild_term(terms[0].factors, terms[0].coefficient);
        for (std::size_t i = 1; i < terms.size(); ++i) {
            const double c = terms[i].coefficient;
            Expr t = rebuild_term(terms[i].factors, std::abs(c));
            acc = c < 0 ? acc - t : acc + t;
        }
        if (constant > 0)
            acc = acc + Expr::constant(constant);
        else if (constant < 0)
            acc = acc - Expr::constant(-constant);
        return acc;
    }
};

void add_to_sum(const Expr& e, double scale, SumForm& sum);
void multiply_into(const Expr& e, double exponent, ProductForm& product);

Expr simplify_function(const Expr& e) {
    const Expr arg = simplify(e.operand(0));
    return build::unary(e.kind(), arg);
}

SumForm sum_form(const Expr& e) {
    SumForm s;
    add_to_sum(e, 1.0, s);
    s.finalize();
    return s;
}

void add_to_sum(const Expr& e, double scale, SumForm& sum) {
    switch (e.kind()) {
        case ExprKind::Constant:
            sum.add_constant(scale * e.constant_value());
            return;
        case ExprKind::Add:
            add_to_sum(e.operand(0), scale, sum);
            add_to_sum(e.operand(1), scale, sum);
            return;
        case ExprKind::Sub:
            add_to_sum(e.operand(0), scale, sum);
            add_to_sum(e.operand(1), -scale, sum);
            return;
        case ExprKind::Neg:
            add_to_sum(e.operand(0), -scale, sum);
            return;
        default:
            break;
    }
    ProductForm p;
    multiply_into(e, 1.0, p);
    if (p.zero)
        return;
    p.finalize();
    const double c = scale * p.coefficient();
    if (c == 0.0)
        return;
    if (p.factors.empty()) {
        sum.add_constant(c);
        return;
    }
    if (p.factors.size() == 1 && p.factors[0].exponent == 1.0 && is_sum(p.factors[0].atom)) {
        add_to_sum(p.factors[0].atom, c, sum);
        return;
    }
    sum.add_term(p.factors, c);
}

void multiply_into(const Expr& e, double exponent, ProductForm& product) {
    switch (e.kind()) {
        case ExprKind::Constant:
            product.scale(e.constant_value(), exponent);
            return;
        case ExprKind::Variable:
            product.add(e, exponent);
            return;
        case ExprKind::Neg:
            product.scale(-1.0, exponent);
            multiply_into(e.operand(0), exponent, product);
            return;
        case ExprKind::Mul:
            multiply_into(e.operand(0), exponent, product);
            multiply_into(e.operand(1), exponent, product);
            return;
        case ExprKind::Div:
            multiply_into(e.operand(0), exponent, product);
            multiply_into(e.operand(1), -exponent, product);
            return;
        case ExprKind::Pow: {
            const double c = e.exponent();
            if (detail::is_integer(c)) {
                multiply_into(e.operand(0), exponent * c, product);
                return;
            }
            const Expr base = simplify(e.operand(0));
            if (base.is_constant()) {
                const double v = std::pow(base.constant_value(), c);
                if (std::isfinite(v) && v != 0.0) {
                    product.scale(v, exponent);
                    return;
                }
            }
            product.add(base, c * exponent);
            return;
        }
        case ExprKind::Add:
        case ExprKind::Sub: {
            SumForm s = sum_form(e);
            if (s.terms.empty()) {
                product.scale(s.constant, exponent);
                return;
            }
            if (s.terms.size() == 1 && s.constant == 0.0) {
                product.scale(s.terms[0].coefficient, exponent);
                multiply_into(rebuild_term(s.terms[0].factors, 1.0), exponent, product);
                return;
            }
            if (s.terms[0].coefficient < 0) {
                s.negate();
                product.scale(-1.0, exponent);
            }
            product.add(s.rebuild(), exponent);
            return;
        }
        default: {
            const Expr f = simplify_function(e);
            if (f.is_constant())
                product.scale(f.constant_value(), exponent);
            else
                product.add(f, exponent);
            return;
        }
    }
}

}  // namespace

Expr simplify(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Constant:
        case ExprKind::Variable:
            return e;
        case ExprKind::Sin:
        case ExprKind::Cos:
        case ExprKind::Exp:
        case ExprKind::Log:
        case ExprKind::Sqrt:
            return simplify_function(e);
        default:
            return sum_form(e).rebuild();
    }
}

}  // namespace dsolkit
