#include "node.hpp"

#include <charconv>

namespace dsolkit {

namespace {

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

bool is_sum(const Expr& e) { return e.kind() == ExprKind::Add || e.kind() == ExprKind::Sub; }
bool is_product(const Expr& e) { return e.kind() == ExprKind::Mul || e.kind() == ExprKind::Div; }

const char* function_name(ExprKind kind) {
    switch (kind) {
        case ExprKind::Sin: return "sin";
        case ExprKind::Cos: return "cos";
        case ExprKind::Exp: return "exp";
        case ExprKind::Log: return "log";
        case ExprKind::Sqrt: return "sqrt";
        default: return "?";
    }
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
    if (wrap)
        out += '(';
    print(e, out);
    if (wrap)
        out += ')';
}

void print(const Expr& e, std::string& out) {
    switch (e.kind()) {
        case ExprKind::Constant:
            out += format_number(e.constant_value());
            return;
        case ExprKind::Variable:
            out += e.variable_name();
            return;
        case ExprKind::Sin:
        case ExprKind::Cos:
        case ExprKind::Exp:
        case ExprKind::Log:
        case ExprKind::Sqrt:
            out += function_name(e.kind());
            print_wrapped(e.operand(0), true, out);
            return;
        case ExprKind::Neg: {
            const Expr& a = e.operand(0);
            out += '-';
            print_wrapped(a, is_sum(a) || is_product(a) || a.kind() == ExprKind::Neg || a.is_constant(), out);
            return;
        }
        case ExprKind::Add:
        case ExprKind::Sub:
            print(e.operand(0), out);
            out += e.kind() == ExprKind::Add ? " + " : " - ";
            print_wrapped(e.operand(1), is_sum(e.operand(1)), out);
            return;
        case ExprKind::Mul:
        case ExprKind::Div:
            print_wrapped(e.operand(0), is_sum(e.operand(0)), out);
            out += e.kind() == ExprKind::Mul ? "*" : "/";
            print_wrapped(e.operand(1), is_sum(e.operand(1)) || is_product(e.operand(1)), out);
            return;
        case ExprKind::Pow: {
            const Expr& b = e.operand(0);
            const bool atom = b.kind() == ExprKind::Variable || detail::is_unary_function(b.kind()) ||
                              (b.is_constant() && b.constant_value() >= 0);
            print_wrapped(b, !atom, out);
            out += '^';
            out += format_number(e.exponent());
            return;
        }
    }
}

}  // namespace

std::string Expr::to_string() const {
    std::string out;
    print(*this, out);
    return out;
}

}  // namespace dsolkit
