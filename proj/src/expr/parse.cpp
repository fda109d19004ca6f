#include "node.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace dsolkit {

namespace {

// Recursive descent over
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | base ('^' exponent)?
//   base   := number | ident | ident '(' expr ')' | '(' expr ')'
//   exponent := '-'? number | '(' '-'? number ')'
// Unary minus binds looser than '^', so -x^2 is -(x^2).
class Parser {
public:
    Parser(std::string_view text, std::span<const std::string> variables)
        : text_(text), variables_(variables) {}

    Expr parse_all() {
        Expr e = expr();
        skip_space();
        if (pos_ != text_.size())
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& message) const { throw ParseError(pos_, message); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c))
            fail(std::string("expected '") + c + "'");
    }

    Expr expr() {
        Expr lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = lhs + term();
            else if (accept('-'))
                lhs = lhs - term();
            else
                return lhs;
        }
    }

    Expr term() {
        Expr lhs = factor();
        for (;;) {
            if (accept('*'))
                lhs = lhs * factor();
            else if (accept('/'))
                lhs = lhs / factor();
            else
                return lhs;
        }
    }

    Expr factor() {
        if (accept('-')) {
            skip_space();
            // A bare numeric literal folds into a negative constant unless a
            // power follows, since '-' binds looser than '^'.
            if (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
                const double v = number();
                if (accept('^'))
                    return -pow(Expr::constant(v), exponent());
                return Expr::constant(-v);
            }
            return -factor();
        }
        Expr b = base();
        if (accept('^'))
            return pow(b, exponent());
        return b;
    }

    double exponent() {
        const bool paren = accept('(');
        const bool negative = accept('-');
        skip_space();
        if (pos_ >= text_.size() || !(std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            fail("exponent must be a numeric constant");
        double v = number();
        if (paren)
            expect(')');
        return negative ? -v : v;
    }

    double number() {
        skip_space();
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        // from_chars accepts neither a leading '+' nor a leading '.'; normalize the latter.
        std::string buffer;
        if (*first == '.') {
            std::size_t end = pos_ + 1;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '.' ||
                    ((text_[end] == '+' || text_[end] == '-') && (text_[end - 1] == 'e' || text_[end - 1] == 'E'))))
                ++end;
            buffer = "0" + std::string(text_.substr(pos_, end - pos_));
            first = buffer.data();
            last = buffer.data() + buffer.size();
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr == first)
            fail("malformed number");
        std::size_t consumed = static_cast<std::size_t>(ptr - first);
        if (!buffer.empty())
            consumed -= 1;
        pos_ += consumed;
        if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            fail("malformed number");
        return value;
    }

    Expr base() {
        skip_space();
        if (pos_ >= text_.size())
            fail("unexpected end of input");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return Expr::constant(number());
        if (c == '(') {
            ++pos_;
            Expr inner = expr();
            expect(')');
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Expr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            static constexpr std::pair<std::string_view, ExprKind> functions[] = {
                {"sin", ExprKind::Sin}, {"cos", ExprKind::Cos},   {"exp", ExprKind::Exp},
                {"log", ExprKind::Log}, {"sqrt", ExprKind::Sqrt},
            };
            auto it = std::find_if(std::begin(functions), std::end(functions),
                                   [&](const auto& f) { return f.first == name; });
            if (it == std::end(functions)) {
                pos_ = start;
                fail("unknown function '" + name + "'");
            }
            ++pos_;
            Expr arg = expr();
            if (accept(','))
                fail("function '" + name + "' takes one argument");
            expect(')');
            return make_node(it->second, 0.0, {arg});
        }
        if (std::find(variables_.begin(), variables_.end(), name) == variables_.end()) {
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        return Expr::variable(name);
    }

    std::string_view text_;
    std::span<const std::string> variables_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, std::span<const std::string> variables) {
    return Parser(text, variables).parse_all();
}

Expr parse(std::string_view text, std::initializer_list<std::string> variables) {
    return parse(text, std::span<const std::string>(variables.begin(), variables.size()));
}

}  // namespace dsolkit
