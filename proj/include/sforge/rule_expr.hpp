#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sforge {

// Reference to one parameter of one object; serialized as "object.name".
struct ParamRef {
    std::string object;
    std::string name;

    std::string path() const { return object + "." + name; }
    auto operator<=>(const ParamRef&) const = default;
};

inline ParamRef parse_param_path(std::string_view path) {
    const size_t dot = path.find('.');
    if (dot == std::string_view::npos) {
        throw std::invalid_argument("parameter path without object: " + std::string(path));
    }
    return ParamRef{std::string(path.substr(0, dot)), std::string(path.substr(dot + 1))};
}

// Arithmetic expression over parameter references: {+, -, *, /, abs, min, max}
// plus numeric literals. Immutable nodes shared by value-semantic handles.
class Expr {
  public:
    enum class Op { literal, param, add, sub, mul, div, abs, min, max };

    Op op = Op::literal;
    double value = 0.0;
    ParamRef ref;
    std::shared_ptr<const Expr> a, b;

    static Expr lit(double v) {
        Expr e;
        e.op = Op::literal;
        e.value = v;
        return e;
    }
    static Expr param(std::string object, std::string name) {
        Expr e;
        e.op = Op::param;
        e.ref = {std::move(object), std::move(name)};
        return e;
    }
    static Expr param(ParamRef r) {
        Expr e;
        e.op = Op::param;
        e.ref = std::move(r);
        return e;
    }
    static Expr unary(Op op, Expr x) {
        Expr e;
        e.op = op;
        e.a = std::make_shared<const Expr>(std::move(x));
        return e;
    }
    static Expr binary(Op op, Expr x, Expr y) {
        Expr e;
        e.op = op;
        e.a = std::make_shared<const Expr>(std::move(x));
        e.b = std::make_shared<const Expr>(std::move(y));
        return e;
    }

    friend Expr operator+(Expr x, Expr y) { return binary(Op::add, std::move(x), std::move(y)); }
    friend Expr operator-(Expr x, Expr y) { return binary(Op::sub, std::move(x), std::move(y)); }
    friend Expr operator*(Expr x, Expr y) { return binary(Op::mul, std::move(x), std::move(y)); }
    friend Expr operator/(Expr x, Expr y) { return binary(Op::div, std::move(x), std::move(y)); }

    bool operator==(const Expr& other) const {
        if (op != other.op) return false;
        switch (op) {
            case Op::literal: return value == other.value;
            case Op::param: return ref == other.ref;
            default: break;
        }
        if ((a == nullptr) != (other.a == nullptr) || (b == nullptr) != (other.b == nullptr)) return false;
        if (a && !(*a == *other.a)) return false;
        if (b && !(*b == *other.b)) return false;
        return true;
    }
};

inline Expr abs(Expr x) { return Expr::unary(Expr::Op::abs, std::move(x)); }
inline Expr min(Expr x, Expr y) { return Expr::binary(Expr::Op::min, std::move(x), std::move(y)); }
inline Expr max(Expr x, Expr y) { return Expr::binary(Expr::Op::max, std::move(x), std::move(y)); }

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat valuation keyed by "object.name".
using ValueMap = std::map<std::string, double>;

inline double eval_expr(const Expr& e, const ValueMap& values) {
    switch (e.op) {
        case Expr::Op::literal:
            return e.value;
        case Expr::Op::param: {
            auto it = values.find(e.ref.path());
            if (it == values.end()) throw EvalError("unresolved parameter reference: " + e.ref.path());
            return it->second;
        }
        case Expr::Op::add:
            return eval_expr(*e.a, values) + eval_expr(*e.b, values);
        case Expr::Op::sub:
            return eval_expr(*e.a, values) - eval_expr(*e.b, values);
        case Expr::Op::mul:
            return eval_expr(*e.a, values) * eval_expr(*e.b, values);
        case Expr::Op::div: {
            const double num = eval_expr(*e.a, values);
            const double den = eval_expr(*e.b, values);
            if (den == 0.0) throw EvalError("division by zero");
            return num / den;
        }
        case Expr::Op::abs:
            return std::abs(eval_expr(*e.a, values));
        case Expr::Op::min:
            return std::min(eval_expr(*e.a, values), eval_expr(*e.b, values));
        case Expr::Op::max:
            return std::max(eval_expr(*e.a, values), eval_expr(*e.b, values));
    }
    throw EvalError("corrupt expression node");
}

inline void collect_refs(const Expr& e, std::vector<ParamRef>& out) {
    switch (e.op) {
        case Expr::Op::param:
            if (std::find(out.begin(), out.end(), e.ref) == out.end()) out.push_back(e.ref);
            return;
        case Expr::Op::literal:
            return;
        default:
            if (e.a) collect_refs(*e.a, out);
            if (e.b) collect_refs(*e.b, out);
    }
}

inline int count_occurrences(const Expr& e, const ParamRef& x) {
    switch (e.op) {
        case Expr::Op::param:
            return e.ref == x ? 1 : 0;
        case Expr::Op::literal:
            return 0;
        default:
            return (e.a ? count_occurrences(*e.a, x) : 0) + (e.b ? count_occurrences(*e.b, x) : 0);
    }
}

// ---------------------------------------------------------------------------
// Interval arithmetic

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    static Interval point(double v) { return {v, v}; }
    double width() const { return hi - lo; }
    double mag() const { return std::max(std::abs(lo), std::abs(hi)); }
    double min_abs() const {
        if (lo <= 0.0 && hi >= 0.0) return 0.0;
        return std::min(std::abs(lo), std::abs(hi));
    }
    bool contains(double v) const { return v >= lo && v <= hi; }
    double clamp(double v) const { return std::min(hi, std::max(lo, v)); }
    double midpoint() const { return lo + (hi - lo) / 2.0; }

    bool operator==(const Interval&) const = default;
};

inline Interval operator+(Interval x, Interval y) { return {x.lo + y.lo, x.hi + y.hi}; }
inline Interval operator-(Interval x, Interval y) { return {x.lo - y.hi, x.hi - y.lo}; }
inline Interval operator*(Interval x, Interval y) {
    const double c[4] = {x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi};
    return {std::min({c[0], c[1], c[2], c[3]}), std::max({c[0], c[1], c[2], c[3]})};
}
inline Interval operator/(Interval x, Interval y) {
    if (y.lo <= 0.0 && y.hi >= 0.0) {
        return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }
    return x * Interval{1.0 / y.hi, 1.0 / y.lo};
}
inline Interval abs(Interval x) {
    if (x.lo >= 0.0) return x;
    if (x.hi <= 0.0) return {-x.hi, -x.lo};
    return {0.0, x.mag()};
}
inline Interval min(Interval x, Interval y) { return {std::min(x.lo, y.lo), std::min(x.hi, y.hi)}; }
inline Interval max(Interval x, Interval y) { return {std::max(x.lo, y.lo), std::max(x.hi, y.hi)}; }

using RangeMap = std::map<std::string, Interval>;

inline Interval interval_eval(const Expr& e, const RangeMap& ranges) {
    switch (e.op) {
        case Expr::Op::literal:
            return Interval::point(e.value);
        case Expr::Op::param: {
            auto it = ranges.find(e.ref.path());
            if (it == ranges.end()) throw EvalError("no range for parameter: " + e.ref.path());
            return it->second;
        }
        case Expr::Op::add:
            return interval_eval(*e.a, ranges) + interval_eval(*e.b, ranges);
        case Expr::Op::sub:
            return interval_eval(*e.a, ranges) - interval_eval(*e.b, ranges);
        case Expr::Op::mul:
            return interval_eval(*e.a, ranges) * interval_eval(*e.b, ranges);
        case Expr::Op::div:
            return interval_eval(*e.a, ranges) / interval_eval(*e.b, ranges);
        case Expr::Op::abs:
            return abs(interval_eval(*e.a, ranges));
        case Expr::Op::min:
            return min(interval_eval(*e.a, ranges), interval_eval(*e.b, ranges));
        case Expr::Op::max:
            return max(interval_eval(*e.a, ranges), interval_eval(*e.b, ranges));
    }
    throw EvalError("corrupt expression node");
}

// Upper bound on |d expr / d x| over the given parameter boxes; used to prove
// that small parameter perturbations cannot flip a rule with a large margin.
inline double lipschitz_bound(const Expr& e, const ParamRef& x, const RangeMap& ranges) {
    switch (e.op) {
        case Expr::Op::literal:
            return 0.0;
        case Expr::Op::param:
            return e.ref == x ? 1.0 : 0.0;
        case Expr::Op::add:
        case Expr::Op::sub:
            return lipschitz_bound(*e.a, x, ranges) + lipschitz_bound(*e.b, x, ranges);
        case Expr::Op::mul:
            return lipschitz_bound(*e.a, x, ranges) * interval_eval(*e.b, ranges).mag() +
                   lipschitz_bound(*e.b, x, ranges) * interval_eval(*e.a, ranges).mag();
        case Expr::Op::div: {
            const double la = lipschitz_bound(*e.a, x, ranges);
            const double lb = lipschitz_bound(*e.b, x, ranges);
            const Interval ia = interval_eval(*e.a, ranges);
            const Interval ib = interval_eval(*e.b, ranges);
            const double den = ib.min_abs();
            if (den == 0.0) return std::numeric_limits<double>::infinity();
            return (la * ib.mag() + lb * ia.mag()) / (den * den);
        }
        case Expr::Op::abs:
            return lipschitz_bound(*e.a, x, ranges);
        case Expr::Op::min:
        case Expr::Op::max:
            return std::max(lipschitz_bound(*e.a, x, ranges), lipschitz_bound(*e.b, x, ranges));
    }
    return std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// Canonical infix form

enum class Cmp { lt, le, eq, ge, gt };

inline std::string_view to_string(Cmp c) {
    switch (c) {
        case Cmp::lt: return "<";
        case Cmp::le: return "<=";
        case Cmp::eq: return "=";
        case Cmp::ge: return ">=";
        case Cmp::gt: return ">";
    }
    return "";
}

inline std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "0";
    return std::string(buf, ptr);
}

namespace expr_detail {

inline int precedence(Expr::Op op) {
    switch (op) {
        case Expr::Op::add:
        case Expr::Op::sub:
            return 1;
        case Expr::Op::mul:
        case Expr::Op::div:
            return 2;
        default:
            return 3;
    }
}

inline void print_expr(const Expr& e, std::string& out) {
    auto child = [&out](const Expr& c, int parent_prec, bool is_right, Expr::Op) {
        const int prec = precedence(c.op);
        // Right children of equal precedence keep their parentheses so the
        // printed form pins both structure and floating-point grouping.
        const bool parens = prec < parent_prec || (is_right && prec == parent_prec);
        if (parens) out += "(";
        print_expr(c, out);
        if (parens) out += ")";
    };
    switch (e.op) {
        case Expr::Op::literal:
            out += format_number(e.value);
            return;
        case Expr::Op::param:
            out += e.ref.path();
            return;
        case Expr::Op::add:
        case Expr::Op::sub:
        case Expr::Op::mul:
        case Expr::Op::div: {
            const int prec = precedence(e.op);
            child(*e.a, prec, false, e.op);
            out += e.op == Expr::Op::add   ? " + "
                   : e.op == Expr::Op::sub ? " - "
                   : e.op == Expr::Op::mul ? " * "
                                           : " / ";
            child(*e.b, prec, true, e.op);
            return;
        }
        case Expr::Op::abs:
            out += "abs(";
            print_expr(*e.a, out);
            out += ")";
            return;
        case Expr::Op::min:
        case Expr::Op::max:
            out += e.op == Expr::Op::min ? "min(" : "max(";
            print_expr(*e.a, out);
            out += ", ";
            print_expr(*e.b, out);
            out += ")";
            return;
    }
}

struct ExprParser {
    std::string_view text;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("expression parse error at offset " + std::to_string(pos) + ": " + what);
    }
    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    Expr parse_expr() {
        Expr left = parse_term();
        while (true) {
            skip_ws();
            if (eat('+')) {
                left = std::move(left) + parse_term();
            } else if (peek() == '-') {
                ++pos;
                left = std::move(left) - parse_term();
            } else {
                return left;
            }
        }
    }

    Expr parse_term() {
        Expr left = parse_factor();
        while (true) {
            if (eat('*')) {
                left = std::move(left) * parse_factor();
            } else if (eat('/')) {
                left = std::move(left) / parse_factor();
            } else {
                return left;
            }
        }
    }

    Expr parse_factor() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of expression");
        const char c = text[pos];
        if (c == '(') {
            ++pos;
            Expr inner = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (c == '-') {
            ++pos;
            Expr inner = parse_factor();
            if (inner.op == Expr::Op::literal) return Expr::lit(-inner.value);
            return Expr::lit(0.0) - std::move(inner);
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
        fail(std::string("unexpected character '") + c + "'");
    }

    Expr parse_number() {
        const size_t start = pos;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.' || text[pos] == 'e' ||
                text[pos] == 'E' ||
                ((text[pos] == '+' || text[pos] == '-') && (text[pos - 1] == 'e' || text[pos - 1] == 'E')))) {
            ++pos;
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text.data() + start, text.data() + pos, v);
        if (ec != std::errc() || ptr != text.data() + pos) fail("malformed number");
        return Expr::lit(v);
    }

    Expr parse_name() {
        const size_t start = pos;
        while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                                     text[pos] == '_' || text[pos] == '.')) {
            ++pos;
        }
        const std::string_view name = text.substr(start, pos - start);
        if (name == "abs" || name == "min" || name == "max") {
            if (!eat('(')) fail("expected '(' after function name");
            Expr first = parse_expr();
            if (name == "abs") {
                if (!eat(')')) fail("expected ')'");
                return sforge::abs(std::move(first));
            }
            if (!eat(',')) fail("expected ','");
            Expr second = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return name == "min" ? sforge::min(std::move(first), std::move(second))
                                 : sforge::max(std::move(first), std::move(second));
        }
        const size_t dot = name.find('.');
        if (dot == std::string_view::npos || dot == 0 || dot + 1 == name.size() ||
            name.find('.', dot + 1) != std::string_view::npos) {
            fail("expected qualified parameter reference 'object.name', got '" + std::string(name) + "'");
        }
        return Expr::param(std::string(name.substr(0, dot)), std::string(name.substr(dot + 1)));
    }
};

}  // namespace expr_detail

inline std::string print_expr(const Expr& e) {
    std::string out;
    expr_detail::print_expr(e, out);
    return out;
}

// Comparison with both sides, e.g. "A1.v0 >= A2.v0 + 2.78". Define rules use
// '=' with the target reference alone on the left.
struct ParsedRuleExpr {
    Expr lhs;
    Cmp cmp = Cmp::eq;
    Expr rhs;
};

inline std::string print_rule_expr(const Expr& lhs, Cmp cmp, const Expr& rhs) {
    return print_expr(lhs) + " " + std::string(to_string(cmp)) + " " + print_expr(rhs);
}

inline ParsedRuleExpr parse_rule_expr(std::string_view text) {
    expr_detail::ExprParser p{text};
    ParsedRuleExpr out;
    out.lhs = p.parse_expr();
    p.skip_ws();
    if (p.pos >= text.size()) p.fail("expected comparator");
    const char c = text[p.pos];
    if (c == '<') {
        ++p.pos;
        out.cmp = p.eat('=') ? Cmp::le : Cmp::lt;
    } else if (c == '>') {
        ++p.pos;
        out.cmp = p.eat('=') ? Cmp::ge : Cmp::gt;
    } else if (c == '=') {
        ++p.pos;
        out.cmp = Cmp::eq;
    } else {
        p.fail("expected comparator");
    }
    out.rhs = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return out;
}

}  // namespace sforge
