#pragma once

#include "pqcone/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pqcone {

/// Ordered set of variable names an expression may reference. The position of a name is
/// its slot in the value array passed to Expr::eval.
class Variables {
public:
    Variables() = default;
    explicit Variables(std::vector<std::string> names) : names_(std::move(names)) {}

    /// x, y, u, v.
    static std::shared_ptr<const Variables> standard() {
        static const auto vars =
            std::make_shared<const Variables>(std::vector<std::string>{"x", "y", "u", "v"});
        return vars;
    }

    int slot(std::string_view name) const {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return static_cast<int>(i);
        return -1;
    }
    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_[i]; }

private:
    std::vector<std::string> names_;
};

namespace detail {

enum class NodeKind { number, variable, negate, add, sub, mul, div, pow, call };

enum class Builtin { atan, sin, cos, exp, log, sqrt, abs, min, max, pow };

struct BuiltinInfo {
    const char* name;
    Builtin id;
    std::size_t arity;
};

inline constexpr BuiltinInfo builtins[] = {
    {"atan", Builtin::atan, 1}, {"sin", Builtin::sin, 1},   {"cos", Builtin::cos, 1},
    {"exp", Builtin::exp, 1},   {"log", Builtin::log, 1},   {"sqrt", Builtin::sqrt, 1},
    {"abs", Builtin::abs, 1},   {"min", Builtin::min, 2},   {"max", Builtin::max, 2},
    {"pow", Builtin::pow, 2},
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind;
    double value = 0.0;     // number
    int slot = -1;          // variable
    std::string name;       // variable or function name
    Builtin fn = Builtin::abs;
    std::vector<NodePtr> args;
};

inline std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string render(const Node& n) {
    switch (n.kind) {
    case NodeKind::number: return format_number(n.value);
    case NodeKind::variable: return n.name;
    case NodeKind::negate: return "(-" + render(*n.args[0]) + ")";
    case NodeKind::add: return "(" + render(*n.args[0]) + " + " + render(*n.args[1]) + ")";
    case NodeKind::sub: return "(" + render(*n.args[0]) + " - " + render(*n.args[1]) + ")";
    case NodeKind::mul: return "(" + render(*n.args[0]) + " * " + render(*n.args[1]) + ")";
    case NodeKind::div: return "(" + render(*n.args[0]) + " / " + render(*n.args[1]) + ")";
    case NodeKind::pow: return "(" + render(*n.args[0]) + " ^ " + render(*n.args[1]) + ")";
    case NodeKind::call: {
        std::string s = n.name + "(";
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) s += ", ";
            s += render(*n.args[i]);
        }
        return s + ")";
    }
    }
    return {};
}

inline double checked_pow(double base, double e, const Node& n) {
    if (base < 0.0 && e != std::floor(e))
        throw DomainError("negative base raised to a non-integer power", render(n));
    if (base == 0.0 && e < 0.0) throw DomainError("zero raised to a negative power", render(n));
    return std::pow(base, e);
}

inline double eval_node(const Node& n, std::span<const double> slots,
                        const Variables& vars) {
    double r = 0.0;
    switch (n.kind) {
    case NodeKind::number: return n.value;
    case NodeKind::variable: {
        const double x = slots[static_cast<std::size_t>(n.slot)];
        if (std::isnan(x)) throw MissingBindingError(vars.name(static_cast<std::size_t>(n.slot)));
        return x;
    }
    case NodeKind::negate: return -eval_node(*n.args[0], slots, vars);
    case NodeKind::add:
        r = eval_node(*n.args[0], slots, vars) + eval_node(*n.args[1], slots, vars);
        break;
    case NodeKind::sub:
        r = eval_node(*n.args[0], slots, vars) - eval_node(*n.args[1], slots, vars);
        break;
    case NodeKind::mul:
        r = eval_node(*n.args[0], slots, vars) * eval_node(*n.args[1], slots, vars);
        break;
    case NodeKind::div: {
        const double a = eval_node(*n.args[0], slots, vars);
        const double b = eval_node(*n.args[1], slots, vars);
        if (b == 0.0) throw DomainError("division by zero", render(n));
        r = a / b;
        break;
    }
    case NodeKind::pow:
        r = checked_pow(eval_node(*n.args[0], slots, vars), eval_node(*n.args[1], slots, vars), n);
        break;
    case NodeKind::call: {
        const double a = eval_node(*n.args[0], slots, vars);
        switch (n.fn) {
        case Builtin::atan: r = std::atan(a); break;
        case Builtin::sin: r = std::sin(a); break;
        case Builtin::cos: r = std::cos(a); break;
        case Builtin::exp: r = std::exp(a); break;
        case Builtin::log:
            if (a <= 0.0) throw DomainError("log of a nonpositive value", render(n));
            r = std::log(a);
            break;
        case Builtin::sqrt:
            if (a < 0.0) throw DomainError("sqrt of a negative value", render(n));
            r = std::sqrt(a);
            break;
        case Builtin::abs: r = std::abs(a); break;
        case Builtin::min: r = std::min(a, eval_node(*n.args[1], slots, vars)); break;
        case Builtin::max: r = std::max(a, eval_node(*n.args[1], slots, vars)); break;
        case Builtin::pow: r = checked_pow(a, eval_node(*n.args[1], slots, vars), n); break;
        }
        break;
    }
    }
    if (!std::isfinite(r)) throw DomainError("non-finite result", render(n));
    return r;
}

inline bool node_uses(const Node& n, int slot) {
    if (n.kind == NodeKind::variable) return n.slot == slot;
    for (const auto& a : n.args)
        if (node_uses(*a, slot)) return true;
    return false;
}

// Grammar, loosest to tightest:
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | name | name '(' sum (',' sum)* ')' | '(' sum ')'
class Parser {
public:
    Parser(std::string_view src, const Variables& vars) : src_(src), vars_(vars) {}

    NodePtr parse() {
        NodePtr e = sum();
        skip_ws();
        if (pos_ < src_.size())
            throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr binary(NodeKind k, NodePtr a, NodePtr b) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->args = {std::move(a), std::move(b)};
        return n;
    }

    NodePtr sum() {
        NodePtr lhs = product();
        for (;;) {
            if (accept('+')) lhs = binary(NodeKind::add, lhs, product());
            else if (accept('-')) lhs = binary(NodeKind::sub, lhs, product());
            else return lhs;
        }
    }

    NodePtr product() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = binary(NodeKind::mul, lhs, unary());
            else if (accept('/')) lhs = binary(NodeKind::div, lhs, unary());
            else return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) {
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::negate;
            n->args = {unary()};
            return n;
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return binary(NodeKind::pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
        if (c == '(') {
            ++pos_;
            NodePtr e = sum();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    NodePtr number() {
        const std::string rest(src_.substr(pos_));
        char* end = nullptr;
        const double x = std::strtod(rest.c_str(), &end);
        const std::size_t used = static_cast<std::size_t>(end - rest.c_str());
        if (used == 0) throw ParseError("malformed number", pos_);
        // strtod also accepts hex floats and inf/nan spellings; neither can start here
        pos_ += used;
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::number;
        n->value = x;
        return n;
    }

    NodePtr name() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string id(src_.substr(start, pos_ - start));
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '(') {
            const BuiltinInfo* info = nullptr;
            for (const auto& b : builtins)
                if (id == b.name) info = &b;
            if (!info) throw UnknownIdentifierError(id, start);
            ++pos_;
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::call;
            n->name = id;
            n->fn = info->id;
            if (!accept(')')) {
                do {
                    n->args.push_back(sum());
                } while (accept(','));
                if (!accept(')')) throw ParseError("expected ')'", pos_);
            }
            if (n->args.size() != info->arity)
                throw ArityError(id, info->arity, n->args.size(), start);
            return n;
        }
        const int slot = vars_.slot(id);
        if (slot < 0) throw UnknownIdentifierError(id, start);
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::variable;
        n->slot = slot;
        n->name = id;
        return n;
    }

    std::string_view src_;
    const Variables& vars_;
    std::size_t pos_ = 0;
};

} // namespace detail

/**
 * Parsed arithmetic expression over a fixed variable set.
 *
 * Supports literals, variables, unary minus, + - * / ^ and the functions
 * atan sin cos exp log sqrt abs (one argument) and min max pow (two arguments).
 * Evaluation is in double precision and reports domain errors instead of returning
 * non-finite values.
 */
class Expr {
public:
    static Expr parse(std::string_view source,
                      std::shared_ptr<const Variables> vars = Variables::standard()) {
        detail::Parser p(source, *vars);
        return Expr(std::string(source), p.parse(), std::move(vars));
    }

    /// Evaluate with one value per variable slot; NaN marks an unbound slot.
    double eval(std::span<const double> slots) const {
        if (slots.size() < vars_->size()) throw ExprError("too few variable slots");
        return detail::eval_node(*root_, slots, *vars_);
    }

    double eval(const std::map<std::string, double>& env) const {
        std::vector<double> slots(vars_->size(), std::numeric_limits<double>::quiet_NaN());
        for (const auto& [name, value] : env) {
            const int s = vars_->slot(name);
            if (s >= 0) slots[static_cast<std::size_t>(s)] = value;
        }
        return eval(slots);
    }

    bool uses(std::string_view name) const {
        const int s = vars_->slot(name);
        return s >= 0 && detail::node_uses(*root_, s);
    }

    /// Fully parenthesized text that parses back to the same evaluation.
    std::string render() const { return detail::render(*root_); }
    const std::string& source() const { return source_; }
    const Variables& variables() const { return *vars_; }
    const std::shared_ptr<const Variables>& variables_ptr() const { return vars_; }

private:
    Expr(std::string source, detail::NodePtr root, std::shared_ptr<const Variables> vars)
        : source_(std::move(source)), root_(std::move(root)), vars_(std::move(vars)) {}

    std::string source_;
    detail::NodePtr root_;
    std::shared_ptr<const Variables> vars_;
};

/// Evaluate a standard-variable expression at (x, y, u, v).
inline double eval_xyuv(const Expr& e, double x, double y, double u, double v) {
    const double slots[4] = {x, y, u, v};
    return e.eval(slots);
}

} // namespace pqcone
