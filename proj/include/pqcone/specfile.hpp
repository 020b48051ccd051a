#pragma once

#include "pqcone/abstract_lab.hpp"
#include "pqcone/certify.hpp"
#include "pqcone/fixpoint.hpp"
#include "pqcone/toml.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace pqcone {

/// Parameters of the two-nonlinearity example pipeline.
struct ExampleParams {
    double a = 1.0, b = 1.0, c = 1.0, d = 1.0;
    /// Fixed seminorm radius of the v component.
    double r2 = 0.1;
    double lambda_lo = 1.0;
    double lambda_hi = 1073741824.0;
    /// Multiples of lambda0 at which the solver runs.
    std::vector<double> factors{1.1, 2.0};
};

struct LabEntry {
    LabProblem problem;
    std::vector<std::string> theorems;
};

/// Everything a problem file can configure.
struct RunSpec {
    std::string path;
    ProblemSpec problem;
    bool has_domain = false;
    bool has_radii = false;
    SolverConfig solver;
    FixpointConfig fixpoint;
    CheckBox box;
    std::optional<ExampleParams> example;
    std::vector<LabEntry> lab;
};

namespace detail {

/// Typed access to one TOML table; every read is recorded so leftovers can be reported.
class Fields {
public:
    Fields(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("", "must be a table");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw SpecError(name(key) + ": " + what);
    }

    std::string name(const std::string& key) const {
        return key.empty() ? path_ : path_.empty() ? key : path_ + "." + key;
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const nlohmann::json& raw(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) fail(key, "missing");
        return j_.at(key);
    }

    double number(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_number()) fail(key, "must be a number");
        return v.get<double>();
    }

    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    std::optional<double> opt_number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return number(key);
    }

    long long integer(const std::string& key, long long fallback) {
        if (!has(key)) return fallback;
        const auto& v = raw(key);
        if (!v.is_number_integer()) fail(key, "must be an integer");
        return v.get<long long>();
    }

    std::string string(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_string()) fail(key, "must be a string");
        return v.get<std::string>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        return has(key) ? string(key) : fallback;
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const auto& v = raw(key);
        if (!v.is_boolean()) fail(key, "must be true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key) {
        const auto& v = raw(key);
        if (v.is_number()) return {v.get<double>()};
        if (!v.is_array()) fail(key, "must be a number or an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) fail(key, "must contain only numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    /// A scalar applies to both components; an array gives them separately.
    std::pair<double, double> pair(const std::string& key) {
        const auto xs = numbers(key);
        if (xs.size() == 1) return {xs[0], xs[0]};
        if (xs.size() != 2) fail(key, "expects one or two numbers");
        return {xs[0], xs[1]};
    }

    std::optional<std::pair<double, double>> opt_pair(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return pair(key);
    }

    Interval interval(const std::string& key) {
        const auto xs = numbers(key);
        if (xs.size() != 2) fail(key, "expects [lo, hi]");
        if (!(xs[0] <= xs[1])) fail(key, "needs lo <= hi");
        return {xs[0], xs[1]};
    }

    std::vector<std::string> strings(const std::string& key) {
        const auto& v = raw(key);
        if (v.is_string()) return {v.get<std::string>()};
        if (!v.is_array()) fail(key, "must be a string or an array of strings");
        std::vector<std::string> out;
        for (const auto& x : v) {
            if (!x.is_string()) fail(key, "must contain only strings");
            out.push_back(x.get<std::string>());
        }
        return out;
    }

    Fields table(const std::string& key) { return Fields(raw(key), name(key)); }

    std::vector<Fields> tables(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_array()) fail(key, "must be an array of tables");
        std::vector<Fields> out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out.emplace_back(v[i], name(key) + "[" + std::to_string(i) + "]");
        return out;
    }

    /// Reject keys nobody asked for; typos otherwise pass silently.
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) fail(it.key(), "unknown key");
    }

private:
    const nlohmann::json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline Expr parse_field(Fields& t, const std::string& key, const std::string& src,
                        std::shared_ptr<const Variables> vars = nullptr) {
    try {
        return vars ? Expr::parse(src, vars) : Expr::parse(src);
    } catch (const ExprError& e) {
        t.fail(key, e.what());
    }
}

inline Monotone parse_monotone(Fields& t, const std::string& key, const std::string& s) {
    if (s == "increasing") return Monotone::increasing;
    if (s == "decreasing") return Monotone::decreasing;
    if (s == "unknown") return Monotone::unknown;
    t.fail(key, "expects increasing, decreasing or unknown, got '" + s + "'");
}

inline Monotonicity parse_monotonicity(Fields& t, const std::string& key) {
    const auto xs = t.strings(key);
    if (xs.size() != 2) t.fail(key, "expects [in_u, in_v]");
    return {parse_monotone(t, key, xs[0]), parse_monotone(t, key, xs[1])};
}

/// A subset is given either by coordinates (x, y), snapped inward, or by node indices (i, j).
inline IndexBox parse_subset(Fields t, int dim, const std::array<double, 2>& len,
                             const std::array<std::size_t, 2>& n) {
    IndexBox box;
    const char* coord[2] = {"x", "y"};
    const char* index[2] = {"i", "j"};
    for (int a = 0; a < dim; ++a) {
        const bool by_coord = t.has(coord[a]), by_index = t.has(index[a]);
        if (by_coord == by_index)
            t.fail("", std::string("give exactly one of ") + coord[a] + " or " + index[a]);
        if (by_coord) {
            const Interval iv = t.interval(coord[a]);
            const double h = len[a] / static_cast<double>(n[a] - 1);
            const auto s = GridDomain::snap_inward(iv.lo, iv.hi, h, n[a]);
            box.lo[a] = s[0];
            box.hi[a] = s[1];
        } else {
            const Interval iv = t.interval(index[a]);
            if (iv.lo < 0.0 || iv.lo != std::floor(iv.lo) || iv.hi != std::floor(iv.hi))
                t.fail(index[a], "expects nonnegative integer indices");
            box.lo[a] = static_cast<std::size_t>(iv.lo);
            box.hi[a] = static_cast<std::size_t>(iv.hi);
        }
    }
    t.finish();
    return box;
}

inline DomainPtr parse_domain(Fields t) {
    const std::string kind = t.string("kind", "interval");
    int dim = 0;
    if (kind == "interval") dim = 1;
    else if (kind == "rectangle") dim = 2;
    else t.fail("kind", "expects interval or rectangle, got '" + kind + "'");
    const auto lens = t.numbers("length");
    const auto nodes = t.numbers("nodes");
    auto component = [&](const std::vector<double>& xs, const std::string& key, int a) {
        if (xs.size() == 1) return xs[0];
        if (xs.size() != static_cast<std::size_t>(dim)) t.fail(key, "expects one value per axis");
        return xs[static_cast<std::size_t>(a)];
    };
    std::array<double, 2> len{0.0, 0.0};
    std::array<std::size_t, 2> n{1, 1};
    for (int a = 0; a < dim; ++a) {
        len[a] = component(lens, "length", a);
        const double k = component(nodes, "nodes", a);
        if (!(k >= 3.0) || k != std::floor(k)) t.fail("nodes", "expects an integer >= 3");
        n[a] = static_cast<std::size_t>(k);
        if (!(len[a] > 0.0) || !std::isfinite(len[a])) t.fail("length", "must be positive");
    }
    const IndexBox d1 = parse_subset(t.table("D1"), dim, len, n);
    const IndexBox d2 = t.has("D2") ? parse_subset(t.table("D2"), dim, len, n) : d1;
    t.finish();
    return make_domain(dim == 1 ? GridDomain::interval(len[0], n[0], d1, d2)
                                : GridDomain::rectangle(len[0], len[1], n[0], n[1], d1, d2));
}

inline void parse_radii(Fields t, Radii& r) {
    std::tie(r.r1, r.r2) = t.pair("r");
    std::tie(r.R1, r.R2) = t.pair("R");
    auto opt = [&](const char* key, std::optional<double>& a, std::optional<double>& b) {
        if (auto p = t.opt_pair(key)) {
            a = p->first;
            b = p->second;
        }
    };
    opt("rho", r.rho1, r.rho2);
    opt("varrho", r.varrho1, r.varrho2);
    opt("R_tilde", r.R_tilde1, r.R_tilde2);
    opt("rho_tilde", r.rho_tilde1, r.rho_tilde2);
    t.finish();
}

inline void parse_solver(Fields t, SolverConfig& s, FixpointConfig& f) {
    s.tol = t.number("tol", s.tol);
    s.max_iters = static_cast<int>(t.integer("max_iters", s.max_iters));
    s.eps0 = t.number("eps0", s.eps0);
    s.eps_min = t.number("eps_min", s.eps_min);
    s.steps_per_level = static_cast<int>(t.integer("steps_per_level", s.steps_per_level));
    s.eig_tol = t.number("eig_tol", s.eig_tol);
    s.eig_max_iters = static_cast<int>(t.integer("eig_max_iters", s.eig_max_iters));
    f.fp_tol = t.number("fp_tol", f.fp_tol);
    f.max_iters = static_cast<int>(t.integer("fp_max_iters", f.max_iters));
    f.random_seeds = static_cast<int>(t.integer("random_seeds", f.random_seeds));
    const long long seed = t.integer("seed", static_cast<long long>(f.seed));
    if (seed < 0) t.fail("seed", "must be nonnegative");
    f.seed = static_cast<std::uint64_t>(seed);
    if (!(f.fp_tol > 0.0)) t.fail("fp_tol", "must be positive");
    if (f.max_iters < 1) t.fail("fp_max_iters", "must be at least 1");
    if (f.random_seeds < 0) t.fail("random_seeds", "must be nonnegative");
    t.finish();
}

inline ExampleParams parse_example(Fields t) {
    ExampleParams e;
    e.a = t.number("a", e.a);
    e.b = t.number("b", e.b);
    e.c = t.number("c", e.c);
    e.d = t.number("d", e.d);
    e.r2 = t.number("r2", e.r2);
    if (t.has("lambda_bracket")) {
        const Interval iv = t.interval("lambda_bracket");
        e.lambda_lo = iv.lo;
        e.lambda_hi = iv.hi;
    }
    if (t.has("factors")) e.factors = t.numbers("factors");
    t.finish();
    return e;
}

inline std::vector<std::size_t> parse_mask(Fields& t, const std::string& key, std::size_t n) {
    std::vector<std::size_t> out;
    for (double x : t.numbers(key)) {
        if (x < 0.0 || x != std::floor(x) || x >= static_cast<double>(n))
            t.fail(key, "indices must be integers in [0, " + std::to_string(n) + ")");
        out.push_back(static_cast<std::size_t>(x));
    }
    return out;
}

inline LabEntry parse_lab(Fields t) {
    const std::string name = t.string("name");
    const auto n1 = t.strings("N1");
    const auto n2 = t.strings("N2");
    LabEntry e;
    try {
        e.problem = LabProblem::make(name, n1, n2);
    } catch (const Error& err) {
        t.fail("N1/N2", err.what());
    }
    LabProblem& p = e.problem;
    if (t.has("mask1")) p.mask1 = parse_mask(t, "mask1", p.n1);
    if (t.has("mask2")) p.mask2 = parse_mask(t, "mask2", p.n2);
    LabRadii& r = p.radii;
    std::tie(r.r1, r.r2) = t.pair("r");
    std::tie(r.R1, r.R2) = t.pair("R");
    auto opt = [&](const char* key, std::optional<double>& a, std::optional<double>& b) {
        if (auto v = t.opt_pair(key)) {
            a = v->first;
            b = v->second;
        }
    };
    opt("rho", r.rho1, r.rho2);
    opt("varrho", r.varrho1, r.varrho2);
    opt("rho_tilde", r.rho_tilde1, r.rho_tilde2);
    opt("a", r.a1, r.a2);
    p.isotone = t.boolean("isotone", false);
    p.resolution = static_cast<int>(t.integer("resolution", p.resolution));
    if (t.has("ladder")) {
        for (Fields rung : t.tables("ladder")) {
            LabRung g;
            std::tie(g.r1, g.r2) = rung.pair("r");
            std::tie(g.R1, g.R2) = rung.pair("R");
            rung.finish();
            p.ladder.push_back(g);
        }
    }
    if (t.has("theorems")) e.theorems = t.strings("theorems");
    t.finish();
    p.validate();
    return e;
}

} // namespace detail

/// Parse a problem file from text. Every failure is a SpecError naming the field.
inline RunSpec parse_run_spec(std::string_view text, std::string path = "<string>") {
    const nlohmann::json doc = TomlReader::parse(text);
    detail::Fields top(doc, "");
    RunSpec rs;
    rs.path = std::move(path);
    ProblemSpec& s = rs.problem;
    if (top.has("domain")) {
        s.domain = detail::parse_domain(top.table("domain"));
        rs.has_domain = true;
    }
    if (top.has("exponents")) {
        auto t = top.table("exponents");
        s.p = t.number("p", s.p);
        s.q = t.number("q", s.q);
        t.finish();
    }
    if (top.has("nonlinearities")) {
        auto t = top.table("nonlinearities");
        s.f = detail::parse_field(t, "f", t.string("f"));
        s.g = detail::parse_field(t, "g", t.string("g"));
        s.lambda = t.number("lambda", s.lambda);
        if (t.has("f_monotone")) s.f_mono = detail::parse_monotonicity(t, "f_monotone");
        if (t.has("g_monotone")) s.g_mono = detail::parse_monotonicity(t, "g_monotone");
        if (!(s.lambda > 0.0) || !std::isfinite(s.lambda)) t.fail("lambda", "must be positive");
        t.finish();
    }
    if (top.has("radii")) {
        detail::parse_radii(top.table("radii"), s.radii);
        rs.has_radii = true;
    }
    if (top.has("ladder")) {
        for (detail::Fields t : top.tables("ladder")) {
            Rung g;
            std::tie(g.r1, g.r2) = t.pair("r");
            std::tie(g.R1, g.R2) = t.pair("R");
            t.finish();
            s.ladder.push_back(g);
        }
    }
    if (top.has("nonexistence")) {
        auto t = top.table("nonexistence");
        if (t.has("u")) rs.box.u = t.interval("u");
        if (t.has("v")) rs.box.v = t.interval("v");
        t.finish();
    }
    if (top.has("solver")) detail::parse_solver(top.table("solver"), rs.solver, rs.fixpoint);
    if (top.has("sampling")) {
        auto t = top.table("sampling");
        s.resolution = static_cast<int>(t.integer("resolution", s.resolution));
        s.strict_margin = t.number("strict_margin", s.strict_margin);
        if (s.resolution < 1) t.fail("resolution", "must be at least 1");
        if (!(s.strict_margin >= 0.0)) t.fail("strict_margin", "must be nonnegative");
        t.finish();
    }
    if (top.has("example")) rs.example = detail::parse_example(top.table("example"));
    if (top.has("lab"))
        for (detail::Fields t : top.tables("lab")) rs.lab.push_back(detail::parse_lab(t));
    top.finish();

    if (rs.has_domain) {
        for (auto [key, r] : {std::pair{"exponents.p", s.p}, std::pair{"exponents.q", s.q}}) {
            SolverConfig c = rs.solver;
            c.r = r;
            try {
                c.validate(s.domain->dim());
            } catch (const SpecError& e) {
                throw SpecError(std::string(key) + ": " + e.what());
            }
        }
    }
    return rs;
}

inline RunSpec load_run_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open spec file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_spec(ss.str(), path);
}

} // namespace pqcone
