// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "oracles.hpp"
#include "ref_expr.hpp"

#include "pqcone/abstract_lab.hpp"
#include "pqcone/cli.hpp"

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>

using namespace pqcone;

namespace {

namespace tol {
constexpr double torsion_p2 = 1e-5;
constexpr double torsion_p3 = 1e-3;
constexpr double torsion_p3_value = 0.23570;
constexpr double eigen_1d = 1e-3;
constexpr double eigen_2d = 1e-2;
constexpr double triple = 1e-2;
constexpr double property_factor = 10.0;
constexpr double demo_sup = 2.0, demo_semi = 1.5, demo = 1e-3;
constexpr double example_residual = 1e-8;
constexpr double golden = 1e-10;
constexpr double vanish = 1e-6;
constexpr double order = 1.9;
constexpr double phi_slack = 1e-15;
} // namespace tol

namespace budget {
constexpr double torsion_each = 1.0;
constexpr double eigen = 10.0;
constexpr double sandwich = 30.0;
constexpr double properties = 60.0;
constexpr double round_trip = 5.0;
constexpr double scenario = 300.0;
constexpr double lab = 60.0;
constexpr double nonexistence = 60.0;
} // namespace budget

const std::string specs = PQCONE_SPECS_DIR;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

DomainPtr unit_interval(std::size_t n) {
    const double h = 1.0 / static_cast<double>(n - 1);
    auto d = GridDomain::snap_inward(0.25, 0.75, h, n);
    IndexBox box{{d[0], 0}, {d[1], 0}};
    return make_domain(GridDomain::interval(1.0, n, box, box));
}

DomainPtr unit_square(std::size_t n) {
    const double h = 1.0 / static_cast<double>(n - 1);
    auto d = GridDomain::snap_inward(0.25, 0.75, h, n);
    IndexBox box{{d[0], d[0]}, {d[1], d[1]}};
    return make_domain(GridDomain::rectangle(1.0, 1.0, n, n, box, box));
}

SolverConfig config(double r) {
    SolverConfig c;
    c.r = r;
    return c;
}

void check_time(Outcome& o, double secs, double limit, const std::string& what) {
    o.detail << " " << what << " " << std::setprecision(3) << secs << " s";
    o.require(secs < limit, what + " under " + std::to_string(limit) + " s");
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("pqcone_acceptance_" + name);
    std::filesystem::remove_all(p);
    return p;
}

json read_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    json j;
    in >> j;
    return j;
}

std::vector<double> read_values(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::vector<double> out;
    while (std::getline(in, line)) out.push_back(std::stod(line.substr(line.rfind(',') + 1)));
    return out;
}

// 1. Torsion against the closed form.
Outcome torsion() {
    Outcome o;
    auto dom = unit_interval(1025);
    auto t0 = std::chrono::steady_clock::now();
    const double s2 = sup_norm(solve(GridFunction::constant(dom, 1.0), config(2.0)));
    check_time(o, seconds_since(t0), budget::torsion_each, "p=2");
    t0 = std::chrono::steady_clock::now();
    const double s3 = sup_norm(solve(GridFunction::constant(dom, 1.0), config(3.0)));
    check_time(o, seconds_since(t0), budget::torsion_each, "p=3");
    o.detail << std::setprecision(10) << " |S2(1)| = " << s2 << " |S3(1)| = " << s3;
    o.require(std::abs(s2 - 0.125) <= tol::torsion_p2, "p=2 torsion");
    o.require(std::abs(s3 - tol::torsion_p3_value) <= tol::torsion_p3, "p=3 torsion");
    return o;
}

// 2. First eigenvalue in one and two dimensions.
Outcome eigen() {
    Outcome o;
    const double pi2 = oracle::pi * oracle::pi;
    auto t0 = std::chrono::steady_clock::now();
    const double l1 = first_eigenvalue(2.0, unit_interval(1025), SolverConfig{}).lambda;
    const double l2 = first_eigenvalue(2.0, unit_square(129), SolverConfig{}).lambda;
    check_time(o, seconds_since(t0), budget::eigen, "total");
    o.detail << std::setprecision(10) << " interval " << l1 << " square " << l2;
    o.require(std::abs(l1 - pi2) <= tol::eigen_1d, "interval eigenvalue");
    o.require(std::abs(l2 - 2 * pi2) <= tol::eigen_2d, "square eigenvalue");
    return o;
}

// 3. A <= lambda <= B across exponents, and the exact triple at p = 2.
Outcome sandwich() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    auto dom = unit_interval(1025);
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        const auto c = exponent_constants(dom, p, 1, SolverConfig{});
        o.detail << std::setprecision(6) << " p=" << p << ": lambda-A " << c.lambda - c.A << ", B-lambda "
                 << c.B - c.lambda << ";";
        o.require(c.A <= c.lambda && c.lambda <= c.B, "sandwich at p=" + std::to_string(p));
    }
    // B carries an O(h) bias from the lumped indicator, hence the finer grid.
    const auto c = exponent_constants(unit_interval(4097), 2.0, 1, SolverConfig{});
    const double err = std::max({std::abs(c.A - 8.0), std::abs(c.lambda - oracle::pi * oracle::pi),
                                 std::abs(c.B - oracle::B2)});
    o.detail << std::setprecision(10) << " p=2 triple (" << c.A << ", " << c.lambda << ", " << c.B
             << ") err " << err;
    o.require(err <= tol::triple, "p=2 triple");
    check_time(o, seconds_since(t0), budget::sandwich, "total");
    return o;
}

// 4. Homogeneity, isotonicity and linearity of the solution operator.
Outcome properties() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst_h = 0.0, worst_i = 0.0;
    for (double r : {1.5, 2.0, 3.0}) {
        auto dom = unit_interval(257);
        const SolverConfig cfg = config(r);
        std::vector<double> vals(dom->size());
        for (double& x : vals) x = 2.0 * U(rng);
        GridFunction v(dom, vals);
        const auto u = solve(v, cfg);
        for (double c : {0.5, 3.0}) {
            const auto uc = solve(std::pow(c, r - 1.0) * v, cfg);
            const double d = sup_distance(uc, c * u) / std::max(1.0, c * sup_norm(u));
            worst_h = std::max(worst_h, d / cfg.tol);
        }
    }
    for (int t = 0; t < 50; ++t) {
        const double r = std::array{1.5, 2.0, 3.0}[static_cast<std::size_t>(t % 3)];
        auto dom = unit_interval(129);
        const SolverConfig cfg = config(r);
        std::vector<double> a(dom->size()), b(dom->size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            a[k] = U(rng);
            b[k] = a[k] + U(rng);
        }
        const auto u1 = solve(GridFunction(dom, a), cfg);
        const auto u2 = solve(GridFunction(dom, b), cfg);
        for (std::size_t k = 0; k < u1.size(); ++k) worst_i = std::max(worst_i, (u1[k] - u2[k]) / cfg.tol);
    }
    auto dom = unit_interval(257);
    const SolverConfig cfg = config(2.0);
    auto v1 = GridFunction::from(dom, [](double x, double) { return std::sin(7 * x) + 1; });
    auto v2 = GridFunction::from(dom, [](double x, double) { return x * x; });
    const double worst_l = sup_distance(solve(v1 + v2, cfg), solve(v1, cfg) + solve(v2, cfg)) / cfg.tol;
    o.detail << std::setprecision(3) << " in units of solver tol: homogeneity " << worst_h
             << ", isotonicity violation " << std::max(worst_i, 0.0) << ", linearity " << worst_l << ";";
    o.require(worst_h <= tol::property_factor, "homogeneity");
    o.require(worst_i <= tol::property_factor, "isotonicity");
    o.require(worst_l <= tol::property_factor, "linearity");
    check_time(o, seconds_since(t0), budget::properties, "total");
    return o;
}

// 5. Constant data: certificate, then solve through the command layer.
Outcome round_trip() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    const RunSpec rs = load_run_spec(specs + "/demo_constant.toml");
    const auto consts = compute_constants(rs.problem.domain, 2.0, 2.0, rs.solver);
    const auto cert = certify_existence(rs.problem, consts);
    o.require(cert.pass, "certify_existence");

    cli::Options opt;
    opt.command = "solve";
    opt.spec = specs + "/demo_constant.toml";
    opt.out = scratch("solve").string();
    opt.canonical = true;
    std::ostringstream log, err;
    const int code = cli::dispatch(opt, log, err);
    o.require(code == cli::pass, "solve exit code " + std::to_string(code) + " " + err.str());
    if (code == cli::pass) {
        const json s = read_json(std::filesystem::path(opt.out) / "solution_0.json");
        const double sup = s["sup"][0].get<double>(), semi = s["seminorm"][0].get<double>();
        o.detail << std::setprecision(10) << " |u| = " << sup << " ||u|| = " << semi;
        o.require(std::abs(sup - tol::demo_sup) <= tol::demo, "|u|");
        o.require(std::abs(semi - tol::demo_semi) <= tol::demo, "||u||");
        const Radii& r = rs.problem.radii;
        o.require(r.r1 == 0.5 && r.r2 == 0.5 && r.R1 == 2.0 && r.R2 == 2.0, "demo radii");
        o.require(s["localization"]["pass"].get<bool>(), "localization");
    }
    check_time(o, seconds_since(t0), budget::round_trip, "total");
    return o;
}

// 6. The two-phase example at twice the threshold.
Outcome scenario() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    cli::Options opt;
    opt.command = "example";
    opt.a = opt.b = opt.c = opt.d = 1.0;
    opt.out = scratch("example").string();
    opt.canonical = true;
    std::ostringstream log, err;
    const int code = cli::dispatch(opt, log, err);
    o.require(code == cli::pass, "example exit code " + std::to_string(code) + " " + err.str());
    const std::filesystem::path dir = opt.out;
    if (!std::filesystem::exists(dir / "example.json")) return o;
    const json rep = read_json(dir / "example.json");
    const double lambda0 = rep["lambda0"].get<double>();
    o.detail << std::setprecision(17) << " lambda0 = " << lambda0;
    o.require(std::isfinite(lambda0), "finite lambda0");
    const json* at2 = nullptr;
    for (const auto& run : rep["runs"])
        if (run["factor"].get<double>() == 2.0) at2 = &run;
    o.require(at2 != nullptr, "run at 2 lambda0");
    if (!at2) return o;
    o.require((*at2)["certificate_pass"].get<bool>(), "three-solution certificate");
    const double r1 = (*at2)["conditions"]["r"][0].get<double>(), r2 = (*at2)["conditions"]["r"][1].get<double>();
    std::vector<std::vector<double>> fields;
    bool outer = false;
    int nontrivial = 0;
    for (const auto& entry : (*at2)["solutions"]) {
        const json s = read_json(dir / entry["file"].get<std::string>());
        if (!s["nontrivial"].get<bool>()) continue;
        ++nontrivial;
        o.require(s["residual"].get<double>() < tol::example_residual, "residual of " + s["seed"].get<std::string>());
        for (int c = 0; c < 2; ++c)
            if (!s["zero_component"][c].get<bool>())
                o.require(s["interior_min"][c].get<double>() > 0.0, "positive interior");
        outer |= s["seminorm"][0].get<double>() > r1 && s["seminorm"][1].get<double>() > r2;
        auto u = read_values(dir / s["u_file"].get<std::string>());
        const auto v = read_values(dir / s["v_file"].get<std::string>());
        u.insert(u.end(), v.begin(), v.end());
        fields.push_back(std::move(u));
    }
    double closest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fields.size(); ++i)
        for (std::size_t j = i + 1; j < fields.size(); ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < fields[i].size(); ++k) d = std::max(d, std::abs(fields[i][k] - fields[j][k]));
            closest = std::min(closest, d);
        }
    o.detail << "; " << nontrivial << " nontrivial, closest pair " << std::setprecision(3) << closest << ";";
    o.require(nontrivial >= 2, "two nontrivial solutions");
    o.require(closest > 1e-6, "distinct solutions");
    o.require(outer, "solution with ||u|| > r1 and ||v|| > r2");
    check_time(o, seconds_since(t0), budget::scenario, "total");
    return o;
}

// 7. Every theorem whose hypotheses hold is confirmed by brute force.
Outcome lab_soundness() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    const auto fixtures = lab_fixtures();
    o.require(fixtures.size() >= 6, "six fixtures");
    int confirmed = 0;
    for (const auto& f : fixtures) {
        for (const auto& t : lab_theorem_ids()) {
            if (!check_hypotheses(f.problem, t).hold) continue;
            const auto v = validate_theorem(t, f.problem);
            o.require(v.confirmed, f.problem.name + " " + t);
            for (const auto& reg : v.regions) o.require(reg.found(), f.problem.name + " " + t + " region " + reg.name);
            confirmed += v.confirmed;
        }
    }
    o.detail << " " << confirmed << " theorem instances confirmed;";
    const LabProblem* sq = nullptr;
    for (const auto& f : fixtures)
        if (f.problem.name == "sqrt") sq = &f.problem;
    o.require(sq != nullptr, "sqrt fixture");
    if (sq) {
        const auto fps = brute_force_fixed_points(*sq, 9.0, 9.0, 16);
        o.require(fps.size() == 1, "single sqrt fixed point");
        if (!fps.empty()) {
            const double err = std::max(std::abs(fps[0].u[0] - oracle::golden_squared()),
                                        std::abs(fps[0].v[0] - oracle::golden_squared()));
            o.detail << " golden ratio squared error " << std::setprecision(3) << err << ";";
            o.require(err <= tol::golden, "golden ratio squared");
        }
    }
    check_time(o, seconds_since(t0), budget::lab, "total");
    return o;
}

// 8. Nonexistence certificate plus Picard evidence.
Outcome nonexistence() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    RunSpec rs = load_run_spec(specs + "/nonexistence.toml");
    const auto consts = compute_constants(rs.problem.domain, 2.0, 2.0, rs.solver);
    CheckBox box;
    box.u = {0.0, 10.0};
    box.v = {0.0, 10.0};
    const auto cert = certify_nonexistence(rs.problem, consts, box);
    bool g_above = false;
    for (const auto& c : cert.conditions)
        if (c.id == "above_eigen_g") g_above = c.pass;
    o.require(g_above, "above_eigen_g for g = 20 v");

    ProblemSpec spec = rs.problem;
    spec.f = Expr::parse("0.5*9.8696*u");
    spec.g = Expr::parse("1");
    const auto dom = spec.domain;
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    int converged = 0;
    for (int k = 0; k < 20; ++k) {
        const double a = 10.0 * U(rng), b = 10.0 * U(rng);
        auto u = GridFunction::from(dom, [&](double, double) { return a * U(rng); });
        auto v = GridFunction::from(dom, [&](double, double) { return b * U(rng); });
        const auto rec = picard({u, v}, "random-" + std::to_string(k), spec, rs.solver, rs.fixpoint);
        converged += rec.converged;
        worst = std::max(worst, rec.sup_u);
    }
    o.detail << " " << converged << "/20 converged, max |u| " << std::setprecision(3) << worst << ";";
    o.require(converged == 20, "Picard convergence");
    o.require(worst <= tol::vanish, "u component vanishes");
    check_time(o, seconds_since(t0), budget::nonexistence, "total");
    return o;
}

// 9. Second-order convergence of the torsion function.
Outcome convergence() {
    Outcome o;
    std::vector<double> errs;
    for (std::size_t n : {65u, 129u, 257u, 513u}) {
        auto u = solve(GridFunction::constant(unit_interval(n), 1.0), config(2.0));
        errs.push_back(oracle::reconstruction_error(u, [](double x) { return x * (1 - x) / 2; }));
    }
    o.detail << " orders";
    for (std::size_t k = 1; k < errs.size(); ++k) {
        const double q = std::log2(errs[k - 1] / errs[k]);
        o.detail << " " << std::setprecision(4) << q;
        o.require(q >= tol::order, "order between grids " + std::to_string(k - 1) + " and " + std::to_string(k));
    }
    return o;
}

// 10. Parser against a reference tree, and the bounds of the example nonlinearities.
Outcome parser() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    int checked = 0, bad = 0;
    while (checked < 100) {
        auto tree = refexpr::random_tree(rng, 4);
        const double x = U(rng), u = U(rng), v = U(rng);
        double expected;
        try {
            expected = refexpr::ref_eval(*tree, x, u, v);
        } catch (const std::domain_error&) {
            continue;
        }
        if (!std::isfinite(expected)) continue;
        const std::string src = refexpr::ref_print(*tree);
        const double slots[4] = {x, 0.0, u, v};
        try {
            const auto e = Expr::parse(src);
            const auto back = Expr::parse(e.render());
            bad += e.eval(slots) != expected || back.eval(slots) != expected || back.render() != e.render();
        } catch (const Error&) {
            ++bad;
        }
        ++checked;
    }
    o.detail << " " << checked - bad << "/" << checked << " trees;";
    o.require(bad == 0, "random trees");
    auto phi = Expr::parse("u^2/(4+u^3)");
    auto psi = Expr::parse("atan(v)^2");
    int violations = 0;
    for (int k = -600; k <= 600; ++k) {
        const double t = std::pow(10.0, k / 100.0);
        violations += phi.eval(std::map<std::string, double>{{"u", t}}) > 1.0 / 3.0 + tol::phi_slack;
        violations += psi.eval(std::map<std::string, double>{{"v", t}}) > oracle::pi * oracle::pi / 4.0;
    }
    o.detail << " " << violations << " bound violations on 1201 samples;";
    o.require(violations == 0, "Phi and Psi bounds");
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"torsion oracle", torsion},         {"eigenvalue oracle", eigen},
        {"constant sandwich", sandwich},     {"operator properties", properties},
        {"certificate round trip", round_trip}, {"two-phase example", scenario},
        {"abstract lab", lab_soundness},              {"nonexistence", nonexistence},
        {"grid convergence", convergence},   {"parser", parser},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " exception: " << e.what();
        }
        failed += !o.pass;
        std::cout << "criterion " << i + 1 << " (" << criteria[i].first << "): " << (o.pass ? "PASS" : "FAIL")
                  << " |" << o.detail.str() << std::endl;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed"))
              << std::endl;
    return failed ? 1 : 0;
}
