#pragma once

#include "pqcone/io.hpp"
#include "pqcone/scenario.hpp"

#include <functional>
#include <iostream>

namespace pqcone::cli {

enum ExitCode : int { pass = 0, fail = 1, spec_error = 2, solver_error = 3, search_failure = 4 };

struct Options {
    std::string command;
    std::string spec;
    std::string out = "out";
    std::string theorem = "all";
    std::optional<int> resolution;
    std::optional<std::uint64_t> seed;
    bool canonical = false;
    /// Example coefficients given on the command line; override the spec file.
    std::optional<double> a, b, c, d, r2;
    std::optional<std::size_t> nodes;
};

inline const std::vector<std::string>& certify_selectors() {
    static const std::vector<std::string> s = {"existence", "existence-or", "three", "ladder",
                                               "nonexistence", "all"};
    return s;
}

namespace detail {

inline RunSpec load(const Options& o) {
    if (o.spec.empty()) throw SpecError("--spec is required for " + o.command);
    RunSpec rs = load_run_spec(o.spec);
    if (o.resolution) {
        if (*o.resolution < 1) throw SpecError("--resolution must be at least 1");
        rs.problem.resolution = *o.resolution;
    }
    if (o.seed) rs.fixpoint.seed = *o.seed;
    return rs;
}

inline void require_domain(const RunSpec& rs) {
    if (!rs.has_domain) throw SpecError("domain: missing");
}

inline json manifest_fields(const Options& o, const RunSpec* rs) {
    json m = {{"subcommand", o.command},
              {"spec_file", o.spec},
              {"theorem", o.theorem},
              {"canonical", o.canonical}};
    if (rs) {
        m["seed"] = rs->fixpoint.seed;
        if (rs->has_domain) m["problem"] = to_json(rs->problem);
    }
    return m;
}

inline json sandwich(const ConstantSet& c) {
    auto side = [](double A, double l, double B) {
        return json{{"A", num(A)},
                    {"lambda_1", num(l)},
                    {"B", num(B)},
                    {"margin_lower", num(l - A)},
                    {"margin_upper", num(B - l)},
                    {"holds", A <= l && l <= B}};
    };
    return {{"p", side(c.A_p, c.lambda_p, c.B_1p)}, {"q", side(c.A_q, c.lambda_q, c.B_2q)}};
}

inline CertificateReport certify_one(const std::string& sel, const RunSpec& rs, const ConstantSet& c) {
    const ProblemSpec& s = rs.problem;
    if (sel == "existence") return certify_existence(s, c);
    if (sel == "existence-or") return certify_existence_or(s, c);
    if (sel == "three") return certify_three_solutions(s, c);
    if (sel == "ladder") return certify_n_solutions(s, c);
    if (sel == "nonexistence") return certify_nonexistence(s, c, rs.box);
    throw SpecError("unknown theorem selector '" + sel + "'");
}

} // namespace detail

inline int cmd_constants(const Options& o, std::ostream& log) {
    RunSpec rs = detail::load(o);
    detail::require_domain(rs);
    OutputDir out(o.out, o.canonical);
    const ConstantSet c = compute_constants(rs.problem.domain, rs.problem.p, rs.problem.q, rs.solver);
    json j = to_json(c);
    j["sandwich"] = detail::sandwich(c);
    out.write_json("constants.json", j);
    char buf[256];
    std::snprintf(buf, sizeof buf, "A_p = %.10g <= lambda_1p = %.10g <= B_1p = %.10g\n", c.A_p,
                  c.lambda_p, c.B_1p);
    log << buf;
    std::snprintf(buf, sizeof buf, "A_q = %.10g <= lambda_1q = %.10g <= B_2q = %.10g\n", c.A_q,
                  c.lambda_q, c.B_2q);
    log << buf;
    const bool ok = c.sandwich_holds();
    log << "sandwich " << (ok ? "holds" : "VIOLATED") << "\n";
    json m = detail::manifest_fields(o, &rs);
    m["verdict"] = ok ? "PASS" : "FAIL";
    out.finish(m);
    return ok ? pass : fail;
}

inline int cmd_certify(const Options& o, std::ostream& log) {
    const auto& sels = certify_selectors();
    if (std::find(sels.begin(), sels.end(), o.theorem) == sels.end())
        throw SpecError("--theorem must be one of existence, existence-or, three, ladder, "
                        "nonexistence, all; got '" + o.theorem + "'");
    RunSpec rs = detail::load(o);
    detail::require_domain(rs);
    OutputDir out(o.out, o.canonical);
    const ConstantSet c = compute_constants(rs.problem.domain, rs.problem.p, rs.problem.q, rs.solver);
    std::vector<std::string> todo;
    if (o.theorem == "all") todo.assign(sels.begin(), sels.end() - 1);
    else todo.push_back(o.theorem);
    bool all_pass = true;
    json summary = json::array();
    for (const auto& sel : todo) {
        json j;
        try {
            const CertificateReport rep = detail::certify_one(sel, rs, c);
            j = to_json(rep);
            all_pass = all_pass && rep.pass;
            log << sel << ": " << (rep.pass ? "PASS" : "FAIL") << " (" << rep.conclusion << ")\n";
        } catch (const SpecError& e) {
            // A single selector with unusable input is a spec error; "all" records and moves on.
            if (o.theorem != "all") throw;
            j = {{"theorem", sel}, {"verdict", "SKIPPED"}, {"reason", e.what()}};
            log << sel << ": SKIPPED (" << e.what() << ")\n";
        }
        summary.push_back({{"theorem", sel}, {"verdict", j["verdict"]}});
        out.write_json("certificate_" + sel + ".json", j);
    }
    json m = detail::manifest_fields(o, &rs);
    m["certificates"] = summary;
    m["verdict"] = all_pass ? "PASS" : "FAIL";
    out.finish(m);
    return all_pass ? pass : fail;
}

inline void write_solutions(OutputDir& out, const std::string& prefix, const MultiplicityResult& res,
                            const ProblemSpec& spec, json& list) {
    for (std::size_t k = 0; k < res.records.size(); ++k) {
        const SolutionRecord& rec = res.records[k];
        const std::string tag = prefix + std::to_string(k);
        json j = to_json(rec);
        j["localization"] = to_json(check_localization(rec, spec));
        j["u_file"] = "u_" + tag + ".csv";
        j["v_file"] = "v_" + tag + ".csv";
        out.write_json("solution_" + tag + ".json", j);
        out.write_csv("u_" + tag + ".csv", rec.u);
        out.write_csv("v_" + tag + ".csv", rec.v);
        list.push_back({{"file", "solution_" + tag + ".json"},
                        {"region", to_string(rec.region)},
                        {"nontrivial", rec.nontrivial()},
                        {"residual", num(rec.residual)}});
    }
}

inline json failures_json(const MultiplicityResult& res) {
    json f = json::array();
    for (const auto& [seed, r] : res.failures) f.push_back({{"seed", seed}, {"residual", num(r)}});
    return f;
}

inline int cmd_solve(const Options& o, std::ostream& log) {
    RunSpec rs = detail::load(o);
    detail::require_domain(rs);
    OutputDir out(o.out, o.canonical);
    const MultiplicityResult res = multiplicity_search(rs.problem, rs.solver, rs.fixpoint);
    json list = json::array();
    write_solutions(out, "", res, rs.problem, list);
    for (const auto& rec : res.records)
        log << "solution from " << rec.seed << ": region " << to_string(rec.region) << ", |u| = "
            << rec.sup_u << ", |v| = " << rec.sup_v << ", residual " << rec.residual << "\n";
    for (const auto& [seed, r] : res.failures)
        log << "seed " << seed << " did not converge (residual " << r << ")\n";
    json m = detail::manifest_fields(o, &rs);
    m["solutions"] = list;
    m["nontrivial"] = res.nontrivial();
    m["failures"] = failures_json(res);
    m["regions_found"] = {{"inner", res.inner_found}, {"middle", res.middle_found}, {"outer", res.outer_found}};
    const bool ok = !res.records.empty();
    m["verdict"] = ok ? "PASS" : "NO-CONVERGENCE";
    out.finish(m);
    if (!ok) log << "no seed converged\n";
    return ok ? pass : search_failure;
}

inline json to_json(const example::Evaluation& ev) {
    json checks = json::array();
    for (const auto& c : ev.checks) checks.push_back(pqcone::to_json(c));
    return {{"lambda", num(ev.lambda)},
            {"R", {num(ev.R1), num(ev.R2)}},
            {"r", {num(ev.r1), num(ev.r2)}},
            {"rho", {num(ev.rho1), num(ev.rho2)}},
            {"gamma", num(ev.gamma)},
            {"pass", ev.pass},
            {"checks", checks}};
}

inline DomainPtr default_example_domain(std::size_t nodes) {
    const double h = 1.0 / static_cast<double>(nodes - 1);
    const auto d = GridDomain::snap_inward(0.25, 0.75, h, nodes);
    const IndexBox box{{d[0], 0}, {d[1], 0}};
    return make_domain(GridDomain::interval(1.0, nodes, box, box));
}

inline int cmd_example(const Options& o, std::ostream& log) {
    RunSpec rs;
    if (!o.spec.empty()) rs = detail::load(o);
    else if (o.seed) rs.fixpoint.seed = *o.seed;
    ExampleParams e = rs.example.value_or(ExampleParams{});
    if (o.a) e.a = *o.a;
    if (o.b) e.b = *o.b;
    if (o.c) e.c = *o.c;
    if (o.d) e.d = *o.d;
    if (o.r2) e.r2 = *o.r2;
    example::validate(e);
    DomainPtr dom;
    if (o.nodes) {
        if (*o.nodes < 9) throw SpecError("--nodes must be at least 9");
        dom = default_example_domain(*o.nodes);
    } else {
        dom = rs.has_domain ? rs.problem.domain : default_example_domain(257);
    }
    if (rs.has_domain && (rs.problem.p != 2.0 || rs.problem.q != 2.0))
        throw SpecError("exponents: the example is posed for p = q = 2");
    const int resolution = o.resolution.value_or(rs.problem.resolution);
    OutputDir out(o.out, o.canonical);
    const example::Report rep = example::run(dom, e, rs.solver, rs.fixpoint, resolution);
    out.write_json("constants.json", to_json(rep.constants));

    json runs = json::array(), solutions = json::array();
    bool certified = true, found = true;
    for (std::size_t i = 0; i < rep.runs.size(); ++i) {
        const auto& fr = rep.runs[i];
        const std::string tag = std::to_string(i);
        out.write_json("certificate_three_" + tag + ".json", pqcone::to_json(fr.certificate));
        json list = json::array();
        write_solutions(out, tag + "_", fr.search, fr.problem, list);
        const int nontrivial = fr.search.nontrivial();
        certified = certified && fr.certificate.pass;
        found = found && nontrivial >= 2 && fr.outer_found;
        runs.push_back({{"factor", num(fr.factor)},
                        {"conditions", to_json(fr.conditions)},
                        {"problem", pqcone::to_json(fr.problem)},
                        {"certificate", "certificate_three_" + tag + ".json"},
                        {"certificate_pass", fr.certificate.pass},
                        {"nontrivial", nontrivial},
                        {"outer_found", fr.outer_found},
                        {"middle_region_found", fr.search.middle_found},
                        {"solutions", list},
                        {"failures", failures_json(fr.search)}});
        log << "lambda = " << fr.factor << " * lambda0 = " << fr.conditions.lambda << ": certificate "
            << (fr.certificate.pass ? "PASS" : "FAIL") << ", " << nontrivial
            << " nontrivial solution(s), outer " << (fr.outer_found ? "found" : "missing") << "\n";
    }
    json trace = json::array();
    for (const auto& ev : rep.threshold.trace) trace.push_back({{"lambda", num(ev.lambda)}, {"pass", ev.pass}});
    json report = {{"parameters", {{"a", num(e.a)}, {"b", num(e.b)}, {"c", num(e.c)}, {"d", num(e.d)}, {"r2", num(e.r2)}}},
                   {"lambda0", num(rep.threshold.lambda0)},
                   {"lambda_last_fail", num(rep.threshold.lambda_fail)},
                   {"search_trace", trace},
                   {"half_lambda0", to_json(rep.half)},
                   {"half_lambda0_fails", !rep.half.pass},
                   {"runs", runs}};
    out.write_json("example.json", report);
    log << "lambda0 = " << example::fmt17(rep.threshold.lambda0) << "\n";

    json m = detail::manifest_fields(o, rs.has_domain ? &rs : nullptr);
    m["seed"] = rs.fixpoint.seed;
    m["lambda0"] = num(rep.threshold.lambda0);
    const int code = !certified ? fail : !found ? search_failure : pass;
    m["verdict"] = code == pass ? "PASS" : code == fail ? "FAIL" : "SEARCH-FAILURE";
    out.finish(m);
    return code;
}

inline int cmd_lab(const Options& o, std::ostream& log) {
    RunSpec rs = detail::load(o);
    if (rs.lab.empty()) throw SpecError("lab: no [[lab]] entries");
    const auto& ids = lab_theorem_ids();
    if (o.theorem != "all" && std::find(ids.begin(), ids.end(), o.theorem) == ids.end())
        throw SpecError("unknown lab theorem id '" + o.theorem + "'");
    OutputDir out(o.out, o.canonical);
    int code = pass;
    json summary = json::array();
    for (const LabEntry& entry : rs.lab) {
        LabProblem p = entry.problem;
        if (o.resolution) p.resolution = *o.resolution;
        json conds = json::array();
        for (const auto& id : lab_condition_ids()) {
            try {
                conds.push_back(to_json(check_condition(p, id)));
            } catch (const SpecError& e) {
                conds.push_back({{"id", id}, {"skipped", e.what()}});
            }
        }
        std::vector<std::string> theorems;
        if (o.theorem != "all") theorems = {o.theorem};
        else if (!entry.theorems.empty()) theorems = entry.theorems;
        else theorems = ids;
        json verdicts = json::array();
        for (const auto& t : theorems) {
            const HypothesisCheck h = check_hypotheses(p, t);
            if (!h.hold) {
                // Listed theorems must apply; in the open sweep inapplicable ones are just noted.
                const bool requested = o.theorem != "all" || !entry.theorems.empty();
                if (requested) code = std::max(code, static_cast<int>(fail));
                verdicts.push_back({{"theorem", t}, {"verdict", "HYPOTHESES-FAIL"}, {"reason", h.reason}});
                log << p.name << " " << t << ": hypotheses fail (" << h.reason << ")\n";
                continue;
            }
            const TheoremVerdict v = validate_theorem(t, p, p.resolution);
            if (!v.confirmed) code = search_failure;
            verdicts.push_back(to_json(v));
            log << p.name << " " << t << ": " << v.verdict << "\n";
        }
        const std::string file = "lab_" + p.name + ".json";
        out.write_json(file, {{"name", p.name}, {"conditions", conds}, {"theorems", verdicts}});
        summary.push_back({{"name", p.name}, {"file", file}});
    }
    json m = detail::manifest_fields(o, &rs);
    m["lab"] = summary;
    m["verdict"] = code == pass ? "PASS" : code == fail ? "FAIL" : "SEARCH-FAILURE";
    out.finish(m);
    return code;
}

/// Run one subcommand, mapping library errors onto the exit-code contract.
inline int dispatch(const Options& o, std::ostream& log, std::ostream& err) {
    static const std::map<std::string, std::function<int(const Options&, std::ostream&)>> table = {
        {"constants", cmd_constants}, {"certify", cmd_certify}, {"solve", cmd_solve},
        {"example", cmd_example},     {"lab", cmd_lab},
    };
    const auto it = table.find(o.command);
    if (it == table.end()) {
        err << "error: unknown subcommand '" << o.command << "'\n";
        return spec_error;
    }
    try {
        return it->second(o, log);
    } catch (const SpecError& e) {
        err << "spec error: " << e.what() << "\n";
        return spec_error;
    } catch (const ExprError& e) {
        err << "spec error: " << e.what() << "\n";
        return spec_error;
    } catch (const HypothesisError& e) {
        err << "hypotheses not met: " << e.what() << "\n";
        return fail;
    } catch (const SearchError& e) {
        err << "search failure: " << e.what() << "\n";
        return search_failure;
    } catch (const Error& e) {
        err << "solver error: " << e.what() << "\n";
        return solver_error;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "i/o error: " << e.what() << "\n";
        return solver_error;
    }
}

} // namespace pqcone::cli
