#pragma once

#include "pqcone/specfile.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>

namespace pqcone {

inline constexpr const char* tool_version = "0.1.0";

using json = nlohmann::json;

/// Doubles go out in shortest round-trip form; non-finite values become strings.
inline json num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

inline json opt_num(const std::optional<double>& x) { return x ? num(*x) : json(nullptr); }

inline json to_json(const ConstantSet& c) {
    return {{"p", num(c.p)},
            {"q", num(c.q)},
            {"A_p", num(c.A_p)},
            {"A_q", num(c.A_q)},
            {"B_1p", num(c.B_1p)},
            {"B_2q", num(c.B_2q)},
            {"lambda_1p", num(c.lambda_p)},
            {"lambda_1q", num(c.lambda_q)},
            {"norm_one", {num(c.norm_one_1), num(c.norm_one_2)}},
            {"torsion_sup", {num(c.torsion_p), num(c.torsion_q)}},
            {"eigen_residual", {num(c.eigen_residual_p), num(c.eigen_residual_q)}},
            {"dim", c.dim},
            {"nodes", {c.nx, c.ny}},
            {"sandwich_holds", c.sandwich_holds()}};
}

inline json to_json(const SamplePoint& s) {
    return {{"x", num(s.x)}, {"y", num(s.y)}, {"u", num(s.u)}, {"v", num(s.v)}};
}

inline json to_json(const ConditionRecord& c) {
    json j = {{"id", c.id},
              {"inequality", c.inequality},
              {"lhs", num(c.lhs)},
              {"relation", to_string(c.relation)},
              {"rhs", num(c.rhs)},
              {"margin", num(c.margin)},
              {"pass", c.pass},
              {"sampling", c.sampling}};
    if (c.witness) j["witness"] = to_json(*c.witness);
    return j;
}

inline json to_json(const CertificateReport& r) {
    json conds = json::array();
    for (const auto& c : r.conditions) conds.push_back(to_json(c));
    json parts = json::array();
    for (const auto& p : r.parts)
        parts.push_back({{"name", p.name}, {"pass", p.pass}, {"conclusion", p.conclusion}});
    return {{"theorem", r.theorem},
            {"verdict", r.pass ? "PASS" : "FAIL"},
            {"pass", r.pass},
            {"conclusion", r.conclusion},
            {"guaranteed_nontrivial", r.guaranteed_nontrivial},
            {"resolution", r.resolution},
            {"conditions", conds},
            {"parts", parts},
            {"notes", r.notes},
            {"constants", to_json(r.constants)}};
}

inline json to_json(const LocalizationReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    return {{"pass", r.pass}, {"checks", checks}};
}

inline json to_json(const SolutionRecord& s) {
    return {{"seed", s.seed},
            {"converged", s.converged},
            {"iterations", s.iterations},
            {"residual", num(s.residual)},
            {"region", to_string(s.region)},
            {"sup", {num(s.sup_u), num(s.sup_v)}},
            {"seminorm", {num(s.semi_u), num(s.semi_v)}},
            {"interior_min", {num(s.u.interior_min()), num(s.v.interior_min())}},
            {"zero_component", {s.u_zero, s.v_zero}},
            {"nontrivial", s.nontrivial()}};
}

inline json to_json(const Radii& r) {
    return {{"r", {num(r.r1), num(r.r2)}},
            {"R", {num(r.R1), num(r.R2)}},
            {"rho", {opt_num(r.rho1), opt_num(r.rho2)}},
            {"varrho", {opt_num(r.varrho1), opt_num(r.varrho2)}},
            {"R_tilde", {opt_num(r.R_tilde1), opt_num(r.R_tilde2)}},
            {"rho_tilde", {opt_num(r.rho_tilde1), opt_num(r.rho_tilde2)}}};
}

inline json to_json(const IndexBox& b, int dim) {
    json j = {{"i", {b.lo[0], b.hi[0]}}};
    if (dim == 2) j["j"] = {b.lo[1], b.hi[1]};
    return j;
}

inline json to_json(const GridDomain& d) {
    json j = {{"kind", d.dim() == 1 ? "interval" : "rectangle"},
              {"D1", to_json(d.subset(1), d.dim())},
              {"D2", to_json(d.subset(2), d.dim())}};
    if (d.dim() == 1) {
        j["length"] = num(d.length(0));
        j["nodes"] = d.nx();
    } else {
        j["length"] = {num(d.length(0)), num(d.length(1))};
        j["nodes"] = {d.nx(), d.ny()};
    }
    return j;
}

inline json to_json(const ProblemSpec& s) {
    json ladder = json::array();
    for (const auto& g : s.ladder)
        ladder.push_back({{"r", {num(g.r1), num(g.r2)}}, {"R", {num(g.R1), num(g.R2)}}});
    json j = {{"p", num(s.p)},
              {"q", num(s.q)},
              {"f", s.f.source()},
              {"g", s.g.source()},
              {"lambda", num(s.lambda)},
              {"f_monotone", {to_string(s.f_mono.u), to_string(s.f_mono.v)}},
              {"g_monotone", {to_string(s.g_mono.u), to_string(s.g_mono.v)}},
              {"radii", to_json(s.radii)},
              {"ladder", ladder},
              {"resolution", s.resolution},
              {"strict_margin", num(s.strict_margin)}};
    if (s.domain) j["domain"] = to_json(*s.domain);
    return j;
}

inline json to_json(const LabCondition& c) {
    return {{"id", c.id},
            {"description", c.description},
            {"margin", num(c.margin)},
            {"pass", c.pass},
            {"vacuous", c.vacuous},
            {"samples", c.samples},
            {"witness", c.witness}};
}

inline json to_json(const TheoremVerdict& v) {
    json hyps = json::array();
    for (const auto& c : v.hypotheses) hyps.push_back(to_json(c));
    json fps = json::array();
    for (const auto& z : v.fixed_points) {
        json u = json::array(), w = json::array();
        for (double x : z.u) u.push_back(num(x));
        for (double x : z.v) w.push_back(num(x));
        fps.push_back({{"u", u}, {"v", w}, {"residual", num(z.residual)}});
    }
    json regions = json::array();
    for (const auto& r : v.regions)
        regions.push_back({{"name", r.name}, {"description", r.description}, {"count", r.count}});
    return {{"theorem", v.theorem},
            {"verdict", v.verdict},
            {"confirmed", v.confirmed},
            {"hypotheses", hyps},
            {"fixed_points", fps},
            {"regions", regions}};
}

/**
 * Output directory of one run. Files are written through a temporary name and renamed;
 * the manifest goes last and lists every file, so its presence marks a complete run.
 */
class OutputDir {
public:
    OutputDir(std::filesystem::path dir, bool canonical) : dir_(std::move(dir)), canonical_(canonical) {
        namespace fs = std::filesystem;
        started_ = now();
        fs::create_directories(dir_);
        clear_previous_run();
    }

    const std::filesystem::path& dir() const { return dir_; }
    const std::vector<std::string>& files() const { return files_; }

    void write_text(const std::string& name, const std::string& text) {
        namespace fs = std::filesystem;
        const fs::path tmp = dir_ / (name + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary);
            if (!out) throw Error("cannot write " + tmp.string());
            out << text;
            if (!out) throw Error("write failed for " + tmp.string());
        }
        fs::rename(tmp, dir_ / name);
        files_.push_back(name);
    }

    void write_json(const std::string& name, const json& j) { write_text(name, j.dump(2) + "\n"); }

    void write_csv(const std::string& name, const GridFunction& u) {
        std::ostringstream os;
        pqcone::write_csv(os, u);
        write_text(name, os.str());
    }

    /// Write manifest.json; nothing may be written afterwards.
    void finish(const json& fields) {
        json m = fields;
        m["tool_version"] = tool_version;
        m["output_directory"] = canonical_ ? json(".") : json(dir_.string());
        m["files"] = files_;
        if (!canonical_) {
            m["started"] = started_;
            m["finished"] = now();
        }
        write_text("manifest.json", m.dump(2) + "\n");
    }

private:
    static std::string now() {
        const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&t, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    /// Remove what an earlier run recorded in its manifest, and stray temporaries. Anything
    /// else in the directory is refused before a single file is touched.
    void clear_previous_run() {
        namespace fs = std::filesystem;
        const fs::path manifest = dir_ / "manifest.json";
        std::set<std::string> owned;
        if (fs::exists(manifest)) {
            std::ifstream in(manifest);
            json m;
            try {
                in >> m;
                for (const auto& f : m.value("files", json::array())) owned.insert(f.get<std::string>());
            } catch (const json::exception&) {
                throw SpecError("unreadable manifest in output directory '" + dir_.string() + "'");
            }
            owned.insert("manifest.json");
        }
        std::vector<fs::path> doomed;
        for (const auto& e : fs::directory_iterator(dir_)) {
            const std::string name = e.path().filename().string();
            if (!owned.count(name) && e.path().extension() != ".tmp")
                throw SpecError("output directory '" + dir_.string() + "' contains '" + name +
                                "' from something other than a previous run");
            doomed.push_back(e.path());
        }
        for (const auto& p : doomed) fs::remove(p);
    }

    std::filesystem::path dir_;
    bool canonical_;
    std::string started_;
    std::vector<std::string> files_;
};

} // namespace pqcone
