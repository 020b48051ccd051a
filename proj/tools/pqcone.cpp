#include "pqcone/cli.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
    using pqcone::cli::Options;
    Options o;
    CLI::App app{"Cone localization certificates and fixed-point solver for (p,q)-Laplacian systems"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", pqcone::tool_version);

    auto common = [&o](CLI::App* sub, bool needs_spec) {
        auto* spec = sub->add_option("--spec", o.spec, "problem file (TOML)");
        if (needs_spec) spec->required();
        sub->add_option("--out", o.out, "output directory")->capture_default_str();
        sub->add_option("--resolution", o.resolution, "sampling resolution per axis");
        sub->add_option("--seed", o.seed, "seed for random fixed-point starts");
        sub->add_flag("--canonical", o.canonical, "omit timestamps and absolute paths from the manifest");
    };
    common(app.add_subcommand("constants", "compute A, B and first eigenvalues"), true);
    auto* certify = app.add_subcommand("certify", "check theorem hypotheses");
    common(certify, true);
    certify->add_option("--theorem", o.theorem, "existence|existence-or|three|ladder|nonexistence|all")
        ->capture_default_str();
    common(app.add_subcommand("solve", "search for fixed points"), true);
    auto* example = app.add_subcommand("example", "threshold search and two-solution example");
    common(example, false);
    example->add_option("--a", o.a, "lower bound of phi");
    example->add_option("--b", o.b, "upper bound of phi");
    example->add_option("--c", o.c, "lower bound of psi");
    example->add_option("--d", o.d, "upper bound of psi");
    example->add_option("--r2", o.r2, "fixed seminorm radius of v");
    example->add_option("--nodes", o.nodes, "grid nodes on [0,1] (default 257 when no domain is given)");
    auto* lab = app.add_subcommand("lab", "finite-dimensional condition checks and theorem validation");
    common(lab, true);
    lab->add_option("--theorem", o.theorem, "lab theorem id or all")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : pqcone::cli::spec_error;
    }
    o.command = app.get_subcommands().front()->get_name();
    return pqcone::cli::dispatch(o, std::cout, std::cerr);
}
