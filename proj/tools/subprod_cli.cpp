// subprod_cli — build systems, run suites and emit JSON/CSV reports.
//
// Exit codes: 0 pass, 1 invariant failure, 2 usage or configuration error.

#include "subprod/report.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace subprod;

namespace {

struct Options {
    std::string config;
    std::string rep;
    std::string op;
    std::string coeffs;
    std::optional<int> nstar;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "json";
};

std::vector<double> parse_coeffs(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double x = 0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || !std::isfinite(x)) throw ConfigError("--coeffs: '" + item + "' is not a number");
        v.push_back(x);
    }
    if (v.size() < 2) throw ConfigError("--coeffs: need at least one alpha and a gamma");
    return v;
}

RunConfig load_config(const Options& o) {
    RunConfig c = parse_run_config(read_json_file(o.config));
    if (o.tol) {
        if (!(*o.tol > 0)) throw ConfigError("--tol must be positive");
        c.tol = *o.tol;
    }
    if (o.seed) c.seed = *o.seed;
    return c;
}

json run(const std::string& command, const Options& o, std::string& out_path) {
    if (command == "morita") return morita_report(read_json_file(o.config), o.seed, o.tol);
    const RunConfig c = load_config(o);
    if (out_path.empty()) out_path = c.out;
    if (command == "build") return build_report(c);
    if (command == "verify") return run_suite(c);
    if (command == "scan") return scan_report(c, o.op);
    if (command == "cpnorm") return cpnorm_report(c, o.op, o.nstar);
    if (command == "sphere") return sphere_report(c, parse_coeffs(o.coeffs), o.nstar);
    if (command == "rep") return rep_report(c, read_json_file(o.rep));
    if (command == "wold") return wold_report(c, read_json_file(o.rep));
    throw ConfigError("unknown command '" + command + "'");
}

int emit(const json& report, const Options& o, const std::string& out_path) {
    const std::string text = o.format == "csv" ? report_csv(report) : dump_report(report);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot write '" << out_path << "'\n";
            return 2;
        }
        f << text;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Subproduct systems: construction, shifts, ideal diagnostics, representations and Morita checks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("config", o.config, "configuration JSON")->required();
        sub->add_option("--tol", o.tol, "invariant tolerance");
        sub->add_option("--seed", o.seed, "seed for sampled checks");
        sub->add_option("--out", o.out, "write the report here instead of stdout");
        sub->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "csv"}));
    };
    common(app.add_subcommand("build", "build the system and validate the axioms"));
    common(app.add_subcommand("verify", "run the configured suites"));
    auto* scan = app.add_subcommand("scan", "scan ||S Q_n|| for an operator expression");
    common(scan);
    scan->add_option("--op", o.op, "operator expression")->required();
    auto* cp = app.add_subcommand("cpnorm", "tail-norm estimate of the quotient norm");
    common(cp);
    cp->add_option("--op", o.op, "operator expression")->required();
    cp->add_option("--nstar", o.nstar, "tail level (default: last exact column)");
    auto* sphere = app.add_subcommand("sphere", "compare the quotient-norm estimate with the sphere symbol");
    common(sphere);
    sphere->add_option("--coeffs", o.coeffs, "alpha_1,...,alpha_d,gamma")->required();
    sphere->add_option("--nstar", o.nstar, "tail level (default: last exact column)");
    auto* rep = app.add_subcommand("rep", "classify a representation given by T1");
    common(rep);
    rep->add_option("rep", o.rep, "representation JSON")->required();
    auto* wold = app.add_subcommand("wold", "Wold decomposition of a representation");
    common(wold);
    wold->add_option("rep", o.rep, "representation JSON")->required();
    common(app.add_subcommand("morita", "Morita context checks"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    std::string out_path = o.out;
    json report;
    int rc = 0;
    try {
        report = run(command, o, out_path);
        rc = exit_code(report);
    } catch (const ParseError& e) {
        report = error_report(command, "parse", e.what(), e.offset());
        rc = 2;
    } catch (const std::invalid_argument& e) {
        report = error_report(command, "config", e.what());
        rc = 2;
    } catch (const std::exception& e) {
        report = error_report(command, "runtime", e.what());
        rc = 1;
    }
    if (rc != 0 && report.contains("error")) std::cerr << "error: " << report["error"]["message"].get<std::string>() << "\n";
    const int wrc = emit(report, o, out_path);
    return wrc != 0 ? wrc : rc;
}
