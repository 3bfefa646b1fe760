#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "isonet/commands.hpp"

namespace {

std::string stem_of(const std::string& path) {
    const auto dot = path.rfind('.');
    const auto slash = path.rfind('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
    return path.substr(0, dot);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out || !(out << text)) throw isonet::Error("cannot write " + path);
}

}  // namespace

int main(int argc, char** argv) {
    using namespace isonet;
    CLI::App app{"Discrete isothermic and CMC nets: generate, transform, verify, export"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Plain-text key=value parameter file");
    app.allow_config_extras(CLI::config_extras_mode::error);

    Params p;
    std::string out_path, format = "json", report = "text";
    bool poincare = false;
    double tol = 0;
    std::vector<double> fhat;

    app.add_option("--n", p.n, "Lattice points around or across");
    app.add_option("--rows", p.rows, "Lattice rows");
    app.add_option("--kappa", p.kappa, "Space form curvature");
    app.add_option("--H", p.H, "Mean curvature H_kappa for revolution nets");
    app.add_option("--r", p.r, "Seed radius for revolution nets");
    app.add_option("--lambda", p.lambda, "Spectral parameter for Bryant nets and the Calapso transform");
    app.add_option("--mu", p.mu, "Darboux parameter");
    app.add_option("--fhat", fhat, "Darboux initial point x,y,z")->delimiter(',')->expected(3);
    app.add_option("--root", p.root, "Darboux from the k-th real root of ||P||^2");
    app.add_option("--tol", tol, "Tolerance (default 1e-8 or ISONET_TOL)");
    app.add_option("--out", out_path, "Output path");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"obj", "json"}));
    app.add_option("--report", report, "Report format")->check(CLI::IsMember({"text", "json"}));
    app.add_flag("--poincare", poincare, "Map kappa < 0 nets to the Poincare ball on OBJ export");

    std::string kind, file, which;
    auto* gen = app.add_subcommand("generate", "Generate a net; writes NetFile JSON and OBJ");
    gen->add_option("kind", kind, "Generator")->required()->check(CLI::IsMember(generator_kinds()));
    auto* ver = app.add_subcommand("verify", "Verify a net file");
    ver->add_option("file", file, "NetFile JSON")->required()->check(CLI::ExistingFile);
    auto* tra = app.add_subcommand("transform", "Christoffel, Calapso or Darboux transform of a net file");
    tra->add_option("file", file, "NetFile JSON")->required()->check(CLI::ExistingFile);
    tra->add_option("which", which, "Transform")->required()->check(CLI::IsMember({"christoffel", "calapso", "darboux"}));
    auto* exp = app.add_subcommand("export", "Export a net file as OBJ or JSON");
    exp->add_option("file", file, "NetFile JSON")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        p.tol = tol > 0 ? tol : default_tolerance();
        if (!fhat.empty()) p.fhat = std::array<double, 3>{fhat[0], fhat[1], fhat[2]};

        if (*gen) {
            const NetFile f = cmd_generate(kind, p);
            const std::string base = out_path.empty() ? kind : stem_of(out_path);
            write_netfile(base + ".json", f);
            write_obj(base + ".obj", f.net, poincare);
            std::cout << "wrote " << base << ".json and " << base << ".obj (" << f.net.M << " x " << f.net.N << ")\n";
            return 0;
        }
        if (*ver) {
            const VerifyReport r = cmd_verify(read_netfile(file), p.tol);
            write_text(out_path, report == "json" ? r.to_json().dump(2) + "\n" : r.text());
            return r.all_pass() ? 0 : 1;
        }
        if (*tra) {
            const NetFile f = cmd_transform(read_netfile(file), which, p);
            const std::string base = out_path.empty() ? stem_of(file) + "_" + which : stem_of(out_path);
            write_netfile(base + ".json", f);
            write_obj(base + ".obj", f.net, poincare);
            std::cout << "wrote " << base << ".json and " << base << ".obj\n";
            return 0;
        }
        if (*exp) {
            write_text(out_path, cmd_export(read_netfile(file), format, poincare));
            return 0;
        }
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
