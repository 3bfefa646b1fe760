#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "isonet/netfile.hpp"

namespace isonet {

// Parameters shared by the command line subcommands.
struct Params {
    int n = 8;           // lattice points around / across
    int rows = 12;       // lattice rows
    double kappa = 0;
    double H = 1;        // H_kappa for revolution nets
    double r = 0.5;      // seed radius for revolution nets
    double lambda = 0.3;
    double mu = 0.3;
    double tol = 1e-8;
    std::optional<std::array<double, 3>> fhat;  // Darboux initial point
    int root = -1;       // Darboux from the k-th real root of ||P||^2 (Baecklund / complementary)
};

// Tolerance from ISONET_TOL when set, otherwise fallback.
double default_tolerance(double fallback = 1e-8);

const std::vector<std::string>& generator_kinds();

// Throws Error on an unknown kind; generator failures carry the kind in the message.
NetFile cmd_generate(const std::string& kind, const Params& p);

struct CheckResult {
    std::string name;
    double value = 0;      // max residual
    double tol = 0;
    bool pass = false;
    std::string worst;     // worst offender, e.g. "quad (3,4)"
    std::string note;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    nlohmann::json info = nlohmann::json::object();
    bool all_pass() const;
    const CheckResult* find(const std::string& name) const;
    std::string text() const;
    nlohmann::json to_json() const;
};

VerifyReport cmd_verify(const NetFile& f, double tol);

// which in {christoffel, calapso, darboux}. Appends to provenance["history"].
NetFile cmd_transform(const NetFile& f, const std::string& which, const Params& p);

// format in {obj, json}.
std::string cmd_export(const NetFile& f, const std::string& format, bool poincare = false);

}  // namespace isonet
