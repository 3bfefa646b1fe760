#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "isonet/conserved.hpp"
#include "isonet/errors.hpp"
#include "isonet/net.hpp"

namespace isonet {

inline constexpr int kSchemaVersion = 1;

// Thrown when a file does not match the expected schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

struct NetFile {
    QuadNet net;
    std::string ambient = "conformal";  // "conformal" (space form via kappa) or "R21" (Lorentz 3-space)
    std::optional<std::vector<MinkVec>> lifts;
    std::optional<ConservedQuantity> cq;
    nlohmann::json provenance = nlohmann::json::object();
};

nlohmann::json to_json(const NetFile& f);
NetFile from_json(const nlohmann::json& j);

std::string dump_netfile(const NetFile& f);
NetFile parse_netfile(const std::string& text);

void write_netfile(const std::string& path, const NetFile& f);
NetFile read_netfile(const std::string& path);

// Row-major vertices, one quad face per lattice quad in (m, n) orientation.
// poincare: kappa < 0 nets are mapped through the hyperboloid and to_poincare, which rejects points off the ball.
std::string to_obj(const QuadNet& net, bool poincare = false);
void write_obj(const std::string& path, const QuadNet& net, bool poincare = false);

}  // namespace isonet
