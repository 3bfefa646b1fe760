#include "isonet/netfile.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace isonet {

using nlohmann::json;

namespace {

// JSON has no NaN or infinity; non-finite reals are stored as null.
json real(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double get_real(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!j.is_number()) throw SchemaError("netfile: expected a number");
    return j.get<double>();
}

json mink_json(const MinkVec& X) {
    json a = json::array();
    for (double c : X.coords()) a.push_back(real(c));
    return a;
}

MinkVec mink_from(const json& j) {
    if (!j.is_array() || j.size() != 5) throw SchemaError("netfile: expected 5 coordinates");
    std::array<double, 5> c{};
    for (int i = 0; i < 5; ++i) c[i] = get_real(j[i]);
    return MinkVec::from_coords(c);
}

json field_json(const std::vector<MinkVec>& F, const QuadNet& net) {
    json a = json::array();
    for (size_t i = 0; i < F.size(); ++i) a.push_back(net.mask[i] ? mink_json(F[i]) : json(nullptr));
    return a;
}

std::vector<MinkVec> field_from(const json& j, size_t count) {
    if (!j.is_array() || j.size() != count) throw SchemaError("netfile: per-vertex field has the wrong length");
    std::vector<MinkVec> F(count);
    for (size_t i = 0; i < count; ++i)
        if (!j[i].is_null()) F[i] = mink_from(j[i]);
    return F;
}

std::vector<double> reals_from(const json& j, size_t count, const char* what) {
    if (!j.is_array() || j.size() != count) throw SchemaError(std::string("netfile: ") + what + " has the wrong length");
    std::vector<double> out(count);
    for (size_t i = 0; i < count; ++i) out[i] = get_real(j[i]);
    return out;
}

const json& require(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(std::string("netfile: missing key '") + key + "'");
    return *it;
}

}  // namespace

json to_json(const NetFile& f) {
    const QuadNet& net = f.net;
    json j;
    j["schema_version"] = kSchemaVersion;
    j["ambient"] = f.ambient;
    j["M"] = net.M;
    j["N"] = net.N;
    j["m0"] = net.m0;
    j["n0"] = net.n0;
    j["kappa"] = real(net.kappa);
    json verts = json::array();
    for (size_t i = 0; i < net.v.size(); ++i) {
        if (!net.mask[i]) {
            verts.push_back(nullptr);
            continue;
        }
        const Quaternion& q = net.v[i];
        verts.push_back({real(q.x), real(q.y), real(q.z)});
    }
    j["vertices"] = verts;
    json ah = json::array(), av = json::array();
    for (double a : net.ah) ah.push_back(real(a));
    for (double a : net.av) av.push_back(real(a));
    j["ah"] = ah;
    j["av"] = av;
    if (f.lifts) j["lifts"] = field_json(*f.lifts, net);
    if (f.cq) {
        json c;
        c["order"] = f.cq->order();
        c["normalization"] = f.cq->normalization;
        json coeffs = json::array();
        for (const auto& P : f.cq->P) coeffs.push_back(field_json(P, net));
        c["coefficients"] = coeffs;
        j["conserved_quantity"] = c;
    }
    j["provenance"] = f.provenance;
    return j;
}

NetFile from_json(const json& j) {
    if (!j.is_object()) throw SchemaError("netfile: top level must be an object");
    const json& ver = require(j, "schema_version");
    if (!ver.is_number_integer() || ver.get<int>() != kSchemaVersion)
        throw SchemaError("netfile: schema_version " + ver.dump() + " is not " + std::to_string(kSchemaVersion));
    NetFile f;
    f.ambient = j.value("ambient", std::string("conformal"));
    const int M = require(j, "M").get<int>(), N = require(j, "N").get<int>();
    if (M < 1 || N < 1) throw SchemaError("netfile: lattice dimensions must be positive");
    f.net = QuadNet(M, N);
    f.net.m0 = j.value("m0", 0);
    f.net.n0 = j.value("n0", 0);
    f.net.kappa = get_real(require(j, "kappa"));
    const json& verts = require(j, "vertices");
    const size_t count = static_cast<size_t>(M) * static_cast<size_t>(N);
    if (!verts.is_array() || verts.size() != count) throw SchemaError("netfile: vertices has the wrong length");
    for (size_t i = 0; i < count; ++i) {
        if (verts[i].is_null()) {
            f.net.mask[i] = 0;
            continue;
        }
        if (!verts[i].is_array() || verts[i].size() != 3) throw SchemaError("netfile: vertex needs 3 coordinates");
        f.net.v[i] = Quaternion::imag(get_real(verts[i][0]), get_real(verts[i][1]), get_real(verts[i][2]));
    }
    if (j.contains("ah") != j.contains("av")) throw SchemaError("netfile: ah and av must appear together");
    if (j.contains("ah")) {
        f.net.ah = reals_from(j["ah"], count, "ah");
        f.net.av = reals_from(j["av"], count, "av");
    }
    if (j.contains("lifts")) f.lifts = field_from(j["lifts"], count);
    if (j.contains("conserved_quantity")) {
        const json& c = j["conserved_quantity"];
        ConservedQuantity cq;
        cq.normalization = c.value("normalization", std::string("none"));
        for (const json& coeff : require(c, "coefficients")) cq.P.push_back(field_from(coeff, count));
        if (cq.P.empty()) throw SchemaError("netfile: conserved quantity without coefficients");
        if (c.contains("order") && c["order"].get<int>() != cq.order())
            throw SchemaError("netfile: conserved quantity order does not match its coefficients");
        f.cq = std::move(cq);
    }
    if (j.contains("provenance")) f.provenance = j["provenance"];
    return f;
}

std::string dump_netfile(const NetFile& f) { return to_json(f).dump(1) + "\n"; }

NetFile parse_netfile(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("netfile: ") + e.what());
    }
    try {
        return from_json(j);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("netfile: ") + e.what());
    }
}

void write_netfile(const std::string& path, const NetFile& f) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << dump_netfile(f);
    if (!out) throw Error("write to " + path + " failed");
}

NetFile read_netfile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_netfile(ss.str());
}

std::string to_obj(const QuadNet& net, bool poincare) {
    std::ostringstream out;
    out.precision(17);
    std::vector<int> index(net.v.size(), 0);
    int next = 1;
    for (size_t i = 0; i < net.v.size(); ++i) {
        if (!net.mask[i]) continue;
        Vec3 p{net.v[i].x, net.v[i].y, net.v[i].z};
        if (poincare && net.kappa < 0) {
            // Conformal coordinates scaled by sqrt(-kappa) are ball coordinates; the hyperboloid round trip checks membership.
            const double s = std::sqrt(-net.kappa);
            p = to_poincare(from_poincare({s * p[0], s * p[1], s * p[2]}));
        }
        out << "v " << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
        index[i] = next++;
    }
    for (const Quad& q : quads(net))
        out << "f " << index[q.p] << ' ' << index[q.q] << ' ' << index[q.r] << ' ' << index[q.s] << '\n';
    return out.str();
}

void write_obj(const std::string& path, const QuadNet& net, bool poincare) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << to_obj(net, poincare);
    if (!out) throw Error("write to " + path + " failed");
}

}  // namespace isonet
