#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "isonet/commands.hpp"
#include "isonet/generators.hpp"
#include "isonet/netfile.hpp"

using namespace isonet;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Scratch directory per test, removed on destruction.
struct TempDir {
    fs::path path;
    TempDir() {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        path = fs::temp_directory_path() / ("isonet_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& f) const { return (path / f).string(); }
};

// Runs the command line tool; returns its exit status.
int cli(const std::string& args, const std::string& env = {}) {
    const std::string cmd = env + (env.empty() ? "" : " ") + ISONET_CLI + std::string(" ") + args + " >/dev/null 2>&1";
    const int s = std::system(cmd.c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

bool same_bits(double a, double b) {
    if (std::isnan(a)) return std::isnan(b);
    return std::memcmp(&a, &b, sizeof a) == 0;
}

Params params(int rows, int n) {
    Params p;
    p.rows = rows;
    p.n = n;
    return p;
}

}  // namespace

TEST(NetFile, RoundTripIsBitExact) {
    for (const std::string kind : {"minimal-catenoid", "bryant-catenoid-cousin", "revolution", "planar-grid"}) {
        Params p = params(8, 8);
        if (kind == "revolution") p.H = 0.8;
        const NetFile f = cmd_generate(kind, p);
        const std::string text = dump_netfile(f);
        const NetFile g = parse_netfile(text);
        EXPECT_EQ(dump_netfile(g), text);
        ASSERT_EQ(g.net.v.size(), f.net.v.size());
        for (size_t i = 0; i < f.net.v.size(); ++i) {
            EXPECT_TRUE(same_bits(g.net.v[i].x, f.net.v[i].x));
            EXPECT_TRUE(same_bits(g.net.v[i].y, f.net.v[i].y));
            EXPECT_TRUE(same_bits(g.net.v[i].z, f.net.v[i].z));
        }
        for (size_t i = 0; i < f.net.ah.size(); ++i) {
            EXPECT_TRUE(same_bits(g.net.ah[i], f.net.ah[i]));
            EXPECT_TRUE(same_bits(g.net.av[i], f.net.av[i]));
        }
        EXPECT_TRUE(same_bits(g.net.kappa, f.net.kappa));
        EXPECT_EQ(g.cq.has_value(), f.cq.has_value());
        EXPECT_EQ(g.provenance, f.provenance);
    }
}

TEST(NetFile, AwkwardDoublesSurvive) {
    NetFile f;
    f.net = planar_grid(2, 2);
    f.net.v[0] = Quaternion::imag(0.1, 1.0 / 3.0, 5e-324);
    f.net.v[1] = Quaternion::imag(-1.7976931348623157e308, 2.2250738585072014e-308, 1e23);
    const NetFile g = parse_netfile(dump_netfile(f));
    for (int i = 0; i < 2; ++i) {
        EXPECT_TRUE(same_bits(g.net.v[i].x, f.net.v[i].x));
        EXPECT_TRUE(same_bits(g.net.v[i].y, f.net.v[i].y));
        EXPECT_TRUE(same_bits(g.net.v[i].z, f.net.v[i].z));
    }
}

TEST(NetFile, SchemaMismatchIsRejected) {
    nlohmann::json j = to_json(cmd_generate("planar-grid", params(3, 3)));
    j["schema_version"] = kSchemaVersion + 1;
    EXPECT_THROW(from_json(j), SchemaError);
    j = to_json(cmd_generate("planar-grid", params(3, 3)));
    j.erase("vertices");
    EXPECT_THROW(from_json(j), SchemaError);
    EXPECT_THROW(parse_netfile("{not json"), SchemaError);
}

TEST(Obj, TwoByTwoNet) {
    const std::string obj = to_obj(planar_grid(2, 2));
    std::istringstream in(obj);
    std::string line;
    int v = 0, f = 0;
    std::string face;
    while (std::getline(in, line)) {
        if (line.rfind("v ", 0) == 0) ++v;
        if (line.rfind("f ", 0) == 0) ++f, face = line;
    }
    EXPECT_EQ(v, 4);
    EXPECT_EQ(f, 1);
    // Row-major indices (0,0)=1, (1,0)=3, (1,1)=4, (0,1)=2 in lattice orientation.
    EXPECT_EQ(face, "f 1 3 4 2");
}

TEST(Obj, HyperbolicNetExportsInsideBall) {
    const NetFile f = cmd_generate("bryant-catenoid-cousin", params(8, 8));
    std::istringstream in(cmd_export(f, "obj", true));
    std::string tag;
    int count = 0;
    for (std::string line; std::getline(in, line);) {
        std::istringstream ls(line);
        double x, y, z;
        if (ls >> tag && tag == "v" && ls >> x >> y >> z) {
            EXPECT_LT(x * x + y * y + z * z, 1.0);
            ++count;
        }
    }
    EXPECT_EQ(count, f.net.vertex_count());
}

TEST(Verify, ExportImportVerifyIsStable) {
    for (const std::string kind : {"minimal-catenoid", "bryant-enneper-cousin", "revolution"}) {
        Params p = params(8, 8);
        if (kind == "revolution") p.H = 0.8;
        const NetFile f = cmd_generate(kind, p);
        const NetFile g = parse_netfile(cmd_export(f, "json"));
        EXPECT_EQ(cmd_verify(f, 1e-8).to_json().dump(), cmd_verify(g, 1e-8).to_json().dump());
    }
}

TEST(Verify, ChecksOnGeneratedNets) {
    const VerifyReport r = cmd_verify(cmd_generate("minimal-catenoid", params(20, 8)), 1e-8);
    EXPECT_TRUE(r.all_pass()) << r.text();
    ASSERT_NE(r.find("conserved_quantity"), nullptr);
    EXPECT_NEAR(r.info["abs_H"].get<double>(), 0.0, 1e-8);

    Params p = params(12, 8);
    p.kappa = -1;
    p.H = 1;
    const VerifyReport h = cmd_verify(cmd_generate("revolution", p), 1e-8);
    EXPECT_TRUE(h.all_pass()) << h.text();
    EXPECT_NEAR(h.info["H_unit"].get<double>(), 1.0, 1e-8);
}

TEST(Transform, ProvenanceChain) {
    const NetFile f = cmd_generate("minimal-catenoid", params(8, 8));
    Params p = params(8, 8);
    p.lambda = 0.2;
    const NetFile c = cmd_transform(cmd_transform(f, "christoffel", p), "calapso", p);
    ASSERT_TRUE(c.provenance.contains("history"));
    EXPECT_EQ(c.provenance["history"].size(), 2u);
    EXPECT_EQ(c.provenance["generator"], "minimal-catenoid");
    EXPECT_TRUE(cmd_verify(c, 1e-8).all_pass());
}

TEST(Cli, GenerateVerifyTransformExport) {
    TempDir d;
    EXPECT_NE(cli("generate no-such-kind --out " + d / "x.json"), 0);
    ASSERT_EQ(cli("generate minimal-catenoid --n 8 --rows 20 --out " + d / "cat.json"), 0);
    EXPECT_TRUE(fs::exists(d / "cat.obj"));
    EXPECT_EQ(cli("verify " + d / "cat.json"), 0);
    EXPECT_EQ(cli("verify " + d / "cat.json --report json --out " + d / "rep.json"), 0);
    const auto rep = nlohmann::json::parse(slurp(d / "rep.json"));
    EXPECT_TRUE(rep["pass"].get<bool>());

    ASSERT_EQ(cli("export " + d / "cat.json --format json --out " + d / "again.json"), 0);
    EXPECT_EQ(slurp(d / "again.json"), slurp(d / "cat.json"));

    ASSERT_EQ(cli("transform " + d / "cat.json christoffel --out " + d / "dual.json"), 0);
    ASSERT_EQ(cli("verify " + d / "dual.json --report json --out " + d / "dual_rep.json"), 0);
    const auto dual = nlohmann::json::parse(slurp(d / "dual_rep.json"));
    EXPECT_EQ(dual["info"]["cq_order"], 0);

    EXPECT_EQ(cli("generate revolution --kappa -1 --H 1 --out " + d / "h3.json"), 0);
    EXPECT_EQ(cli("verify " + d / "h3.json"), 0);
}

TEST(Cli, PerturbedFileFailsWithQuadIndex) {
    TempDir d;
    ASSERT_EQ(cli("generate minimal-catenoid --n 8 --rows 8 --out " + d / "cat.json"), 0);
    NetFile f = read_netfile(d / "cat.json");
    f.net.at(4, 3) = f.net.at(4, 3) + Quaternion::imag(0.0, 0.0, 0.01);
    write_netfile(d / "bad.json", f);
    EXPECT_EQ(cli("verify " + d / "bad.json --report json --out " + d / "rep.json"), 1);
    const auto rep = nlohmann::json::parse(slurp(d / "rep.json"));
    bool found = false;
    for (const auto& c : rep["checks"])
        if (c["name"] == "isothermic") {
            EXPECT_FALSE(c["pass"].get<bool>());
            EXPECT_NE(c["worst"].get<std::string>().find("quad ("), std::string::npos);
            found = true;
        }
    EXPECT_TRUE(found);
}

TEST(Cli, ToleranceConfigAndSchema) {
    TempDir d;
    ASSERT_EQ(cli("generate minimal-catenoid --n 8 --rows 8 --out " + d / "cat.json"), 0);
    // An absurdly tight tolerance from the environment makes verification fail.
    EXPECT_EQ(cli("verify " + d / "cat.json", "ISONET_TOL=1e-30"), 1);
    EXPECT_EQ(cli("verify " + d / "cat.json --tol 1e-8", "ISONET_TOL=1e-30"), 0);

    std::ofstream(d / "good.cfg") << "n=8\nrows=10\n";
    EXPECT_EQ(cli("generate minimal-enneper --config " + d / "good.cfg" + " --out " + d / "e.json"), 0);
    EXPECT_EQ(read_netfile(d / "e.json").net.M, 10);
    std::ofstream(d / "bad.cfg") << "n=8\nbogus=1\n";
    EXPECT_NE(cli("generate minimal-enneper --config " + d / "bad.cfg" + " --out " + d / "e2.json"), 0);

    std::ofstream(d / "old.json") << "{\"schema_version\": 99}\n";
    EXPECT_EQ(cli("verify " + d / "old.json"), 3);
}
