#include <filesystem>

#include "test_util.hpp"

namespace mlap::test {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("mlap_io_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

TEST(Io, EmitAndLoadRoundTrip) {
    const auto dir = scratch("fixtures");
    const auto files = io::emit_fixtures(dir);
    const auto canon = fixtures::canonical();
    ASSERT_EQ(files.size(), canon.size());
    for (std::size_t k = 0; k < files.size(); ++k) {
        const auto nf = io::load_network(files[k]);
        EXPECT_EQ(nf.net, canon[k].net) << canon[k].name;
        EXPECT_EQ(nf.boundary, canon[k].boundary) << canon[k].name;
        EXPECT_EQ(io::checksum(nf.net), io::checksum(canon[k].net));
    }
    EXPECT_EQ(io::load_network(dir / "triangle.json").net.size(), 3);
}

TEST(Io, ChecksumsStable) {
    const std::map<std::string, std::string> frozen{
        {"triangle", "f800569617c924a0"}, {"path3", "45d9697e0ebfe00f"},  {"two_component", "863bd0fe8ee6bd01"},
        {"diagonal", "12a81cccac2bc160"}, {"product", "8b646eaed768389c"}, {"joining", "997d7b0948c96125"},
        {"weighted6", "87371f7f0ec21e00"},
    };
    for (const auto& fx : fixtures::all()) EXPECT_EQ(io::checksum(fx.net), frozen.at(fx.name)) << fx.name;
}

TEST(Io, ProductFixtureSatisfiesClosedFormOnLoad) {
    const auto dir = scratch("product");
    io::emit_fixtures(dir);
    const Network net = io::load_network(dir / "product.json").net;
    // Recover mu and r from the loaded file: mu is stored, r_i = sqrt(W_ii) / mu_i.
    const Vector mu = net.mu();
    const Vector r = net.W().diagonal().cwiseSqrt().cwiseQuotient(mu);
    Gen gen(223);
    for (int t = 0; t < 20; ++t) {
        const Vector f = gen.vec(net.size());
        EXPECT_LE(rel(product_closed_form(mu, r, f).energy, energy_oracle(net.W(), f, f)), 1e-10);
    }
}

TEST(Io, ParseErrors) {
    const json base = io::to_json(fixtures::triangle());
    {
        json j = base;
        j["edges"][0]["w"] = -1.0;
        EXPECT_THROW_KIND(io::from_json(j), ErrorKind::ParseError);
        try {
            io::from_json(j);
        } catch (const Error& e) {
            EXPECT_NE(std::string(e.what()).find("NegativeWeight"), std::string::npos);
        }
    }
    {
        json j = base;
        j["edges"].push_back({{"i", "b"}, {"j", "a"}, {"w", 1.0}});
        try {
            io::from_json(j);
            ADD_FAILURE();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::ParseError);
            EXPECT_NE(std::string(e.what()).find("DuplicateEdge"), std::string::npos);
        }
    }
    {
        json j = base;
        j["schema"] = "mlap-net/2";
        EXPECT_THROW_KIND(io::from_json(j), ErrorKind::SchemaVersionError);
    }
    {
        json j = base;
        j["edges"][0]["i"] = "zz";
        EXPECT_THROW_KIND(io::from_json(j), ErrorKind::ParseError);
    }
    {
        json j = base;
        j.erase("states");
        EXPECT_THROW_KIND(io::from_json(j), ErrorKind::ParseError);
    }
    {
        json j = base;
        j["states"][0]["mu"] = "heavy";
        EXPECT_THROW_KIND(io::from_json(j), ErrorKind::ParseError);
    }
    {
        json j = base;
        j.erase("schema");
        EXPECT_EQ(io::from_json(j).net, fixtures::triangle());
    }
    {
        json j = base;
        j["states"][1]["mu"] = 0.0;
        EXPECT_THROW_KIND(io::from_json(j), ErrorKind::NonpositiveMass);
    }
    {
        json j = base;
        j["boundary"] = {"q"};
        EXPECT_THROW_KIND(io::from_json(j), ErrorKind::ParseError);
    }
    const auto dir = scratch("bad");
    io::write_file(dir / "broken.json", "{ not json");
    EXPECT_THROW_KIND(io::load_network(dir / "broken.json"), ErrorKind::ParseError);
    EXPECT_THROW_KIND(io::load_network(dir / "missing.json"), ErrorKind::IOError);
}

TEST(Io, CsvRoundTrip) {
    const auto dir = scratch("csv");
    for (const auto& fx : fixtures::all()) {
        const auto edges = dir / (fx.name + ".csv");
        io::save_network_csv(edges, fx.net);
        EXPECT_TRUE(fs::exists(dir / (fx.name + ".nodes.csv")));
        EXPECT_EQ(io::load_network(edges).net, fx.net) << fx.name;
    }
    io::write_file(dir / "neg.csv", "i,j,w\n0,1,-2\n");
    io::write_file(dir / "neg.nodes.csv", "id,mu\n0,1\n1,1\n");
    EXPECT_THROW_KIND(io::load_network(dir / "neg.csv"), ErrorKind::ParseError);
    io::write_file(dir / "hdr.csv", "a,b,c\n0,1,2\n");
    io::write_file(dir / "hdr.nodes.csv", "id,mu\n0,1\n1,1\n");
    EXPECT_THROW_KIND(io::load_network(dir / "hdr.csv"), ErrorKind::ParseError);
}

TEST(Io, JsonNumbersRoundTripBitExactly) {
    Gen gen(227);
    for (int t = 0; t < 50; ++t) {
        const Network net = gen.connected(5, true);
        const json j = json::parse(io::to_json(net).dump());
        EXPECT_EQ(io::from_json(j).net, net);
    }
}

TEST(Suite, TriangleAllPasses) {
    const auto rep = suite::run_suite(fixtures::triangle(), std::nullopt, "all", 7);
    EXPECT_TRUE(rep.passed());
    for (const auto& c : rep.checks) {
        EXPECT_TRUE(c.passed) << c.suite << "/" << c.name << " residual " << c.residual;
        if (!c.skipped) {
            EXPECT_FALSE(c.anchor.empty()) << c.name;
        }
    }
}

TEST(Suite, EveryFixturePassesEveryBattery) {
    for (const auto& fx : fixtures::all()) {
        const auto rep = suite::run_suite(fx.net, fx.boundary, "all", 3);
        for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << fx.name << " " << c.suite << "/" << c.name << " " << c.residual;
    }
}

TEST(Suite, AsymmetricInputFailsSymmetry) {
    suite::RawNetwork raw = suite::raw(fixtures::triangle());
    raw.W(0, 1) += 0.5;
    const auto rep = suite::run_suite(raw, "core", 1);
    EXPECT_FALSE(rep.passed());
    ASSERT_FALSE(rep.checks.empty());
    EXPECT_EQ(rep.checks.front().name, "symmetry");
    EXPECT_FALSE(rep.checks.front().passed);
    EXPECT_DOUBLE_EQ(rep.checks.front().residual, 0.5);
}

TEST(Suite, PathGreenReportsMatrix) {
    const auto rep = suite::run_suite(fixtures::path3(), StateSet{2}, "green", 1);
    EXPECT_TRUE(rep.passed());
    const auto G = rep.values.at("green").at("G");
    EXPECT_EQ(G, json::parse("[[2.0,2.0],[1.0,2.0]]"));
}

TEST(Suite, DeterministicUpToTiming) {
    const auto a = suite::run_suite(fixtures::weighted6(), StateSet{5}, "all", 9).to_json(false);
    const auto b = suite::run_suite(fixtures::weighted6(), StateSet{5}, "all", 9).to_json(false);
    EXPECT_EQ(a.dump(), b.dump());
}

TEST(Suite, UnknownSuite) {
    EXPECT_THROW_KIND(suite::run_suite(fixtures::triangle(), std::nullopt, "bogus", 1), ErrorKind::ParseError);
}

}  // namespace
}  // namespace mlap::test
