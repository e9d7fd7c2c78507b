#pragma once

// Network files.
//
// JSON, schema "mlap-net/1":
//   {"schema": "mlap-net/1",
//    "states":   [{"id": str, "mu": float}, ...],
//    "edges":    [{"i": str, "j": str, "w": float}, ...],   each undirected pair once, i == j for diagonal atoms
//    "boundary": [str, ...]}                                 optional
// A missing "schema" key is read as mlap-net/1.
//
// CSV: an edge file with header `i,j,w` and a sidecar node file with header
// `id,mu`. States are ordered as in the sidecar.

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlap/boundary.hpp"
#include "mlap/fixtures.hpp"
#include "mlap/network.hpp"

namespace mlap::io {

using json = nlohmann::json;

inline constexpr const char* kSchema = "mlap-net/1";

struct NetworkFile {
    Network net;
    std::optional<StateSet> boundary;
};

/// FNV-1a over ids, mu bits and W bits. Stable across runs and platforms with
/// IEEE doubles.
inline std::string checksum(const Network& net) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t k = 0; k < len; ++k) {
            h ^= p[k];
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& s : net.states()) {
        feed(s.data(), s.size());
        const char sep = '\0';
        feed(&sep, 1);
    }
    for (Index i = 0; i < net.size(); ++i) feed(&net.mu()(i), sizeof(double));
    for (Index i = 0; i < net.size(); ++i)
        for (Index j = 0; j < net.size(); ++j) feed(&net.W()(i, j), sizeof(double));
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

inline json to_json(const Network& net, const std::optional<StateSet>& boundary = std::nullopt) {
    json j;
    j["schema"] = kSchema;
    j["states"] = json::array();
    for (Index i = 0; i < net.size(); ++i)
        j["states"].push_back({{"id", net.states()[static_cast<std::size_t>(i)]}, {"mu", net.mu()(i)}});
    j["edges"] = json::array();
    for (Index i = 0; i < net.size(); ++i)
        for (Index k = i; k < net.size(); ++k)
            if (net.W()(i, k) != 0.0)
                j["edges"].push_back({{"i", net.states()[static_cast<std::size_t>(i)]},
                                      {"j", net.states()[static_cast<std::size_t>(k)]},
                                      {"w", net.W()(i, k)}});
    if (boundary) {
        j["boundary"] = json::array();
        for (Index b : *boundary) j["boundary"].push_back(net.states()[static_cast<std::size_t>(b)]);
    }
    return j;
}

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& msg) { throw Error(ErrorKind::ParseError, msg); }

/// Assembles W from undirected edges, rejecting negatives and repeats.
struct EdgeAccumulator {
    const std::map<std::string, Index>& index;
    Matrix W;
    std::set<std::pair<Index, Index>> seen;

    explicit EdgeAccumulator(const std::map<std::string, Index>& idx)
        : index(idx), W(Matrix::Zero(static_cast<Index>(idx.size()), static_cast<Index>(idx.size()))) {}

    void add(const std::string& a, const std::string& b, double w) {
        const auto ia = index.find(a);
        const auto ib = index.find(b);
        if (ia == index.end() || ib == index.end()) parse_fail("edge references unknown state '" + (ia == index.end() ? a : b) + "'");
        if (!std::isfinite(w)) parse_fail("NonFinite weight on edge " + a + "-" + b);
        if (w < 0.0) parse_fail("NegativeWeight on edge " + a + "-" + b);
        const auto key = std::minmax(ia->second, ib->second);
        if (!seen.insert(key).second) parse_fail("DuplicateEdge " + a + "-" + b);
        W(ia->second, ib->second) = w;
        W(ib->second, ia->second) = w;
    }
};

inline StateSet resolve_ids(const std::map<std::string, Index>& index, const std::vector<std::string>& ids) {
    StateSet out;
    for (const auto& id : ids) {
        const auto it = index.find(id);
        if (it == index.end()) parse_fail("unknown state '" + id + "' in boundary");
        out.push_back(it->second);
    }
    return normalized(out);
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        out.push_back(cell);
    }
    return out;
}

inline double parse_double(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) parse_fail("bad number '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        parse_fail("bad number '" + s + "'");
    }
}

}  // namespace detail

inline NetworkFile from_json(const json& j) {
    if (!j.is_object()) detail::parse_fail("top level must be an object");
    if (j.contains("schema")) {
        if (!j["schema"].is_string() || j["schema"].get<std::string>() != kSchema) {
            throw Error(ErrorKind::SchemaVersionError, "expected schema " + std::string(kSchema));
        }
    }
    if (!j.contains("states") || !j["states"].is_array()) detail::parse_fail("missing 'states' array");
    if (!j.contains("edges") || !j["edges"].is_array()) detail::parse_fail("missing 'edges' array");

    std::vector<std::string> ids;
    std::map<std::string, Index> index;
    Vector mu(static_cast<Index>(j["states"].size()));
    try {
        for (const auto& s : j["states"]) {
            const auto id = s.at("id").get<std::string>();
            if (!index.emplace(id, static_cast<Index>(ids.size())).second) detail::parse_fail("duplicate state '" + id + "'");
            mu(static_cast<Index>(ids.size())) = s.at("mu").get<double>();
            ids.push_back(id);
        }
        detail::EdgeAccumulator acc(index);
        for (const auto& e : j["edges"]) acc.add(e.at("i").get<std::string>(), e.at("j").get<std::string>(), e.at("w").get<double>());
        std::optional<StateSet> boundary;
        if (j.contains("boundary")) boundary = detail::resolve_ids(index, j["boundary"].get<std::vector<std::string>>());
        return {build_network(std::move(ids), std::move(mu), std::move(acc.W)), std::move(boundary)};
    } catch (const json::exception& ex) {
        detail::parse_fail(ex.what());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IOError, "cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IOError, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::IOError, "write failed for " + path.string());
}

inline NetworkFile load_network_csv(const std::filesystem::path& edges, const std::filesystem::path& nodes) {
    std::vector<std::string> ids;
    std::map<std::string, Index> index;
    std::vector<double> masses;
    {
        std::istringstream in(read_file(nodes));
        std::string line;
        if (!std::getline(in, line) || detail::split_csv(line) != std::vector<std::string>{"id", "mu"}) {
            detail::parse_fail("node file must start with header 'id,mu'");
        }
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \r") == std::string::npos) continue;
            const auto cells = detail::split_csv(line);
            if (cells.size() != 2) detail::parse_fail("node row needs 2 fields: '" + line + "'");
            if (!index.emplace(cells[0], static_cast<Index>(ids.size())).second) detail::parse_fail("duplicate state '" + cells[0] + "'");
            ids.push_back(cells[0]);
            masses.push_back(detail::parse_double(cells[1]));
        }
    }
    detail::EdgeAccumulator acc(index);
    {
        std::istringstream in(read_file(edges));
        std::string line;
        if (!std::getline(in, line) || detail::split_csv(line) != std::vector<std::string>{"i", "j", "w"}) {
            detail::parse_fail("edge file must start with header 'i,j,w'");
        }
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \r") == std::string::npos) continue;
            const auto cells = detail::split_csv(line);
            if (cells.size() != 3) detail::parse_fail("edge row needs 3 fields: '" + line + "'");
            acc.add(cells[0], cells[1], detail::parse_double(cells[2]));
        }
    }
    Vector mu = Eigen::Map<Vector>(masses.data(), static_cast<Index>(masses.size()));
    return {build_network(std::move(ids), std::move(mu), std::move(acc.W)), std::nullopt};
}

/// `foo.csv` -> `foo.nodes.csv`.
inline std::filesystem::path default_sidecar(const std::filesystem::path& edges) {
    auto p = edges;
    p.replace_extension();
    p += ".nodes.csv";
    return p;
}

/// Loads JSON (any extension other than .csv) or a CSV pair.
inline NetworkFile load_network(const std::filesystem::path& path,
                                const std::optional<std::filesystem::path>& nodes = std::nullopt) {
    if (path.extension() == ".csv") return load_network_csv(path, nodes.value_or(default_sidecar(path)));
    const std::string text = read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& ex) {
        detail::parse_fail(ex.what());
    }
    return from_json(j);
}

inline void save_network(const std::filesystem::path& path, const Network& net,
                         const std::optional<StateSet>& boundary = std::nullopt) {
    write_file(path, to_json(net, boundary).dump(2) + "\n");
}

inline void save_network_csv(const std::filesystem::path& edges, const Network& net) {
    std::ostringstream e;
    e.precision(17);
    e << "i,j,w\n";
    for (Index i = 0; i < net.size(); ++i)
        for (Index k = i; k < net.size(); ++k)
            if (net.W()(i, k) != 0.0)
                e << net.states()[static_cast<std::size_t>(i)] << ',' << net.states()[static_cast<std::size_t>(k)] << ','
                  << net.W()(i, k) << '\n';
    std::ostringstream v;
    v.precision(17);
    v << "id,mu\n";
    for (Index i = 0; i < net.size(); ++i) v << net.states()[static_cast<std::size_t>(i)] << ',' << net.mu()(i) << '\n';
    write_file(edges, e.str());
    write_file(default_sidecar(edges), v.str());
}

/// Writes every canonical fixture as <dir>/<name>.json; returns the paths.
inline std::vector<std::filesystem::path> emit_fixtures(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::IOError, "cannot create " + dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> out;
    for (const auto& fx : fixtures::canonical()) {
        auto p = dir / (fx.name + ".json");
        save_network(p, fx.net, fx.boundary);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace mlap::io
