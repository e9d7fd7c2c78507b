// mlap: command-line front end for the mlap library.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mlap/mlap.hpp"

namespace {

using json = nlohmann::json;
using mlap::Error;
using mlap::ErrorKind;
using mlap::Index;
using mlap::Matrix;
using mlap::StateSet;
using mlap::Vector;

enum Exit : int { kOk = 0, kValidation = 1, kIdentity = 2, kIO = 3 };

struct Globals {
    std::string net_path;
    std::string nodes_path;
    std::string fixture;
    std::uint64_t seed = 0;
    std::string out;
    double tol = 1e-10;
    std::string format = "json";
    std::string boundary;
};

json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        std::vector<double> r(static_cast<std::size_t>(m.cols()));
        for (Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
        rows.push_back(r);
    }
    return rows;
}

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_cell(const json& v) {
    if (v.is_number_float()) return number(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

bool is_matrix(const json& v) { return v.is_array() && !v.empty() && v.front().is_array(); }

/// Flattens a result object into `key,value...` rows; matrices become one row per line.
std::string to_csv(const json& j) {
    std::ostringstream os;
    for (const auto& [key, value] : j.items()) {
        if (is_matrix(value)) {
            for (std::size_t i = 0; i < value.size(); ++i) {
                os << key << '[' << i << ']';
                for (const auto& x : value[i]) os << ',' << csv_cell(x);
                os << '\n';
            }
        } else if (value.is_array()) {
            os << key;
            for (const auto& x : value) os << ',' << csv_cell(x);
            os << '\n';
        } else if (value.is_object()) {
            for (const auto& [k2, v2] : value.items()) os << key << '.' << k2 << ',' << csv_cell(v2) << '\n';
        } else {
            os << key << ',' << csv_cell(value) << '\n';
        }
    }
    return os.str();
}

void emit(const Globals& g, const json& result) {
    const std::string text = g.format == "csv" ? to_csv(result) : result.dump(2) + "\n";
    if (g.out.empty()) {
        std::cout << text;
    } else {
        mlap::io::write_file(g.out, text);
    }
}

mlap::io::NetworkFile load(const Globals& g) {
    if (!g.fixture.empty()) {
        for (auto& fx : mlap::fixtures::all())
            if (fx.name == g.fixture) return {fx.net, fx.boundary};
        throw Error(ErrorKind::ParseError, "unknown fixture '" + g.fixture + "'");
    }
    if (g.net_path.empty()) throw Error(ErrorKind::ParseError, "--net or --fixture is required");
    std::optional<std::filesystem::path> nodes;
    if (!g.nodes_path.empty()) nodes = g.nodes_path;
    return mlap::io::load_network(g.net_path, nodes);
}

StateSet parse_ids(const mlap::Network& net, const std::string& list) {
    StateSet out;
    std::istringstream is(list);
    std::string id;
    while (std::getline(is, id, ',')) {
        if (id.empty()) continue;
        const auto idx = net.find(id);
        if (!idx) throw Error(ErrorKind::IndexOutOfRange, "unknown state '" + id + "'");
        out.push_back(*idx);
    }
    return mlap::normalized(out);
}

json id_list(const mlap::Network& net, const StateSet& s) {
    json out = json::array();
    for (Index i : s) out.push_back(net.states()[static_cast<std::size_t>(i)]);
    return out;
}

/// Boundary from --boundary if given, otherwise from the network file.
std::optional<mlap::BoundaryConfig> boundary_of(const Globals& g, const mlap::io::NetworkFile& nf) {
    if (!g.boundary.empty()) return mlap::make_boundary(nf.net, parse_ids(nf.net, g.boundary));
    if (nf.boundary) return mlap::make_boundary(nf.net, *nf.boundary);
    return std::nullopt;
}

/// A function file: a JSON array in state order or an object keyed by state id
/// (missing ids are 0).
Vector load_function(const mlap::Network& net, const std::string& path) {
    json j;
    try {
        j = json::parse(mlap::io::read_file(path));
    } catch (const json::parse_error& ex) {
        throw Error(ErrorKind::ParseError, ex.what());
    }
    Vector f = Vector::Zero(net.size());
    try {
        if (j.is_object() && j.contains("values")) j = j["values"];
        if (j.is_array()) {
            mlap::check_dim(net.size(), static_cast<Index>(j.size()), "function");
            for (std::size_t i = 0; i < j.size(); ++i) f(static_cast<Index>(i)) = j[i].get<double>();
        } else if (j.is_object()) {
            for (const auto& [id, v] : j.items()) {
                const auto idx = net.find(id);
                if (!idx) throw Error(ErrorKind::IndexOutOfRange, "unknown state '" + id + "'");
                f(*idx) = v.get<double>();
            }
        } else {
            throw Error(ErrorKind::ParseError, "function file must be an array or an object");
        }
    } catch (const json::exception& ex) {
        throw Error(ErrorKind::ParseError, ex.what());
    }
    if (!f.allFinite()) throw Error(ErrorKind::NonFinite, "function values must be finite");
    return f;
}

/// A set family file: {"name": [ids], ...} or [[ids], ...].
mlap::SetFamily load_family(const mlap::Network& net, const std::string& path) {
    json j;
    try {
        j = json::parse(mlap::io::read_file(path));
    } catch (const json::parse_error& ex) {
        throw Error(ErrorKind::ParseError, ex.what());
    }
    mlap::SetFamily fam;
    auto add = [&](const std::string& name, const json& ids) {
        StateSet s;
        for (const auto& id : ids) {
            const auto idx = net.find(id.get<std::string>());
            if (!idx) throw Error(ErrorKind::IndexOutOfRange, "unknown state '" + id.get<std::string>() + "'");
            s.push_back(*idx);
        }
        fam.sets.push_back(mlap::normalized(s));
        fam.names.push_back(name);
    };
    try {
        if (j.is_object() && j.contains("sets")) j = j["sets"];
        if (j.is_object()) {
            for (const auto& [name, ids] : j.items()) add(name, ids);
        } else if (j.is_array()) {
            for (std::size_t a = 0; a < j.size(); ++a) add("A" + std::to_string(a), j[a]);
        } else {
            throw Error(ErrorKind::ParseError, "sets file must be an array or an object");
        }
    } catch (const json::exception& ex) {
        throw Error(ErrorKind::ParseError, ex.what());
    }
    return fam;
}

json header(const std::string& command, const mlap::Network& net) {
    return {{"command", command}, {"checksum", mlap::io::checksum(net)}, {"states", net.states()}};
}

int cmd_inspect(const Globals& g) {
    const auto nf = load(g);
    const auto& net = nf.net;
    const auto d = mlap::derive(net);
    const auto irr = mlap::irreducibility(net);
    json out = header("inspect", net);
    out["n"] = net.size();
    out["mu"] = to_json(net.mu());
    out["c"] = to_json(d.c);
    out["nu"] = to_json(d.nu);
    out["irreducible"] = irr.irreducible;
    json comps = json::array();
    for (const auto& c : irr.components) comps.push_back(id_list(net, c));
    out["components"] = comps;
    out["harmonic_dimension"] = irr.components.size() - 1;
    if (const auto b = boundary_of(g, nf)) out["boundary"] = id_list(net, b->boundary);
    emit(g, out);
    return kOk;
}

int cmd_operators(const Globals& g) {
    const auto nf = load(g);
    const auto ops = mlap::operators(nf.net);
    json out = header("operators", nf.net);
    out["c"] = to_json(ops.c);
    out["nu"] = to_json(ops.nu);
    out["R"] = to_json(ops.R);
    out["P"] = to_json(ops.P);
    out["Delta"] = to_json(ops.Delta);
    out["spectrum_P"] = mlap::spectrum_P(nf.net);
    emit(g, out);
    return kOk;
}

int cmd_energy(const Globals& g, const std::string& f_path, const std::string& g_path) {
    const auto nf = load(g);
    const auto& net = nf.net;
    const Vector f = load_function(net, f_path);
    const double e = mlap::energy_norm_sq(net, f);
    const double weak = f.cwiseProduct(net.mu()).dot(mlap::apply_Delta(net, f));
    const auto split = mlap::dissipation_norm(net, f);
    const auto bounds = mlap::norm_bounds_report(net, f);
    const double scale = std::max({std::abs(e), std::abs(weak), std::abs(split.total), 1e-300});
    const double residual = std::max(std::abs(e - weak), std::abs(e - split.total)) / scale;
    json out = header("energy", net);
    out["energy"] = e;
    out["weak_form"] = weak;
    out["variance_term"] = split.variance_term;
    out["dissipation_term"] = split.dissipation_term;
    out["dissipation_total"] = split.total;
    out["three_way_residual"] = residual;
    out["norm_bounds"] = {{"c_inv_delta_nu", bounds.c_inv_delta_nu},
                          {"delta_c_inv_mu", bounds.delta_c_inv_mu},
                          {"f_minus_Pf_nu", bounds.f_minus_Pf_nu},
                          {"holds", bounds.holds()}};
    if (!g_path.empty()) out["inner"] = mlap::energy_inner(net, f, load_function(net, g_path));
    out["passed"] = residual <= g.tol && bounds.holds();
    emit(g, out);
    return out["passed"].get<bool>() ? kOk : kIdentity;
}

int cmd_dipole(const Globals& g, const std::string& kind, const std::string& a, const std::string& b) {
    const auto nf = load(g);
    const auto& net = nf.net;
    const auto bc = boundary_of(g, nf);
    if (kind != "mu" && kind != "nu") throw Error(ErrorKind::ParseError, "--kind must be mu or nu");
    const auto sol = mlap::dipole(net, kind == "mu" ? mlap::DipoleKind::Mu : mlap::DipoleKind::Nu, parse_ids(net, a),
                                  parse_ids(net, b), bc);
    json out = header("dipole", net);
    out["kind"] = kind;
    out["A"] = id_list(net, sol.A);
    out["B"] = id_list(net, sol.B);
    out["v"] = to_json(sol.v.values);
    out["energy"] = mlap::energy_norm_sq(net, sol.v.values);
    out["residual"] = sol.residual;
    out["passed"] = sol.residual <= std::max(g.tol, 1e-9);
    emit(g, out);
    return out["passed"].get<bool>() ? kOk : kIdentity;
}

int cmd_decompose(const Globals& g, const std::string& f_path) {
    const auto nf = load(g);
    const auto& net = nf.net;
    const Vector f = load_function(net, f_path);
    const auto split = mlap::royden_project(net, f);
    const double cross = mlap::energy_inner(net, split.d.values, split.h.values);
    json out = header("decompose", net);
    out["d"] = to_json(split.d.values);
    out["h"] = to_json(split.h.values);
    out["energy_f"] = mlap::energy_norm_sq(net, f);
    out["energy_d"] = mlap::energy_norm_sq(net, split.d.values);
    out["energy_h"] = mlap::energy_norm_sq(net, split.h.values);
    out["cross_term"] = cross;
    out["passed"] = std::abs(cross) <= g.tol;
    emit(g, out);
    return out["passed"].get<bool>() ? kOk : kIdentity;
}

int cmd_sample(const Globals& g, int steps, Index paths, const std::string& start, const std::string& dump,
               unsigned threads) {
    const auto nf = load(g);
    const auto& net = nf.net;
    mlap::StartLaw law = mlap::StartLaw::Nu;
    Index start_state = 0;
    if (start.rfind("state:", 0) == 0) {
        const auto idx = net.find(start.substr(6));
        if (!idx) throw Error(ErrorKind::IndexOutOfRange, "unknown start state '" + start.substr(6) + "'");
        law = mlap::StartLaw::Fixed;
        start_state = *idx;
    } else if (start != "nu") {
        throw Error(ErrorKind::ParseError, "--start must be nu or state:<id>");
    }
    const auto batch = mlap::sample_paths(net, g.seed, steps, paths, law, start_state, threads);
    const Index n = net.size();
    Vector visits = Vector::Zero(n);
    for (Index p = 0; p < batch.count; ++p)
        for (int t = 0; t <= batch.steps; ++t) visits(batch.at(p, t)) += 1.0;
    visits /= visits.sum();
    const Matrix emp = mlap::empirical_transitions(batch, n);
    const Matrix P = mlap::derive(net).P;
    double dev = 0.0;
    for (Index i = 0; i < n; ++i)
        if (emp.row(i).sum() > 0.0) dev = std::max(dev, (emp.row(i) - P.row(i)).cwiseAbs().maxCoeff());
    json out = header("sample", net);
    out["seed"] = g.seed;
    out["steps"] = steps;
    out["paths"] = paths;
    out["start"] = start;
    out["visit_frequency"] = to_json(visits);
    const Vector nu = net.W().rowwise().sum();
    out["stationary_frequency"] = to_json(Vector(nu / nu.sum()));
    out["max_transition_deviation"] = dev;
    if (!dump.empty()) {
        std::ostringstream os;
        for (Index p = 0; p < batch.count; ++p) {
            for (int t = 0; t <= batch.steps; ++t)
                os << (t ? "," : "") << net.states()[static_cast<std::size_t>(batch.at(p, t))];
            os << '\n';
        }
        mlap::io::write_file(dump, os.str());
        out["dump"] = dump;
    }
    emit(g, out);
    return kOk;
}

int cmd_green(const Globals& g) {
    const auto nf = load(g);
    const auto& net = nf.net;
    const auto bc = boundary_of(g, nf);
    if (!bc) throw Error(ErrorKind::MissingBoundary, "green needs --boundary or a boundary in the network file");
    const auto kc = mlap::killed_restriction(net, *bc);
    const Matrix G = mlap::green_operator(net, *bc);
    const Matrix Gn = mlap::green_operator(net, *bc, mlap::GreenMethod::Neumann);
    const double gap = G.size() ? (G - Gn).cwiseAbs().maxCoeff() : 0.0;
    json out = header("green", net);
    out["boundary"] = id_list(net, bc->boundary);
    out["interior"] = id_list(net, bc->interior);
    out["spectral_radius"] = kc.spectral_radius;
    out["G"] = to_json(G);
    out["neumann_gap"] = gap;
    out["passed"] = gap <= g.tol;
    emit(g, out);
    return out["passed"].get<bool>() ? kOk : kIdentity;
}

int cmd_kernel(const Globals& g, const std::string& kind, const std::string& sets) {
    const auto nf = load(g);
    const auto& net = nf.net;
    mlap::KernelId id{};
    if (kind == "K") id = mlap::KernelId::K;
    else if (kind == "krho") id = mlap::KernelId::k_rho;
    else if (kind == "Knu") id = mlap::KernelId::K_nu;
    else if (kind == "Nrho") id = mlap::KernelId::N_rho;
    else throw Error(ErrorKind::ParseError, "--kind must be K, krho, Knu or Nrho");
    const auto fam = load_family(net, sets);
    const auto gram = mlap::kernel_gram(net, id, fam, boundary_of(g, nf));
    json family = json::object();
    for (std::size_t a = 0; a < fam.size(); ++a) family[fam.names[a]] = id_list(net, fam.sets[a]);
    json out = header("kernel", net);
    out["kernel_id"] = mlap::to_string(gram.kernel_id);
    out["family"] = family;
    out["gram"] = to_json(gram.gram);
    emit(g, out);
    return kOk;
}

int cmd_learn(const Globals& g, double gamma, const std::string& target) {
    const auto nf = load(g);
    const auto& net = nf.net;
    const mlap::LearnProblem p{net, load_function(net, target), gamma};
    const Vector h = mlap::solve_regularized(p);
    const auto q = mlap::objective(p, h);
    const double decrease = mlap::optimality_check(p, h, 20, 1e-4, g.seed);
    json out = header("learn", net);
    out["gamma"] = gamma;
    out["h"] = to_json(h);
    out["Q"] = q.total();
    out["fit"] = q.fit;
    out["penalty"] = q.penalty;
    out["max_decrease"] = decrease;
    out["passed"] = decrease <= 1e-10 * (1.0 + q.total());
    emit(g, out);
    return out["passed"].get<bool>() ? kOk : kIdentity;
}

int cmd_suite(const Globals& g, const std::string& suite_id, bool no_timing) {
    mlap::suite::RawNetwork raw;
    if (g.fixture.empty() && !g.net_path.empty() && std::filesystem::path(g.net_path).extension() != ".csv") {
        // Read the raw arrays so an asymmetric W is reported by the battery, not rejected on load.
        const auto j = json::parse(mlap::io::read_file(g.net_path), nullptr, false);
        if (j.is_discarded()) throw Error(ErrorKind::ParseError, "malformed JSON in " + g.net_path);
        if (j.contains("W")) {
            raw.states = j.value("ids", std::vector<std::string>{});
            const auto mu = j.at("mu").get<std::vector<double>>();
            const auto W = j.at("W").get<std::vector<std::vector<double>>>();
            raw.mu = Eigen::Map<const Vector>(mu.data(), static_cast<Index>(mu.size()));
            raw.W = Matrix::Zero(static_cast<Index>(W.size()), W.empty() ? 0 : static_cast<Index>(W[0].size()));
            for (std::size_t i = 0; i < W.size(); ++i) {
                if (W[i].size() != W[0].size()) throw Error(ErrorKind::DimensionMismatch, "W rows differ in length");
                for (std::size_t k = 0; k < W[i].size(); ++k) raw.W(static_cast<Index>(i), static_cast<Index>(k)) = W[i][k];
            }
            if (raw.states.empty()) raw.states = mlap::default_state_ids(raw.mu.size());
        }
    }
    if (raw.W.size() == 0) {
        const auto nf = load(g);
        raw = mlap::suite::raw(nf.net, nf.boundary);
    }
    if (!g.boundary.empty()) {
        const auto net = mlap::build_network(raw.states, raw.mu, raw.W);
        raw.boundary = parse_ids(net, g.boundary);
    }
    auto rep = mlap::suite::run_suite(raw, suite_id, g.seed);
    rep.command = "suite " + suite_id + " --seed " + std::to_string(g.seed);
    emit(g, rep.to_json(!no_timing));
    return rep.passed() ? kOk : kIdentity;
}

int cmd_fixtures(const Globals& g) {
    const std::string dir = g.out.empty() ? "fixtures" : g.out;
    const auto files = mlap::io::emit_fixtures(dir);
    json out = {{"command", "fixtures"}, {"files", json::array()}};
    for (const auto& f : files) out["files"].push_back(f.string());
    std::cout << out.dump(2) << "\n";
    return kOk;
}

int exit_code(ErrorKind kind) { return kind == ErrorKind::IOError ? kIO : kValidation; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph-Laplacian calculus on finite measure spaces"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--net", g.net_path, "network file (.json, or .csv edge list)");
    app.add_option("--nodes", g.nodes_path, "node sidecar for a CSV edge list");
    app.add_option("--fixture", g.fixture, "use a built-in fixture instead of --net");
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--out", g.out, "output file (directory for `fixtures`)");
    app.add_option("--tol", g.tol, "identity tolerance")->capture_default_str();
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    app.add_option("--boundary", g.boundary, "comma-separated boundary state ids");

    auto* inspect = app.add_subcommand("inspect", "summary of a network");
    auto* ops = app.add_subcommand("operators", "c, nu, R, P, Delta and the spectrum of P");

    std::string f_path;
    std::string g_path;
    auto* energy = app.add_subcommand("energy", "energy norm, three-way identity and norm bounds of f");
    energy->add_option("--f", f_path, "function file")->required();
    energy->add_option("--g", g_path, "second function file for <f, g>_E");

    std::string dip_kind = "mu";
    std::string set_a;
    std::string set_b;
    auto* dip = app.add_subcommand("dipole", "dipole v with Delta v = chi_A - chi_B (weighted)");
    dip->add_option("--kind", dip_kind, "mu or nu")->capture_default_str();
    dip->add_option("--A", set_a, "comma-separated ids")->required();
    dip->add_option("--B", set_b, "comma-separated ids");

    auto* decompose = app.add_subcommand("decompose", "split f into finite and harmonic parts");
    decompose->add_option("--f", f_path, "function file")->required();

    int steps = 10;
    Index paths = 1000;
    std::string start = "nu";
    std::string dump;
    unsigned threads = 1;
    auto* sample = app.add_subcommand("sample", "sample random-walk paths");
    sample->add_option("--steps", steps)->capture_default_str();
    sample->add_option("--paths", paths)->capture_default_str();
    sample->add_option("--start", start, "nu or state:<id>")->capture_default_str();
    sample->add_option("--dump", dump, "write paths as CSV, one path per row");
    sample->add_option("--threads", threads)->capture_default_str();

    auto* green = app.add_subcommand("green", "Green operator of the chain killed at the boundary");

    std::string kernel_kind = "krho";
    std::string sets_path;
    auto* kernel = app.add_subcommand("kernel", "Gram matrix of a kernel over a set family");
    kernel->add_option("--kind", kernel_kind, "K, krho, Knu or Nrho")->capture_default_str();
    kernel->add_option("--sets", sets_path, "set family file")->required();

    double gamma = 1.0;
    std::string target;
    auto* learn = app.add_subcommand("learn", "energy-regularized least squares");
    learn->add_option("--gamma", gamma)->capture_default_str();
    learn->add_option("--target", target, "function file for psi")->required();

    std::string suite_id = "all";
    bool no_timing = false;
    auto* suite = app.add_subcommand("suite", "run an identity battery");
    suite->add_option("--suite", suite_id)->check(CLI::IsMember(mlap::suite::suite_ids()))->capture_default_str();
    suite->add_flag("--no-timing", no_timing, "omit timing so reports compare byte for byte");

    auto* fixtures = app.add_subcommand("fixtures", "write the canonical fixtures to --out (a directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        if (*inspect) return cmd_inspect(g);
        if (*ops) return cmd_operators(g);
        if (*energy) return cmd_energy(g, f_path, g_path);
        if (*dip) return cmd_dipole(g, dip_kind, set_a, set_b);
        if (*decompose) return cmd_decompose(g, f_path);
        if (*sample) return cmd_sample(g, steps, paths, start, dump, threads);
        if (*green) return cmd_green(g);
        if (*kernel) return cmd_kernel(g, kernel_kind, sets_path);
        if (*learn) return cmd_learn(g, gamma, target);
        if (*suite) return cmd_suite(g, suite_id, no_timing);
        if (*fixtures) return cmd_fixtures(g);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: ParseError: " << e.what() << "\n";
        return kValidation;
    }
    return kValidation;
}
