#pragma once

// Identity batteries run by `mlap suite`. Each check records the identity it
// verifies, the measured residual and the tolerance it was held to.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlap/green.hpp"
#include "mlap/io.hpp"
#include "mlap/learn.hpp"
#include "mlap/paths.hpp"

namespace mlap::suite {

using json = nlohmann::json;

struct Check {
    std::string suite;
    std::string name;
    std::string anchor;  // the identity, written out
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    bool skipped = false;
    std::string note;
};

struct Report {
    std::string command;
    std::string checksum;
    std::vector<Check> checks;
    json values = json::object();
    double elapsed_ms = 0.0;

    [[nodiscard]] bool passed() const {
        for (const auto& c : checks)
            if (!c.skipped && !c.passed) return false;
        return true;
    }

    [[nodiscard]] json to_json(bool with_timing = true) const {
        json j;
        j["command"] = command;
        j["checksum"] = checksum;
        j["passed"] = passed();
        j["checks"] = json::array();
        for (const auto& c : checks) {
            j["checks"].push_back({{"suite", c.suite},
                                   {"name", c.name},
                                   {"anchor", c.anchor},
                                   {"residual", c.residual},
                                   {"tolerance", c.tolerance},
                                   {"passed", c.passed},
                                   {"skipped", c.skipped},
                                   {"note", c.note}});
        }
        j["values"] = values;
        if (with_timing) j["elapsed_ms"] = elapsed_ms;
        return j;
    }
};

/// Unvalidated input, so the core battery can report why validation fails.
struct RawNetwork {
    std::vector<std::string> states;
    Vector mu;
    Matrix W;
    std::optional<StateSet> boundary;
};

inline RawNetwork raw(const Network& net, std::optional<StateSet> boundary = std::nullopt) {
    return {net.states(), net.mu(), net.W(), std::move(boundary)};
}

inline const std::vector<std::string>& suite_ids() {
    static const std::vector<std::string> ids{"core", "operators", "energy", "dissipation", "green", "rkhs", "learn", "all"};
    return ids;
}

namespace detail {

/// Uniform [-1, 1] vectors from a counter stream.
class VectorSource {
public:
    VectorSource(std::uint64_t seed, std::uint64_t stream) : rng_(seed), stream_(stream) {}

    Vector next(Index n) {
        Vector v(n);
        for (Index i = 0; i < n; ++i) v(i) = 2.0 * rng_.uniform(stream_, counter_++) - 1.0;
        return v;
    }

    StateSet subset(Index n) {
        StateSet s;
        for (Index i = 0; i < n; ++i)
            if (rng_.uniform(stream_, counter_++) < 0.5) s.push_back(i);
        return s;
    }

private:
    CounterRng rng_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

inline double rel_gap(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

class Battery {
public:
    Battery(Report& report, std::string suite) : report_(report), suite_(std::move(suite)) {}

    /// Passes iff residual <= tol.
    void expect_le(const std::string& name, const std::string& anchor, double residual, double tol) {
        report_.checks.push_back({suite_, name, anchor, residual, tol, residual <= tol, false, {}});
    }

    void expect_true(const std::string& name, const std::string& anchor, bool ok, const std::string& note = {}) {
        report_.checks.push_back({suite_, name, anchor, ok ? 0.0 : 1.0, 0.0, ok, false, note});
    }

    void skip(const std::string& name, const std::string& note) {
        report_.checks.push_back({suite_, name, "", 0.0, 0.0, true, true, note});
    }

private:
    Report& report_;
    std::string suite_;
};

/// Subsets to test exhaustively for n <= 10, otherwise a random sample.
inline std::vector<StateSet> test_subsets(Index n, VectorSource& src) {
    std::vector<StateSet> out;
    if (n <= 10) {
        for (unsigned long m = 0; m < (1UL << n); ++m) out.push_back(subset_from_mask(m, n));
    } else {
        for (int k = 0; k < 64; ++k) out.push_back(src.subset(n));
    }
    return out;
}

inline void run_core(const Network& net, Report& rep, Battery& b) {
    const Index n = net.size();
    const DerivedMeasures d = derive(net);
    b.expect_le("symmetry", "W = W^T", linalg::max_asymmetry(net.W()), 1e-12);
    b.expect_le("row_stochastic", "sum_j P[i][j] = 1", (d.P.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
    b.expect_le("nu_row_sums", "nu_i = sum_j W[i][j] = c_i mu_i",
                (d.nu - d.c.cwiseProduct(net.mu())).cwiseAbs().maxCoeff() / d.nu.cwiseAbs().maxCoeff(), 1e-12);
    const Matrix flow = d.nu.asDiagonal() * d.P;
    b.expect_le("detailed_balance", "nu_i P[i][j] = nu_j P[j][i]",
                linalg::max_asymmetry(flow) / flow.cwiseAbs().maxCoeff(), 1e-12);
    b.expect_le("stationary", "nu P = nu", (d.P.transpose() * d.nu - d.nu).cwiseAbs().maxCoeff() / d.nu.maxCoeff(), 1e-12);
    b.expect_le("P_selfadjoint", "D_nu^{1/2} P D_nu^{-1/2} symmetric",
                linalg::max_asymmetry(Matrix(d.nu.cwiseSqrt().asDiagonal() * d.P * d.nu.cwiseSqrt().cwiseInverse().asDiagonal())),
                1e-12);
    double worst = 0.0;
    for (int k = 0; k <= 6; ++k) {
        const Matrix Pk = markov_power(net, k);
        const Matrix flow_k = d.nu.asDiagonal() * Pk;  // rho_k on singletons
        worst = std::max(worst, linalg::max_asymmetry(flow_k) / std::max(1e-300, flow_k.cwiseAbs().maxCoeff()));
    }
    b.expect_le("rho_n_symmetric", "rho_n(A x B) = rho_n(B x A), n <= 6", worst, 1e-10);
    const auto irr = irreducibility(net);
    const auto harm = harmonic_basis(net);
    b.expect_true("harmonic_dimension", "dim Harm = #components - 1",
                  static_cast<Index>(harm.size()) == static_cast<Index>(irr.components.size()) - 1 &&
                      harmonic_dimension_numeric(net) == static_cast<Index>(harm.size()));
    b.expect_true("irreducible_iff_no_harmonic", "irreducible <=> Harm = {0}", irr.irreducible == harm.empty());
    rep.values["core"] = {{"n", n}, {"components", irr.components.size()}, {"irreducible", irr.irreducible},
                          {"c", std::vector<double>(d.c.data(), d.c.data() + n)},
                          {"nu", std::vector<double>(d.nu.data(), d.nu.data() + n)}};
}

inline void run_operators(const Network& net, Report& rep, Battery& b, VectorSource& src) {
    const Index n = net.size();
    const OperatorBundle ops = operators(net);
    b.expect_le("constants_harmonic", "Delta 1 = 0", apply_Delta(net, Vector::Ones(n)).cwiseAbs().maxCoeff(), 1e-12);
    double mass = 0.0;
    double pairing = 0.0;
    double iota = 0.0;
    double jres = 0.0;
    double transport = 0.0;
    double contraction = 0.0;
    for (int t = 0; t < 100; ++t) {
        const Vector f = src.next(n);
        const Vector g = src.next(n);
        mass = std::max(mass, std::abs(ops.mu.dot(apply_Delta(net, f))) / (1.0 + f.cwiseAbs().sum()));
        const double lhs = g.cwiseProduct(ops.mu).dot(apply_R(net, f));
        const double rhs = apply_R(net, g).cwiseProduct(ops.mu).dot(f);
        pairing = std::max(pairing, std::abs(lhs - rhs) / (1.0 + f.norm() * g.norm()));
        const auto io = iota_adjoint_residual(net, f, g);
        iota = std::max({iota, io.residual, io.embedding_slack < -1e-12 ? 1.0 : 0.0});
        jres = std::max(jres, j_adjoint_residual(net, f, g));
        const auto [a, c] = mass_transport_check(net, f, src.subset(n));
        transport = std::max(transport, rel_gap(a, c));
        const Vector Pf = ops.P * f;
        const double l2 = Pf.cwiseProduct(ops.nu).dot(Pf) - f.cwiseProduct(ops.nu).dot(f);
        const double l1 = Pf.cwiseAbs().dot(ops.nu) - f.cwiseAbs().dot(ops.nu);
        contraction = std::max({contraction, l2, l1});
    }
    b.expect_le("mu_mass_of_Delta", "sum_i mu_i (Delta f)_i = 0", mass, 1e-12);
    b.expect_le("R_symmetric_pairing", "<g, R f>_{L2(mu)} = <R g, f>_{L2(mu)}", pairing, 1e-12);
    b.expect_le("iota_adjoint", "<f, g>_E = <f, (I - P) g>_{L2(nu)}", iota, 1e-10);
    b.expect_le("J_adjoint", "<J phi, f>_E = <phi, Delta f>_{L2(mu)}", jres, 1e-10);
    b.expect_le("mass_transport", "int_A f dmu = int R(chi_A f / c) dmu", transport, 1e-10);
    b.expect_le("P_contraction", "|P f| <= |f| in L1(nu) and L2(nu)", std::max(0.0, contraction), 1e-12);
    b.expect_le("weak_form_symmetric", "diag(mu) Delta symmetric",
                linalg::max_asymmetry(Matrix(ops.mu.asDiagonal() * ops.Delta)), 1e-12);
    const auto spec = spectrum_P(net);
    double outside = 0.0;
    int ones = 0;
    for (double v : spec) {
        outside = std::max(outside, std::abs(v) - 1.0);
        if (std::abs(v - 1.0) <= 1e-9) ++ones;
    }
    b.expect_le("spectrum_in_unit_interval", "spec(P) in [-1, 1]", std::max(0.0, outside), 1e-9);
    b.expect_true("multiplicity_of_one", "mult(1) = #components",
                  ones == static_cast<int>(irreducibility(net).components.size()));
    rep.values["spectrum_P"] = spec;
}

inline void run_energy(const Network& net, const std::optional<BoundaryConfig>& boundary, Report& rep, Battery& b,
                       VectorSource& src) {
    const Index n = net.size();
    double three_way = 0.0;
    double bounds = 0.0;
    double royden = 0.0;
    double pyth = 0.0;
    for (int t = 0; t < 200; ++t) {
        const Vector f = src.next(n);
        const double e = energy_norm_sq(net, f);
        const double weak = f.cwiseProduct(net.mu()).dot(apply_Delta(net, f));
        const double diss = dissipation_norm(net, f).total;
        const double floor = 1e-12 * f.cwiseProduct(net.W().rowwise().sum()).dot(f);
        const double scale = std::max({floor, std::abs(e), std::abs(weak), std::abs(diss)});
        if (scale > 0.0) three_way = std::max({three_way, std::abs(e - weak) / scale, std::abs(e - diss) / scale});
        const auto nb = norm_bounds_report(net, f);
        bounds = std::max({bounds, -nb.slack_lower, -nb.slack_delta, -nb.slack_contraction});
        const auto split = royden_project(net, f);
        royden = std::max(royden, std::abs(energy_inner(net, split.d.values, split.h.values)));
        pyth = std::max(pyth, rel_gap(e, energy_norm_sq(net, split.d.values) + energy_norm_sq(net, split.h.values)));
    }
    b.expect_le("energy_three_way", "|f|_E^2 = sum f Delta f mu = (Var + Diss) / 2", three_way, 1e-10);
    b.expect_le("norm_bounds", "|f|_E^2 >= |c^-1 Delta f|^2_nu / 2, |Delta f|^2_{c^-1 mu} <= 2|f|_E^2", std::max(0.0, bounds), 1e-12);
    b.expect_le("royden_orthogonal", "<d, h>_E = 0", royden, 1e-10);
    b.expect_le("royden_pythagoras", "|f|^2 = |d|^2 + |h|^2", pyth, 1e-9);

    const Vector nu = net.W().rowwise().sum();
    double indicator_worst = 0.0;
    const auto subsets = test_subsets(n, src);
    for (const auto& A : subsets) {
        const Vector chiA = indicator(A, n);
        const double norm = energy_norm_sq(net, chiA);
        indicator_worst = std::max(indicator_worst, rel_gap(norm, rho(net, A, complement(A, n))));
    }
    for (int t = 0; t < 64; ++t) {
        const StateSet A = src.subset(n);
        const StateSet B = src.subset(n);
        const double lhs = energy_inner(net, indicator(A, n), indicator(B, n));
        StateSet both;
        std::set_intersection(A.begin(), A.end(), B.begin(), B.end(), std::back_inserter(both));
        const double rhs = measure(nu, both) - rho(net, A, B);
        indicator_worst = std::max(indicator_worst, rel_gap(lhs, rhs));
    }
    b.expect_le("indicator_geometry", "|chi_A|_E^2 = rho(A x A^c), <chi_A, chi_B>_E = nu(A∩B) - rho(A x B)",
                indicator_worst, 1e-12);
    SetFamily fam;
    for (int t = 0; t < 8; ++t) fam.sets.push_back(src.subset(n));
    const Matrix gram = indicator_gram(net, fam).gram;
    const double min_eig = linalg::symmetric_eigenvalues(gram).minCoeff();
    b.expect_le("indicator_gram_psd", "k_rho Gram PSD", std::max(0.0, -min_eig), 1e-9 * std::max(1.0, gram.trace()));

    // Dipole with its reproducing identity.
    std::optional<DipoleSolution> dip;
    if (boundary && !boundary->interior.empty()) {
        dip = dipole(net, DipoleKind::Nu, {boundary->interior.front()}, {}, boundary);
    } else {
        for (const auto& comp : irreducibility(net).components) {
            for (std::size_t a = 0; a < comp.size() && !dip; ++a)
                for (std::size_t c = a + 1; c < comp.size() && !dip; ++c)
                    if (net.mu()(comp[a]) == net.mu()(comp[c])) dip = dipole(net, DipoleKind::Mu, {comp[a]}, {comp[c]});
            if (dip) break;
        }
    }
    if (!dip) {
        b.skip("dipole", "no balanced pair of states and no boundary");
    } else {
        b.expect_le("dipole_residual", "Delta v = target", dip->residual, 1e-9);
        const Vector weight = dip->kind == DipoleKind::Mu ? net.mu() : nu;
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            Vector f = src.next(n);
            if (boundary)
                for (Index i : boundary->boundary) f(i) = 0.0;
            const double lhs = energy_inner(net, f, dip->v.values);
            const double rhs = (indicator(dip->A, n) - indicator(dip->B, n)).cwiseProduct(weight).dot(f);
            worst = std::max(worst, rel_gap(lhs, rhs));
        }
        b.expect_le("dipole_reproducing", "<f, v_AB>_E = int_A f - int_B f", worst, 1e-9);
        rep.values["dipole"] = {{"A", dip->A}, {"B", dip->B},
                                {"v", std::vector<double>(dip->v.values.data(), dip->v.values.data() + n)}};
    }
}

inline void run_dissipation(const Network& net, std::uint64_t seed, Report& rep, Battery& b, VectorSource& src) {
    const Index n = net.size();
    double orth = 0.0;
    double var_inv = 0.0;
    double cyl = 0.0;
    double rev = 0.0;
    for (int t = 0; t < 20; ++t) {
        const Vector g1 = src.next(n);
        const Vector g2 = src.next(n);
        const StateSet A = src.subset(n);
        const StateSet B = src.subset(n);
        for (int k = 0; k <= 4; ++k) {
            const auto o1 = orthogonality_residual(net, g1, g2, k);
            const auto o2 = increment_orthogonality(net, g1, k);
            orth = std::max({orth, std::abs(o1.residual) / o1.scale, std::abs(o2.residual) / o2.scale});
            const auto [v1, vn] = variance_invariance(net, g1, k + 1);
            var_inv = std::max(var_inv, rel_gap(v1, vn));
            std::vector<StateSet> sets(static_cast<std::size_t>(k) + 1, all_states(n));
            sets.front() = A;
            if (k == 0) {
                StateSet both;
                std::set_intersection(A.begin(), A.end(), B.begin(), B.end(), std::back_inserter(both));
                sets.front() = both;
            } else {
                sets.back() = B;
            }
            cyl = std::max(cyl, rel_gap(cylinder_mass(net, sets), rho_n(net, A, B, k)));
        }
        rev = std::max(rev, reversal_gap(net, A, B));
    }
    b.expect_le("orthogonal_decomposition", "<g1 o X_n, P g2 o X_n - g2 o X_{n+1}>_D = 0", orth, 1e-10);
    b.expect_le("variance_invariance", "int Var(f o X_n | X_{n-1}) dnu independent of n", var_inv, 1e-10);
    b.expect_le("cylinder_rho_n", "lambda(X_0 in A, X_n in B) = rho_n(A x B)", cyl, 1e-12);
    b.expect_le("time_reversal", "lambda(X_0 in A | X_1 in B) = lambda(X_1 in A | X_0 in B)", rev, 1e-12);

    const Index count = 20000;
    double worst_sigma = 0.0;
    std::vector<json> mc;
    for (int t = 0; t < 3; ++t) {
        const Vector f = src.next(n);
        const double exact = energy_norm_sq(net, f);
        const auto est = mc_energy_estimate(net, f, seed + static_cast<std::uint64_t>(t), count);
        const double z = est.std_error > 0.0 ? std::abs(est.estimate - exact) / est.std_error
                                             : (std::abs(est.estimate - exact) <= 1e-12 ? 0.0 : 1e300);
        worst_sigma = std::max(worst_sigma, z);
        mc.push_back({{"exact", exact}, {"estimate", est.estimate}, {"stderr", est.std_error}});
    }
    b.expect_le("monte_carlo_energy", "|f|_E^2 = nu(V)/2 E[(f(X_1) - f(X_0))^2] (within 4 stderr)", worst_sigma, 4.0);
    rep.values["monte_carlo"] = mc;
}

inline void run_green(const Network& net, const std::optional<BoundaryConfig>& boundary, Report& rep, Battery& b) {
    if (!boundary) {
        b.skip("green", "no boundary configured");
        return;
    }
    const Index n = net.size();
    const Matrix G = green_operator(net, *boundary);
    const Matrix Gn = green_operator(net, *boundary, GreenMethod::Neumann, 1e-12);
    b.expect_le("neumann_vs_solve", "sum_k P_int^k = (I - P_int)^{-1}", G.size() ? (G - Gn).cwiseAbs().maxCoeff() : 0.0, 1e-10);
    b.expect_le("green_nonnegative", "G >= 0", G.size() ? std::max(0.0, -G.minCoeff()) : 0.0, 0.0);
    const Vector c = derive(net).c;
    const Vector nu = net.W().rowwise().sum();
    double delta_worst = 0.0;
    double repro_worst = 0.0;
    CounterRng rng(17);
    std::uint64_t counter = 0;
    for (Index a : boundary->interior) {
        const Vector GA = green_indicator(net, *boundary, {a});
        const Vector lap = apply_Delta(net, GA);
        for (Index i : boundary->interior) delta_worst = std::max(delta_worst, std::abs(lap(i) - (i == a ? c(i) : 0.0)));
        Vector f = Vector::Zero(n);
        for (Index i : boundary->interior) f(i) = 2.0 * rng.uniform(0, counter++) - 1.0;
        repro_worst = std::max(repro_worst, rel_gap(energy_inner(net, f, GA), f(a) * nu(a)));
    }
    b.expect_le("green_laplacian", "Delta G_A = c chi_A on the interior", delta_worst, 1e-9);
    b.expect_le("green_reproducing", "<f, G_A>_E = int_A f dnu", repro_worst, 1e-10);
    json rows = json::array();
    for (Index i = 0; i < G.rows(); ++i) {
        std::vector<double> r;
        for (Index j = 0; j < G.cols(); ++j) r.push_back(G(i, j));
        rows.push_back(r);
    }
    rep.values["green"] = {{"interior", boundary->interior}, {"G", rows}};
}

inline void run_rkhs(const Network& net, const std::optional<BoundaryConfig>& boundary, Report& rep, Battery& b,
                     VectorSource& src) {
    const Index n = net.size();
    SetFamily fam;
    for (int t = 0; t < 6; ++t) fam.sets.push_back(src.subset(n));
    auto psd_violation = [](const Matrix& g) {
        return std::max(0.0, -linalg::symmetric_eigenvalues(g).minCoeff()) / std::max(1.0, g.trace());
    };
    const auto krho = kernel_gram(net, KernelId::k_rho, fam);
    b.expect_le("krho_equals_indicator_gram", "k_rho(A,B) = <chi_A, chi_B>_E",
                (krho.gram - indicator_gram(net, fam).gram).cwiseAbs().maxCoeff(), 1e-12);
    b.expect_le("krho_psd", "k_rho PSD", psd_violation(krho.gram), 1e-9);
    b.expect_le("Knu_psd", "K_nu PSD", psd_violation(kernel_gram(net, KernelId::K_nu, fam).gram), 1e-9);

    SetFamily singletons;
    for (Index i = 0; i < n; ++i) singletons.sets.push_back({i});
    const Vector f = canonical(net, src.next(n)).values;
    const auto irr = irreducibility(net);
    if (irr.irreducible) {
        const double norm = mu_f_rkhs_norm(net, f, singletons);
        b.expect_le("mu_f_isometry", "|mu_f|_{H(k_rho)} = |f|_E", rel_gap(norm, std::sqrt(energy_norm_sq(net, f))), 1e-8);
    } else {
        b.skip("mu_f_isometry", "network is not irreducible");
    }

    if (!boundary) {
        b.skip("kernel_K", "no boundary configured");
        return;
    }
    SetFamily interior_fam;
    for (int t = 0; t < 4; ++t) interior_fam.sets.push_back(mlap::detail::interior_part(src.subset(n), *boundary));
    const auto iso = isometry_suite(net, *boundary, interior_fam);
    b.expect_le("isometry_norms", "K(A,A) = |G_A|_E^2 = |(I - P)^{-1/2} chi_A|^2_nu", iso.max_rel_gap, 1e-9);
    b.expect_le("isometry_pairings", "<G_A, G_B>_E = K(A,B)", iso.max_pairwise_gap, 1e-9);
    const auto K = kernel_gram(net, KernelId::K, fam, boundary);
    b.expect_le("K_psd", "K PSD", psd_violation(K.gram), 1e-9);
    const auto N = kernel_gram(net, KernelId::N_rho, fam, boundary);
    double cnd = 0.0;
    const Index m = N.gram.rows();
    for (int t = 0; t < 50; ++t) {
        Vector lam = src.next(m);
        lam.array() -= lam.mean();
        cnd = std::max(cnd, lam.dot(N.gram * lam));
    }
    b.expect_le("Nrho_cnd", "sum lam_a lam_b N(A_a, A_b) <= 0 when sum lam = 0", std::max(0.0, cnd),
                1e-9 * std::max(1.0, std::abs(N.gram.trace())));
    rep.values["K_gram_trace"] = K.gram.trace();
}

inline void run_learn(const Network& net, Report& rep, Battery& b, VectorSource& src) {
    const Index n = net.size();
    const Vector psi = src.next(n);
    LearnProblem p{net, psi, 1.0};
    const Vector h = solve_regularized(p);
    const double Q = objective(p, h).total();
    b.expect_le("optimality", "Q(h) <= Q(h + eps k)", std::max(0.0, optimality_check(p, h, 20)), 1e-10 * (1.0 + Q));
    double grad = 0.0;
    const Vector h0 = src.next(n);
    for (int t = 0; t < 10; ++t) {
        const Vector k = src.next(n);
        const double eps = 1e-5;
        const double fd = (objective(p, Vector(h0 + eps * k)).total() - objective(p, Vector(h0 - eps * k)).total()) / (2 * eps);
        grad = std::max(grad, rel_gap(fd, first_variation(p, h0, k)));
    }
    b.expect_le("gradient", "dQ = -2<psi - h, k>_mu + 2 gamma <h, k>_E", grad, 1e-6);
    LearnProblem p0{net, psi, 0.0};
    b.expect_le("gamma_zero", "gamma = 0 => h = psi", (solve_regularized(p0) - psi).cwiseAbs().maxCoeff(), 0.0);
    rep.values["learn"] = {{"gamma", 1.0}, {"Q", Q}, {"fit", objective(p, h).fit}, {"penalty", objective(p, h).penalty}};
}

}  // namespace detail

/// Runs one battery (or "all") on a raw network. Failures are reported, never thrown.
inline Report run_suite(const RawNetwork& input, const std::string& suite_id, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    rep.command = "suite " + suite_id;
    const bool all = suite_id == "all";
    bool known = false;
    for (const auto& id : suite_ids()) known = known || id == suite_id;
    if (!known) throw Error(ErrorKind::ParseError, "unknown suite '" + suite_id + "'");

    std::optional<Network> net;
    try {
        net = build_network(input.states, input.mu, input.W);
    } catch (const Error& err) {
        detail::Battery b(rep, "core");
        const bool symmetric = input.W.rows() == input.W.cols() && linalg::max_asymmetry(input.W) <= kSymmetryTol;
        b.expect_le("symmetry", "W = W^T", input.W.rows() == input.W.cols() ? linalg::max_asymmetry(input.W) : 1.0, 1e-12);
        if (symmetric) b.expect_true("validation", "network contract", false, err.what());
        rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        return rep;
    }
    rep.checksum = io::checksum(*net);

    std::optional<BoundaryConfig> boundary;
    if (input.boundary) {
        try {
            boundary = make_boundary(*net, *input.boundary);
        } catch (const Error& err) {
            detail::Battery b(rep, "core");
            b.expect_true("boundary", "every interior state reaches the boundary", false, err.what());
        }
    }

    auto want = [&](const char* id) { return all || suite_id == id; };
    std::uint64_t stream = 0;
    if (want("core")) {
        detail::Battery b(rep, "core");
        detail::run_core(*net, rep, b);
    }
    if (want("operators")) {
        detail::Battery b(rep, "operators");
        detail::VectorSource src(seed, ++stream);
        detail::run_operators(*net, rep, b, src);
    }
    if (want("energy")) {
        detail::Battery b(rep, "energy");
        detail::VectorSource src(seed, 100 + ++stream);
        detail::run_energy(*net, boundary, rep, b, src);
    }
    if (want("dissipation")) {
        detail::Battery b(rep, "dissipation");
        detail::VectorSource src(seed, 200 + ++stream);
        detail::run_dissipation(*net, seed, rep, b, src);
    }
    if (want("green")) {
        detail::Battery b(rep, "green");
        detail::run_green(*net, boundary, rep, b);
    }
    if (want("rkhs")) {
        detail::Battery b(rep, "rkhs");
        detail::VectorSource src(seed, 300 + ++stream);
        detail::run_rkhs(*net, boundary, rep, b, src);
    }
    if (want("learn")) {
        detail::Battery b(rep, "learn");
        detail::VectorSource src(seed, 400 + ++stream);
        detail::run_learn(*net, rep, b, src);
    }
    rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

inline Report run_suite(const Network& net, const std::optional<StateSet>& boundary, const std::string& suite_id,
                        std::uint64_t seed) {
    return run_suite(raw(net, boundary), suite_id, seed);
}

}  // namespace mlap::suite
