#pragma once

// The finite energy space H_E: functions modulo constants with the Dirichlet
// form 1/2 sum_ij W_ij (f_i - f_j)(g_i - g_j).

#include <cmath>
#include <optional>
#include <string>

#include "mlap/boundary.hpp"
#include "mlap/linalg.hpp"
#include "mlap/operators.hpp"

namespace mlap {

/// A function on the states, read as an element of H_E. The canonical
/// representative has nu-mean zero.
struct EnergyElement {
    Vector values;
    bool canonical = false;
};

inline EnergyElement canonical(const Network& net, const Vector& f) {
    check_dim(net.size(), f.size(), "f");
    const Vector nu = net.W().rowwise().sum();
    EnergyElement e;
    e.values = f.array() - f.dot(nu) / nu.sum();
    e.canonical = true;
    return e;
}

inline double energy_inner(const Network& net, const Vector& f, const Vector& g) {
    check_dim(net.size(), f.size(), "f");
    check_dim(net.size(), g.size(), "g");
    return detail::dirichlet_form(net.W(), f, g);
}

inline double energy_norm_sq(const Network& net, const Vector& f) { return energy_inner(net, f, f); }

/// Difference embedding (f_i - f_j) / sqrt 2 into L2(rho). Isometric.
inline Matrix difference_embedding(const Vector& f) {
    const Index n = f.size();
    Matrix D(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) D(i, j) = (f(i) - f(j)) / std::sqrt(2.0);
    return D;
}

inline double l2_rho_norm_sq(const Network& net, const Matrix& F) { return net.W().cwiseProduct(F.cwiseProduct(F)).sum(); }

/// Gram[a][b] = nu(A_a ∩ A_b) - rho(A_a x A_b) = <chi_A, chi_B>_{H_E}.
inline KernelGram indicator_gram(const Network& net, const SetFamily& family) {
    const Index n = net.size();
    const Vector nu = net.W().rowwise().sum();
    const Index m = static_cast<Index>(family.size());
    Matrix chi(n, m);
    for (Index a = 0; a < m; ++a) chi.col(a) = indicator(family.sets[static_cast<std::size_t>(a)], n);
    KernelGram out;
    out.kernel_id = KernelId::k_rho;
    out.family = family;
    out.gram = chi.transpose() * nu.asDiagonal() * chi - chi.transpose() * net.W() * chi;
    out.gram = 0.5 * (out.gram + out.gram.transpose());
    return out;
}

// ---------------------------------------------------------------------------
// Royden decomposition

struct RoydenSplit {
    EnergyElement d;  // closure of the indicator span, nu-mean zero on every component
    EnergyElement h;  // harmonic, piecewise constant, nu-mean zero
};

/// f = d + h + const with h harmonic and <d, h>_{H_E} = 0.
inline RoydenSplit royden_project(const Network& net, const Vector& f) {
    check_dim(net.size(), f.size(), "f");
    const Index n = net.size();
    const Vector nu = net.W().rowwise().sum();
    const double mean = f.dot(nu) / nu.sum();
    Vector h = Vector::Zero(n);
    Vector block_means = Vector::Zero(n);
    for (const auto& comp : irreducibility(net).components) {
        double mass = 0.0;
        double weighted = 0.0;
        for (Index i : comp) {
            mass += nu(i);
            weighted += nu(i) * f(i);
        }
        const double block = weighted / mass;
        for (Index i : comp) {
            block_means(i) = block;
            h(i) = block - mean;
        }
    }
    RoydenSplit out;
    out.d.values = f - block_means;
    out.d.canonical = true;
    out.h.values = std::move(h);
    out.h.canonical = true;
    return out;
}

// ---------------------------------------------------------------------------
// Dipoles

enum class DipoleKind { Mu, Nu };

struct DipoleSolution {
    EnergyElement v;
    DipoleKind kind = DipoleKind::Mu;
    StateSet A;
    StateSet B;
    double residual = 0.0;  // |Delta v - target| / max(1, |target|) over the solved states
};

namespace detail {

inline Vector dipole_target(const Network& net, DipoleKind kind, const StateSet& A, const StateSet& B) {
    const Index n = net.size();
    Vector t = indicator(A, n) - indicator(B, n);
    if (kind == DipoleKind::Nu) t = t.cwiseProduct(derive(net).c);
    return t;
}

inline double balance_tol(double scale) { return 1e-12 * std::max(1.0, scale); }

}  // namespace detail

/// Solves Delta v = chi_A - chi_B (mu-dipole) or c (chi_A - chi_B) (nu-dipole).
/// Without a boundary the sets must balance on every component and v is the
/// canonical representative. With a boundary, v vanishes there and Delta v
/// matches the target on the interior.
inline DipoleSolution dipole(const Network& net, DipoleKind kind, StateSet A, StateSet B,
                             const std::optional<BoundaryConfig>& boundary = std::nullopt) {
    const Index n = net.size();
    check_set(A, n);
    check_set(B, n);
    A = normalized(std::move(A));
    B = normalized(std::move(B));
    const Vector target = detail::dipole_target(net, kind, A, B);
    const Vector rhs = net.mu().cwiseProduct(target);  // weak form: L v = mu o target
    const Matrix L = weak_laplacian(net);

    DipoleSolution out;
    out.kind = kind;
    out.A = A;
    out.B = B;
    Vector v = Vector::Zero(n);

    if (boundary) {
        for (Index i : A)
            if (boundary->contains(i)) throw Error(ErrorKind::SetMeetsBoundary, "A meets the boundary");
        for (Index i : B)
            if (boundary->contains(i)) throw Error(ErrorKind::SetMeetsBoundary, "B meets the boundary");
        const auto& in = boundary->interior;
        if (!in.empty()) {
            const linalg::SpdSolver solver(linalg::submatrix(L, in, in));
            const Vector vi = solver.solve(linalg::gather(rhs, in));
            for (std::size_t k = 0; k < in.size(); ++k) v(in[k]) = vi(static_cast<Index>(k));
        }
        const Vector lhs = apply_Delta(net, v);
        double err = 0.0;
        double scale = 1.0;
        for (Index i : in) {
            err = std::max(err, std::abs(lhs(i) - target(i)));
            scale = std::max(scale, std::abs(target(i)));
        }
        out.residual = err / scale;
        out.v.values = std::move(v);
        out.v.canonical = false;
        return out;
    }

    const double total_rhs = rhs.sum();
    const double mass_scale = rhs.cwiseAbs().sum();
    if (std::abs(total_rhs) > detail::balance_tol(mass_scale)) {
        throw Error(ErrorKind::UnbalancedSets, std::string(kind == DipoleKind::Mu ? "mu" : "nu") +
                                                   "(A) != " + (kind == DipoleKind::Mu ? "mu" : "nu") + "(B)");
    }
    const Vector nu = net.W().rowwise().sum();
    for (const auto& comp : irreducibility(net).components) {
        double comp_rhs = 0.0;
        for (Index i : comp) comp_rhs += rhs(i);
        if (std::abs(comp_rhs) > detail::balance_tol(mass_scale)) {
            throw Error(ErrorKind::SingularSystem, "A and B do not balance within one component");
        }
        if (comp.size() == 1) continue;
        // Ground the first state of the component; the reduced system is SPD.
        const StateSet rest(comp.begin() + 1, comp.end());
        const linalg::SpdSolver solver(linalg::submatrix(L, rest, rest));
        const Vector vr = solver.solve(linalg::gather(rhs, rest));
        for (std::size_t k = 0; k < rest.size(); ++k) v(rest[k]) = vr(static_cast<Index>(k));
        double mass = 0.0;
        double weighted = 0.0;
        for (Index i : comp) {
            mass += nu(i);
            weighted += nu(i) * v(i);
        }
        for (Index i : comp) v(i) -= weighted / mass;
    }
    const Vector lhs = apply_Delta(net, v);
    out.residual = (lhs - target).cwiseAbs().maxCoeff() / std::max(1.0, target.cwiseAbs().maxCoeff());
    out.v.values = std::move(v);
    out.v.canonical = true;
    return out;
}

/// mu_f(A) = <chi_A, f>_{H_E}; its density with respect to mu is Delta f.
inline double mu_f(const Network& net, const Vector& f, const StateSet& A) {
    return energy_inner(net, indicator(A, net.size()), f);
}

// ---------------------------------------------------------------------------
// Norm bounds

struct NormBoundsReport {
    double energy = 0.0;              // |f|^2_{H_E}
    double c_inv_delta_nu = 0.0;      // |c^{-1} Delta f|^2_{L2(nu)}
    double delta_c_inv_mu = 0.0;      // |Delta f|^2_{L2(c^{-1} mu)}
    double f_minus_Pf_nu = 0.0;       // |f - P f|^2_{L2(nu)}
    double slack_lower = 0.0;         // energy - 1/2 c_inv_delta_nu
    double slack_delta = 0.0;         // 2 energy - delta_c_inv_mu
    double slack_contraction = 0.0;   // 2 energy - f_minus_Pf_nu

    [[nodiscard]] bool holds(double tol = 1e-12) const {
        return slack_lower >= -tol && slack_delta >= -tol && slack_contraction >= -tol;
    }
};

inline NormBoundsReport norm_bounds_report(const Network& net, const Vector& f) {
    const DerivedMeasures d = derive(net);
    const Vector delta = apply_Delta(net, f);
    const Vector c_inv_delta = delta.cwiseQuotient(d.c);
    const Vector diff = f - d.P * f;
    NormBoundsReport r;
    r.energy = energy_norm_sq(net, f);
    r.c_inv_delta_nu = c_inv_delta.cwiseProduct(d.nu).dot(c_inv_delta);
    r.delta_c_inv_mu = delta.cwiseProduct(net.mu().cwiseQuotient(d.c)).dot(delta);
    r.f_minus_Pf_nu = diff.cwiseProduct(d.nu).dot(diff);
    r.slack_lower = r.energy - 0.5 * r.c_inv_delta_nu;
    r.slack_delta = 2.0 * r.energy - r.delta_c_inv_mu;
    r.slack_contraction = 2.0 * r.energy - r.f_minus_Pf_nu;
    return r;
}

}  // namespace mlap
