#pragma once

// The operators R, P and Delta of a symmetric measure, their powers and
// spectra, and the finite-dimensional adjoint identities that tie the
// L2(mu), L2(nu) and energy pairings together.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "mlap/linalg.hpp"
#include "mlap/network.hpp"

namespace mlap {

namespace detail {

/// 1/2 sum_ij W_ij (f_i - f_j)(g_i - g_j). Exactly zero for constant f or g.
inline double dirichlet_form(const Matrix& W, const Vector& f, const Vector& g) {
    const Index n = W.rows();
    double acc = 0.0;
    for (Index j = 0; j < n; ++j) {
        const double fj = f(j);
        const double gj = g(j);
        for (Index i = 0; i < n; ++i) {
            const double w = W(i, j);
            if (w != 0.0) acc += w * (f(i) - fj) * (g(i) - gj);
        }
    }
    return 0.5 * acc;
}

}  // namespace detail

struct OperatorBundle {
    Vector mu;
    Vector c;
    Vector nu;
    Matrix R;      // W[i][j] / mu[i]
    Matrix P;      // W[i][j] / nu[i]
    Matrix Delta;  // diag(c) (I - P)
};

inline OperatorBundle operators(const Network& net) {
    const DerivedMeasures d = derive(net);
    OperatorBundle ops;
    ops.mu = net.mu();
    ops.c = d.c;
    ops.nu = d.nu;
    ops.R = d.rho_x;
    ops.P = d.P;
    ops.Delta = Matrix(d.c.asDiagonal()) - ops.R;
    return ops;
}

/// D_W - W, the weak form of Delta: diag(mu) * Delta.
inline Matrix weak_laplacian(const Network& net) {
    Matrix L = -net.W();
    L.diagonal() += net.W().rowwise().sum();
    return L;
}

inline Vector apply_R(const Network& net, const Vector& f) {
    check_dim(net.size(), f.size(), "f");
    return net.mu().cwiseInverse().cwiseProduct(net.W() * f);
}

inline Vector apply_P(const Network& net, const Vector& f) {
    check_dim(net.size(), f.size(), "f");
    return (net.W() * f).cwiseQuotient(net.W().rowwise().sum());
}

/// Delta f = c o f - R f.
inline Vector apply_Delta(const Network& net, const Vector& f) {
    check_dim(net.size(), f.size(), "f");
    const Vector row = net.W().rowwise().sum();
    return (row.cwiseProduct(f) - net.W() * f).cwiseQuotient(net.mu());
}

/// P^n by repeated multiplication; P^0 = I.
inline Matrix markov_power(const Network& net, int n) {
    if (n < 0) throw Error(ErrorKind::NegativePower, "power " + std::to_string(n));
    const Matrix P = derive(net).P;
    Matrix out = Matrix::Identity(net.size(), net.size());
    for (int k = 0; k < n; ++k) out = out * P;
    return out;
}

/// rho_n(A x B) = <chi_A, P^n chi_B> in L2(nu).
inline double rho_n(const Network& net, const StateSet& A, const StateSet& B, int n) {
    if (n < 0) throw Error(ErrorKind::NegativePower, "power " + std::to_string(n));
    const Index N = net.size();
    const DerivedMeasures d = derive(net);
    Vector v = indicator(B, N);
    for (int k = 0; k < n; ++k) v = d.P * v;
    return indicator(A, N).cwiseProduct(d.nu).dot(v);
}

/// Symmetric conjugate D_nu^{1/2} P D_nu^{-1/2} = D_nu^{-1/2} W D_nu^{-1/2}.
inline Matrix symmetrized_P(const Network& net) {
    const Vector s = net.W().rowwise().sum().cwiseSqrt().cwiseInverse();
    Matrix S = s.asDiagonal() * net.W() * s.asDiagonal();
    return 0.5 * (S + S.transpose());
}

/// Eigenvalues of P, descending.
inline std::vector<double> spectrum_P(const Network& net) {
    const Vector ev = linalg::symmetric_eigenvalues(symmetrized_P(net));
    std::vector<double> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

/// Orthonormal basis in L2(nu) of the harmonic functions modulo constants:
/// piecewise-constant functions on the components of the support graph, with
/// nu-mean zero. Empty iff the network is irreducible.
inline std::vector<Vector> harmonic_basis(const Network& net) {
    const Index n = net.size();
    const Vector nu = net.W().rowwise().sum();
    const double total = nu.sum();
    const auto comps = irreducibility(net).components;
    std::vector<Vector> basis;
    if (comps.size() < 2) return basis;
    auto inner = [&nu](const Vector& a, const Vector& b) { return a.cwiseProduct(nu).dot(b); };
    for (std::size_t k = 0; k + 1 < comps.size(); ++k) {
        Vector v = indicator(comps[k], n);
        v.array() -= measure(nu, comps[k]) / total;
        for (const auto& e : basis) v -= inner(v, e) * e;
        v /= std::sqrt(inner(v, v));
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Harmonic dimension from the numerical null space of I - S. Independent of
/// the component search in harmonic_basis.
inline Index harmonic_dimension_numeric(const Network& net, double tol = 1e-9) {
    const Index n = net.size();
    const Matrix IminusS = Matrix::Identity(n, n) - symmetrized_P(net);
    const Vector ev = linalg::symmetric_eigenvalues(IminusS);
    Index zeros = 0;
    for (Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) <= tol) ++zeros;
    return zeros - 1;
}

struct IotaAdjointReport {
    double energy_pairing = 0.0;  // <f, g>_{H_E}
    double l2_pairing = 0.0;      // <f, (I - P) g>_{L2(nu)}
    double residual = 0.0;        // normalized gap
    double embedding_slack = 0.0; // 2 |f|^2_{L2(nu)} - |f|^2_{H_E}, must be >= 0
};

/// iota* = I - P: <f, g>_{H_E} = <f, (I - P) g>_{L2(nu)}.
inline IotaAdjointReport iota_adjoint_residual(const Network& net, const Vector& f, const Vector& g) {
    check_dim(net.size(), f.size(), "f");
    check_dim(net.size(), g.size(), "g");
    const Vector nu = net.W().rowwise().sum();
    IotaAdjointReport r;
    r.energy_pairing = detail::dirichlet_form(net.W(), f, g);
    r.l2_pairing = f.cwiseProduct(nu).dot(g - apply_P(net, g));
    const double fn = std::sqrt(f.cwiseProduct(nu).dot(f));
    const double gn = std::sqrt(g.cwiseProduct(nu).dot(g));
    r.residual = std::abs(r.energy_pairing - r.l2_pairing) / (1.0 + fn * gn);
    r.embedding_slack = 2.0 * fn * fn - detail::dirichlet_form(net.W(), f, f);
    return r;
}

/// (int_A f dmu, int_V R(chi_A f / c) dmu). Equal because nu P = nu.
inline std::pair<double, double> mass_transport_check(const Network& net, const Vector& f, const StateSet& A) {
    check_dim(net.size(), f.size(), "f");
    const Index n = net.size();
    const Vector chi = indicator(normalized(A), n);
    const DerivedMeasures d = derive(net);
    const double lhs = chi.cwiseProduct(f).dot(net.mu());
    const Vector inner = chi.cwiseProduct(f).cwiseQuotient(d.c);
    const double rhs = apply_R(net, inner).dot(net.mu());
    return {lhs, rhs};
}

/// |<J phi, f>_{H_E} - <phi, Delta f>_{L2(mu)}| / (1 + |phi| |f|), with J the
/// inclusion of finitely supported functions.
inline double j_adjoint_residual(const Network& net, const Vector& phi, const Vector& f) {
    check_dim(net.size(), phi.size(), "phi");
    check_dim(net.size(), f.size(), "f");
    const double energy = detail::dirichlet_form(net.W(), phi, f);
    const double weak = phi.cwiseProduct(net.mu()).dot(apply_Delta(net, f));
    const double pn = std::sqrt(phi.cwiseProduct(net.mu()).dot(phi));
    const double fn = std::sqrt(f.cwiseProduct(net.mu()).dot(f));
    return std::abs(energy - weak) / (1.0 + pn * fn);
}

/// c_A, R_A, Delta_A of the restriction of rho to A x A. Rows outside A are zero.
struct RestrictedOperators {
    Vector c;
    Matrix R;
    Matrix Delta;
};

inline RestrictedOperators restrict_to(const Network& net, const StateSet& A) {
    const Index n = net.size();
    const Vector chi = indicator(A, n);
    const Matrix WA = chi.asDiagonal() * net.W() * chi.asDiagonal();
    RestrictedOperators out;
    out.c = WA.rowwise().sum().cwiseQuotient(net.mu());
    out.R = net.mu().cwiseInverse().asDiagonal() * WA;
    out.Delta = Matrix(out.c.asDiagonal()) - out.R;
    return out;
}

}  // namespace mlap
