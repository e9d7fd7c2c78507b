#pragma once

// Transient (killed) chains and the set kernels built on them.
//
// Kernel conventions, with interior I = V \ boundary, P_I the restriction of
// P to I x I and nu_I the restriction of nu to I:
//
//   G       = (I - P_I)^{-1}                          (interior x interior)
//   G_A(x)  = sum_{y in A ∩ I} G(x, y),  x in I;  0 on the boundary
//   rho_n   = <chi_{A∩I}, P_I^n chi_{B∩I}>_{L2(nu_I)}  (killed chain)
//   K(A,B)  = sum_n rho_n(A x B) = <chi_A, G chi_B>_{L2(nu_I)}
//   k_rho   = nu(A ∩ B) - rho(A x B)
//   K_nu    = nu(A ∩ B)
//   N_rho   = K(A,A) + K(B,B) - 2 K(A,B) = |G_A - G_B|^2_{H_E}
//
// Sets handed to K and N_rho are intersected with the interior; boundary
// atoms carry no killed-chain mass.

#include <cmath>
#include <optional>
#include <vector>

#include "mlap/boundary.hpp"
#include "mlap/energy.hpp"
#include "mlap/linalg.hpp"
#include "mlap/operators.hpp"

namespace mlap {

struct KilledChain {
    StateSet interior;
    Matrix P_int;
    double spectral_radius = 0.0;
};

inline KilledChain killed_restriction(const Network& net, const BoundaryConfig& boundary) {
    const DerivedMeasures d = derive(net);
    KilledChain out;
    out.interior = boundary.interior;
    out.P_int = linalg::submatrix(d.P, out.interior, out.interior);
    if (!out.interior.empty()) {
        // Real spectrum through the nu-symmetric conjugate.
        const Vector s = linalg::gather(d.nu, out.interior).cwiseSqrt();
        Matrix S = s.asDiagonal() * out.P_int * s.cwiseInverse().asDiagonal();
        S = 0.5 * (S + S.transpose());
        out.spectral_radius = linalg::symmetric_eigenvalues(S).cwiseAbs().maxCoeff();
    }
    if (!(out.spectral_radius < 1.0 - 1e-12)) {
        throw Error(ErrorKind::TrappedInterior, "killed chain is not transient");
    }
    return out;
}

inline KilledChain killed_restriction(const Network& net, StateSet boundary) {
    return killed_restriction(net, make_boundary(net, std::move(boundary)));
}

enum class GreenMethod { Solve, Neumann };

/// G = (I - P_int)^{-1} on the interior. The solve path factors the SPD
/// matrix diag(nu_I) - W_I; the Neumann path sums P_int^k until the next term
/// is below `neumann_tol` entrywise.
inline Matrix green_operator(const Network& net, const BoundaryConfig& boundary,
                             GreenMethod method = GreenMethod::Solve, double neumann_tol = 1e-12) {
    const KilledChain kc = killed_restriction(net, boundary);
    const auto& in = kc.interior;
    const Index m = static_cast<Index>(in.size());
    if (m == 0) return Matrix(0, 0);
    if (method == GreenMethod::Solve) {
        const Vector nu_in = linalg::gather(net.W().rowwise().sum(), in);
        Matrix M = -linalg::submatrix(net.W(), in, in);
        M.diagonal() += nu_in;
        const linalg::SpdSolver solver(M);
        return solver.solve(Matrix(nu_in.asDiagonal()));
    }
    Matrix sum = Matrix::Identity(m, m);
    Matrix term = Matrix::Identity(m, m);
    const int cap = 1'000'000;
    for (int k = 1; k < cap; ++k) {
        term = term * kc.P_int;
        sum += term;
        if (term.cwiseAbs().maxCoeff() < neumann_tol * (1.0 - kc.spectral_radius)) break;
    }
    return sum;
}

/// G_A on all of V, zero on the boundary.
inline Vector green_indicator(const Network& net, const BoundaryConfig& boundary, const StateSet& A) {
    const Index n = net.size();
    check_set(A, n);
    for (Index a : A)
        if (boundary.contains(a)) throw Error(ErrorKind::SetMeetsBoundary, "A meets the boundary");
    const Matrix G = green_operator(net, boundary);
    const auto& in = boundary.interior;
    const Vector chi_in = linalg::gather(indicator(A, n), in);
    const Vector g = G * chi_in;
    Vector out = Vector::Zero(n);
    for (std::size_t k = 0; k < in.size(); ++k) out(in[k]) = g(static_cast<Index>(k));
    return out;
}

namespace detail {

inline StateSet interior_part(const StateSet& set, const BoundaryConfig& boundary) {
    StateSet out;
    for (Index i : normalized(set))
        if (!boundary.contains(i)) out.push_back(i);
    return out;
}

/// Interior-indexed indicator columns of the family (sets cut to the interior).
inline Matrix interior_indicators(const Network& net, const BoundaryConfig& boundary, const SetFamily& family) {
    const auto& in = boundary.interior;
    const Index m = static_cast<Index>(family.size());
    Matrix X = Matrix::Zero(static_cast<Index>(in.size()), m);
    for (Index a = 0; a < m; ++a) {
        check_set(family.sets[static_cast<std::size_t>(a)], net.size());
        const Vector chi = indicator(family.sets[static_cast<std::size_t>(a)], net.size());
        X.col(a) = linalg::gather(chi, in);
    }
    return X;
}

inline Matrix gram_K(const Network& net, const BoundaryConfig& boundary, const SetFamily& family) {
    const Matrix X = interior_indicators(net, boundary, family);
    const Vector nu_in = linalg::gather(net.W().rowwise().sum(), boundary.interior);
    const Matrix G = green_operator(net, boundary);
    Matrix K = X.transpose() * nu_in.asDiagonal() * G * X;
    return 0.5 * (K + K.transpose());
}

}  // namespace detail

/// sum_{k<=N} rho_k(A x B) for the killed chain, plus the geometric bound on
/// the remaining tail.
struct SeriesValue {
    double value = 0.0;
    double tail_bound = 0.0;
};

inline SeriesValue kernel_K_series(const Network& net, const BoundaryConfig& boundary, const StateSet& A,
                                   const StateSet& B, int N) {
    const KilledChain kc = killed_restriction(net, boundary);
    const auto& in = kc.interior;
    const Vector nu_in = linalg::gather(net.W().rowwise().sum(), in);
    const Vector a = linalg::gather(indicator(A, net.size()), in);
    Vector v = linalg::gather(indicator(B, net.size()), in);
    SeriesValue s;
    for (int k = 0; k <= N; ++k) {
        s.value += a.cwiseProduct(nu_in).dot(v);
        v = kc.P_int * v;
    }
    // |rho_k| <= |chi_A|_nu |chi_B|_nu r^k in the nu-symmetric norm.
    const double r = kc.spectral_radius;
    const double na = std::sqrt(a.cwiseProduct(nu_in).dot(a));
    const Vector b = linalg::gather(indicator(B, net.size()), in);
    const double nb = std::sqrt(b.cwiseProduct(nu_in).dot(b));
    s.tail_bound = na * nb * std::pow(r, N + 1) / (1.0 - r);
    return s;
}

inline KernelGram kernel_gram(const Network& net, KernelId id, const SetFamily& family,
                              const std::optional<BoundaryConfig>& boundary = std::nullopt) {
    const Index n = net.size();
    const Vector nu = net.W().rowwise().sum();
    KernelGram out;
    out.kernel_id = id;
    out.family = family;
    const Index m = static_cast<Index>(family.size());
    switch (id) {
        case KernelId::k_rho: {
            out.gram = indicator_gram(net, family).gram;
            break;
        }
        case KernelId::K_nu: {
            Matrix X(n, m);
            for (Index a = 0; a < m; ++a) X.col(a) = indicator(family.sets[static_cast<std::size_t>(a)], n);
            out.gram = X.transpose() * nu.asDiagonal() * X;
            break;
        }
        case KernelId::K:
        case KernelId::N_rho: {
            if (!boundary) throw Error(ErrorKind::MissingBoundary, std::string(to_string(id)) + " needs a boundary");
            const Matrix K = detail::gram_K(net, *boundary, family);
            if (id == KernelId::K) {
                out.gram = K;
            } else {
                out.gram.resize(m, m);
                for (Index a = 0; a < m; ++a)
                    for (Index b = 0; b < m; ++b) out.gram(a, b) = K(a, a) + K(b, b) - 2.0 * K(a, b);
            }
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Isometries between H(K), H_E and L2(nu)

struct IsometryEntry {
    double kernel_norm = 0.0;  // K(A, A)
    double energy_norm = 0.0;  // |G_A|^2_{H_E}
    double l2_norm = 0.0;      // |(I - P)^{-1/2} chi_A|^2_{L2(nu)}
};

struct IsometryReport {
    std::vector<IsometryEntry> entries;
    double max_rel_gap = 0.0;       // over the three norms of each set
    double max_pairwise_gap = 0.0;  // |<G_A, G_B>_{H_E} - K(A,B)| relative, and the L2 analogue
};

/// (I - P_int)^{-1/2} as an operator on L2(nu_I), interior indexed.
inline Matrix inverse_sqrt_laplacian(const Network& net, const BoundaryConfig& boundary) {
    const KilledChain kc = killed_restriction(net, boundary);
    const auto& in = kc.interior;
    if (in.empty()) return Matrix(0, 0);
    const Vector s = linalg::gather(net.W().rowwise().sum(), in).cwiseSqrt();
    Matrix S = s.asDiagonal() * kc.P_int * s.cwiseInverse().asDiagonal();
    S = 0.5 * (S + S.transpose());
    const Index m = S.rows();
    const Matrix root = linalg::symmetric_function(Matrix(Matrix::Identity(m, m) - S),
                                                   [](double v) { return 1.0 / std::sqrt(v); });
    return s.cwiseInverse().asDiagonal() * root * s.asDiagonal();
}

inline IsometryReport isometry_suite(const Network& net, const BoundaryConfig& boundary, const SetFamily& family) {
    const Index m = static_cast<Index>(family.size());
    const Matrix K = detail::gram_K(net, boundary, family);
    const Matrix T = inverse_sqrt_laplacian(net, boundary);
    const Vector nu_in = linalg::gather(net.W().rowwise().sum(), boundary.interior);
    const Matrix X = detail::interior_indicators(net, boundary, family);
    const Matrix Kstar = T * X;  // K*_A columns

    std::vector<Vector> GA;
    for (Index a = 0; a < m; ++a)
        GA.push_back(green_indicator(net, boundary, detail::interior_part(family.sets[static_cast<std::size_t>(a)], boundary)));

    IsometryReport rep;
    auto rel = [](double x, double y) { return std::abs(x - y) / std::max({1e-300, std::abs(x), std::abs(y)}); };
    for (Index a = 0; a < m; ++a) {
        IsometryEntry e;
        e.kernel_norm = K(a, a);
        e.energy_norm = detail::dirichlet_form(net.W(), GA[static_cast<std::size_t>(a)], GA[static_cast<std::size_t>(a)]);
        e.l2_norm = Kstar.col(a).cwiseProduct(nu_in).dot(Kstar.col(a));
        if (std::max({std::abs(e.kernel_norm), std::abs(e.energy_norm), std::abs(e.l2_norm)}) > 0.0) {
            rep.max_rel_gap = std::max({rep.max_rel_gap, rel(e.kernel_norm, e.energy_norm), rel(e.kernel_norm, e.l2_norm),
                                        rel(e.energy_norm, e.l2_norm)});
        }
        rep.entries.push_back(e);
    }
    const double scale = std::max(1e-300, K.diagonal().cwiseAbs().maxCoeff());
    for (Index a = 0; a < m; ++a) {
        for (Index b = 0; b < m; ++b) {
            const double energy = detail::dirichlet_form(net.W(), GA[static_cast<std::size_t>(a)], GA[static_cast<std::size_t>(b)]);
            const double l2 = Kstar.col(a).cwiseProduct(nu_in).dot(Kstar.col(b));
            rep.max_pairwise_gap = std::max({rep.max_pairwise_gap, std::abs(energy - K(a, b)) / scale,
                                             std::abs(l2 - K(a, b)) / scale});
        }
    }
    return rep;
}

/// |mu_f|_{H(k_rho)} from the k_rho Gram pseudoinverse applied to (mu_f(A_i)).
/// Throws FamilyTooSmall when f is not in the H_E-span of the family's indicators.
inline double mu_f_rkhs_norm(const Network& net, const Vector& f, const SetFamily& family) {
    check_dim(net.size(), f.size(), "f");
    const Index n = net.size();
    const Index m = static_cast<Index>(family.size());
    const Matrix gram = indicator_gram(net, family).gram;
    Vector values(m);
    Matrix X(n, m);
    for (Index a = 0; a < m; ++a) {
        X.col(a) = indicator(family.sets[static_cast<std::size_t>(a)], n);
        values(a) = mu_f(net, f, family.sets[static_cast<std::size_t>(a)]);
    }
    const Vector coeffs = linalg::psd_pseudoinverse(gram) * values;
    const Vector fhat = X * coeffs;
    const double f_norm = std::sqrt(std::max(0.0, energy_norm_sq(net, f)));
    const double miss = std::sqrt(std::max(0.0, energy_norm_sq(net, Vector(f - fhat))));
    if (miss > 1e-8 * f_norm + 1e-12) {
        throw Error(ErrorKind::FamilyTooSmall, "f is not in the span of the family's indicators (miss " +
                                                   std::to_string(miss) + ")");
    }
    return std::sqrt(std::max(0.0, values.dot(coeffs)));
}

}  // namespace mlap
