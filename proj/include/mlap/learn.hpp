#pragma once

// Energy-regularized least squares
//   Q(h) = |psi - h|^2_{L2(mu)} + gamma |h|^2_{H_E}
// and the special-case network constructors (diagonal, product, joining).

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "mlap/energy.hpp"
#include "mlap/linalg.hpp"
#include "mlap/operators.hpp"

namespace mlap {

struct LearnProblem {
    Network net;
    Vector psi;
    double gamma = 0.0;
};

struct QBreakdown {
    double fit = 0.0;      // |psi - h|^2_{L2(mu)}
    double penalty = 0.0;  // gamma |h|^2_{H_E}
    [[nodiscard]] double total() const { return fit + penalty; }
};

inline QBreakdown objective(const LearnProblem& p, const Vector& h) {
    check_dim(p.net.size(), h.size(), "h");
    const Vector r = p.psi - h;
    return {r.cwiseProduct(p.net.mu()).dot(r), p.gamma * energy_norm_sq(p.net, h)};
}

namespace detail {

inline void validate(const LearnProblem& p) {
    check_dim(p.net.size(), p.psi.size(), "psi");
    if (!p.psi.allFinite()) throw Error(ErrorKind::NonFinite, "psi must be finite");
    if (!(p.gamma >= 0.0) || !std::isfinite(p.gamma)) throw Error(ErrorKind::NegativeGamma, "gamma must be >= 0");
}

}  // namespace detail

/// Solves (diag(mu) + gamma (D_W - W)) h = diag(mu) psi. Columns of `targets`
/// share one factorization.
inline Matrix solve_regularized_batch(const Network& net, const Matrix& targets, double gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw Error(ErrorKind::NegativeGamma, "gamma must be >= 0");
    check_dim(net.size(), targets.rows(), "targets");
    if (gamma == 0.0) return targets;
    Matrix A = gamma * weak_laplacian(net);
    A.diagonal() += net.mu();
    const linalg::SpdSolver solver(A);
    return solver.solve(Matrix(net.mu().asDiagonal() * targets));
}

inline Vector solve_regularized(const LearnProblem& p) {
    detail::validate(p);
    if (p.gamma == 0.0) return p.psi;
    return solve_regularized_batch(p.net, Matrix(p.psi), p.gamma).col(0);
}

/// Largest decrease Q(h) - Q(h + eps k) over random unit directions k.
inline double optimality_check(const LearnProblem& p, const Vector& h, int trials = 10, double eps = 1e-4,
                               std::uint64_t seed = 0) {
    detail::validate(p);
    if (trials < 10) throw Error(ErrorKind::DimensionMismatch, "trials must be >= 10");
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    const double base = objective(p, h).total();
    double worst = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        Vector k(h.size());
        for (Index i = 0; i < k.size(); ++i) k(i) = normal(gen);
        k.normalize();
        for (double s : {eps, -eps}) worst = std::max(worst, base - objective(p, Vector(h + s * k)).total());
    }
    return worst;
}

/// d/de Q(h + e k) at e = 0: -2 <psi - h, k>_{L2(mu)} + 2 gamma <h, k>_{H_E}.
inline double first_variation(const LearnProblem& p, const Vector& h, const Vector& k) {
    const Vector r = p.psi - h;
    return -2.0 * r.cwiseProduct(p.net.mu()).dot(k) + 2.0 * p.gamma * energy_inner(p.net, h, k);
}

// ---------------------------------------------------------------------------
// Special-case constructors

/// W = diag(nu): rho(A x B) = nu(A ∩ B); P = I and every f has zero energy.
inline Network diagonal_network(const Vector& nu, const Vector& mu) {
    check_dim(nu.size(), mu.size(), "mu");
    for (Index i = 0; i < nu.size(); ++i)
        if (!(nu(i) > 0.0)) throw Error(ErrorKind::ZeroConductance, "nu must be positive");
    return build_network(mu, Matrix(nu.asDiagonal()));
}

inline Network diagonal_network(const Vector& nu) { return diagonal_network(nu, Vector::Ones(nu.size())); }

/// rho_r = mu_r x mu_r with d mu_r = r d mu: W[i][j] = r_i mu_i r_j mu_j.
/// mu must be a probability vector.
inline Network product_measure_network(const Vector& mu, const Vector& r) {
    check_dim(mu.size(), r.size(), "r");
    if (std::abs(mu.sum() - 1.0) > 1e-12) throw Error(ErrorKind::NonpositiveMass, "mu must sum to 1");
    for (Index i = 0; i < r.size(); ++i)
        if (r(i) < 0.0) throw Error(ErrorKind::NegativeWeight, "r must be >= 0");
    if (!(r.cwiseProduct(mu).sum() > 0.0)) throw Error(ErrorKind::ZeroConductance, "E_mu(r) = 0");
    const Vector w = r.cwiseProduct(mu);
    return build_network(mu, w * w.transpose());
}

struct ProductClosedForm {
    double energy = 0.0;       // E_mu(r) E_{mu_r}(f^2) - E_{mu_r}(f)^2
    double alpha_norm = 0.0;   // |alpha(f)|^2_{L2(mu_r)}
    Vector alpha;              // (E_mu(r) f - E_{mu_r}(f)) / sqrt E_mu(r)
};

inline ProductClosedForm product_closed_form(const Vector& mu, const Vector& r, const Vector& f) {
    const Vector mu_r = r.cwiseProduct(mu);
    const double Er = mu_r.sum();
    const double Ef = mu_r.dot(f);
    const double Ef2 = mu_r.dot(f.cwiseProduct(f));
    ProductClosedForm out;
    out.energy = Er * Ef2 - Ef * Ef;
    out.alpha = (Er * f.array() - Ef) / std::sqrt(Er);
    out.alpha_norm = out.alpha.cwiseProduct(mu_r).dot(out.alpha);
    return out;
}

/// W[i][j] = mu_i [S(i) = j]. Requires mu o S^{-1} = mu and the flip
/// invariance mu(A ∩ S^{-1}B) = mu(S^{-1}A ∩ B) on singletons.
inline Network joining_network(const Vector& mu, const std::vector<Index>& S) {
    const Index n = mu.size();
    check_dim(n, static_cast<Index>(S.size()), "S");
    for (Index s : S) check_set({s}, n);
    Vector pushed = Vector::Zero(n);
    for (Index i = 0; i < n; ++i) pushed(S[static_cast<std::size_t>(i)]) += mu(i);
    for (Index j = 0; j < n; ++j) {
        if (std::abs(pushed(j) - mu(j)) > 1e-12 * std::max(1.0, mu(j))) {
            throw Error(ErrorKind::NotMeasurePreserving, "mu(S^-1{" + std::to_string(j) + "}) != mu(" + std::to_string(j) + ")");
        }
    }
    Matrix W = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) W(i, S[static_cast<std::size_t>(i)]) += mu(i);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            // W(i,j) = mu({i} ∩ S^{-1}{j}), W(j,i) = mu(S^{-1}{i} ∩ {j}).
            if (std::abs(W(i, j) - W(j, i)) > kSymmetryTol) {
                throw Error(ErrorKind::SymmetryViolation,
                            "pair (" + std::to_string(i) + ", " + std::to_string(j) + ") breaks flip invariance");
            }
        }
    }
    return build_network(mu, std::move(W));
}

}  // namespace mlap
