#pragma once

// Finite atomic symmetric measures: a base measure mu on n atoms and a
// symmetric coupling matrix W whose entries are the masses of atom pairs.

#include <cmath>
#include <optional>
#include <queue>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mlap/types.hpp"

namespace mlap {

inline constexpr double kSymmetryTol = 1e-12;

/// Validated (states, mu, W). Immutable after construction; W is stored
/// exactly symmetric.
class Network {
public:
    static Network build(std::vector<std::string> states, Vector mu, Matrix W) {
        const Index n = static_cast<Index>(states.size());
        if (n < 1) throw Error(ErrorKind::DimensionMismatch, "network needs at least one state");
        check_dim(n, mu.size(), "mu");
        if (W.rows() != n || W.cols() != n) {
            throw Error(ErrorKind::DimensionMismatch, "W must be " + std::to_string(n) + "x" + std::to_string(n));
        }
        {
            std::unordered_set<std::string> seen;
            for (const auto& s : states)
                if (!seen.insert(s).second) throw Error(ErrorKind::ParseError, "duplicate state id '" + s + "'");
        }
        if (!mu.allFinite() || !W.allFinite()) throw Error(ErrorKind::NonFinite, "mu and W must be finite");
        for (Index i = 0; i < n; ++i) {
            if (!(mu(i) > 0.0)) {
                throw Error(ErrorKind::NonpositiveMass, "mu[" + std::to_string(i) + "] = " + std::to_string(mu(i)));
            }
        }
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < n; ++j) {
                if (W(i, j) < 0.0) {
                    throw Error(ErrorKind::NegativeWeight,
                                "W[" + std::to_string(i) + "][" + std::to_string(j) + "] < 0");
                }
                if (std::abs(W(i, j) - W(j, i)) > kSymmetryTol) {
                    throw Error(ErrorKind::AsymmetricCoupling,
                                "W[" + std::to_string(i) + "][" + std::to_string(j) + "] != W[" + std::to_string(j) +
                                    "][" + std::to_string(i) + "]");
                }
            }
        }
        Matrix sym = 0.5 * (W + W.transpose());
        for (Index i = 0; i < n; ++i) {
            if (!(sym.row(i).sum() > 0.0)) {
                throw Error(ErrorKind::ZeroConductance, "row " + std::to_string(i) + " of W sums to 0");
            }
        }
        return Network(std::move(states), std::move(mu), std::move(sym));
    }

    [[nodiscard]] Index size() const noexcept { return mu_.size(); }
    [[nodiscard]] const std::vector<std::string>& states() const noexcept { return states_; }
    [[nodiscard]] const Vector& mu() const noexcept { return mu_; }
    [[nodiscard]] const Matrix& W() const noexcept { return W_; }

    /// Index of a state identifier, or nullopt.
    [[nodiscard]] std::optional<Index> find(const std::string& id) const {
        for (std::size_t i = 0; i < states_.size(); ++i)
            if (states_[i] == id) return static_cast<Index>(i);
        return std::nullopt;
    }

    friend bool operator==(const Network& a, const Network& b) {
        return a.states_ == b.states_ && a.mu_ == b.mu_ && a.W_ == b.W_;
    }

private:
    Network(std::vector<std::string> states, Vector mu, Matrix W)
        : states_(std::move(states)), mu_(std::move(mu)), W_(std::move(W)) {}

    std::vector<std::string> states_;
    Vector mu_;
    Matrix W_;
};

/// Default identifiers "0", "1", ...
inline std::vector<std::string> default_state_ids(Index n) {
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) ids.push_back(std::to_string(i));
    return ids;
}

inline Network build_network(std::vector<std::string> states, Vector mu, Matrix W) {
    return Network::build(std::move(states), std::move(mu), std::move(W));
}

inline Network build_network(Vector mu, Matrix W) {
    auto ids = default_state_ids(mu.size());
    return Network::build(std::move(ids), std::move(mu), std::move(W));
}

/// rho# = (rho + rho o flip) / 2.
inline Network symmetrize(const Matrix& W_raw, const Vector& mu, std::vector<std::string> states = {}) {
    if (W_raw.rows() != W_raw.cols()) throw Error(ErrorKind::DimensionMismatch, "W_raw must be square");
    if (states.empty()) states = default_state_ids(W_raw.rows());
    Matrix sym = 0.5 * (W_raw + W_raw.transpose());
    return Network::build(std::move(states), mu, std::move(sym));
}

struct DerivedMeasures {
    Vector c;      // conductance, row sum of W over mu
    Vector nu;     // c * mu
    Matrix P;      // row-stochastic transition matrix
    Matrix rho_x;  // conditional rows W[i][j] / mu[i]
};

inline DerivedMeasures derive(const Network& net) {
    const Vector row = net.W().rowwise().sum();
    DerivedMeasures d;
    d.nu = row;
    d.c = row.cwiseQuotient(net.mu());
    d.rho_x = net.mu().cwiseInverse().asDiagonal() * net.W();
    d.P = row.cwiseInverse().asDiagonal() * net.W();
    return d;
}

/// rho(A x B) = sum over i in A, j in B of W[i][j].
inline double rho(const Network& net, const StateSet& A, const StateSet& B) {
    const Index n = net.size();
    return indicator(A, n).dot(net.W() * indicator(B, n));
}

inline double measure(const Vector& weights, const StateSet& A) {
    return indicator(A, weights.size()).dot(weights);
}

// ---------------------------------------------------------------------------
// Reweighting

struct ReweightResult {
    Vector beta;                  // p * mu
    Matrix coupling;              // atoms of rho_beta: W[i][j] * p[i]
    bool commutes = false;        // diag(p) R == R diag(p)
    std::optional<Network> net2;  // present iff rho_beta is symmetric
};

/// Keeps the fiber family rho_x fixed and moves the base measure to p * mu.
inline ReweightResult reweight(const Network& net, const Vector& p) {
    const Index n = net.size();
    check_dim(n, p.size(), "p");
    for (Index i = 0; i < n; ++i)
        if (!(p(i) > 0.0) || !std::isfinite(p(i)))
            throw Error(ErrorKind::NonpositiveWeight, "p[" + std::to_string(i) + "] must be positive");

    ReweightResult out;
    out.beta = p.cwiseProduct(net.mu());
    out.coupling = p.asDiagonal() * net.W();

    const Matrix R = net.mu().cwiseInverse().asDiagonal() * net.W();
    const Matrix commutator = p.asDiagonal() * R - R * p.asDiagonal();
    const double scale = std::max(1.0, (p.asDiagonal() * R).cwiseAbs().maxCoeff());
    out.commutes = commutator.cwiseAbs().maxCoeff() <= 1e-10 * scale;
    if (out.commutes) {
        // Exact symmetry is restored by build(); the deviation is below 1e-10 relative.
        Matrix sym = 0.5 * (out.coupling + out.coupling.transpose());
        out.net2 = Network::build(net.states(), out.beta, std::move(sym));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Irreducibility

struct Irreducibility {
    bool irreducible = false;
    std::vector<StateSet> components;  // ordered by smallest member
};

inline Irreducibility irreducibility(const Network& net) {
    const Index n = net.size();
    std::vector<Index> label(static_cast<std::size_t>(n), -1);
    Irreducibility out;
    for (Index start = 0; start < n; ++start) {
        if (label[static_cast<std::size_t>(start)] >= 0) continue;
        const Index id = static_cast<Index>(out.components.size());
        StateSet comp;
        std::queue<Index> q;
        q.push(start);
        label[static_cast<std::size_t>(start)] = id;
        while (!q.empty()) {
            const Index u = q.front();
            q.pop();
            comp.push_back(u);
            for (Index v = 0; v < n; ++v) {
                if (net.W()(u, v) > 0.0 && label[static_cast<std::size_t>(v)] < 0) {
                    label[static_cast<std::size_t>(v)] = id;
                    q.push(v);
                }
            }
        }
        out.components.push_back(normalized(std::move(comp)));
    }
    out.irreducible = out.components.size() == 1;
    return out;
}

/// Least n >= 1 with P_n(x, A) > 0, or nullopt when A is unreachable from x.
inline std::optional<int> attainability(const Network& net, Index x, const StateSet& A) {
    const Index n = net.size();
    if (A.empty()) throw Error(ErrorKind::EmptyTargetSet, "target set is empty");
    check_set(A, n);
    check_set({x}, n);

    // Walks of length >= 1: BFS from the out-neighbours of x at depth 1.
    std::vector<int> depth(static_cast<std::size_t>(n), -1);
    std::queue<Index> q;
    for (Index v = 0; v < n; ++v) {
        if (net.W()(x, v) > 0.0) {
            depth[static_cast<std::size_t>(v)] = 1;
            q.push(v);
        }
    }
    while (!q.empty()) {
        const Index u = q.front();
        q.pop();
        for (Index v = 0; v < n; ++v) {
            if (net.W()(u, v) > 0.0 && depth[static_cast<std::size_t>(v)] < 0) {
                depth[static_cast<std::size_t>(v)] = depth[static_cast<std::size_t>(u)] + 1;
                q.push(v);
            }
        }
    }
    std::optional<int> best;
    for (Index a : A) {
        const int d = depth[static_cast<std::size_t>(a)];
        if (d > 0 && (!best || d < *best)) best = d;
    }
    return best;
}

}  // namespace mlap
