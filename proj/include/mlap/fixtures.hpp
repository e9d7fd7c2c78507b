#pragma once

// Canonical small networks used by the test suites, the report battery and
// `mlap fixtures`.

#include <optional>
#include <string>
#include <vector>

#include "mlap/learn.hpp"
#include "mlap/paths.hpp"

namespace mlap::fixtures {

struct Fixture {
    std::string name;
    Network net;
    std::optional<StateSet> boundary;
};

/// K3 with unit masses and unit edge weights.
inline Network triangle() {
    Matrix W = Matrix::Ones(3, 3);
    W.diagonal().setZero();
    return build_network({"a", "b", "c"}, Vector::Ones(3), W);
}

/// Path 0 - 1 - 2, unit masses and weights.
inline Network path3() {
    Matrix W = Matrix::Zero(3, 3);
    W(0, 1) = W(1, 0) = 1.0;
    W(1, 2) = W(2, 1) = 1.0;
    return build_network(Vector::Ones(3), W);
}

/// Edge {0,1} and weighted triangle {2,3,4}, non-uniform masses.
inline Network two_component() {
    Matrix W = Matrix::Zero(5, 5);
    W(0, 1) = W(1, 0) = 1.0;
    W(2, 3) = W(3, 2) = 1.0;
    W(3, 4) = W(4, 3) = 2.0;
    W(2, 4) = W(4, 2) = 1.0;
    Vector mu(5);
    mu << 1.0, 2.0, 1.0, 0.5, 1.5;
    return build_network(mu, W);
}

/// W = diag(1, 2, 3, 4), unit masses.
inline Network diagonal() {
    Vector nu(4);
    nu << 1.0, 2.0, 3.0, 4.0;
    return diagonal_network(nu);
}

/// Probability base measure and density r drawn from a fixed counter stream.
struct ProductInputs {
    Vector mu;
    Vector r;
};

inline ProductInputs product_inputs(std::uint64_t seed = 2024, Index n = 5) {
    const CounterRng rng(seed);
    ProductInputs in{Vector(n), Vector(n)};
    for (Index i = 0; i < n; ++i) {
        in.mu(i) = 0.5 + rng.uniform(0, static_cast<std::uint64_t>(i));
        in.r(i) = 0.5 + 1.5 * rng.uniform(1, static_cast<std::uint64_t>(i));
    }
    in.mu /= in.mu.sum();
    return in;
}

inline Network product() {
    const auto in = product_inputs();
    return product_measure_network(in.mu, in.r);
}

/// Joining of the involution swapping 0 <-> 1 and 2 <-> 3 (equal masses per pair).
inline Network joining_involution() {
    Vector mu(4);
    mu << 1.0, 1.0, 2.0, 2.0;
    return joining_network(mu, {1, 0, 3, 2});
}

/// Connected six-state network with self-loops and uneven masses, from a fixed stream.
inline Network weighted6(std::uint64_t seed = 7) {
    const CounterRng rng(seed);
    const Index n = 6;
    Matrix W = Matrix::Zero(n, n);
    std::uint64_t k = 0;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i; j < n; ++j) {
            const double u = rng.uniform(0, k++);
            const bool ring = (j == i + 1);
            if (ring || u < 0.45) W(i, j) = W(j, i) = 0.25 + 2.0 * rng.uniform(1, k);
        }
    }
    Vector mu(n);
    for (Index i = 0; i < n; ++i) mu(i) = 0.3 + 2.0 * rng.uniform(2, static_cast<std::uint64_t>(i));
    return build_network(mu, W);
}

/// The canonical fixtures written by `mlap fixtures`.
inline std::vector<Fixture> canonical() {
    return {
        {"triangle", triangle(), std::nullopt},
        {"path3", path3(), StateSet{2}},
        {"two_component", two_component(), std::nullopt},
        {"diagonal", diagonal(), std::nullopt},
        {"product", product(), std::nullopt},
        {"joining", joining_involution(), std::nullopt},
    };
}

/// Canonical fixtures plus the weighted six-state network.
inline std::vector<Fixture> all() {
    auto out = canonical();
    out.push_back({"weighted6", weighted6(), StateSet{5}});
    return out;
}

}  // namespace mlap::fixtures
