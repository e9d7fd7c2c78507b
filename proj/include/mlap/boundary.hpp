#pragma once

#include <queue>
#include <string>

#include "mlap/network.hpp"

namespace mlap {

/// Absorbing subset that makes the killed chain transient.
struct BoundaryConfig {
    StateSet boundary;  // sorted, nonempty
    StateSet interior;  // sorted complement

    [[nodiscard]] bool contains(Index i) const {
        return std::binary_search(boundary.begin(), boundary.end(), i);
    }
};

/// Validates that every interior state has a support-graph path to the
/// boundary; throws TrappedInterior otherwise.
inline BoundaryConfig make_boundary(const Network& net, StateSet boundary) {
    const Index n = net.size();
    check_set(boundary, n);
    boundary = normalized(std::move(boundary));
    if (boundary.empty()) throw Error(ErrorKind::MissingBoundary, "boundary must be nonempty");

    std::vector<bool> reached(static_cast<std::size_t>(n), false);
    std::queue<Index> q;
    for (Index b : boundary) {
        reached[static_cast<std::size_t>(b)] = true;
        q.push(b);
    }
    while (!q.empty()) {
        const Index u = q.front();
        q.pop();
        for (Index v = 0; v < n; ++v) {
            if (net.W()(u, v) > 0.0 && !reached[static_cast<std::size_t>(v)]) {
                reached[static_cast<std::size_t>(v)] = true;
                q.push(v);
            }
        }
    }
    for (Index i = 0; i < n; ++i) {
        if (!reached[static_cast<std::size_t>(i)]) {
            throw Error(ErrorKind::TrappedInterior,
                        "state '" + net.states()[static_cast<std::size_t>(i)] + "' cannot reach the boundary");
        }
    }
    BoundaryConfig cfg;
    cfg.interior = complement(boundary, n);
    cfg.boundary = std::move(boundary);
    return cfg;
}

}  // namespace mlap
