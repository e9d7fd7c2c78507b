#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "mlap/error.hpp"

namespace mlap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// A subset of state indices. Order is irrelevant; duplicates are ignored by
/// every consumer that builds an indicator.
using StateSet = std::vector<Index>;

/// Family of subsets over which kernel Gram matrices are assembled. Repeats
/// are allowed.
struct SetFamily {
    std::vector<StateSet> sets;
    std::vector<std::string> names;  // optional, same length as sets when present

    [[nodiscard]] std::size_t size() const noexcept { return sets.size(); }
};

enum class KernelId { K, k_rho, K_nu, N_rho };

constexpr const char* to_string(KernelId id) noexcept {
    switch (id) {
        case KernelId::K: return "K";
        case KernelId::k_rho: return "krho";
        case KernelId::K_nu: return "Knu";
        case KernelId::N_rho: return "Nrho";
    }
    return "?";
}

/// Gram matrix of a set kernel over a family, with provenance.
struct KernelGram {
    KernelId kernel_id = KernelId::k_rho;
    SetFamily family;
    Matrix gram;
};

inline void check_dim(Index expected, Index got, const char* what) {
    if (expected != got) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(what) + ": expected length " + std::to_string(expected) +
                        ", got " + std::to_string(got));
    }
}

inline void check_set(const StateSet& set, Index n) {
    for (Index i : set) {
        if (i < 0 || i >= n) {
            throw Error(ErrorKind::IndexOutOfRange,
                        "state index " + std::to_string(i) + " outside [0, " + std::to_string(n) + ")");
        }
    }
}

/// 0/1 vector of a subset.
inline Vector indicator(const StateSet& set, Index n) {
    check_set(set, n);
    Vector chi = Vector::Zero(n);
    for (Index i : set) chi(i) = 1.0;
    return chi;
}

inline StateSet complement(const StateSet& set, Index n) {
    std::vector<bool> in(static_cast<std::size_t>(n), false);
    for (Index i : set) in[static_cast<std::size_t>(i)] = true;
    StateSet out;
    for (Index i = 0; i < n; ++i)
        if (!in[static_cast<std::size_t>(i)]) out.push_back(i);
    return out;
}

inline StateSet all_states(Index n) {
    StateSet out(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
    return out;
}

/// Sorted, deduplicated copy.
inline StateSet normalized(StateSet set) {
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    return set;
}

/// Subset encoded by the bits of `mask` (bit i set means state i is in).
inline StateSet subset_from_mask(unsigned long mask, Index n) {
    StateSet out;
    for (Index i = 0; i < n; ++i)
        if (mask & (1UL << i)) out.push_back(i);
    return out;
}

}  // namespace mlap
