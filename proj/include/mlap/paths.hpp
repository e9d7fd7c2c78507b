#pragma once

// Path space of the reversible chain: reproducible path sampling, exact
// cylinder masses under lambda = int P_x dnu(x), and the variance/dissipation
// split of the energy norm.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "mlap/energy.hpp"
#include "mlap/operators.hpp"

namespace mlap {

/// Counter-based generator: the draw for (seed, stream, counter) is a pure
/// function of its arguments, so every path owns an independent stream and
/// batches do not depend on how paths are split across threads.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    [[nodiscard]] std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const noexcept {
        std::uint64_t x = mix(seed_ ^ 0x6a09e667f3bcc909ULL);
        x = mix(x ^ (stream * 0x9e3779b97f4a7c15ULL));
        x = mix(x ^ (counter * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL));
        return x;
    }

    /// Uniform on [0, 1) with 53 random bits.
    [[nodiscard]] double uniform(std::uint64_t stream, std::uint64_t counter) const noexcept {
        return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
    }

private:
    static std::uint64_t mix(std::uint64_t z) noexcept {  // splitmix64 finalizer
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
};

enum class StartLaw { Nu, Fixed };

struct PathBatch {
    std::uint64_t seed = 0;
    int steps = 0;  // m
    Index count = 0;
    StartLaw start_law = StartLaw::Nu;
    Index start_state = 0;     // used when start_law == Fixed
    std::vector<Index> paths;  // count x (steps + 1), row-major

    [[nodiscard]] Index at(Index path, int t) const {
        return paths[static_cast<std::size_t>(path * (steps + 1) + t)];
    }

    friend bool operator==(const PathBatch&, const PathBatch&) = default;
};

namespace detail {

inline Index draw(const std::vector<double>& cumulative, double u) {
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u * cumulative.back());
    const auto idx = std::min<std::ptrdiff_t>(it - cumulative.begin(), static_cast<std::ptrdiff_t>(cumulative.size()) - 1);
    return static_cast<Index>(idx);
}

inline std::vector<double> cumulative(const Eigen::Ref<const Vector>& weights) {
    std::vector<double> out(static_cast<std::size_t>(weights.size()));
    double acc = 0.0;
    for (Index j = 0; j < weights.size(); ++j) {
        acc += weights(j);
        out[static_cast<std::size_t>(j)] = acc;
    }
    return out;
}

}  // namespace detail

/// Draws `count` paths of `steps` transitions. Stream = path index; counter 0
/// picks the start, counter t the t-th step.
inline PathBatch sample_paths(const Network& net, std::uint64_t seed, int steps, Index count,
                              StartLaw start_law = StartLaw::Nu, Index start_state = 0, unsigned threads = 1) {
    if (steps < 1 || count < 1) throw Error(ErrorKind::DimensionMismatch, "steps and count must be >= 1");
    const Index n = net.size();
    if (start_law == StartLaw::Fixed) check_set({start_state}, n);

    const Vector nu = net.W().rowwise().sum();
    const auto start_cdf = detail::cumulative(nu);
    std::vector<std::vector<double>> row_cdf;
    row_cdf.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) row_cdf.push_back(detail::cumulative(Vector(net.W().row(i).transpose())));

    PathBatch batch;
    batch.seed = seed;
    batch.steps = steps;
    batch.count = count;
    batch.start_law = start_law;
    batch.start_state = start_law == StartLaw::Fixed ? start_state : 0;
    batch.paths.assign(static_cast<std::size_t>(count * (steps + 1)), 0);

    const CounterRng rng(seed);
    auto fill = [&](Index begin, Index end) {
        for (Index p = begin; p < end; ++p) {
            const auto stream = static_cast<std::uint64_t>(p);
            auto* row = &batch.paths[static_cast<std::size_t>(p * (steps + 1))];
            Index x = start_law == StartLaw::Fixed ? start_state : detail::draw(start_cdf, rng.uniform(stream, 0));
            row[0] = x;
            for (int t = 1; t <= steps; ++t) {
                x = detail::draw(row_cdf[static_cast<std::size_t>(x)], rng.uniform(stream, static_cast<std::uint64_t>(t)));
                row[t] = x;
            }
        }
    };

    threads = std::max(1u, threads);
    if (threads == 1 || count < 2) {
        fill(0, count);
    } else {
        std::vector<std::thread> pool;
        const Index chunk = (count + threads - 1) / threads;
        for (unsigned k = 0; k < threads; ++k) {
            const Index b = std::min<Index>(count, k * chunk);
            const Index e = std::min<Index>(count, b + chunk);
            if (b < e) pool.emplace_back(fill, b, e);
        }
        for (auto& t : pool) t.join();
    }
    return batch;
}

/// Empirical one-step transition frequencies over every step of the batch.
inline Matrix empirical_transitions(const PathBatch& batch, Index n) {
    Matrix counts = Matrix::Zero(n, n);
    for (Index p = 0; p < batch.count; ++p)
        for (int t = 0; t < batch.steps; ++t) counts(batch.at(p, t), batch.at(p, t + 1)) += 1.0;
    for (Index i = 0; i < n; ++i) {
        const double s = counts.row(i).sum();
        if (s > 0.0) counts.row(i) /= s;
    }
    return counts;
}

/// lambda(X_0 in A_0, ..., X_k in A_k), by masked backward products.
inline double cylinder_mass(const Network& net, const std::vector<StateSet>& sets) {
    if (sets.empty()) throw Error(ErrorKind::DimensionMismatch, "cylinder needs at least one set");
    const Index n = net.size();
    const DerivedMeasures d = derive(net);
    Vector v = indicator(sets.back(), n);
    for (std::size_t k = sets.size() - 1; k-- > 0;) v = indicator(sets[k], n).cwiseProduct(d.P * v);
    return d.nu.dot(v);
}

/// |lambda(X_0 in A | X_1 in B) - lambda(X_1 in A | X_0 in B)|: time reversal.
inline double reversal_gap(const Network& net, const StateSet& A, const StateSet& B) {
    const Vector nu = net.W().rowwise().sum();
    const double nuB = measure(nu, B);
    if (nuB == 0.0) return 0.0;
    const double forward = cylinder_mass(net, {A, B}) / nuB;   // X_0 in A given X_1 in B
    const double backward = cylinder_mass(net, {B, A}) / nuB;  // X_1 in A given X_0 in B
    return std::abs(forward - backward);
}

struct DissipationSplit {
    double variance_term = 0.0;     // int Var_x(f o X_1) dnu
    double dissipation_term = 0.0;  // |f - P f|^2_{L2(nu)}
    double total = 0.0;             // (variance + dissipation) / 2 = |f|^2_{H_E}
};

inline DissipationSplit dissipation_norm(const Network& net, const Vector& f) {
    check_dim(net.size(), f.size(), "f");
    const DerivedMeasures d = derive(net);
    const Vector Pf = d.P * f;
    const Vector var = d.P * f.cwiseProduct(f) - Pf.cwiseProduct(Pf);
    const Vector diff = f - Pf;
    DissipationSplit s;
    s.variance_term = d.nu.dot(var);
    s.dissipation_term = diff.cwiseProduct(d.nu).dot(diff);
    s.total = 0.5 * (s.variance_term + s.dissipation_term);
    return s;
}

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo value of 1/2 nu(V) E[(f(X_1) - f(X_0))^2] with X_0 ~ nu / nu(V).
inline McEstimate mc_energy_estimate(const Network& net, const Vector& f, std::uint64_t seed, Index count,
                                     unsigned threads = 1) {
    check_dim(net.size(), f.size(), "f");
    if (count < 100) throw Error(ErrorKind::DimensionMismatch, "count must be >= 100");
    const PathBatch batch = sample_paths(net, seed, 1, count, StartLaw::Nu, 0, threads);
    const double scale = 0.5 * net.W().sum();
    double sum = 0.0;
    double sum_sq = 0.0;
    for (Index p = 0; p < count; ++p) {
        const double d = f(batch.at(p, 1)) - f(batch.at(p, 0));
        const double y = d * d;
        sum += y;
        sum_sq += y * y;
    }
    const double N = static_cast<double>(count);
    const double mean = sum / N;
    const double var = std::max(0.0, (sum_sq - N * mean * mean) / (N - 1.0));
    return {scale * mean, scale * std::sqrt(var / N)};
}

struct OrthogonalityReport {
    double residual = 0.0;  // <g1 o X_n, P g2 o X_n - g2 o X_{n+1}>_D
    double scale = 0.0;     // sum of absolute contributions
};

/// Exact evaluation through the law of (X_n, X_{n+1}) under lambda.
inline OrthogonalityReport orthogonality_residual(const Network& net, const Vector& g1, const Vector& g2, int n) {
    if (n < 0) throw Error(ErrorKind::NegativePower, "n must be >= 0");
    check_dim(net.size(), g1.size(), "g1");
    check_dim(net.size(), g2.size(), "g2");
    const DerivedMeasures d = derive(net);
    // Row vector nu^T P^n: law of X_n under lambda.
    Vector law = d.nu;
    for (int k = 0; k < n; ++k) law = d.P.transpose() * law;
    const Matrix joint = law.asDiagonal() * d.P;  // law of (X_n, X_{n+1})
    const Vector Pg2 = d.P * g2;
    const double term_now = 0.5 * law.cwiseProduct(g1).dot(Pg2);
    const double term_next = 0.5 * g1.dot(joint * g2);
    OrthogonalityReport r;
    r.residual = term_now - term_next;
    r.scale = 0.5 * (law.cwiseProduct(g1.cwiseAbs()).dot(Pg2.cwiseAbs()) +
                     g1.cwiseAbs().dot(joint * g2.cwiseAbs())) + 1e-300;
    return r;
}

/// (I - P) f o X_n against P f o X_n - f o X_{n+1}.
inline OrthogonalityReport increment_orthogonality(const Network& net, const Vector& f, int n) {
    return orthogonality_residual(net, f - apply_P(net, f), f, n);
}

/// Integrated one-step conditional variance at step 1 and at step n:
/// int Var_x(f o X_k | X_{k-1}) dnu = <nu P^{k-1}, P(f^2) - (P f)^2>.
inline std::pair<double, double> variance_invariance(const Network& net, const Vector& f, int n) {
    if (n < 1) throw Error(ErrorKind::NegativePower, "n must be >= 1");
    check_dim(net.size(), f.size(), "f");
    const DerivedMeasures d = derive(net);
    const Vector Pf = d.P * f;
    const Vector var = d.P * f.cwiseProduct(f) - Pf.cwiseProduct(Pf);
    Vector law = d.nu;
    for (int k = 1; k < n; ++k) law = d.P.transpose() * law;
    return {d.nu.dot(var), law.dot(var)};
}

}  // namespace mlap
