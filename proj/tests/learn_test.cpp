#include "test_util.hpp"

namespace mlap::test {
namespace {

TEST(Learn, GammaZeroReturnsTarget) {
    Gen gen(163);
    for (const auto& fx : all_fixtures()) {
        const Vector psi = gen.vec(fx.net.size());
        EXPECT_EQ(solve_regularized({fx.net, psi, 0.0}), psi);
        const LearnProblem p{fx.net, psi, 0.0};
        EXPECT_LE(optimality_check(p, psi, 10), 0.0);
    }
}

TEST(Learn, TriangleMatchesDenseSolve) {
    const Network tri = fixtures::triangle();
    Vector psi(3);
    psi << 1, 0, 0;
    const Vector h = solve_regularized({tri, psi, 1.0});
    // (I + L) h = psi with L = [[2,-1,-1],[-1,2,-1],[-1,-1,2]].
    Matrix A(3, 3);
    A << 3, -1, -1, -1, 3, -1, -1, -1, 3;
    const Vector oracle = A.fullPivLu().solve(psi);
    EXPECT_LE((h - oracle).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(h(0), 0.5, 1e-14);
    EXPECT_NEAR(h(1), 0.25, 1e-14);
}

TEST(Learn, LargeGammaGivesMuMean) {
    Gen gen(167);
    for (const auto& fx : all_fixtures()) {
        const Vector psi = gen.vec(fx.net.size());
        const Vector h = solve_regularized({fx.net, psi, 1e8});
        // Limit: mu-weighted mean of psi on each component (one constant when connected).
        for (const auto& comp : irreducibility(fx.net).components) {
            double m = 0.0;
            double w = 0.0;
            for (Index i : comp) {
                m += fx.net.mu()(i) * psi(i);
                w += fx.net.mu()(i);
            }
            for (Index i : comp) EXPECT_NEAR(h(i), m / w, 1e-6) << fx.name;
        }
    }
}

TEST(Learn, OptimalityAndGradient) {
    Gen gen(173);
    for (const auto& fx : all_fixtures()) {
        const Index n = fx.net.size();
        for (double gamma : {0.1, 1.0, 25.0}) {
            const LearnProblem p{fx.net, gen.vec(n), gamma};
            const Vector h = solve_regularized(p);
            const double Q = objective(p, h).total();
            EXPECT_LE(optimality_check(p, h, 20, 1e-4, 3), 1e-10 * (1.0 + Q)) << fx.name;
            for (int t = 0; t < 5; ++t) {
                const Vector h0 = gen.vec(n);
                const Vector k = gen.vec(n);
                const double eps = 1e-5;
                const double fd = (objective(p, Vector(h0 + eps * k)).total() - objective(p, Vector(h0 - eps * k)).total()) / (2 * eps);
                EXPECT_LE(rel(fd, first_variation(p, h0, k)), 1e-6) << fx.name;
            }
            EXPECT_NEAR(first_variation(p, h, gen.vec(n)), 0.0, 1e-10);
        }
    }
}

TEST(Learn, TargetIsNotOptimalWhenPenalized) {
    const Network tri = fixtures::triangle();
    Vector psi(3);
    psi << 1, 0, 0;
    const LearnProblem p{tri, psi, 1.0};
    EXPECT_GT(optimality_check(p, psi, 10), 0.0);
    const Vector h = solve_regularized(p);
    EXPECT_LT(objective(p, h).total(), objective(p, psi).total());
}

TEST(Learn, ScalingInvariance) {
    Gen gen(179);
    const Network net = fixtures::weighted6();
    const Vector psi = gen.vec(6);
    const Vector h = solve_regularized({net, psi, 2.0});
    const Network scaled = build_network(Vector(3.0 * net.mu()), Matrix(3.0 * net.W()));
    EXPECT_LE((solve_regularized({scaled, psi, 2.0}) - h).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Learn, BatchSharesFactorization) {
    Gen gen(181);
    const Network net = fixtures::weighted6();
    Matrix targets(6, 3);
    for (Index k = 0; k < 3; ++k) targets.col(k) = gen.vec(6);
    const Matrix H = solve_regularized_batch(net, targets, 0.7);
    for (Index k = 0; k < 3; ++k)
        EXPECT_LE((H.col(k) - solve_regularized({net, targets.col(k), 0.7})).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Learn, Errors) {
    const Network tri = fixtures::triangle();
    EXPECT_THROW_KIND(solve_regularized({tri, Vector::Ones(3), -1.0}), ErrorKind::NegativeGamma);
    EXPECT_THROW_KIND(solve_regularized({tri, Vector::Ones(2), 1.0}), ErrorKind::DimensionMismatch);
    Vector bad = Vector::Ones(3);
    bad(1) = std::nan("");
    EXPECT_THROW_KIND(solve_regularized({tri, bad, 1.0}), ErrorKind::NonFinite);
}

TEST(SpdSolver, DenseAndIterativePathsAgree) {
    Gen gen(191);
    const Index n = 600;
    Matrix W = Matrix::Zero(n, n);
    for (Index i = 0; i + 1 < n; ++i) W(i, i + 1) = W(i + 1, i) = gen.uniform(0.5, 1.5);
    for (int k = 0; k < 400; ++k) {
        const auto i = static_cast<Index>(gen.uniform(0, n - 1e-9));
        const auto j = static_cast<Index>(gen.uniform(0, n - 1e-9));
        if (i != j) W(i, j) = W(j, i) = gen.uniform(0.1, 1.0);
    }
    const Network net = build_network(gen.vec(n, 0.5, 2.0), W);
    const Vector psi = gen.vec(n);
    const Vector h = solve_regularized({net, psi, 1.0});
    Matrix A = weak_laplacian(net);
    A.diagonal() += net.mu();
    const Vector oracle = A.llt().solve(Vector(net.mu().cwiseProduct(psi)));
    EXPECT_LE((h - oracle).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Diagonal, ZeroEnergy) {
    Gen gen(193);
    const Network d = fixtures::diagonal();
    for (int t = 0; t < 10; ++t) EXPECT_EQ(energy_norm_sq(d, gen.vec(4)), 0.0);
    EXPECT_EQ(derive(d).P, Matrix::Identity(4, 4));
    for (Index i = 0; i < 4; ++i) EXPECT_EQ(d.W()(i, i), static_cast<double>(i + 1));
    // rho(A x B) = nu(A ∩ B).
    EXPECT_EQ(rho(d, {0, 1, 3}, {1, 2, 3}), 2.0 + 4.0);
    Vector nu(2);
    nu << 1.0, 0.0;
    EXPECT_THROW_KIND(diagonal_network(nu), ErrorKind::ZeroConductance);
}

TEST(Product, ClosedFormAndConductance) {
    const auto in = fixtures::product_inputs();
    const Network net = fixtures::product();
    const double Er = in.r.dot(in.mu);
    const auto d = derive(net);
    EXPECT_LE((d.c - Er * in.r).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_TRUE(harmonic_basis(net).empty());
    Gen gen(197);
    for (int t = 0; t < 50; ++t) {
        const Vector f = gen.vec(5);
        const auto cf = product_closed_form(in.mu, in.r, f);
        const double e = energy_oracle(net.W(), f, f);
        EXPECT_LE(rel(cf.energy, e), 1e-10);
        EXPECT_LE(rel(cf.alpha_norm, e), 1e-10);
    }
    const auto z = product_closed_form(in.mu, in.r, Vector::Constant(5, 3.0));
    EXPECT_NEAR(z.energy, 0.0, 1e-14);
    EXPECT_NEAR(z.alpha_norm, 0.0, 1e-14);
    EXPECT_NEAR(energy_norm_sq(net, Vector::Constant(5, 3.0)), 0.0, 1e-14);
}

TEST(Product, UnitDensityCovariance) {
    const Vector mu = Vector::Constant(4, 0.25);
    const Network net = product_measure_network(mu, Vector::Ones(4));
    for (unsigned long a = 0; a < 16; ++a) {
        const StateSet A = subset_from_mask(a, 4);
        const double mA = measure(mu, A);
        EXPECT_NEAR(energy_norm_sq(net, indicator(A, 4)), mA - mA * mA, 1e-15);
        for (unsigned long b = 0; b < 16; ++b) {
            const StateSet B = subset_from_mask(b, 4);
            const double cov = measure(mu, subset_from_mask(a & b, 4)) - mA * measure(mu, B);
            EXPECT_NEAR(energy_inner(net, indicator(A, 4), indicator(B, 4)), cov, 1e-15);
        }
    }
}

TEST(Product, Errors) {
    const Vector mu = Vector::Constant(4, 0.25);
    EXPECT_THROW_KIND(product_measure_network(mu, Vector::Zero(4)), ErrorKind::ZeroConductance);
    Vector r = Vector::Ones(4);
    r(2) = -1.0;
    EXPECT_THROW_KIND(product_measure_network(mu, r), ErrorKind::NegativeWeight);
    EXPECT_THROW_KIND(product_measure_network(Vector::Ones(4), Vector::Ones(4)), ErrorKind::NonpositiveMass);
}

TEST(Joining, Identity) {
    Vector mu(3);
    mu << 1, 2, 3;
    const Network net = joining_network(mu, {0, 1, 2});
    EXPECT_EQ(net.W(), Matrix(mu.asDiagonal()));
    Gen gen(199);
    EXPECT_EQ(apply_Delta(net, gen.vec(3)), Vector::Zero(3));
}

TEST(Joining, InvolutionIsCoboundary) {
    const Network net = fixtures::joining_involution();
    const std::vector<Index> S{1, 0, 3, 2};
    Gen gen(211);
    for (int t = 0; t < 10; ++t) {
        const Vector f = gen.vec(4);
        const Vector lap = apply_Delta(net, f);
        for (Index i = 0; i < 4; ++i) EXPECT_NEAR(lap(i), f(i) - f(S[static_cast<std::size_t>(i)]), 1e-15);
    }
}

TEST(Joining, Errors) {
    EXPECT_THROW_KIND(joining_network(Vector::Ones(3), {1, 2, 0}), ErrorKind::SymmetryViolation);
    Vector mu(2);
    mu << 1, 2;
    EXPECT_THROW_KIND(joining_network(mu, {1, 0}), ErrorKind::NotMeasurePreserving);
    EXPECT_THROW_KIND(joining_network(mu, {0, 5}), ErrorKind::IndexOutOfRange);
}

}  // namespace
}  // namespace mlap::test
