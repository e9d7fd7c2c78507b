#include "test_util.hpp"

namespace mlap::test {
namespace {

Vector v3(double a, double b, double c) {
    Vector v(3);
    v << a, b, c;
    return v;
}

TEST(EnergyInner, TriangleExamples) {
    const Network tri = fixtures::triangle();
    EXPECT_DOUBLE_EQ(energy_inner(tri, v3(1, 0, 0), v3(1, 0, 0)), 2.0);
    EXPECT_DOUBLE_EQ(energy_inner(tri, v3(1, 0, 0), v3(0, 1, 0)), -1.0);
    EXPECT_EQ(energy_inner(tri, Vector::Constant(3, 7.0), v3(0.3, 1, -2)), 0.0);
}

TEST(EnergyInner, MatchesOracleAndWeakForm) {
    Gen gen(43);
    for (const auto& fx : all_fixtures()) {
        const Index n = fx.net.size();
        const Matrix L = weak_laplacian(fx.net);
        for (int t = 0; t < 50; ++t) {
            const Vector f = gen.vec(n);
            const Vector g = gen.vec(n);
            const double e = energy_inner(fx.net, f, g);
            EXPECT_LE(rel(e, energy_oracle(fx.net.W(), f, g)), 1e-12) << fx.name;
            EXPECT_LE(rel(e, f.dot(L * g)), 1e-12) << fx.name;
            EXPECT_LE(rel(e, f.cwiseProduct(fx.net.mu()).dot(apply_Delta(fx.net, g))), 1e-10) << fx.name;
            EXPECT_LE(rel(e, energy_inner(fx.net, Vector(f.array() + 3.0), Vector(g.array() - 1.5))), 1e-12);
            const double norm = energy_norm_sq(fx.net, f);
            EXPECT_LE(rel(norm, l2_rho_norm_sq(fx.net, difference_embedding(f))), 1e-12) << fx.name;
        }
    }
}

TEST(EnergyElement, CanonicalRepresentative) {
    Gen gen(47);
    for (const auto& fx : all_fixtures()) {
        const Vector f = gen.vec(fx.net.size());
        const auto e = canonical(fx.net, f);
        EXPECT_TRUE(e.canonical);
        EXPECT_NEAR(e.values.dot(derive(fx.net).nu), 0.0, 1e-12);
        const auto shifted = canonical(fx.net, Vector(f.array() + 10.0));
        EXPECT_LE((shifted.values - e.values).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(IndicatorGram, Examples) {
    const Network tri = fixtures::triangle();
    SetFamily fam;
    fam.sets = {{0}, {0, 1}, {0, 1, 2}};
    const auto g = indicator_gram(tri, fam);
    EXPECT_EQ(g.kernel_id, KernelId::k_rho);
    EXPECT_DOUBLE_EQ(g.gram(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(g.gram(0, 0), 2.0);
    EXPECT_EQ(g.gram(2, 2), 0.0);
    // Disjoint sets with no mass between them are orthogonal.
    SetFamily apart;
    apart.sets = {{0, 1}, {2, 4}};
    EXPECT_EQ(indicator_gram(fixtures::two_component(), apart).gram(0, 1), 0.0);
}

TEST(IndicatorGram, ExhaustiveGeometry) {
    for (const auto& fx : all_fixtures()) {
        const Index n = fx.net.size();
        const Vector nu = derive(fx.net).nu;
        for (unsigned long a = 0; a < (1UL << n); ++a) {
            const StateSet A = subset_from_mask(a, n);
            const StateSet Ac = complement(A, n);
            const Vector chiA = indicator(A, n);
            const double norm = energy_norm_sq(fx.net, chiA);
            EXPECT_LE(rel(norm, block_sum(fx.net.W(), A, Ac)), 1e-12) << fx.name;
            EXPECT_LE(rel(norm, energy_norm_sq(fx.net, indicator(Ac, n))), 1e-12);
            EXPECT_LE(rel(energy_inner(fx.net, chiA, indicator(Ac, n)), -block_sum(fx.net.W(), A, Ac)), 1e-12);
            for (unsigned long b = 0; b < (1UL << n); b += 3) {
                const StateSet B = subset_from_mask(b, n);
                double inter = 0.0;
                for (Index i = 0; i < n; ++i)
                    if (((a & b) >> i) & 1UL) inter += nu(i);
                EXPECT_LE(rel(energy_inner(fx.net, chiA, indicator(B, n)), inter - block_sum(fx.net.W(), A, B)), 1e-12);
            }
        }
    }
}

TEST(IndicatorGram, PsdForRandomFamilies) {
    Gen gen(53);
    for (const auto& fx : all_fixtures()) {
        for (int t = 0; t < 10; ++t) {
            SetFamily fam;
            for (int k = 0; k < 7; ++k) fam.sets.push_back(gen.subset(fx.net.size()));
            const Matrix g = indicator_gram(fx.net, fam).gram;
            EXPECT_GE(linalg::symmetric_eigenvalues(g).minCoeff(), -1e-9 * std::max(1.0, g.trace())) << fx.name;
        }
    }
}

TEST(Royden, Connected) {
    Gen gen(59);
    const Network tri = fixtures::triangle();
    const Vector f = gen.vec(3);
    const auto s = royden_project(tri, f);
    EXPECT_LE(s.h.values.cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE(energy_norm_sq(tri, Vector(s.d.values - f)), 1e-14);
}

TEST(Royden, BlockIndicatorIsHarmonic) {
    const Network two = fixtures::two_component();
    const Vector f = indicator({0, 1}, 5);
    const auto s = royden_project(two, f);
    EXPECT_LE(energy_norm_sq(two, s.d.values), 1e-14);
    // h equals f modulo constants: the difference has zero variation.
    const Vector diff = s.h.values - f;
    EXPECT_LE(diff.maxCoeff() - diff.minCoeff(), 1e-12);
}

TEST(Royden, OrthogonalPythagorean) {
    Gen gen(61);
    for (const auto& fx : all_fixtures()) {
        const Index n = fx.net.size();
        for (int t = 0; t < 20; ++t) {
            const Vector f = gen.vec(n);
            const auto s = royden_project(fx.net, f);
            EXPECT_LE(std::abs(energy_inner(fx.net, s.d.values, s.h.values)), 1e-10) << fx.name;
            EXPECT_LE(rel(energy_norm_sq(fx.net, f), energy_norm_sq(fx.net, s.d.values) + energy_norm_sq(fx.net, s.h.values)), 1e-9);
            // f = d + h modulo constants.
            const Vector gap = f - s.d.values - s.h.values;
            EXPECT_LE(gap.maxCoeff() - gap.minCoeff(), 1e-12) << fx.name;
            // h lies in the harmonic span (plus constants): Delta h = 0.
            EXPECT_LE(apply_Delta(fx.net, s.h.values).cwiseAbs().maxCoeff(), 1e-12);
            // d has zero mean on every component, the finite closure of indicator spans of proper subsets.
            const Vector nu = derive(fx.net).nu;
            for (const auto& comp : irreducibility(fx.net).components) {
                double m = 0.0;
                for (Index i : comp) m += nu(i) * s.d.values(i);
                EXPECT_NEAR(m, 0.0, 1e-12);
            }
        }
    }
}

TEST(Dipole, TriangleMuDipole) {
    const Network tri = fixtures::triangle();
    const auto sol = dipole(tri, DipoleKind::Mu, {0}, {1});
    EXPECT_LE(sol.residual, 1e-12);
    const Vector expect = v3(1.0 / 3.0, -1.0 / 3.0, 0.0);
    const Vector diff = sol.v.values - expect;
    EXPECT_LE(diff.maxCoeff() - diff.minCoeff(), 1e-14);
    EXPECT_LE((apply_Delta(tri, sol.v.values) - v3(1, -1, 0)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Dipole, EqualSetsGiveZero) {
    const auto sol = dipole(fixtures::weighted6(), DipoleKind::Nu, {1, 3}, {1, 3});
    EXPECT_LE(sol.v.values.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Dipole, PathWithBoundaryMatchesGreen) {
    const Network p = fixtures::path3();
    const auto bc = make_boundary(p, {2});
    const auto sol = dipole(p, DipoleKind::Nu, {0}, {}, bc);
    // Green oracle for P3 killed at 2: G = [[2,2],[1,2]], so G_{0} = (2, 1, 0).
    EXPECT_NEAR(sol.v.values(0), 2.0, 1e-12);
    EXPECT_NEAR(sol.v.values(1), 1.0, 1e-12);
    EXPECT_EQ(sol.v.values(2), 0.0);
    EXPECT_LE((sol.v.values - green_indicator(p, bc, {0})).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Dipole, Errors) {
    EXPECT_THROW_KIND(dipole(fixtures::path3(), DipoleKind::Mu, {0}, {}), ErrorKind::UnbalancedSets);
    // mu(0) = 1 = mu(2) but the states lie in different components.
    EXPECT_THROW_KIND(dipole(fixtures::two_component(), DipoleKind::Mu, {0}, {2}), ErrorKind::SingularSystem);
    const auto bc = make_boundary(fixtures::path3(), {2});
    EXPECT_THROW_KIND(dipole(fixtures::path3(), DipoleKind::Mu, {2}, {}, bc), ErrorKind::SetMeetsBoundary);
    EXPECT_THROW_KIND(dipole(fixtures::path3(), DipoleKind::Mu, {5}, {}), ErrorKind::IndexOutOfRange);
}

TEST(Dipole, ReproducingIdentity) {
    Gen gen(67);
    for (const auto& fx : all_fixtures()) {
        const Index n = fx.net.size();
        const Vector nu = derive(fx.net).nu;
        for (const auto kind : {DipoleKind::Mu, DipoleKind::Nu}) {
            const Vector& weight = kind == DipoleKind::Mu ? fx.net.mu() : nu;
            // Balanced pair within the first component with at least two states.
            for (const auto& comp : irreducibility(fx.net).components) {
                if (comp.size() < 2) continue;
                const StateSet A{comp[0]};
                const StateSet B{comp[1]};
                if (weight(comp[0]) != weight(comp[1])) continue;
                const auto sol = dipole(fx.net, kind, A, B);
                EXPECT_LE(sol.residual, 1e-9) << fx.name;
                for (int t = 0; t < 10; ++t) {
                    const Vector f = gen.vec(n);
                    const double rhs = weight(comp[0]) * f(comp[0]) - weight(comp[1]) * f(comp[1]);
                    EXPECT_LE(rel(energy_inner(fx.net, f, sol.v.values), rhs), 1e-9) << fx.name;
                }
            }
            if (fx.boundary) {
                const auto bc = make_boundary(fx.net, *fx.boundary);
                const StateSet A{bc.interior.front()};
                const auto sol = dipole(fx.net, kind, A, {}, bc);
                EXPECT_LE(sol.residual, 1e-9);
                for (int t = 0; t < 10; ++t) {
                    Vector f = gen.vec(n);
                    for (Index b : bc.boundary) f(b) = 0.0;
                    EXPECT_LE(rel(energy_inner(fx.net, f, sol.v.values), weight(A[0]) * f(A[0])), 1e-9) << fx.name;
                }
            }
        }
    }
}

TEST(MuF, Examples) {
    const Network tri = fixtures::triangle();
    EXPECT_DOUBLE_EQ(mu_f(tri, v3(1, 0, 0), {0}), 2.0);
    const Network two = fixtures::two_component();
    const Vector h = harmonic_basis(two)[0];
    for (unsigned long m = 0; m < 32; ++m) EXPECT_NEAR(mu_f(two, h, subset_from_mask(m, 5)), 0.0, 1e-12);

    const auto dip = dipole(tri, DipoleKind::Mu, {0}, {1});
    for (unsigned long m = 0; m < 8; ++m) {
        const StateSet C = subset_from_mask(m, 3);
        const double expect = (m & 1UL ? 1.0 : 0.0) - (m & 2UL ? 1.0 : 0.0);
        EXPECT_NEAR(mu_f(tri, dip.v.values, C), expect, 1e-12);
    }
}

TEST(MuF, DensityIsLaplacian) {
    Gen gen(71);
    for (const auto& fx : all_fixtures()) {
        const Index n = fx.net.size();
        const Vector f = gen.vec(n);
        const Vector dens = apply_Delta(fx.net, f).cwiseProduct(fx.net.mu());
        for (int t = 0; t < 10; ++t) {
            const StateSet A = gen.subset(n);
            EXPECT_NEAR(mu_f(fx.net, f, A), indicator(A, n).dot(dens), 1e-10);
        }
    }
}

TEST(NormBounds, TriangleIndicator) {
    const auto r = norm_bounds_report(fixtures::triangle(), v3(1, 0, 0));
    EXPECT_DOUBLE_EQ(r.energy, 2.0);
    EXPECT_DOUBLE_EQ(r.c_inv_delta_nu, 3.0);
    EXPECT_DOUBLE_EQ(r.slack_lower, 0.5);
    EXPECT_TRUE(r.holds());
    const auto z = norm_bounds_report(fixtures::triangle(), Vector::Constant(3, 2.0));
    EXPECT_EQ(z.energy, 0.0);
    EXPECT_EQ(z.c_inv_delta_nu, 0.0);
    EXPECT_EQ(z.delta_c_inv_mu, 0.0);
    EXPECT_EQ(z.f_minus_Pf_nu, 0.0);
}

}  // namespace
}  // namespace mlap::test
