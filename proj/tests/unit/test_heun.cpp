#include <phaselock/analysis.hpp>
#include <phaselock/heun.hpp>
#include <phaselock/random.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

using namespace phaselock;

namespace {

const cplx I{0.0, 1.0};
const double root_im = 0.5412658773652741;  // sqrt(1.5625 - 0.390625) / 2

GheSystemParams worked_ghe() {
    GheSystemParams p;
    p.alpha = 3.0;
    p.b = 0.625;
    p.c = 0.625;
    return p;
}

std::vector<cplx> unit_circle(int n, double radius = 1.0) {
    std::vector<cplx> z;
    for (int k = 0; k < n; ++k) z.push_back(std::polar(radius, two_pi * (k + 0.5) / n));
    return z;
}

// Off the real axis, clear of 0, 1/alpha, alpha and 1.
std::vector<cplx> gauge_points(double alpha) {
    return {cplx(0.3, 0.4), cplx(-0.5, 0.2), cplx(0.5 * (1 + alpha), 0.7), cplx(alpha + 0.5, -0.6),
            cplx(0.1, -0.9), cplx(-1.2, -0.3), cplx(1.5, -1.5), cplx(2.0 * alpha, 1.0)};
}

void expect_complex_near(cplx x, cplx y, double tol) { EXPECT_LE(std::abs(x - y), tol) << x << " vs " << y; }

// Continues a solution of the linear system from z0 along straight segments
// and checks the Heun equation for E = Y2 by central differences.
template <class Op>
double finite_difference_residual(const oracle::MatrixField& A, cplx z0, cplx z, Op op) {
    const cplx h = 1e-3;
    double worst = 0.0;
    for (const auto& y0 : {oracle::Vec2(1.0, 0.0), oracle::Vec2(0.3, -0.8)}) {
        const auto e = oracle::second_component_stencil(A, y0, z0, z, h, 4000);
        const cplx d1 = (e[2] - e[0]) / (2.0 * h);
        const cplx d2 = (e[2] - 2.0 * e[1] + e[0]) / (h * h);
        const auto [value, scale] = op(z, e[1], d1, d2);
        worst = std::max(worst, std::abs(value) / scale);
    }
    return worst;
}

}  // namespace

TEST(GheDiagonal, WorkedExamples) {
    const GheSystemParams p = ghe_solve_diagonal(worked_ghe(), RootSign::Plus, PsiBranch::Conjugate);
    expect_complex_near(p.phi, cplx(0.3125, root_im), 1e-10);
    expect_complex_near(p.psi, cplx(0.3125, -root_im), 1e-10);

    GheSystemParams q = worked_ghe();
    q.b = 0.5;
    q.c = 2.0;
    q = ghe_solve_diagonal(q, RootSign::Plus, PsiBranch::Conjugate);
    expect_complex_near(q.phi, (2.0 + std::sqrt(3.0)) / 2.0, 1e-12);
    const GheSystemParams other = ghe_solve_diagonal(q, RootSign::Minus, PsiBranch::Conjugate);
    expect_complex_near(q.nu + q.c - std::conj(q.phi), other.phi, 1e-12);
    expect_complex_near(other.phi, 0.1339746, 1e-7);
}

TEST(GheDiagonal, AllBranchesAreCompatible) {
    SplitMix64 rng(31);
    for (int k = 0; k < 40; ++k) {
        GheSystemParams p;
        p.alpha = rng.uniform(1.1, 6.0);
        p.b = rng.uniform(0.1, 3.0);
        p.c = rng.uniform(-2.0, 2.0);
        p.nu = cplx(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
        for (auto root : {RootSign::Plus, RootSign::Minus}) {
            for (auto branch : {PsiBranch::Conjugate, PsiBranch::Complement}) {
                const GheSystemParams s = ghe_solve_diagonal(p, root, branch);
                EXPECT_TRUE(s.heun_compatible());
                EXPECT_TRUE(is_torus_dynamical(system_matrices(s)));
            }
        }
    }
}

TEST(GheDiagonal, RejectsNonPositiveB) {
    GheSystemParams p = worked_ghe();
    p.b = 0.0;
    EXPECT_THROW(ghe_solve_diagonal(p, RootSign::Plus, PsiBranch::Conjugate), domain_error);
}

TEST(GheCoefficients, WorkedExample) {
    const GheSystemParams p = ghe_solve_diagonal(worked_ghe(), RootSign::Plus, PsiBranch::Conjugate);
    const HeunGeneralCoeffs h = ghe_coefficients(p);
    expect_complex_near(h.q, cplx(1.0, -2.0 * root_im), 1e-10);
    expect_complex_near(h.s, cplx(1.0, 2.0 * root_im), 1e-10);
    expect_complex_near(h.u, 0.0, 1e-12);
    expect_complex_near(h.d, 0.0, 1e-12);
    expect_complex_near(h.p, 0.0, 0.0);
}

TEST(GheCoefficients, StructuralRelations) {
    SplitMix64 rng(32);
    for (int k = 0; k < 20; ++k) {
        GheSystemParams p;
        p.alpha = rng.uniform(1.1, 6.0);
        p.b = rng.uniform(0.1, 3.0);
        p.c = rng.uniform(-2.0, 2.0);
        p.nu = cplx(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
        const GheSystemParams s = ghe_solve_diagonal(p, RootSign::Plus, PsiBranch::Conjugate);
        const HeunGeneralCoeffs h = ghe_coefficients(s);
        // With psi = conj(phi) the s coefficient is the conjugate of q.
        expect_complex_near(h.s, std::conj(h.q), 1e-12);
        GheSystemParams zero_nu = p;
        zero_nu.nu = 0.0;
        expect_complex_near(ghe_coefficients(ghe_solve_diagonal(zero_nu, RootSign::Minus, PsiBranch::Complement)).d,
                            0.0, 0.0);
    }
}

TEST(GheCoefficients, IncompatibleInputIsRejected) {
    GheSystemParams p = ghe_solve_diagonal(worked_ghe(), RootSign::Plus, PsiBranch::Conjugate);
    p.phi += 0.1;
    EXPECT_THROW(ghe_coefficients(p), domain_error);
}

TEST(GheEquivalence, WorkedExampleAndControls) {
    const GheSystemParams p = ghe_solve_diagonal(worked_ghe(), RootSign::Plus, PsiBranch::Conjugate);
    const auto z = unit_circle(16);
    EXPECT_LT(ghe_equivalence_residual(p, ghe_coefficients(p), z), 1e-9);

    GheSystemParams bad = p;
    bad.phi += 0.1;
    EXPECT_GT(ghe_equivalence_residual(bad, detail::ghe_coefficients_unchecked(bad), z), 1e-3);

    GheSystemParams q = worked_ghe();
    q.b = 0.5;
    q.c = 2.0;
    q = ghe_solve_diagonal(q, RootSign::Minus, PsiBranch::Conjugate);
    EXPECT_LT(ghe_equivalence_residual(q, ghe_coefficients(q), z), 1e-9);
}

TEST(GheEquivalence, SamplesAtSingularPointsAreRejected) {
    const GheSystemParams p = ghe_solve_diagonal(worked_ghe(), RootSign::Plus, PsiBranch::Conjugate);
    const std::vector<cplx> z{cplx(1.0 / 3.0, 0.0)};
    EXPECT_THROW(ghe_equivalence_residual(p, ghe_coefficients(p), z), domain_error);
}

TEST(GheEquivalence, AgreesWithPathIntegrationOracle) {
    GheSystemParams p = worked_ghe();
    p.nu = cplx(0.3, 0.8);
    for (auto branch : {PsiBranch::Conjugate, PsiBranch::Complement}) {
        const GheSystemParams s = ghe_solve_diagonal(p, RootSign::Minus, branch);
        const HeunGeneralCoeffs h = ghe_coefficients(s);
        const FuchsianTriple f = system_matrices(s);
        const double a = s.alpha, ai = 1.0 / a;
        auto A = [&](cplx z) -> Mat2 { return f.K / z + f.R1 / (z - a) + f.R2 / (z - ai); };
        auto op = [&](cplx z, cplx e, cplx d1, cplx d2) {
            const cplx p2 = z * (z - ai) * (z - a);
            const cplx p1 = h.p * (z - a) * (z - ai) + h.q * z * (z - ai) + h.s * z * (z - a);
            const cplx p0 = h.u * z + h.d;
            return std::pair{p2 * d2 + p1 * d1 + p0 * e,
                             std::abs(p2 * d2) + std::abs(p1 * d1) + std::abs(p0 * e)};
        };
        const cplx z0(1.5, 0.5);
        for (cplx z : {cplx(1.5, 1.2), cplx(2.0, 0.3), cplx(0.9, 0.9)}) {
            EXPECT_LT(finite_difference_residual(A, z0, z, op), 1e-5);
        }
        // Same oracle, perturbed coefficients: the residual must be visible.
        HeunGeneralCoeffs wrong = h;
        wrong.u += 0.2;
        auto op_wrong = [&](cplx z, cplx e, cplx d1, cplx d2) {
            const cplx p2 = z * (z - ai) * (z - a);
            const cplx p1 = wrong.p * (z - a) * (z - ai) + wrong.q * z * (z - ai) + wrong.s * z * (z - a);
            const cplx p0 = wrong.u * z + wrong.d;
            return std::pair{p2 * d2 + p1 * d1 + p0 * e,
                             std::abs(p2 * d2) + std::abs(p1 * d1) + std::abs(p0 * e)};
        };
        EXPECT_GT(finite_difference_residual(A, z0, cplx(1.5, 1.2), op_wrong), 1e-3);
    }
}

TEST(CheDiagonal, WorkedExamplesAndDegenerateCases) {
    CheDiagonal d = che_solve_diagonal(1.0, 1.0, 0.0, RootSign::Plus);
    EXPECT_EQ(d.kind, CheSolveCase::Solved);
    expect_complex_near(d.a2, cplx(0.5, std::sqrt(3.0) / 2.0), 1e-12);
    expect_complex_near(d.a1, 0.0, 1e-15);

    d = che_solve_diagonal(1.0, 2.0, I, RootSign::Plus);
    EXPECT_EQ(d.kind, CheSolveCase::NoSolution);

    d = che_solve_diagonal(1.0, 2.0, 0.0, RootSign::Plus);
    EXPECT_EQ(d.kind, CheSolveCase::OneParameterFamily);
    expect_complex_near(d.a2, 1.0, 1e-15);

    d = che_solve_diagonal(1.0, -2.0, 0.4, RootSign::Minus);
    EXPECT_EQ(d.kind, CheSolveCase::OneParameterFamily);

    // g = 0 with 4b^2 = g^2 would need b = 0; near-degenerate inputs solve.
    d = che_solve_diagonal(1.0, 2.0 + 1e-6, I, RootSign::Plus);
    EXPECT_EQ(d.kind, CheSolveCase::Solved);
    EXPECT_THROW(che_solve_diagonal(0.0, 1.0, 0.0, RootSign::Plus), domain_error);
}

TEST(CheCoefficients, WorkedExample) {
    const CheSystemParams p{1.0, 1.0, 0.0, 0.0, cplx(0.5, std::sqrt(3.0) / 2.0)};
    const HeunConfluentCoeffs h = che_coefficients(p);
    expect_complex_near(h.p, 2.0, 1e-12);
    expect_complex_near(h.q, cplx(0.0, -std::sqrt(3.0)), 1e-12);
    expect_complex_near(h.s, 0.0, 0.0);
    expect_complex_near(h.u, 0.0, 1e-12);
    expect_complex_near(h.d, 0.0, 0.0);
}

TEST(CheCoefficients, SubstitutionOracle) {
    const cplx nu(0.0, 0.2);
    const CheDiagonal d = che_solve_diagonal(0.3, 1.0, nu, RootSign::Plus);
    ASSERT_EQ(d.kind, CheSolveCase::Solved);
    const CheSystemParams p{0.3, 1.0, nu, d.a1, d.a2};
    const HeunConfluentCoeffs h = che_coefficients(p);
    // a2 = (1 + sqrt(0.64))/2 = 0.9, a1 = -0.9 * 0.4i / 0.8 = -0.45i.
    expect_complex_near(d.a2, 0.9, 1e-14);
    expect_complex_near(d.a1, cplx(0.0, -0.45), 1e-14);
    expect_complex_near(h.u, (d.a1 + nu - 1.0) * (d.a1 + nu - std::conj(nu)), 1e-14);
    expect_complex_near(h.u, cplx(-0.0125, 0.05), 1e-14);
    expect_complex_near(h.d, cplx(0.0, 0.2) * cplx(-0.1, 0.05), 1e-14);
}

TEST(CheEquivalence, CompatibleBranchesAndControls) {
    const auto z = unit_circle(16, 2.0);
    const CheSystemParams p{1.0, 1.0, 0.0, 0.0, cplx(0.5, std::sqrt(3.0) / 2.0)};
    EXPECT_LT(che_equivalence_residual(p, che_coefficients(p), z), 1e-9);

    CheSystemParams bad = p;
    bad.a1 += 0.1;
    EXPECT_GT(che_equivalence_residual(bad, detail::che_coefficients_unchecked(bad), z), 1e-3);

    for (double a1 : {-0.7, 0.0, 1.3}) {
        const CheSystemParams fam{1.0, 2.0, 0.0, a1, 1.0};
        EXPECT_TRUE(fam.heun_compatible());
        EXPECT_LT(che_equivalence_residual(fam, che_coefficients(fam), z), 1e-9);
    }
}

TEST(CheEquivalence, AgreesWithPathIntegrationOracle) {
    const cplx nu(-0.2, 0.6);
    const CheDiagonal d = che_solve_diagonal(0.7, 0.9, nu, RootSign::Minus);
    ASSERT_EQ(d.kind, CheSolveCase::Solved);
    const CheSystemParams p{0.7, 0.9, nu, d.a1, d.a2};
    const HeunConfluentCoeffs h = che_coefficients(p);
    const ConfluentTriple t = system_matrices(p);
    auto A = [&](cplx z) -> Mat2 {
        const cplx w = z - 1.0;
        return t.Amat / z + t.Bmat / (w * w) + t.Cmat / w;
    };
    auto op = [&](cplx z, cplx e, cplx d1, cplx d2) {
        const cplx w = z - 1.0;
        const cplx p2 = z * w * w;
        const cplx p1 = h.p * z * w + h.q * z + h.s;
        const cplx p0 = h.u * z + h.d;
        return std::pair{p2 * d2 + p1 * d1 + p0 * e, std::abs(p2 * d2) + std::abs(p1 * d1) + std::abs(p0 * e)};
    };
    for (cplx z : {cplx(0.5, 1.0), cplx(2.0, 0.8), cplx(-0.5, 0.6)}) {
        EXPECT_LT(finite_difference_residual(A, cplx(0.5, 0.7), z, op), 1e-5);
    }
}

TEST(GheGauge, BranchesAreConjugate) {
    GheSystemParams p = worked_ghe();
    const GheSystemParams conj = ghe_solve_diagonal(p, RootSign::Plus, PsiBranch::Conjugate);
    const GheSystemParams comp = ghe_solve_diagonal(p, RootSign::Plus, PsiBranch::Complement);
    const auto z = gauge_points(p.alpha);
    EXPECT_LT(ghe_gauge_residual(conj, comp, z), 1e-8);
    EXPECT_LT(ghe_gauge_residual(conj, conj, z), 1e-15);
    EXPECT_GT(ghe_gauge_residual(conj, comp, z, 0.1), 1e-3);

    p.nu = cplx(0.4, -1.1);
    const GheSystemParams a = ghe_solve_diagonal(p, RootSign::Plus, PsiBranch::Conjugate);
    const GheSystemParams b = ghe_solve_diagonal(p, RootSign::Minus, PsiBranch::Complement);
    EXPECT_LT(ghe_gauge_residual(a, b, z), 1e-8);
}

TEST(GheGauge, RejectsMismatchedSystemsAndCutSamples) {
    const GheSystemParams a = ghe_solve_diagonal(worked_ghe(), RootSign::Plus, PsiBranch::Conjugate);
    GheSystemParams other = worked_ghe();
    other.c = 0.7;
    other = ghe_solve_diagonal(other, RootSign::Plus, PsiBranch::Conjugate);
    const auto z = gauge_points(3.0);
    EXPECT_THROW(ghe_gauge_residual(a, other, z), domain_error);
    const std::vector<cplx> cut{cplx(2.0, 0.0)};
    EXPECT_THROW(ghe_gauge_residual(a, a, cut), domain_error);
}

TEST(CheGauge, RootsAreConjugate) {
    const cplx nu(0.0, 0.2);
    const CheDiagonal plus = che_solve_diagonal(0.3, 1.0, nu, RootSign::Plus);
    const CheDiagonal minus = che_solve_diagonal(0.3, 1.0, nu, RootSign::Minus);
    const CheSystemParams from{0.3, 1.0, nu, plus.a1, plus.a2};
    const CheSystemParams to{0.3, 1.0, nu, minus.a1, minus.a2};
    const std::vector<cplx> z{cplx(0.3, 0.4), cplx(-0.5, 0.2), cplx(1.5, 0.7), cplx(2.5, -0.6),
                              cplx(0.1, -0.9), cplx(-1.2, -0.3), cplx(0.8, -1.5), cplx(3.0, 1.0)};
    EXPECT_LT(che_gauge_residual(from, to, z), 1e-8);
    EXPECT_LT(che_gauge_residual(from, from, z), 1e-15);
    EXPECT_GT(che_gauge_residual(from, to, z, 0.1), 1e-3);
}

TEST(Dche, CoefficientExamples) {
    EXPECT_DOUBLE_EQ(dche_coefficients({1.0, 0.0, 0.0, 0.3, 2.0}).mu, 1.0);
    EXPECT_DOUBLE_EQ(dche_coefficients({1.0, 0.0, 0.0, 0.3, 0.0}).mu, 0.0);
    EXPECT_DOUBLE_EQ(dche_coefficients({0.5, 0.0, 0.0, 0.3, 1.0}).mu, 1.0);
    const DcheCoeffs c = dche_coefficients({1.0, 0.0, 0.0, 0.3, 2.0}, 3.0);
    ASSERT_TRUE(c.lam.has_value());
    EXPECT_DOUBLE_EQ(*c.lam, (9.0 - 4.0) / 4.0);
    EXPECT_FALSE(c.ell.has_value());
    EXPECT_THROW(dche_coefficients({1.0, 0.2, 0.0, 0.3, 2.0}), domain_error);
}

TEST(ResidueEigenDifferences, WorkedExamples) {
    const auto [l0, la] = residue_eigen_differences(worked_ghe());
    expect_complex_near(l0, 0.0, 0.0);
    expect_complex_near(la, cplx(0.0, 1.0825317547305482), 1e-12);
}

TEST(ResidueEigenDifferences, MatchNumericalEigenvalues) {
    SplitMix64 rng(33);
    for (int k = 0; k < 20; ++k) {
        GheSystemParams p;
        p.alpha = rng.uniform(1.1, 5.0);
        p.b = rng.uniform(0.1, 2.0);
        p.c = rng.uniform(-2.0, 2.0);
        p.nu = cplx(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
        const auto [l0, la] = residue_eigen_differences(p);
        for (double phi : {0.0, 1.0}) {
            p.phi = phi;
            const FuchsianTriple f = system_matrices(p);
            const Eigen::ComplexEigenSolver<Mat2> es(f.R1);
            const cplx diff = es.eigenvalues()(0) - es.eigenvalues()(1);
            // Eigenvalue differences are defined up to sign.
            EXPECT_LT(std::min(std::abs(diff - la), std::abs(diff + la)), 1e-10);
            const Eigen::ComplexEigenSolver<Mat2> e0(f.K);
            const cplx d0 = e0.eigenvalues()(0) - e0.eigenvalues()(1);
            EXPECT_LT(std::min(std::abs(d0 - l0), std::abs(d0 + l0)), 1e-12);
        }
    }
}
