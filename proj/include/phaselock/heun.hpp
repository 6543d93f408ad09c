#pragma once

// Heun equations carried by the second component E = Y2 of the normalized
// linear systems: diagonal-parameter solvers, coefficient builders, and
// pointwise checks of the system/equation equivalence and of the gauge maps
// between branches.
//
// The checks are algebraic. For Y' = A(z) Y one has E' = row2(A) Y and
// E'' = row2(A' + A^2) Y, so a second-order operator applied to E is a
// linear functional L(z) Y. The equation holds for every solution iff L(z)
// vanishes, which is tested at sample points with no ODE solving involved.

#include <phaselock/errors.hpp>
#include <phaselock/matrix.hpp>
#include <phaselock/params.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>

namespace phaselock {

enum class RootSign { Plus, Minus };
enum class PsiBranch { Conjugate, Complement };  // psi = conj(phi) | psi = nu + c - conj(phi)

/// z(z-1/alpha)(z-alpha) E'' + (p(z-alpha)(z-1/alpha) + q z(z-1/alpha) + s z(z-alpha)) E' + (u z + d) E = 0
struct HeunGeneralCoeffs {
    double alpha = 2.0;
    cplx p, q, s, u, d;
};

/// z(z-1)^2 E'' + (p z(z-1) + q z + s) E' + (u z + d) E = 0
struct HeunConfluentCoeffs {
    cplx p, q, s, u, d;
};

/// Fills phi, psi so that b^2 = phi(conj(nu)+c-phi) = psi(nu+c-psi).
inline GheSystemParams ghe_solve_diagonal(GheSystemParams p, RootSign root, PsiBranch branch) {
    detail::require(std::isfinite(p.b) && p.b > 0.0, "b must be > 0");
    const cplx w = std::conj(p.nu) + p.c;
    const cplx disc = principal_sqrt(w * w - 4.0 * p.b * p.b);
    p.phi = (root == RootSign::Plus ? w + disc : w - disc) / 2.0;
    p.psi = branch == PsiBranch::Conjugate ? std::conj(p.phi) : p.nu + p.c - std::conj(p.phi);
    return p;
}

namespace detail {

inline HeunGeneralCoeffs ghe_coefficients_unchecked(const GheSystemParams& p) {
    const cplx nb = std::conj(p.nu);
    const cplx phi = p.phi, psi = p.psi;
    HeunGeneralCoeffs h;
    h.alpha = p.alpha;
    h.p = -p.nu;
    h.q = nb + p.c + 1.0 - 2.0 * phi;
    h.s = p.nu + p.c + 1.0 - 2.0 * psi;
    h.u = (nb + p.c - phi - psi) * (p.c + 1.0 - phi - psi);
    h.d = p.nu * ((p.c + nb - phi) / p.alpha - psi * p.alpha);
    return h;
}

inline HeunConfluentCoeffs che_coefficients_unchecked(const CheSystemParams& p) {
    const cplx nb = std::conj(p.nu);
    HeunConfluentCoeffs h;
    h.p = nb + 2.0 - 2.0 * p.nu - 2.0 * p.a1;
    h.q = p.nu + p.g - 2.0 * p.a2;
    h.s = -p.nu;
    h.u = (p.a1 + p.nu - 1.0) * (p.a1 + p.nu - nb);
    h.d = p.nu * (p.a2 - p.g - p.a1 - p.nu + nb);
    return h;
}

struct RowFunctionals {
    Eigen::RowVector2cd e;    // E   = e  . Y
    Eigen::RowVector2cd de;   // E'  = de . Y
    Eigen::RowVector2cd d2e;  // E'' = d2e . Y
};

inline RowFunctionals second_component_functionals(const Mat2& a, const Mat2& da) {
    const Mat2 second = da + a * a;
    return {Eigen::RowVector2cd(0.0, 1.0), a.row(1), second.row(1)};
}

// max |L . e_k| relative to the size of the three terms that build L.
inline double functional_residual(const RowFunctionals& r, cplx p2, cplx p1, cplx p0) {
    const Eigen::RowVector2cd l = p2 * r.d2e + p1 * r.de + p0 * r.e;
    const double scale = std::abs(p2) * r.d2e.norm() + std::abs(p1) * r.de.norm() + std::abs(p0) + 1e-300;
    return std::max(std::abs(l(0)), std::abs(l(1))) / scale;
}

}  // namespace detail

inline HeunGeneralCoeffs ghe_coefficients(const GheSystemParams& p) {
    p.validate();
    if (!p.heun_compatible()) throw domain_error("diagonal parameters do not satisfy the Heun condition");
    return detail::ghe_coefficients_unchecked(p);
}

/// Max over samples of the relative residual of the Heun operator built from
/// h applied to E = Y2 of the system p.
inline double ghe_equivalence_residual(const GheSystemParams& p, const HeunGeneralCoeffs& h,
                                       std::span<const cplx> z_samples) {
    p.validate();
    const FuchsianTriple f = system_matrices(p);
    const double a = p.alpha, ai = 1.0 / p.alpha;
    double worst = 0.0;
    for (const cplx z : z_samples) {
        detail::require(std::abs(z) >= 0.05 && std::abs(z - a) >= 0.05 && std::abs(z - ai) >= 0.05,
                        "sample too close to a singular point");
        const Mat2 A = f.K / z + f.R1 / (z - a) + f.R2 / (z - ai);
        const Mat2 dA = -f.K / (z * z) - f.R1 / ((z - a) * (z - a)) - f.R2 / ((z - ai) * (z - ai));
        const cplx p2 = z * (z - ai) * (z - a);
        const cplx p1 = h.p * (z - a) * (z - ai) + h.q * z * (z - ai) + h.s * z * (z - a);
        const cplx p0 = h.u * z + h.d;
        worst = std::max(worst, detail::functional_residual(detail::second_component_functionals(A, dA), p2, p1, p0));
    }
    return worst;
}

enum class CheSolveCase { Solved, OneParameterFamily, NoSolution };

struct CheDiagonal {
    CheSolveCase kind = CheSolveCase::Solved;
    cplx a1, a2;  // a1 = 0 as representative of the free family
};

/// Solves b^2 = a2(g-a2), a2(nu-conj(nu)) + a1(2a2-g) = 0. When g^2 = 4b^2
/// the quadratic has the double root a2 = g/2 and a1 is either free or
/// inconsistent depending on whether g Im(nu) vanishes.
inline CheDiagonal che_solve_diagonal(double b, double g, cplx nu, RootSign root) {
    detail::require(std::isfinite(b) && b != 0.0, "b must be nonzero");
    const cplx jump = nu - std::conj(nu);
    const double disc = g * g - 4.0 * b * b;
    if (std::abs(disc) <= 1e-12 * (g * g + 4.0 * b * b)) {
        const bool consistent = std::abs(g / 2.0 * jump) <= 1e-12 * (1.0 + std::abs(g) * std::abs(nu));
        if (!consistent) return {CheSolveCase::NoSolution, {}, {}};
        return {CheSolveCase::OneParameterFamily, 0.0, g / 2.0};
    }
    const cplx root_disc = std::sqrt(cplx(disc, 0.0));
    const cplx a2 = (root == RootSign::Plus ? g + root_disc : g - root_disc) / 2.0;
    const cplx a1 = -a2 * jump / (2.0 * a2 - g);
    return {CheSolveCase::Solved, a1, a2};
}

inline HeunConfluentCoeffs che_coefficients(const CheSystemParams& p) {
    p.validate();
    if (!p.heun_compatible()) throw domain_error("diagonal parameters do not satisfy the confluent Heun condition");
    return detail::che_coefficients_unchecked(p);
}

inline double che_equivalence_residual(const CheSystemParams& p, const HeunConfluentCoeffs& h,
                                       std::span<const cplx> z_samples) {
    p.validate();
    const ConfluentTriple t = system_matrices(p);
    double worst = 0.0;
    for (const cplx z : z_samples) {
        detail::require(std::abs(z) >= 0.1 && std::abs(z - 1.0) >= 0.1, "sample too close to a singular point");
        const cplx w = z - 1.0;
        const Mat2 A = t.Amat / z + t.Bmat / (w * w) + t.Cmat / w;
        const Mat2 dA = -t.Amat / (z * z) - 2.0 * t.Bmat / (w * w * w) - t.Cmat / (w * w);
        const cplx p2 = z * w * w;
        const cplx p1 = h.p * z * w + h.q * z + h.s;
        const cplx p0 = h.u * z + h.d;
        worst = std::max(worst, detail::functional_residual(detail::second_component_functionals(A, dA), p2, p1, p0));
    }
    return worst;
}

namespace detail {

struct TestFunction {
    cplx f, df, d2f;
};

inline std::array<TestFunction, 4> test_functions(cplx z) {
    const cplx ez = std::exp(z);
    return {{{1.0, 0.0, 0.0}, {z, 1.0, 0.0}, {z * z, 2.0 * z, 2.0}, {ez, ez, ez}}};
}

// |Op1[g f] - g Op0[f]| / scale with g' = g L, g'' = g (L^2 + L').
inline double conjugation_residual(cplx g, cplx L, cplx dL, cplx p2, cplx p1_from, cplx p0_from, cplx p1_to,
                                   cplx p0_to, const TestFunction& t) {
    const cplx G = g * t.f;
    const cplx dG = g * (L * t.f + t.df);
    const cplx d2G = g * ((L * L + dL) * t.f + 2.0 * L * t.df + t.d2f);
    const cplx lhs = p2 * d2G + p1_to * dG + p0_to * G;
    const cplx rhs = g * (p2 * t.d2f + p1_from * t.df + p0_from * t.f);
    const double scale = std::abs(p2) * std::abs(d2G) + std::abs(p1_to) * std::abs(dG) + std::abs(p0_to) * std::abs(G) +
                         std::abs(g) * (std::abs(p2) * std::abs(t.d2f) + std::abs(p1_from) * std::abs(t.df) +
                                        std::abs(p0_from) * std::abs(t.f)) +
                         1e-300;
    return std::abs(lhs - rhs) / scale;
}

}  // namespace detail

/// Checks Op_to[g f] = g Op_from[f] for g = (z-alpha)^(phi_to-phi_from+shift) (z-1/alpha)^(psi_to-psi_from)
/// on the test functions 1, z, z^2, e^z. Principal powers; samples on the
/// real half-line z <= alpha (the principal cut) are rejected.
inline double ghe_gauge_residual(const GheSystemParams& from, const GheSystemParams& to,
                                 std::span<const cplx> z_samples, cplx exponent_shift = 0.0) {
    detail::require(from.alpha == to.alpha && from.b == to.b && from.c == to.c && from.nu == to.nu,
                    "gauge branches must share (alpha, b, c, nu)");
    const HeunGeneralCoeffs h0 = ghe_coefficients(from);
    const HeunGeneralCoeffs h1 = ghe_coefficients(to);
    const double a = from.alpha, ai = 1.0 / from.alpha;
    const cplx ephi = to.phi - from.phi + exponent_shift;
    const cplx epsi = to.psi - from.psi;
    double worst = 0.0;
    for (const cplx z : z_samples) {
        detail::require(std::abs(z) >= 0.05 && std::abs(z - a) >= 0.05 && std::abs(z - ai) >= 0.05,
                        "sample too close to a singular point");
        detail::require(!(std::abs(z.imag()) < 1e-12 && z.real() <= a), "sample on the branch cut of the gauge factor");
        const cplx g = std::pow(z - a, ephi) * std::pow(z - ai, epsi);
        const cplx L = ephi / (z - a) + epsi / (z - ai);
        const cplx dL = -ephi / ((z - a) * (z - a)) - epsi / ((z - ai) * (z - ai));
        const cplx p2 = z * (z - ai) * (z - a);
        auto p1 = [&](const HeunGeneralCoeffs& h) {
            return h.p * (z - a) * (z - ai) + h.q * z * (z - ai) + h.s * z * (z - a);
        };
        auto p0 = [&](const HeunGeneralCoeffs& h) { return h.u * z + h.d; };
        for (const auto& t : detail::test_functions(z)) {
            worst = std::max(worst, detail::conjugation_residual(g, L, dL, p2, p1(h0), p0(h0), p1(h1), p0(h1), t));
        }
    }
    return worst;
}

/// Same check for the confluent family with g = (z-1)^(a1_to-a1_from+shift) exp((a2_from-a2_to)/(z-1)).
inline double che_gauge_residual(const CheSystemParams& from, const CheSystemParams& to,
                                 std::span<const cplx> z_samples, cplx exponent_shift = 0.0) {
    detail::require(from.b == to.b && from.g == to.g && from.nu == to.nu, "gauge branches must share (b, g, nu)");
    const HeunConfluentCoeffs h0 = che_coefficients(from);
    const HeunConfluentCoeffs h1 = che_coefficients(to);
    const cplx e1 = to.a1 - from.a1 + exponent_shift;
    const cplx e2 = to.a2 - from.a2;
    double worst = 0.0;
    for (const cplx z : z_samples) {
        detail::require(std::abs(z) >= 0.1 && std::abs(z - 1.0) >= 0.1, "sample too close to a singular point");
        detail::require(!(std::abs(z.imag()) < 1e-12 && z.real() <= 1.0), "sample on the branch cut of the gauge factor");
        const cplx w = z - 1.0;
        const cplx g = std::pow(w, e1) * std::exp(-e2 / w);
        const cplx L = e1 / w + e2 / (w * w);
        const cplx dL = -e1 / (w * w) - 2.0 * e2 / (w * w * w);
        const cplx p2 = z * w * w;
        auto p1 = [&](const HeunConfluentCoeffs& h) { return h.p * z * w + h.q * z + h.s; };
        auto p0 = [&](const HeunConfluentCoeffs& h) { return h.u * z + h.d; };
        for (const auto& t : detail::test_functions(z)) {
            worst = std::max(worst, detail::conjugation_residual(g, L, dL, p2, p1(h0), p0(h0), p1(h1), p0(h1), t));
        }
    }
    return worst;
}

/// Special double confluent Heun data of the RSJ model: mu = A/(2 omega).
/// lambda = (a^2 - s^2)/4 with s = 2 mu needs the system parameter a, which
/// has no expression through (B, A, omega); it is computed only when given.
struct DcheCoeffs {
    double mu = 0.0;
    std::optional<double> lam;
    std::optional<cplx> ell;
};

inline DcheCoeffs dche_coefficients(const TorusParams& t, std::optional<double> a = std::nullopt,
                                    std::optional<cplx> ell = std::nullopt) {
    detail::require(t.delta == 0.0, "double confluent data exist only for delta = 0");
    detail::require(std::isfinite(t.omega) && t.omega != 0.0, "omega must be nonzero");
    DcheCoeffs r;
    r.mu = t.A / (2.0 * t.omega);
    if (a) {
        const double s = 2.0 * r.mu;
        r.lam = (*a * *a - s * s) / 4.0;
    }
    r.ell = ell;
    return r;
}

}  // namespace phaselock
