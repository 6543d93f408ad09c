#pragma once

// Parameter spaces of the deformed RSJ torus flows and of the two linear
// system families (Fuchsian with singular points 0, alpha, 1/alpha, inf and
// confluent with an irregular point at 1), plus the maps between them.

#include <phaselock/errors.hpp>
#include <phaselock/matrix.hpp>

#include <cmath>
#include <string>

namespace phaselock {

/// dtheta/dtau = (cos theta + B + A sin tau) / (omega (1 - delta cos tau)) + D.
/// delta == 1 is used only as the confluent-family marker returned by
/// che_to_torus; the flow engine rejects it.
struct TorusParams {
    double omega = 1.0;
    double delta = 0.0;
    double D = 0.0;
    double B = 0.0;
    double A = 0.0;

    bool is_confluent() const { return delta == 1.0; }

    void validate() const {
        detail::require(std::isfinite(omega) && omega != 0.0, "omega must be finite and nonzero");
        detail::require(std::isfinite(delta) && delta >= 0.0 && delta < 1.0, "delta must lie in [0,1)");
        detail::require(std::isfinite(D) && std::isfinite(B) && std::isfinite(A), "D, B, A must be finite");
    }
};

/// Normalized Fuchsian system
///   Y' = ( diag(nu,0)/z + [[phi, b],[-b, phi-conj(nu)-c]]/(z-alpha)
///                       + [[psi-nu-c, -b],[b, psi]]/(z-1/alpha) ) Y
/// with the alpha > 1 representative and b > 0.
struct GheSystemParams {
    double alpha = 2.0;
    double b = 1.0;
    double c = 0.0;
    cplx nu{0.0, 0.0};
    cplx phi{0.0, 0.0};
    cplx psi{0.0, 0.0};

    void validate() const {
        detail::require(std::isfinite(alpha) && alpha > 1.0, "alpha must be > 1 (normalized branch)");
        detail::require(std::isfinite(b) && b > 0.0, "b must be > 0");
        detail::require(std::isfinite(c), "c must be finite");
    }

    /// b^2 = phi (conj(nu)+c-phi) and psi in {conj(phi), nu+c-conj(phi)}.
    bool heun_compatible() const {
        const cplx w = std::conj(nu) + c;
        if (std::abs(phi * (w - phi) - b * b) >= 1e-10 * (1.0 + b * b)) return false;
        const double scale = 1.0 + std::abs(nu) + std::abs(c);
        return std::abs(psi - std::conj(phi)) < 1e-10 * scale ||
               std::abs(psi - (nu + c - std::conj(phi))) < 1e-10 * scale;
    }
};

/// Confluent system
///   Y' = ( diag(nu,0)/z + [[a2, b],[-b, a2-g]]/(z-1)^2
///                       + diag(a1, a1+nu-conj(nu))/(z-1) ) Y.
struct CheSystemParams {
    double b = 1.0;
    double g = 0.0;
    cplx nu{0.0, 0.0};
    cplx a1{0.0, 0.0};
    cplx a2{0.0, 0.0};

    void validate() const {
        detail::require(std::isfinite(b) && b != 0.0, "b must be nonzero");
        detail::require(std::isfinite(g), "g must be finite");
    }

    bool heun_compatible() const {
        if (std::abs(a2 * (g - a2) - b * b) >= 1e-10 * (1.0 + b * b)) return false;
        const cplx jump = nu - std::conj(nu);
        const double scale = 1.0 + std::abs(a2) * std::abs(jump) + std::abs(a1) * std::abs(2.0 * a2 - g);
        return std::abs(a2 * jump + a1 * (2.0 * a2 - g)) < 1e-10 * scale;
    }
};

/// Residues K, R1, R2 at 0, alpha, 1/alpha of a general Fuchsian system.
struct FuchsianTriple {
    Mat2 K = Mat2::Zero();
    Mat2 R1 = Mat2::Zero();
    Mat2 R2 = Mat2::Zero();
};

/// Y' = (A/z + B/(z-1)^2 + C/(z-1)) Y.
struct ConfluentTriple {
    Mat2 Amat = Mat2::Zero();
    Mat2 Bmat = Mat2::Zero();
    Mat2 Cmat = Mat2::Zero();
};

inline FuchsianTriple system_matrices(const GheSystemParams& p) {
    const cplx nb = std::conj(p.nu);
    FuchsianTriple f;
    f.K = diag2(p.nu, 0.0);
    f.R1 = mat2(p.phi, p.b, -p.b, p.phi - nb - p.c);
    f.R2 = mat2(p.psi - p.nu - p.c, -p.b, p.b, p.psi);
    return f;
}

inline ConfluentTriple system_matrices(const CheSystemParams& p) {
    ConfluentTriple t;
    t.Amat = diag2(p.nu, 0.0);
    t.Bmat = mat2(p.a2, p.b, -p.b, p.a2 - p.g);
    t.Cmat = diag2(p.a1, p.a1 + p.nu - std::conj(p.nu));
    return t;
}

inline TorusParams ghe_to_torus(const GheSystemParams& p) {
    p.validate();
    const double inv = 1.0 / p.alpha;
    const double sum = p.alpha + inv;
    const double diff = p.alpha - inv;
    TorusParams t;
    t.omega = sum / (2.0 * p.b * diff);
    t.delta = 2.0 / sum;
    t.D = -p.nu.real();
    t.B = (p.c + p.nu.real()) / (2.0 * p.b);
    t.A = p.nu.imag() / (p.b * diff);
    return t;
}

/// Inverse of ghe_to_torus on the alpha > 1 branch; phi = psi = 0.
inline GheSystemParams torus_to_ghe(const TorusParams& t) {
    t.validate();
    detail::require(t.delta > 0.0, "delta = 0 has no finite alpha; use the flow module directly");
    detail::require(t.omega > 0.0, "omega must be > 0 for the normalized (b > 0) linear-system chart");
    GheSystemParams p;
    p.alpha = (1.0 + std::sqrt(1.0 - t.delta * t.delta)) / t.delta;
    const double inv = 1.0 / p.alpha;
    p.b = (p.alpha + inv) / (2.0 * t.omega * (p.alpha - inv));
    const double re_nu = -t.D;
    const double im_nu = t.A * p.b * (p.alpha - inv);
    p.nu = cplx(re_nu, im_nu);
    p.c = 2.0 * p.b * t.B - re_nu;
    return p;
}

/// omega = 1/b, B = g/(2b), A = Im nu / b, D = -Re nu; delta = 1 marks the
/// confluent family.
inline TorusParams che_to_torus(const CheSystemParams& p) {
    detail::require(std::isfinite(p.b) && p.b != 0.0, "b must be nonzero");
    TorusParams t;
    t.omega = 1.0 / p.b;
    t.delta = 1.0;
    t.D = -p.nu.real();
    t.B = p.g / (2.0 * p.b);
    t.A = p.nu.imag() / p.b;
    return t;
}

/// a1, a2 are left at zero; see che_solve_diagonal.
inline CheSystemParams torus_to_che(double omega, double B, double A, double D) {
    detail::require(std::isfinite(omega) && omega != 0.0, "omega must be nonzero");
    CheSystemParams p;
    p.b = 1.0 / omega;
    p.g = 2.0 * B / omega;
    p.nu = cplx(-D, A / omega);
    return p;
}

inline bool is_torus_dynamical(const FuchsianTriple& f, double tol = 1e-10) {
    return is_scalar_matrix(f.R2 - bar_tt(f.R1), tol) &&
           is_scalar_matrix(f.K + bar_tt(f.K) + f.R1 + f.R2, tol);
}

inline bool is_torus_dynamical(const ConfluentTriple& c, double tol = 1e-10) {
    return is_scalar_matrix(c.Amat + bar_tt(c.Amat) + bar_tt(c.Cmat), tol) &&
           is_scalar_matrix(c.Bmat + bar_tt(c.Bmat), tol) &&
           is_scalar_matrix(c.Cmat - bar_tt(c.Cmat), tol);
}

}  // namespace phaselock
