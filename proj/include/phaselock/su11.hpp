#pragma once

// Determinant-one matrices [[a, b], [conj(b), conj(a)]] and the Moebius maps
// of the unit disk they induce.
//
// Action convention, used everywhere in the library: a matrix M acts on the
// projective coordinate Phi = Y2/Y1 of Y -> M Y, so
//
//     Phi -> (M21 + M22 Phi) / (M11 + M12 Phi) = (conj(b) + conj(a) Phi) / (a + b Phi).
//
// Fixed points solve b Phi^2 + (a - conj(a)) Phi - conj(b) = 0 and the
// derivative of the map at Phi is 1 / (a + b Phi)^2.

#include <phaselock/errors.hpp>
#include <phaselock/matrix.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace phaselock {

inline constexpr double classification_tolerance = 1e-9;

struct Su11Matrix {
    cplx a{1.0, 0.0};
    cplx b{0.0, 0.0};

    static Su11Matrix identity() { return {}; }

    Mat2 matrix() const { return mat2(a, b, std::conj(b), std::conj(a)); }

    /// |a|^2 - |b|^2 - 1.
    double det_defect() const { return std::norm(a) - std::norm(b) - 1.0; }

    bool is_valid(double tol = 1e-9) const { return std::abs(det_defect()) < tol; }

    friend Su11Matrix operator*(const Su11Matrix& x, const Su11Matrix& y) {
        // The first row of the product determines the whole SU(1,1) matrix.
        return {x.a * y.a + x.b * std::conj(y.b), x.a * y.b + x.b * std::conj(y.a)};
    }

    Su11Matrix inverse() const { return {std::conj(a), -b}; }
};

/// Projects a numerically integrated fundamental matrix onto SU(1,1):
/// divide by the principal sqrt of det, average the entries that should be
/// conjugate, renormalize. Raw defects >= max_defect mean the integration
/// itself is wrong and raise accuracy_error.
inline Su11Matrix project_su11(const Mat2& raw, double max_defect = 1e-6) {
    const cplx det = raw.determinant();
    const double det_defect = std::abs(det - 1.0);
    const double sym_defect = std::max(std::abs(raw(0, 0) - std::conj(raw(1, 1))),
                                       std::abs(raw(0, 1) - std::conj(raw(1, 0))));
    if (!(det_defect < max_defect) || !(sym_defect < max_defect * (1.0 + raw.norm()))) {
        throw accuracy_error("Poincare matrix is not in SU(1,1): det defect " +
                             std::to_string(det_defect) + ", symmetry defect " +
                             std::to_string(sym_defect));
    }
    const Mat2 m = raw / std::sqrt(det);
    Su11Matrix s{(m(0, 0) + std::conj(m(1, 1))) / 2.0, (m(0, 1) + std::conj(m(1, 0))) / 2.0};
    const double n = std::norm(s.a) - std::norm(s.b);
    s.a /= std::sqrt(n);
    s.b /= std::sqrt(n);
    return s;
}

/// Point of the extended complex plane.
struct ExtendedPoint {
    cplx z{0.0, 0.0};
    bool infinite = false;
};

inline ExtendedPoint act(const Su11Matrix& m, cplx phi) {
    const cplx den = m.a + m.b * phi;
    if (std::abs(den) < 1e-300) return {cplx{}, true};
    return {(std::conj(m.b) + std::conj(m.a) * phi) / den, false};
}

enum class MapKind { Elliptic, Parabolic, Hyperbolic, Identity };

inline std::string_view to_string(MapKind k) {
    switch (k) {
        case MapKind::Elliptic: return "elliptic";
        case MapKind::Parabolic: return "parabolic";
        case MapKind::Hyperbolic: return "hyperbolic";
        case MapKind::Identity: return "identity";
    }
    return "unknown";
}

struct MapClass {
    MapKind kind = MapKind::Identity;
    double trace_half = 1.0;  // Re a
};

inline MapClass classify(const Su11Matrix& m, double eps = classification_tolerance) {
    const double re = m.a.real();
    const double sign = re >= 0.0 ? 1.0 : -1.0;
    const Mat2 off = m.matrix() - sign * Mat2::Identity();
    if (off.norm() < eps) return {MapKind::Identity, re};
    const double r = std::abs(re);
    if (r < 1.0 - eps) return {MapKind::Elliptic, re};
    if (r > 1.0 + eps) return {MapKind::Hyperbolic, re};
    return {MapKind::Parabolic, re};
}

namespace detail {

// sqrt(x^2 - y^2) for x, y >= 0, clamped at zero.
inline double sqrt_diff_sq(double x, double y) {
    return std::sqrt(std::max(0.0, (x - y) * (x + y)));
}

}  // namespace detail

struct FixedPoint {
    ExtendedPoint point;
    cplx multiplier;
};

/// Fixed points with the derivative of the map there. Hyperbolic: two points
/// on the unit circle, real positive multipliers m and 1/m. Elliptic: the
/// point inside the disk first, then its mirror image. Parabolic: the single
/// double point with multiplier 1.
///
/// The square roots are taken as sqrt(|Im a|^2 - |b|^2) rather than
/// sqrt(1 - Re(a)^2) so that near-identity matrices keep their accuracy.
inline std::vector<FixedPoint> fixed_points(const Su11Matrix& m) {
    const MapClass cls = classify(m);
    if (cls.kind == MapKind::Identity) throw domain_error("fixed points of +-Id are not isolated");

    const double re = m.a.real();
    const double im = m.a.imag();
    const double nb = std::abs(m.b);
    const cplx i{0.0, 1.0};

    if (nb < 1e-300) {
        const cplx inner = 1.0 / (m.a * m.a);
        return {{{cplx{}, false}, inner}, {{cplx{}, true}, 1.0 / inner}};
    }

    switch (cls.kind) {
        case MapKind::Hyperbolic: {
            const double t = detail::sqrt_diff_sq(nb, std::abs(im));
            const double e_plus = re + t;
            const double e_minus = re - t;
            return {{{(-i * im + t) / m.b, false}, 1.0 / (e_plus * e_plus)},
                    {{(-i * im - t) / m.b, false}, 1.0 / (e_minus * e_minus)}};
        }
        case MapKind::Parabolic:
            return {{{-i * im / m.b, false}, 1.0}};
        case MapKind::Elliptic:
        default: {
            const double s = detail::sqrt_diff_sq(std::abs(im), nb);
            const double sigma = im >= 0.0 ? 1.0 : -1.0;
            const double small = nb * nb / (std::abs(im) + s);  // |Im a| - s without cancellation
            const double large = std::abs(im) + s;
            cplx e_in{re, sigma * s};
            e_in /= std::abs(e_in);
            const cplx m_in = 1.0 / (e_in * e_in);
            return {{{-i * sigma * small / m.b, false}, m_in},
                    {{-i * sigma * large / m.b, false}, 1.0 / m_in}};
        }
    }
}

/// Argument in (-pi, pi] of the multiplier at the fixed point inside the
/// unit disk of an elliptic map; the rotation angle of the map.
inline double elliptic_rotation_angle(const Su11Matrix& m) {
    const double re = m.a.real();
    const double im = m.a.imag();
    const double s = detail::sqrt_diff_sq(std::abs(im), std::abs(m.b));
    const double sigma = im >= 0.0 ? 1.0 : -1.0;
    // multiplier = exp(-2 i sigma atan2(s, Re a))
    return std::arg(std::polar(1.0, -2.0 * sigma * std::atan2(s, re)));
}

/// ||M - (tr M / 2) Id||_F / ||M||_F; zero exactly for scalar matrices.
inline double scalar_distance(const Mat2& m) {
    const double n = m.norm();
    detail::require(n > 0.0, "scalar_distance of the zero matrix");
    return traceless_part(m).norm() / n;
}

inline double scalar_distance(const Su11Matrix& m) { return scalar_distance(m.matrix()); }

/// Largest Lyapunov exponent per unit time of the period-2pi map:
/// max ln|multiplier| / (2 pi) over the circle fixed points, zero unless the
/// map is hyperbolic.
inline double lyapunov_exponent(const Su11Matrix& m) {
    if (classify(m).kind != MapKind::Hyperbolic) return 0.0;
    const double t = detail::sqrt_diff_sq(std::abs(m.b), std::abs(m.a.imag()));
    return std::log(std::abs(m.a.real()) + t) / pi;
}

}  // namespace phaselock
