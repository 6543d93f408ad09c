#pragma once

// Torus flows dtheta/dtau = u(tau) cos(theta) + v(tau), their traceless
// su(1,1) linear lift, the period-2pi Poincare matrix, rotation number and
// Lyapunov exponent.

#include <phaselock/errors.hpp>
#include <phaselock/matrix.hpp>
#include <phaselock/ode.hpp>
#include <phaselock/params.hpp>
#include <phaselock/su11.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <utility>

namespace phaselock {

enum class FieldKind { DRsj, Rsj, Custom };

/// dtheta/dtau = u(tau) cos(theta) + v(tau), u and v 2pi-periodic.
struct CosineField {
    std::function<double(double)> u;
    std::function<double(double)> v;
    FieldKind kind = FieldKind::Custom;

    double rate(double tau, double theta) const { return u(tau) * std::cos(theta) + v(tau); }
};

inline CosineField lift_field(const TorusParams& t) {
    t.validate();
    const double omega = t.omega, delta = t.delta, D = t.D, B = t.B, A = t.A;
    CosineField f;
    f.u = [=](double tau) { return 1.0 / (omega * (1.0 - delta * std::cos(tau))); };
    f.v = [=](double tau) {
        return (B + A * std::sin(tau)) / (omega * (1.0 - delta * std::cos(tau))) + D;
    };
    f.kind = (delta == 0.0 && D == 0.0) ? FieldKind::Rsj : FieldKind::DRsj;
    return f;
}

inline CosineField constant_field(double u0, double v0) {
    return {[u0](double) { return u0; }, [v0](double) { return v0; }, FieldKind::Custom};
}

/// C(tau) = (i/2) [[-v, -u], [u, v]]. Traceless and in su(1,1); its
/// projectivization on |Phi| = 1 is exactly the cosine field.
inline Mat2 linear_lift_rhs(const CosineField& f, double tau) {
    const double u = f.u(tau), v = f.v(tau);
    const cplx h{0.0, 0.5};
    return mat2(-h * v, -h * u, h * u, h * v);
}

/// Fundamental matrix of Y' = C(tau) Y over [0, 2pi] started at Id, before
/// any projection.
inline Mat2 fundamental_matrix(const CosineField& f, const IntegratorOptions& opt = {}) {
    using state = std::array<double, 8>;  // row-major (re, im) pairs
    state y{1, 0, 0, 0, 0, 0, 1, 0};
    auto rhs = [&f](const state& s, state& ds, double tau) {
        const double hu = 0.5 * f.u(tau), hv = 0.5 * f.v(tau);
        // C = [[-i hv, -i hu], [i hu, i hv]]; (x + i y) * (i c) = -c y + i c x
        for (int col = 0; col < 2; ++col) {
            const double r1 = s[2 * col], i1 = s[2 * col + 1];
            const double r2 = s[4 + 2 * col], i2 = s[4 + 2 * col + 1];
            ds[2 * col] = hv * i1 + hu * i2;
            ds[2 * col + 1] = -hv * r1 - hu * r2;
            ds[4 + 2 * col] = -hu * i1 - hv * i2;
            ds[4 + 2 * col + 1] = hu * r1 + hv * r2;
        }
    };
    integrate(rhs, y, 0.0, two_pi, opt);
    return mat2({y[0], y[1]}, {y[2], y[3]}, {y[4], y[5]}, {y[6], y[7]});
}

/// Period map of the flow as an SU(1,1) matrix under the Phi = Y2/Y1 action.
inline Su11Matrix poincare_matrix(const CosineField& f, const IntegratorOptions& opt = {}) {
    return project_su11(fundamental_matrix(f, opt));
}

/// Lifted angle theta(tau1) of the scalar flow started at theta(tau0) = theta0.
inline double lift_angle(const CosineField& f, double theta0, double tau0, double tau1,
                         const IntegratorOptions& opt = {}) {
    std::array<double, 1> x{theta0};
    auto rhs = [&f](const std::array<double, 1>& s, std::array<double, 1>& ds, double tau) {
        ds[0] = f.rate(tau, s[0]);
    };
    integrate(rhs, x, tau0, tau1, opt);
    return x[0];
}

struct PoincareResult {
    Su11Matrix matrix;
    MapClass cls;
    double rho = 0.0;
    double lyapunov = 0.0;
    int winding_periods = 0;
    bool snapped = false;
    bool adaptive_n_exhausted = false;
};

struct RotationOptions {
    IntegratorOptions integrator{};
    int initial_periods = 64;
    int max_periods = 4096;
    double accept_distance = 0.25;
    double integer_residual = 1e-6;
};

/// Rotation number per unit tau.
///
/// Non-elliptic maps have a fixed point theta* on the circle, so one period
/// of the scalar lift from theta* winds an exact integer number of times.
/// Elliptic maps have rotation number k + beta/2pi where beta is the
/// argument of the multiplier at the interior fixed point; k is chosen from
/// an N-period average of the scalar lift.
inline PoincareResult rotation_number(const CosineField& f, const RotationOptions& opt = {}) {
    PoincareResult r;
    r.matrix = poincare_matrix(f, opt.integrator);
    r.cls = classify(r.matrix);

    if (r.cls.kind != MapKind::Elliptic) {
        double theta_star = 0.0;
        if (r.cls.kind != MapKind::Identity) {
            theta_star = std::arg(fixed_points(r.matrix).front().point.z);
        }
        const double turns =
            (lift_angle(f, theta_star, 0.0, two_pi, opt.integrator) - theta_star) / two_pi;
        const double k = std::round(turns);
        if (std::abs(turns - k) >= opt.integer_residual) {
            throw accuracy_error("winding from a circle fixed point is not an integer: " +
                                 std::to_string(turns));
        }
        r.rho = k + 0.0;  // normalizes -0
        r.lyapunov = lyapunov_exponent(r.matrix);
        r.winding_periods = 1;
        r.snapped = true;
        return r;
    }

    const double frac = elliptic_rotation_angle(r.matrix) / two_pi;
    int periods = 0;
    int target = opt.initial_periods;
    double theta = 0.0;
    double estimate = 0.0;
    for (;;) {
        theta = lift_angle(f, theta, two_pi * periods, two_pi * target, opt.integrator);
        periods = target;
        estimate = theta / (two_pi * periods);
        const double candidate = std::round(estimate - frac) + frac;
        if (std::abs(candidate - estimate) <= opt.accept_distance) {
            r.rho = candidate;
            r.snapped = true;
            break;
        }
        if (target >= opt.max_periods) {
            r.rho = estimate;
            r.adaptive_n_exhausted = true;
            break;
        }
        target = std::min(2 * target, opt.max_periods);
    }
    r.winding_periods = periods;
    r.lyapunov = 0.0;
    return r;
}

/// max_k |exp(i theta(2pi; theta_k)) - act(M, exp(i theta_k))| over
/// theta_k = 2 pi k / samples: the scalar lift and the matrix lift must
/// describe the same circle map.
inline double flow_map_consistency(const CosineField& f, int samples, const IntegratorOptions& opt = {}) {
    detail::require(samples >= 1, "samples must be >= 1");
    const Su11Matrix m = poincare_matrix(f, opt);
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double theta0 = two_pi * k / samples;
        const double theta1 = lift_angle(f, theta0, 0.0, two_pi, opt);
        const ExtendedPoint image = act(m, std::polar(1.0, theta0));
        const double err = image.infinite ? INFINITY : std::abs(std::polar(1.0, theta1) - image.z);
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace phaselock
