#pragma once

// Closed-form results on the A = 0 axis, the monodromy criterion for
// identity Poincare maps, constriction scans along vertical lines, and the
// rotation-number quantization audit.

#include <phaselock/errors.hpp>
#include <phaselock/flow.hpp>
#include <phaselock/parallel.hpp>
#include <phaselock/params.hpp>
#include <phaselock/random.hpp>
#include <phaselock/su11.hpp>

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace phaselock {

/// Rotation number at A = D = 0: zero on |B| <= 1, sqrt(B^2-1)/(omega sqrt(1-delta^2))
/// for B > 1 and odd in B.
inline double closed_form_rho(double omega, double delta, double B) {
    detail::require(std::isfinite(omega) && omega > 0.0, "omega must be > 0");
    detail::require(delta >= 0.0 && delta < 1.0, "delta must lie in [0,1)");
    if (std::abs(B) <= 1.0) return 0.0;
    const double r = std::sqrt(B * B - 1.0) / (omega * std::sqrt(1.0 - delta * delta));
    return B > 0.0 ? r : -r;
}

/// Singular points (1 +- sqrt(1-delta^2))/delta of the A = D = 0 system; only
/// z_minus lies in the unit disk.
inline double z_minus(double delta) {
    detail::require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
    return delta / (1.0 + std::sqrt(1.0 - delta * delta));  // = (1 - sqrt(1-delta^2))/delta
}

inline double z_plus(double delta) {
    detail::require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
    return (1.0 + std::sqrt(1.0 - delta * delta)) / delta;
}

struct MuPair {
    double mu1 = 0.0;
    double mu2 = 0.0;
};

/// Exponents of the local monodromy at z_minus: the monodromy is conjugate
/// to diag(exp(2 pi i mu1), exp(2 pi i mu2)).
inline MuPair mu_pair(double omega, double delta, double B) {
    detail::require(B > 1.0, "B must be > 1");
    detail::require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
    detail::require(omega > 0.0, "omega must be > 0");
    const double den = 2.0 * omega * std::sqrt(1.0 - delta * delta);
    const double r = std::sqrt(B * B - 1.0);
    return {(-B + r) / den, (-B - r) / den};
}

struct GrowthPoint {
    int n = 0;
    double B = 1.0;
};

/// B_n = sqrt(omega^2 (1-delta^2) n^2 + 1), n = 0..n_max: trivial monodromy
/// on the A = D = 0 axis.
inline std::vector<GrowthPoint> growth_points(double omega, double delta, int n_max) {
    detail::require(std::isfinite(omega) && omega > 0.0, "omega must be > 0");
    detail::require(delta >= 0.0 && delta < 1.0, "delta must lie in [0,1)");
    detail::require(n_max >= 0, "n_max must be >= 0");
    std::vector<GrowthPoint> out;
    out.reserve(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        const double nn = static_cast<double>(n);
        out.push_back({n, std::sqrt(omega * omega * (1.0 - delta * delta) * nn * nn + 1.0)});
    }
    return out;
}

/// B >= 1 with B^2 - 1 = omega^2 (1-delta^2) (D-n)^2. Necessary for an
/// identity Poincare map at A = 0; proven sufficient only at D = 0.
inline double scalar_monodromy_condition(double omega, double delta, double D, int n) {
    detail::require(delta >= 0.0 && delta < 1.0, "delta must lie in [0,1)");
    const double k = D - static_cast<double>(n);
    return std::sqrt(1.0 + omega * omega * (1.0 - delta * delta) * k * k);
}

/// Eigenvalue differences of the residues at 0 and at alpha. The one at alpha
/// does not depend on phi.
inline std::pair<cplx, cplx> residue_eigen_differences(const GheSystemParams& p) {
    const cplx w = std::conj(p.nu) + p.c;
    return {p.nu, principal_sqrt(w * w - 4.0 * p.b * p.b)};
}

struct ScanSample {
    double A = 0.0;
    double d = 0.0;
};

struct ScanMinimum {
    std::size_t index = 0;  // into samples
    double A = 0.0;         // refined location
    double d = 0.0;         // refined value, never above the sampled value
};

struct ScanReport {
    std::vector<ScanSample> samples;
    std::vector<ScanMinimum> minima;  // strict interior local minima, refined
    double threshold = 1e-2;
    std::vector<std::size_t> candidates;  // indices into minima with d < threshold
    double min_sampled = INFINITY;
};

struct ScanOptions {
    double threshold = 1e-2;
    unsigned workers = 1;
    bool refine = true;
    int refine_bits = 40;
    std::uintmax_t refine_iterations = 200;
    IntegratorOptions integrator{};
};

/// d(M) along the vertical segment B = B_fixed, A in [A_min, A_max] (nA
/// inclusive samples). Every strict interior local minimum of the sampled
/// profile is refined inside its bracket with Brent's method, because d(M)
/// has a V-shaped zero at an identity map that a grid rarely hits.
inline ScanReport scan_scalar_distance(double omega, double delta, double D, double B_fixed, double A_min,
                                       double A_max, int nA, const ScanOptions& opt = {}) {
    detail::require(nA >= 2, "nA must be >= 2");
    TorusParams base{omega, delta, D, B_fixed, 0.0};
    base.validate();
    auto distance_at = [&](double A) {
        TorusParams t = base;
        t.A = A;
        return scalar_distance(poincare_matrix(lift_field(t), opt.integrator));
    };

    ScanReport r;
    r.threshold = opt.threshold;
    r.samples.resize(static_cast<std::size_t>(nA));
    const double step = (A_max - A_min) / (nA - 1);
    parallel_for_blocks(r.samples.size(), opt.workers, [&](std::size_t j) {
        const double A = A_min + static_cast<double>(j) * step;
        r.samples[j] = {A, distance_at(A)};
    });
    for (const auto& s : r.samples) r.min_sampled = std::min(r.min_sampled, s.d);

    for (std::size_t j = 1; j + 1 < r.samples.size(); ++j) {
        const double d = r.samples[j].d;
        if (!(d < r.samples[j - 1].d && d < r.samples[j + 1].d)) continue;
        ScanMinimum m{j, r.samples[j].A, d};
        if (opt.refine) {
            std::uintmax_t iters = opt.refine_iterations;
            const auto [a_best, d_best] = boost::math::tools::brent_find_minima(
                distance_at, r.samples[j - 1].A, r.samples[j + 1].A, opt.refine_bits, iters);
            if (d_best < m.d) {
                m.A = a_best;
                m.d = d_best;
            }
        }
        if (m.d < r.threshold) r.candidates.push_back(r.minima.size());
        r.minima.push_back(m);
    }
    return r;
}

struct QuantizationViolation {
    std::size_t index = 0;
    TorusParams params;
    double rho = 0.0;
    double lyapunov = 0.0;
};

struct QuantizationReport {
    std::size_t samples = 0;
    std::size_t locked = 0;  // samples with lyapunov > threshold
    std::vector<QuantizationViolation> violations;
    double max_det_defect = 0.0;
};

struct AuditOptions {
    double lyapunov_threshold = 1e-3;
    double integer_tolerance = 1e-6;
    unsigned workers = 1;
    RotationOptions rotation{};
};

/// Phase locking (Lyapunov exponent above threshold) must come with an
/// integer rotation number.
inline QuantizationReport quantization_audit(std::span<const TorusParams> samples, const AuditOptions& opt = {}) {
    std::vector<PoincareResult> results(samples.size());
    parallel_for_blocks(samples.size(), opt.workers,
                        [&](std::size_t i) { results[i] = rotation_number(lift_field(samples[i]), opt.rotation); });
    QuantizationReport rep;
    rep.samples = samples.size();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& r = results[i];
        rep.max_det_defect = std::max(rep.max_det_defect, std::abs(r.matrix.det_defect()));
        if (!(r.lyapunov > opt.lyapunov_threshold)) continue;
        ++rep.locked;
        if (!(std::abs(r.rho - std::round(r.rho)) < opt.integer_tolerance)) {
            rep.violations.push_back({i, samples[i], r.rho, r.lyapunov});
        }
    }
    return rep;
}

struct ParamRect {
    double B_min = 0.0, B_max = 1.0, A_min = 0.0, A_max = 1.0;
};

/// n points uniform in the rectangle; B drawn before A for each point.
inline std::vector<TorusParams> seeded_samples(double omega, double delta, double D, const ParamRect& rect,
                                               std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<TorusParams> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double B = rng.uniform(rect.B_min, rect.B_max);
        const double A = rng.uniform(rect.A_min, rect.A_max);
        out.push_back({omega, delta, D, B, A});
    }
    return out;
}

}  // namespace phaselock
