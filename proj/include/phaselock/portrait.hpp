#pragma once

// Rasters of rotation number and Lyapunov exponent over rectangles of the
// (B, A) plane, with CSV and binary PGM writers.

#include <phaselock/errors.hpp>
#include <phaselock/flow.hpp>
#include <phaselock/parallel.hpp>
#include <phaselock/params.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace phaselock {

struct PortraitGrid {
    double B_min = 0.0, B_max = 0.0, A_min = 0.0, A_max = 0.0;
    int nB = 0, nA = 0;
    std::vector<double> rho;       // row-major, index i * nA + j
    std::vector<double> lyapunov;
    std::vector<MapKind> cls;
    std::vector<unsigned char> failed;
    TorusParams base;  // B and A unused
    RotationOptions options;
    std::size_t failures = 0;
    std::size_t quantization_violations = 0;

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * nA + j; }

    // Endpoints are inclusive; a single-cell axis sits at its minimum.
    double B_at(int i) const { return nB == 1 ? B_min : B_min + i * (B_max - B_min) / (nB - 1); }
    double A_at(int j) const { return nA == 1 ? A_min : A_min + j * (A_max - A_min) / (nA - 1); }
};

/// Every cell is an independent rotation_number call; the result does not
/// depend on the worker count. Integration failures become NaN cells.
inline PortraitGrid sweep(const TorusParams& base, double B_min, double B_max, double A_min, double A_max, int nB,
                          int nA, unsigned workers, const RotationOptions& opt = {}) {
    base.validate();
    detail::require(nB >= 1 && nA >= 1, "grid dimensions must be positive");
    detail::require(std::isfinite(B_min) && std::isfinite(B_max) && std::isfinite(A_min) && std::isfinite(A_max),
                    "grid bounds must be finite");
    PortraitGrid g;
    g.B_min = B_min;
    g.B_max = B_max;
    g.A_min = A_min;
    g.A_max = A_max;
    g.nB = nB;
    g.nA = nA;
    g.base = base;
    g.options = opt;
    const std::size_t cells = static_cast<std::size_t>(nB) * nA;
    g.rho.assign(cells, NAN);
    g.lyapunov.assign(cells, NAN);
    g.cls.assign(cells, MapKind::Identity);
    g.failed.assign(cells, 0);

    // Work unit is one row of constant B; rows are split into contiguous blocks.
    parallel_for_blocks(static_cast<std::size_t>(nB), workers, [&](std::size_t i) {
        for (int j = 0; j < nA; ++j) {
            TorusParams t = base;
            t.B = g.B_at(static_cast<int>(i));
            t.A = g.A_at(j);
            const std::size_t k = g.index(static_cast<int>(i), j);
            try {
                const PoincareResult r = rotation_number(lift_field(t), opt);
                g.rho[k] = r.rho;
                g.lyapunov[k] = r.lyapunov;
                g.cls[k] = r.cls.kind;
            } catch (const numerical_error&) {
                g.failed[k] = 1;
            }
        }
    });

    for (std::size_t k = 0; k < cells; ++k) {
        if (g.failed[k]) {
            ++g.failures;
        } else if (g.lyapunov[k] > 0.0 && !(std::abs(g.rho[k] - std::round(g.rho[k])) < 1e-6)) {
            ++g.quantization_violations;
        }
    }
    return g;
}

namespace detail {

inline std::string format_g9(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

}  // namespace detail

/// Header `B,A,rho,lyapunov,class`, one row per cell with i outer, 9
/// significant digits, LF endings. Failed cells print nan / failed.
inline void write_csv(const PortraitGrid& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << "B,A,rho,lyapunov,class\n";
    for (int i = 0; i < g.nB; ++i) {
        for (int j = 0; j < g.nA; ++j) {
            const std::size_t k = g.index(i, j);
            out << detail::format_g9(g.B_at(i)) << ',' << detail::format_g9(g.A_at(j)) << ','
                << detail::format_g9(g.rho[k]) << ',' << detail::format_g9(g.lyapunov[k]) << ','
                << (g.failed[k] ? std::string_view("failed") : to_string(g.cls[k])) << '\n';
        }
    }
    out.flush();
    if (!out) throw io_error("write to '" + path + "' failed");
}

enum class Channel { Rho, Lyapunov };

/// Pixel bytes of the P5 image: width nB, height nA, top row at A_max,
/// linear clip of [lo, hi] onto 0..255. NaN maps to 0.
inline std::vector<unsigned char> pgm_pixels(const PortraitGrid& g, Channel ch, double lo, double hi) {
    detail::require(lo < hi, "clip range must satisfy lo < hi");
    const auto& values = ch == Channel::Rho ? g.rho : g.lyapunov;
    std::vector<unsigned char> px(static_cast<std::size_t>(g.nB) * g.nA);
    for (int row = 0; row < g.nA; ++row) {
        const int j = g.nA - 1 - row;
        for (int i = 0; i < g.nB; ++i) {
            const double v = values[g.index(i, j)];
            double t = std::isnan(v) ? 0.0 : (v - lo) / (hi - lo);
            t = std::clamp(t, 0.0, 1.0);
            px[static_cast<std::size_t>(row) * g.nB + i] = static_cast<unsigned char>(std::lround(t * 255.0));
        }
    }
    return px;
}

inline void write_pgm(const PortraitGrid& g, Channel ch, const std::string& path, double lo, double hi) {
    const auto px = pgm_pixels(g, ch, lo, hi);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << "P5\n" << g.nB << ' ' << g.nA << "\n255\n";
    out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
    out.flush();
    if (!out) throw io_error("write to '" + path + "' failed");
}

}  // namespace phaselock
