#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <cmath>
#include <complex>

namespace phaselock {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline Mat2 mat2(cplx m11, cplx m12, cplx m21, cplx m22) {
    Mat2 m;
    m << m11, m12, m21, m22;
    return m;
}

/// Principal square root with signed zeros cleared, so that a negative real
/// argument always maps to the upper half-plane.
inline cplx principal_sqrt(cplx z) { return std::sqrt(cplx(z.real() + 0.0, z.imag() + 0.0)); }

inline Mat2 diag2(cplx d1, cplx d2) { return mat2(d1, 0.0, 0.0, d2); }

/// X^{tt}: conjugation by the swap permutation, i.e. both diagonal entries
/// and both off-diagonal entries exchanged.
inline Mat2 swap_conjugate(const Mat2& x) { return mat2(x(1, 1), x(1, 0), x(0, 1), x(0, 0)); }

/// \bar X^{tt}, entrywise complex conjugate followed by the swap.
inline Mat2 bar_tt(const Mat2& x) { return swap_conjugate(x.conjugate()); }

/// Traceless part X - (tr X / 2) Id.
inline Mat2 traceless_part(const Mat2& x) {
    Mat2 r = x;
    const cplx h = x.trace() / 2.0;
    r(0, 0) -= h;
    r(1, 1) -= h;
    return r;
}

/// X in C*Id test: ||X - (tr X/2) Id||_F <= tol * (1 + ||X||_F).
inline bool is_scalar_matrix(const Mat2& x, double tol = 1e-10) {
    return traceless_part(x).norm() <= tol * (1.0 + x.norm());
}

}  // namespace phaselock
