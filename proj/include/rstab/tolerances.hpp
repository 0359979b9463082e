#pragma once

#include <array>
#include <complex>

namespace rstab {

using Complex = std::complex<double>;

namespace tol {

// Trailing coefficients at or below this magnitude (relative to the largest
// coefficient, floored at the absolute value) are stripped.
inline constexpr double kDrop = 1e-12;

// Numerator/denominator root pairs closer than this cancel.
inline constexpr double kCancel = 1e-7;

// Deflation threshold used inside arithmetic chains. Tighter than kCancel so
// eager per-op cancellation never moves values above the 1e-8 residual
// targets of the matrix identities.
inline constexpr double kCancelResidual = 1e-9;

// A pole is stable when |pole| < 1 - kPole. Marginal poles (e.g. integrators
// at z = 1) classify as unstable.
inline constexpr double kPole = 1e-9;

// Root-finder convergence: |p(root)| / (1+|root|)^deg on the monic polynomial.
inline constexpr double kRoot = 1e-10;
inline constexpr int kRootMaxIter = 500;

// Rational entries whose magnitude stays below this at every singularity
// probe count as zero pivots.
inline constexpr double kPivot = 1e-10;

}  // namespace tol

// Generic evaluation points outside the closed unit disk. Residual checks of
// matrix identities sample these; stable systems have no poles nearby.
inline const std::array<Complex, 4>& probe_points() {
    static const std::array<Complex, 4> pts = {
        Complex(2.0, 0.0),
        Complex(3.0, 0.0),
        Complex(0.0, 5.0),
        Complex(1.5, 0.0) * std::polar(1.0, std::acos(-1.0) / 3.0),
    };
    return pts;
}

// Probes used by the inversion pivot-vs-zero decision.
inline const std::array<Complex, 3>& pivot_probes() {
    static const std::array<Complex, 3> pts = {
        Complex(2.0, 0.0),
        Complex(3.0, 0.0),
        Complex(0.0, 5.0),
    };
    return pts;
}

}  // namespace rstab
