#pragma once

#include <vector>

#include "rstab/polynomial.hpp"
#include "rstab/tolerances.hpp"

namespace rstab {

enum class Properness { kImproper, kProper, kStrictlyProper };

struct Classification {
    Properness properness = Properness::kProper;
    bool stable = false;
    std::vector<Complex> poles;

    bool is_proper() const { return properness != Properness::kImproper; }
    bool is_strictly_proper() const { return properness == Properness::kStrictlyProper; }
    bool is_stable_proper() const { return stable && is_proper(); }
};

// Ratio of real polynomials in canonical form: denominator monic, no
// numerator/denominator root pair closer than the cancellation tolerance.
// The denominator root list rides along with the value, so arithmetic can
// form least-common-denominator sums and cancel shared factors without
// re-rooting high-degree products. Values are immutable; every operation
// returns a fresh normalized value, so concurrent reads are safe.
class RationalFunction {
  public:
    RationalFunction() = default;
    RationalFunction(Polynomial num, Polynomial den, double cancel_tol = tol::kCancel);

    static RationalFunction zero() { return RationalFunction(); }
    static RationalFunction one() { return constant(1.0); }
    static RationalFunction constant(double c) {
        return RationalFunction(Polynomial::constant(c), Polynomial::one());
    }
    static RationalFunction z() { return RationalFunction(Polynomial::z(), Polynomial::one()); }
    // z^{-k}
    static RationalFunction delay(int k) {
        return RationalFunction(Polynomial::one(), Polynomial::monomial(k));
    }
    // Construction that skips denominator root finding: the caller supplies
    // the roots of den (with multiplicity).
    static RationalFunction with_known_poles(Polynomial num, Polynomial den,
                                             std::vector<Complex> den_roots,
                                             double cancel_tol = tol::kCancelResidual);

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }

    // Flags reflect the canonical form; poles are the denominator roots after
    // cancellation. Improper entries carry stable = false by convention.
    Classification classify(double pole_tol = tol::kPole) const;
    const std::vector<Complex>& poles() const { return poles_; }

    Complex eval(Complex zv) const { return num_.eval(zv) / den_.eval(zv); }

    RationalFunction operator+(const RationalFunction& o) const;
    RationalFunction operator-(const RationalFunction& o) const;
    RationalFunction operator*(const RationalFunction& o) const;
    RationalFunction operator*(double s) const;
    RationalFunction operator-() const { return *this * -1.0; }
    RationalFunction operator/(const RationalFunction& o) const { return *this * o.inverse(); }

    // Swapped numerator/denominator; may be improper. Throws on zero.
    RationalFunction inverse() const;

    // Re-cancel with a caller-chosen tolerance.
    RationalFunction cancelled(double cancel_tol) const {
        return RationalFunction(num_, den_, cancel_tol);
    }

    // Coefficients of z^{-tau}, tau = 0..horizon, of the expansion at
    // infinity. Requires a proper function.
    std::vector<double> impulse(int horizon) const;

  private:
    struct FromParts {};
    // Internal path: den already monic with known roots.
    RationalFunction(FromParts, Polynomial num, Polynomial den, std::vector<Complex> den_roots,
                     double cancel_tol);
    RationalFunction add_scaled(const RationalFunction& o, double sign) const;

    Polynomial num_;
    Polynomial den_ = Polynomial::one();
    std::vector<Complex> poles_;
};

inline RationalFunction operator*(double s, const RationalFunction& r) { return r * s; }

}  // namespace rstab
