#include "rstab/rational.hpp"

#include <algorithm>
#include <cmath>

#include "rstab/errors.hpp"

namespace rstab {

namespace {

// Greedy nearest pairing of two root multisets within tol. Returns per-side
// usage flags; used[i] on one side pairs with exactly one used[j] on the
// other.
void match_roots(const std::vector<Complex>& a, const std::vector<Complex>& b, double tolerance,
                 std::vector<bool>* used_a, std::vector<bool>* used_b) {
    used_a->assign(a.size(), false);
    used_b->assign(b.size(), false);
    for (size_t i = 0; i < a.size(); ++i) {
        int best = -1;
        double best_dist = tolerance;
        for (size_t j = 0; j < b.size(); ++j) {
            if ((*used_b)[j]) continue;
            const double d = std::abs(a[i] - b[j]);
            if (d < best_dist) {
                best_dist = d;
                best = static_cast<int>(j);
            }
        }
        if (best >= 0) {
            (*used_a)[i] = true;
            (*used_b)[static_cast<size_t>(best)] = true;
        }
    }
}

std::vector<Complex> unmatched(const std::vector<Complex>& roots, const std::vector<bool>& used) {
    std::vector<Complex> out;
    for (size_t i = 0; i < roots.size(); ++i)
        if (!used[i]) out.push_back(roots[i]);
    return out;
}

// Does p have a root within `tolerance` of r? One Newton step from r
// estimates the distance to the nearest root, so a deflation accepted here
// moves the function value by at most about the tolerance.
bool root_within(const Polynomial& p, Complex r, double tolerance) {
    const Complex v = p.eval(r);
    if (std::abs(v) == 0.0) return true;
    const Complex dv = p.derivative().eval(r);
    if (std::abs(dv) == 0.0) return false;
    const Complex step = v / dv;
    if (std::abs(step) >= tolerance) return false;
    // The step must actually descend toward a root.
    return std::abs(p.eval(r - step)) <= std::abs(v);
}

}  // namespace

RationalFunction::RationalFunction(Polynomial num, Polynomial den, double cancel_tol) {
    if (den.is_zero()) throw Error("rational function with zero denominator");
    if (num.is_zero()) return;

    const double lead = den.leading();
    num = num * (1.0 / lead);
    den = den * (1.0 / lead);

    // Common powers of z cancel exactly by coefficient shift.
    const int shift = std::min(num.trailing_zero_count(), den.trailing_zero_count());
    if (shift > 0) {
        num = num.shifted_down(shift);
        den = den.shifted_down(shift);
    }

    std::vector<Complex> den_roots;
    if (den.degree() >= 1) den_roots = den.roots();
    *this = RationalFunction(FromParts{}, std::move(num), std::move(den), std::move(den_roots),
                             cancel_tol);
}

RationalFunction::RationalFunction(FromParts, Polynomial num, Polynomial den,
                                   std::vector<Complex> den_roots, double cancel_tol) {
    if (num.is_zero()) {
        num_ = Polynomial::zero();
        den_ = Polynomial::one();
        poles_.clear();
        return;
    }
    // Cancellation by deflation: a denominator root that the numerator also
    // vanishes at gets divided out of both sides. Conjugate pairs leave as a
    // real quadratic. No root finding on products, so factored structure
    // survives arbitrarily long op chains.
    std::vector<bool> removed(den_roots.size(), false);
    bool changed = !den_roots.empty() && num.degree() >= 1;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < den_roots.size(); ++i) {
            if (removed[i] || num.degree() < 1) continue;
            const Complex r = den_roots[i];
            if (std::abs(r.imag()) <= 1e-12) {
                if (!root_within(num, r, cancel_tol)) continue;
                const Polynomial factor({-r.real(), 1.0});
                num = num.divmod(factor).first;
                den = den.divmod(factor).first;
                removed[i] = true;
                changed = true;
            } else {
                if (r.imag() < 0.0) continue;  // handled with its conjugate
                int partner = -1;
                double best = 1e-6;
                for (size_t j = 0; j < den_roots.size(); ++j) {
                    if (j == i || removed[j]) continue;
                    const double d = std::abs(den_roots[j] - std::conj(r));
                    if (d < best) {
                        best = d;
                        partner = static_cast<int>(j);
                    }
                }
                if (partner < 0 || num.degree() < 2) continue;
                if (!root_within(num, r, cancel_tol)) continue;
                const Complex rp = den_roots[static_cast<size_t>(partner)];
                const Polynomial factor({(r * rp).real(), -(r + rp).real(), 1.0});
                num = num.divmod(factor).first;
                den = den.divmod(factor).first;
                removed[i] = true;
                removed[static_cast<size_t>(partner)] = true;
                changed = true;
            }
        }
    }
    num_ = std::move(num);
    den_ = std::move(den);
    poles_ = unmatched(den_roots, removed);
}

RationalFunction RationalFunction::with_known_poles(Polynomial num, Polynomial den,
                                                    std::vector<Complex> den_roots,
                                                    double cancel_tol) {
    if (den.is_zero()) throw Error("rational function with zero denominator");
    const double lead = den.leading();
    num = num * (1.0 / lead);
    den = den * (1.0 / lead);
    return RationalFunction(FromParts{}, std::move(num), std::move(den), std::move(den_roots),
                            cancel_tol);
}

Classification RationalFunction::classify(double pole_tol) const {
    Classification c;
    c.poles = poles_;
    const int dn = num_.degree();
    const int dd = den_.degree();
    if (dn > dd) {
        c.properness = Properness::kImproper;
        c.stable = false;
        return c;
    }
    c.properness = (dn < dd) ? Properness::kStrictlyProper : Properness::kProper;
    c.stable = true;
    for (const Complex& p : poles_) {
        if (std::abs(p) >= 1.0 - pole_tol) {
            c.stable = false;
            break;
        }
    }
    return c;
}

RationalFunction RationalFunction::add_scaled(const RationalFunction& o, double sign) const {
    if (o.is_zero()) return *this;
    if (is_zero()) return o * sign;
    // Least common denominator through the known pole lists: shared factors
    // unify instead of multiplying, which is what keeps elimination degrees
    // at desk scale. The pairing tolerance only needs to absorb root drift
    // between generations of the same factor, so it sits well below the
    // cancellation tolerance.
    std::vector<bool> used_mine, used_other;
    match_roots(poles_, o.poles_, 1e-9, &used_mine, &used_other);
    const std::vector<Complex> other_extra = unmatched(o.poles_, used_other);
    const std::vector<Complex> mine_extra = unmatched(poles_, used_mine);
    const Polynomial lift_mine = Polynomial::from_roots(other_extra, 1.0);
    const Polynomial lift_other = Polynomial::from_roots(mine_extra, 1.0);
    Polynomial num = num_ * lift_mine + (o.num_ * sign) * lift_other;
    Polynomial den = den_ * lift_mine;
    std::vector<Complex> den_roots = poles_;
    den_roots.insert(den_roots.end(), other_extra.begin(), other_extra.end());
    return RationalFunction(FromParts{}, std::move(num), std::move(den), std::move(den_roots),
                            tol::kCancelResidual);
}

RationalFunction RationalFunction::operator+(const RationalFunction& o) const {
    return add_scaled(o, 1.0);
}

RationalFunction RationalFunction::operator-(const RationalFunction& o) const {
    return add_scaled(o, -1.0);
}

RationalFunction RationalFunction::operator*(const RationalFunction& o) const {
    if (is_zero() || o.is_zero()) return zero();
    std::vector<Complex> den_roots = poles_;
    den_roots.insert(den_roots.end(), o.poles_.begin(), o.poles_.end());
    return RationalFunction(FromParts{}, num_ * o.num_, den_ * o.den_, std::move(den_roots),
                            tol::kCancelResidual);
}

RationalFunction RationalFunction::operator*(double s) const {
    if (s == 0.0 || is_zero()) return zero();
    RationalFunction out = *this;
    out.num_ = out.num_ * s;
    return out;
}

RationalFunction RationalFunction::inverse() const {
    if (is_zero()) throw Error("inverse of zero");
    Polynomial nnum = den_;
    Polynomial nden = num_;
    const double lead = nden.leading();
    nnum = nnum * (1.0 / lead);
    nden = nden * (1.0 / lead);
    std::vector<Complex> droots;
    if (nden.degree() >= 1) droots = nden.roots();
    return RationalFunction(FromParts{}, std::move(nnum), std::move(nden), std::move(droots),
                            tol::kCancelResidual);
}

std::vector<double> RationalFunction::impulse(int horizon) const {
    if (num_.degree() > den_.degree()) throw Error("impulse response of improper function");
    std::vector<double> h(static_cast<size_t>(horizon) + 1, 0.0);
    if (is_zero()) return h;
    // num = den * sum_tau h[tau] z^{-tau}: match coefficients downward from z^d.
    const int d = den_.degree();
    for (int k = 0; k <= horizon; ++k) {
        double v = num_.coeff(d - k);
        for (int j = 0; j < k; ++j) v -= den_.coeff(d - k + j) * h[static_cast<size_t>(j)];
        h[static_cast<size_t>(k)] = v;
    }
    return h;
}

}  // namespace rstab
