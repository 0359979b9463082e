#include "rstab/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rstab/errors.hpp"

namespace rstab {

void Polynomial::trim() {
    double scale = 0.0;
    for (double c : coeffs_) scale = std::max(scale, std::abs(c));
    const double cutoff = tol::kDrop * std::max(1.0, scale);
    while (!coeffs_.empty() && std::abs(coeffs_.back()) <= cutoff) coeffs_.pop_back();
}

Polynomial Polynomial::monomial(int k, double c) {
    std::vector<double> v(static_cast<size_t>(k) + 1, 0.0);
    v.back() = c;
    return Polynomial(std::move(v));
}

Polynomial Polynomial::from_roots(std::span<const Complex> roots, double leading) {
    std::vector<Complex> acc = {Complex(leading, 0.0)};
    for (const Complex& r : roots) {
        std::vector<Complex> next(acc.size() + 1, Complex(0.0, 0.0));
        for (size_t i = 0; i < acc.size(); ++i) {
            next[i] -= r * acc[i];
            next[i + 1] += acc[i];
        }
        acc = std::move(next);
    }
    std::vector<double> coeffs(acc.size());
    for (size_t i = 0; i < acc.size(); ++i) coeffs[i] = acc[i].real();
    return Polynomial(std::move(coeffs));
}

Complex Polynomial::eval(Complex x) const {
    Complex r(0.0, 0.0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * x + *it;
    return r;
}

double Polynomial::eval(double x) const {
    double r = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * x + *it;
    return r;
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() <= 1) return zero();
    std::vector<double> d(coeffs_.size() - 1);
    for (size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<double>(i);
    return Polynomial(std::move(d));
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    std::vector<double> v(std::max(coeffs_.size(), o.coeffs_.size()), 0.0);
    for (size_t i = 0; i < coeffs_.size(); ++i) v[i] += coeffs_[i];
    for (size_t i = 0; i < o.coeffs_.size(); ++i) v[i] += o.coeffs_[i];
    return Polynomial(std::move(v));
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    std::vector<double> v(std::max(coeffs_.size(), o.coeffs_.size()), 0.0);
    for (size_t i = 0; i < coeffs_.size(); ++i) v[i] += coeffs_[i];
    for (size_t i = 0; i < o.coeffs_.size(); ++i) v[i] -= o.coeffs_[i];
    return Polynomial(std::move(v));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    if (is_zero() || o.is_zero()) return zero();
    std::vector<double> v(coeffs_.size() + o.coeffs_.size() - 1, 0.0);
    for (size_t i = 0; i < coeffs_.size(); ++i)
        for (size_t j = 0; j < o.coeffs_.size(); ++j) v[i + j] += coeffs_[i] * o.coeffs_[j];
    return Polynomial(std::move(v));
}

Polynomial Polynomial::operator*(double s) const {
    std::vector<double> v = coeffs_;
    for (double& c : v) c *= s;
    return Polynomial(std::move(v));
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& d) const {
    if (d.is_zero()) throw Error("polynomial division by zero");
    if (degree() < d.degree()) return {zero(), *this};
    std::vector<double> rem = coeffs_;
    const int dd = d.degree();
    const double dl = d.leading();
    std::vector<double> quo(static_cast<size_t>(degree() - dd) + 1, 0.0);
    for (int k = degree() - dd; k >= 0; --k) {
        const double q = rem[static_cast<size_t>(k + dd)] / dl;
        quo[static_cast<size_t>(k)] = q;
        for (int i = 0; i <= dd; ++i) rem[static_cast<size_t>(k + i)] -= q * d.coeffs_[static_cast<size_t>(i)];
    }
    rem.resize(static_cast<size_t>(dd));
    return {Polynomial(std::move(quo)), Polynomial(std::move(rem))};
}

int Polynomial::trailing_zero_count() const {
    int n = 0;
    while (n < static_cast<int>(coeffs_.size()) && coeffs_[static_cast<size_t>(n)] == 0.0) ++n;
    return n;
}

Polynomial Polynomial::shifted_down(int k) const {
    if (k == 0) return *this;
    std::vector<double> v(coeffs_.begin() + k, coeffs_.end());
    return Polynomial(std::move(v));
}

Polynomial Polynomial::shifted_up(int k) const {
    if (k == 0 || is_zero()) return *this;
    std::vector<double> v(static_cast<size_t>(k), 0.0);
    v.insert(v.end(), coeffs_.begin(), coeffs_.end());
    return Polynomial(std::move(v));
}

namespace {

// A real polynomial's roots are closed under conjugation; the iteration does
// not enforce that, so pair near-conjugates exactly and flatten the rest to
// the real axis. Downstream factor rebuilds rely on closed lists.
void symmetrize_roots(std::vector<Complex>& roots) {
    std::vector<bool> done(roots.size(), false);
    for (size_t i = 0; i < roots.size(); ++i) {
        if (done[i] || roots[i].imag() == 0.0) continue;
        if (roots[i].imag() < 0.0) continue;
        int partner = -1;
        double best = std::numeric_limits<double>::max();
        for (size_t j = 0; j < roots.size(); ++j) {
            if (j == i || done[j] || roots[j].imag() >= 0.0) continue;
            const double d = std::abs(roots[j] - std::conj(roots[i]));
            if (d < best) {
                best = d;
                partner = static_cast<int>(j);
            }
        }
        if (partner >= 0 && best <= 1e-3 * (1.0 + std::abs(roots[i]))) {
            const Complex mean =
                0.5 * (roots[i] + std::conj(roots[static_cast<size_t>(partner)]));
            roots[i] = mean;
            roots[static_cast<size_t>(partner)] = std::conj(mean);
            done[i] = done[static_cast<size_t>(partner)] = true;
        } else {
            roots[i] = Complex(roots[i].real(), 0.0);
            done[i] = true;
        }
    }
    for (size_t i = 0; i < roots.size(); ++i)
        if (!done[i] && roots[i].imag() != 0.0) roots[i] = Complex(roots[i].real(), 0.0);
}

// Residual used by the convergence test: |p(x)| / (1+|x|)^deg for monic p.
double root_residual(const std::vector<double>& monic, Complex x) {
    Complex r(0.0, 0.0);
    for (auto it = monic.rbegin(); it != monic.rend(); ++it) r = r * x + *it;
    const int deg = static_cast<int>(monic.size()) - 1;
    const double res = std::abs(r) / std::pow(1.0 + std::abs(x), deg);
    return std::isfinite(res) ? res : std::numeric_limits<double>::max();
}

}  // namespace

std::vector<Complex> Polynomial::roots(double root_tol, int max_iter) const {
    if (is_zero()) throw Error("roots of zero polynomial undefined");
    if (degree() == 0) return {};

    // Exact roots at the origin come off first; vanishing low-order
    // coefficients are below the trim threshold of the remaining scale.
    std::vector<double> c = coeffs_;
    double scale = 0.0;
    for (double v : c) scale = std::max(scale, std::abs(v));
    const double small = tol::kDrop * std::max(1.0, scale);
    size_t zero_count = 0;
    while (zero_count + 1 < c.size() && std::abs(c[zero_count]) <= small) ++zero_count;
    std::vector<Complex> result(zero_count, Complex(0.0, 0.0));
    c.erase(c.begin(), c.begin() + static_cast<long>(zero_count));

    const int n = static_cast<int>(c.size()) - 1;
    if (n == 0) return result;

    // Monic normalization.
    const double lead = c.back();
    for (double& v : c) v /= lead;

    if (n == 1) {
        result.emplace_back(-c[0], 0.0);
        return result;
    }
    if (n == 2) {
        const double b = c[1], c0 = c[0];
        const Complex disc = std::sqrt(Complex(b * b - 4.0 * c0, 0.0));
        // Pick the sign that avoids cancellation, recover the mate by Vieta.
        Complex r1 = (b >= 0.0) ? (-b - disc) / 2.0 : (-b + disc) / 2.0;
        Complex r2 = (std::abs(r1) > 0.0) ? Complex(c0, 0.0) / r1 : -r1 - b;
        result.push_back(r1);
        result.push_back(r2);
        return result;
    }

    // Aberth-Ehrlich. Initial guesses on the Cauchy-bound circle with an
    // irrational angular offset so no guess starts on a symmetry axis.
    double cauchy = 0.0;
    for (int i = 0; i < n; ++i) cauchy = std::max(cauchy, std::abs(c[static_cast<size_t>(i)]));
    // Clamp the start circle so high-degree evaluation cannot overflow; the
    // iteration still walks outward to any larger root.
    const double radius = std::min(1.0 + cauchy, 1e6);
    const double pi = std::acos(-1.0);
    std::vector<Complex> x(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
        x[static_cast<size_t>(k)] = std::polar(radius, 2.0 * pi * k / n + 0.376);

    std::vector<double> dcoef(static_cast<size_t>(n));
    for (int i = 1; i <= n; ++i) dcoef[static_cast<size_t>(i - 1)] = c[static_cast<size_t>(i)] * i;

    auto eval_at = [](const std::vector<double>& p, Complex v) {
        Complex r(0.0, 0.0);
        for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * v + *it;
        return r;
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        bool all_converged = true;
        for (int k = 0; k < n; ++k) {
            Complex& xk = x[static_cast<size_t>(k)];
            if (!std::isfinite(xk.real()) || !std::isfinite(xk.imag())) {
                xk = std::polar(0.5 * radius, 2.0 * pi * k / n + 0.911);
                all_converged = false;
                continue;
            }
            const Complex pv = eval_at(c, xk);
            if (!std::isfinite(std::abs(pv))) {
                xk *= 0.5;
                all_converged = false;
                continue;
            }
            if (root_residual(c, xk) < root_tol) continue;
            all_converged = false;
            Complex dv = eval_at(dcoef, xk);
            if (std::abs(dv) == 0.0) {
                xk += Complex(1e-8, 1e-8);
                continue;
            }
            const Complex newton = pv / dv;
            Complex s(0.0, 0.0);
            for (int j = 0; j < n; ++j) {
                if (j == k) continue;
                const Complex diff = xk - x[static_cast<size_t>(j)];
                if (std::abs(diff) == 0.0) continue;
                s += 1.0 / diff;
            }
            const Complex denom = 1.0 - newton * s;
            xk -= (std::abs(denom) == 0.0) ? newton : newton / denom;
        }
        if (all_converged) {
            symmetrize_roots(x);
            result.insert(result.end(), x.begin(), x.end());
            return result;
        }
    }

    double worst = 0.0;
    for (const Complex& xi : x) worst = std::max(worst, root_residual(c, xi));
    std::ostringstream msg;
    msg << "root finding did not converge after " << max_iter << " iterations (worst residual " << worst
        << "; best iterate:";
    for (const Complex& xi : x) msg << " (" << xi.real() << "," << xi.imag() << ")";
    msg << ")";
    throw Error(msg.str());
}

}  // namespace rstab
