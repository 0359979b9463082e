#pragma once

#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "rstab/tolerances.hpp"

namespace rstab {

// Real-coefficient polynomial in z, coefficients stored ascending in powers.
// Canonical form strips trailing near-zero coefficients; the zero polynomial
// has an empty coefficient list and degree kZeroDegree.
class Polynomial {
  public:
    static constexpr int kZeroDegree = std::numeric_limits<int>::min();

    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

    static Polynomial zero() { return Polynomial(); }
    static Polynomial constant(double c) { return Polynomial({c}); }
    static Polynomial one() { return constant(1.0); }
    static Polynomial z() { return Polynomial({0.0, 1.0}); }
    // z^k
    static Polynomial monomial(int k, double c = 1.0);
    // leading * prod (z - r_i); roots must be closed under conjugation.
    static Polynomial from_roots(std::span<const Complex> roots, double leading = 1.0);

    bool is_zero() const { return coeffs_.empty(); }
    int degree() const { return coeffs_.empty() ? kZeroDegree : static_cast<int>(coeffs_.size()) - 1; }
    double leading() const { return coeffs_.empty() ? 0.0 : coeffs_.back(); }
    const std::vector<double>& coeffs() const { return coeffs_; }
    double coeff(int k) const {
        return (k >= 0 && k < static_cast<int>(coeffs_.size())) ? coeffs_[static_cast<size_t>(k)] : 0.0;
    }

    Complex eval(Complex x) const;
    double eval(double x) const;
    Polynomial derivative() const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(double s) const;
    Polynomial operator-() const { return *this * -1.0; }

    // Quotient and remainder of *this / d. d must be non-zero.
    std::pair<Polynomial, Polynomial> divmod(const Polynomial& d) const;

    // Number of exactly-vanishing low-order coefficients (roots at z = 0).
    int trailing_zero_count() const;
    // *this / z^k; requires k <= trailing_zero_count().
    Polynomial shifted_down(int k) const;
    // *this * z^k.
    Polynomial shifted_up(int k) const;

    // All degree() roots with multiplicity, via Aberth-Ehrlich simultaneous
    // iteration seeded on the Cauchy-bound circle. Throws Error on the zero
    // polynomial and on non-convergence (message carries the best iterate).
    std::vector<Complex> roots(double root_tol = tol::kRoot, int max_iter = tol::kRootMaxIter) const;

    bool operator==(const Polynomial& o) const { return coeffs_ == o.coeffs_; }

  private:
    void trim();

    std::vector<double> coeffs_;
};

inline Polynomial operator*(double s, const Polynomial& p) { return p * s; }

}  // namespace rstab
