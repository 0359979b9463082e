#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rstab/errors.hpp"
#include "rstab/polynomial.hpp"
#include "test_support.hpp"

using rstab::Complex;
using rstab::Polynomial;

namespace {

std::vector<Complex> sorted_by_real(std::vector<Complex> v) {
    std::sort(v.begin(), v.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return v;
}

}  // namespace

TEST_CASE("canonical form strips trailing noise and keeps the zero sentinel") {
    CHECK(Polynomial({1.0, 2.0, 1e-15}).degree() == 1);
    CHECK(Polynomial({0.0, 0.0}).is_zero());
    CHECK(Polynomial().degree() == Polynomial::kZeroDegree);
    CHECK(Polynomial({3.0}).degree() == 0);
    CHECK(Polynomial::z().degree() == 1);
}

TEST_CASE("roots of simple factors") {
    const auto r1 = Polynomial({-1.0, 1.0}).roots();
    REQUIRE(r1.size() == 1);
    CHECK(std::abs(r1[0] - Complex(1.0, 0.0)) < 1e-12);

    const auto r2 = Polynomial({0.0, 0.0, 1.0}).roots();  // z^2
    REQUIRE(r2.size() == 2);
    CHECK(std::abs(r2[0]) == 0.0);
    CHECK(std::abs(r2[1]) == 0.0);
}

TEST_CASE("roots of (z-1)(z-0.25)") {
    // Expand the factored form first and confirm the coefficients match the
    // quoted quadratic.
    const Polynomial expanded = Polynomial({-1.0, 1.0}) * Polynomial({-0.25, 1.0});
    CHECK(expanded.coeff(0) == doctest::Approx(0.25));
    CHECK(expanded.coeff(1) == doctest::Approx(-1.25));
    CHECK(expanded.coeff(2) == doctest::Approx(1.0));

    const auto roots = sorted_by_real(Polynomial({0.25, -1.25, 1.0}).roots());
    REQUIRE(roots.size() == 2);
    CHECK(std::abs(roots[0] - Complex(0.25, 0.0)) < 1e-10);
    CHECK(std::abs(roots[1] - Complex(1.0, 0.0)) < 1e-10);
}

TEST_CASE("zero polynomial has no roots") {
    CHECK_THROWS_WITH_AS(Polynomial().roots(), "roots of zero polynomial undefined", rstab::Error);
}

TEST_CASE("root product reconstructs random polynomials up to degree 12") {
    auto rng = testsup::make_rng(101);
    for (int trial = 0; trial < 60; ++trial) {
        const int deg = std::uniform_int_distribution<int>(1, 12)(rng);
        std::vector<double> coeffs(static_cast<size_t>(deg) + 1);
        for (double& c : coeffs) c = testsup::uniform(rng, -1.0, 1.0);
        if (std::abs(coeffs.back()) < 0.1) coeffs.back() = 0.5;
        const Polynomial p(coeffs);
        if (p.degree() < 1) continue;

        const auto roots = p.roots();
        REQUIRE(static_cast<int>(roots.size()) == p.degree());
        const Polynomial rebuilt = Polynomial::from_roots(roots, p.leading());
        REQUIRE(rebuilt.degree() == p.degree());
        for (int k = 0; k <= p.degree(); ++k)
            CHECK(std::abs(rebuilt.coeff(k) - p.coeff(k)) < 1e-6);

        // Residual postcondition on each root.
        for (const Complex& r : roots) {
            const double res =
                std::abs(p.eval(r) / p.leading()) / std::pow(1.0 + std::abs(r), p.degree());
            CHECK(res < 1e-9);
        }
    }
}

TEST_CASE("division with remainder round-trips") {
    auto rng = testsup::make_rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(static_cast<size_t>(std::uniform_int_distribution<int>(1, 9)(rng)) + 1);
        std::vector<double> b(static_cast<size_t>(std::uniform_int_distribution<int>(1, 5)(rng)) + 1);
        for (double& c : a) c = testsup::uniform(rng, -2.0, 2.0);
        for (double& c : b) c = testsup::uniform(rng, -2.0, 2.0);
        b.back() = 1.0;
        const Polynomial p(a), d(b);
        if (p.is_zero() || d.is_zero()) continue;
        const auto [q, r] = p.divmod(d);
        const Polynomial back = q * d + r;
        for (int k = 0; k <= std::max(p.degree(), back.degree()); ++k)
            CHECK(std::abs(back.coeff(k) - p.coeff(k)) < 1e-9);
        CHECK(r.degree() < d.degree());
    }
}

TEST_CASE("evaluation and derivative agree with finite differences") {
    const Polynomial p({1.0, -0.5, 2.0, 0.25});
    const double h = 1e-6;
    const double x = 1.3;
    const double fd = (p.eval(x + h) - p.eval(x - h)) / (2.0 * h);
    CHECK(p.derivative().eval(x) == doctest::Approx(fd).epsilon(1e-6));
}
