#pragma once

#include <Eigen/Eigenvalues>
#include <complex>
#include <random>

#include "rstab/rational.hpp"
#include "rstab/transfer_matrix.hpp"

namespace testsup {

using rstab::Complex;
using rstab::Polynomial;
using rstab::RationalFunction;
using rstab::TransferMatrix;

inline std::mt19937 make_rng(unsigned seed) { return std::mt19937(seed); }

inline double uniform(std::mt19937& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Eigen::MatrixXd random_matrix(std::mt19937& rng, int rows, int cols, double scale = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = uniform(rng, -scale, scale);
    return m;
}

// Independent spectral radius oracle (Eigen eigensolver, not the library's
// characteristic-polynomial path).
inline double eigen_spectral_radius(const Eigen::MatrixXd& A) {
    return Eigen::EigenSolver<Eigen::MatrixXd>(A, false).eigenvalues().cwiseAbs().maxCoeff();
}

// Random A with spectral radius close to but below the target.
inline Eigen::MatrixXd random_stable_matrix(std::mt19937& rng, int n, double target_radius) {
    Eigen::MatrixXd A = random_matrix(rng, n, n);
    const double rho = eigen_spectral_radius(A);
    if (rho > 0.0) A *= target_radius / rho * uniform(rng, 0.5, 0.99);
    return A;
}

// Random stable proper scalar: random poles in the disk of the given radius,
// strictly fewer or equal zeros, random gain.
inline RationalFunction random_stable_rf(std::mt19937& rng, int max_order, double pole_radius,
                                         bool strictly_proper = false) {
    const int npoles = std::uniform_int_distribution<int>(1, max_order)(rng);
    const int nzeros =
        std::uniform_int_distribution<int>(0, strictly_proper ? npoles - 1 : npoles)(rng);
    std::vector<Complex> poles, zeros;
    int left = npoles;
    while (left > 0) {
        if (left >= 2 && uniform(rng, 0.0, 1.0) < 0.5) {
            const double r = uniform(rng, 0.05, pole_radius);
            const double th = uniform(rng, 0.05, 3.0);
            poles.emplace_back(r * std::cos(th), r * std::sin(th));
            poles.push_back(std::conj(poles.back()));
            left -= 2;
        } else {
            poles.emplace_back(uniform(rng, -pole_radius, pole_radius), 0.0);
            left -= 1;
        }
    }
    left = nzeros;
    while (left > 0) {
        if (left >= 2 && uniform(rng, 0.0, 1.0) < 0.5) {
            const double r = uniform(rng, 0.05, 1.5);
            const double th = uniform(rng, 0.05, 3.0);
            zeros.emplace_back(r * std::cos(th), r * std::sin(th));
            zeros.push_back(std::conj(zeros.back()));
            left -= 2;
        } else {
            zeros.emplace_back(uniform(rng, -1.5, 1.5), 0.0);
            left -= 1;
        }
    }
    const double gain = uniform(rng, 0.2, 1.5) * (uniform(rng, -1.0, 1.0) < 0 ? -1.0 : 1.0);
    return RationalFunction(Polynomial::from_roots(zeros, gain), Polynomial::from_roots(poles));
}

inline TransferMatrix random_stable_tm(std::mt19937& rng, int rows, int cols, int max_order,
                                       double pole_radius, bool strictly_proper = false) {
    TransferMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            m.at(i, j) = random_stable_rf(rng, max_order, pole_radius, strictly_proper);
    return m;
}

// Brute-force 2x2 inverse by the adjugate formula, kept independent of the
// library's elimination path.
inline TransferMatrix adjugate_inverse_2x2(const TransferMatrix& m) {
    const RationalFunction det = m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
    const RationalFunction idet = det.inverse();
    TransferMatrix out(2, 2);
    out.at(0, 0) = m.at(1, 1) * idet;
    out.at(0, 1) = -m.at(0, 1) * idet;
    out.at(1, 0) = -m.at(1, 0) * idet;
    out.at(1, 1) = m.at(0, 0) * idet;
    return out;
}

// max |a(z) - b(z)| over sample points of radius `radius`.
inline double circle_distance(const RationalFunction& a, const RationalFunction& b, double radius,
                              int samples = 8) {
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const Complex z = std::polar(radius, 0.31 + 6.28318530717958647 * k / samples);
        worst = std::max(worst, std::abs(a.eval(z) - b.eval(z)));
    }
    return worst;
}

inline double circle_distance(const TransferMatrix& a, const TransferMatrix& b, double radius,
                              int samples = 8) {
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const Complex z = std::polar(radius, 0.31 + 6.28318530717958647 * k / samples);
        worst = std::max(worst, (a.eval(z) - b.eval(z)).norm());
    }
    return worst;
}

}  // namespace testsup
