#include "rstab/state_space.hpp"

#include <cmath>

#include "rstab/errors.hpp"

namespace rstab {

StateSpacePlant::StateSpacePlant(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c,
                                 Eigen::MatrixXd d)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
    if (A.rows() != A.cols() || B.rows() != A.rows() || C.cols() != A.rows() ||
        D.rows() != C.rows() || D.cols() != B.cols())
        throw Error("state-space dimension mismatch");
}

TransferMatrix StateSpacePlant::transfer_function() const {
    return TransferMatrix::constant(C) * resolvent(A) * TransferMatrix::constant(B) +
           TransferMatrix::constant(D);
}

namespace {

// Faddeev-LeVerrier: char poly of A and the adjugate polynomial
// adj(zI - A) = sum_k z^{n-1-k} N_{k+1}.
struct FaddeevResult {
    Polynomial charpoly;
    std::vector<Eigen::MatrixXd> adj_terms;  // N_1 .. N_n
};

FaddeevResult faddeev_leverrier(const Eigen::MatrixXd& A) {
    const int n = static_cast<int>(A.rows());
    std::vector<double> c(static_cast<size_t>(n) + 1, 0.0);
    c[static_cast<size_t>(n)] = 1.0;
    std::vector<Eigen::MatrixXd> terms;
    Eigen::MatrixXd N = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= n; ++k) {
        terms.push_back(N);
        const Eigen::MatrixXd AN = A * N;
        const double ck = -AN.trace() / k;
        c[static_cast<size_t>(n - k)] = ck;
        N = AN + ck * Eigen::MatrixXd::Identity(n, n);
    }
    return {Polynomial(std::move(c)), std::move(terms)};
}

}  // namespace

Polynomial characteristic_polynomial(const Eigen::MatrixXd& A) {
    return faddeev_leverrier(A).charpoly;
}

TransferMatrix z_identity_minus(const Eigen::MatrixXd& A) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n) throw Error("z_identity_minus of non-square matrix");
    TransferMatrix out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j)
                out.at(i, j) = RationalFunction(Polynomial({-A(i, j), 1.0}), Polynomial::one());
            else if (A(i, j) != 0.0)
                out.at(i, j) = RationalFunction::constant(-A(i, j));
        }
    return out;
}

TransferMatrix resolvent(const Eigen::MatrixXd& A) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n) throw Error("resolvent of non-square matrix");
    if (n <= 4) {
        const FaddeevResult fl = faddeev_leverrier(A);
        TransferMatrix out(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                std::vector<double> num(static_cast<size_t>(n), 0.0);
                for (int k = 0; k < n; ++k)
                    num[static_cast<size_t>(n - 1 - k)] = fl.adj_terms[static_cast<size_t>(k)](i, j);
                out.at(i, j) = RationalFunction(Polynomial(std::move(num)), fl.charpoly);
            }
        }
        return out;
    }
    return z_identity_minus(A).inverse();
}

double spectral_radius(const Eigen::MatrixXd& A) {
    double rho = 0.0;
    for (const Complex& r : characteristic_polynomial(A).roots()) rho = std::max(rho, std::abs(r));
    return rho;
}

Eigen::MatrixXd riccati_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             const Eigen::MatrixXd& Q, const Eigen::MatrixXd& Rw) {
    const int n = static_cast<int>(A.rows());
    Eigen::MatrixXd P = Q;
    bool converged = false;
    for (int it = 0; it < 10000; ++it) {
        const Eigen::MatrixXd BtP = B.transpose() * P;
        const Eigen::MatrixXd gain_den = Rw + BtP * B;
        const Eigen::MatrixXd next =
            Q + A.transpose() * P * A -
            A.transpose() * P * B * gain_den.ldlt().solve(BtP * A);
        const double diff = (next - P).cwiseAbs().maxCoeff();
        P = next;
        if (diff < 1e-11) {
            converged = true;
            break;
        }
    }
    if (!converged) throw Error("Riccati iteration failed (stabilizability?)");
    const Eigen::MatrixXd gain_den = Rw + B.transpose() * P * B;
    const Eigen::MatrixXd F = -gain_den.ldlt().solve(B.transpose() * P * A);
    if (spectral_radius(A + B * F) >= 1.0)
        throw Error("Riccati iteration failed (stabilizability?)");
    (void)n;
    return F;
}

}  // namespace rstab
