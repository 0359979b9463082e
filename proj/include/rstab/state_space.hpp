#pragma once

#include <Eigen/Dense>

#include "rstab/transfer_matrix.hpp"

namespace rstab {

struct StateSpacePlant {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd C;
    Eigen::MatrixXd D;

    StateSpacePlant(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c, Eigen::MatrixXd d);

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }
    int p() const { return static_cast<int>(C.rows()); }

    // G = C (zI - A)^{-1} B + D.
    TransferMatrix transfer_function() const;
};

// det(zI - A), ascending coefficients (Faddeev-LeVerrier).
Polynomial characteristic_polynomial(const Eigen::MatrixXd& A);

// zI - A as a transfer matrix.
TransferMatrix z_identity_minus(const Eigen::MatrixXd& A);

// (zI - A)^{-1}: adjugate/determinant expansion for n <= 4, rational
// Gaussian elimination above.
TransferMatrix resolvent(const Eigen::MatrixXd& A);

// Spectral radius via poly_roots of the characteristic polynomial.
double spectral_radius(const Eigen::MatrixXd& A);

// Stabilizing gain F with A + BF Schur, from the fixed-point iteration of the
// discrete Riccati recursion (successive-iterate max-abs difference < 1e-11,
// at most 10^4 sweeps). The closed-loop spectral radius is re-checked through
// the characteristic-polynomial roots.
Eigen::MatrixXd riccati_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             const Eigen::MatrixXd& Q, const Eigen::MatrixXd& Rw);

}  // namespace rstab
