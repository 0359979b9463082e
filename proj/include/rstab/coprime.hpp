#pragma once

#include "rstab/state_space.hpp"

namespace rstab {

// Doubly coprime factorization of a plant: all eight factors stable proper,
// G = Ml^{-1} Nl = Nr Mr^{-1}, and the Bezout block identity
//   [[Ml, -Nl], [-Vl, Ul]] [[Ur, Nr], [Vr, Mr]] = I.
struct CoprimeFactors {
    TransferMatrix Ml, Nl, Vl, Ul;
    TransferMatrix Ur, Nr, Vr, Mr;

    TransferMatrix left_factor() const;   // [[Ml, -Nl], [-Vl, Ul]]
    TransferMatrix right_factor() const;  // [[Ur, Nr], [Vr, Mr]]
    // max probe residual of left_factor * right_factor - I.
    double bezout_residual() const;
    // G recovered from the left factorization.
    TransferMatrix plant() const;
};

// Observer-based construction from stabilizing gains F (A + BF Schur) and
// L (A + LC Schur). Defaults take both gains from Riccati iterations with
// identity weights.
CoprimeFactors dcf(const StateSpacePlant& plant);
CoprimeFactors dcf(const StateSpacePlant& plant, const Eigen::MatrixXd& F,
                   const Eigen::MatrixXd& L);

}  // namespace rstab
