#pragma once

#include "rstab/coprime.hpp"
#include "rstab/realization.hpp"

namespace rstab {

// Closed-loop maps of the plant/controller loop: eta = (x, u) columns of S.
// Affine identities: [I, -G] [[Y, W], [U, Z]] = [I, O] and
// [[Y, W], [U, Z]] [-G; I] = [O; I], all four blocks stable proper.
struct IopQuadruple {
    TransferMatrix Y, U, W, Z;

    TransferMatrix stacked() const;  // [[Y, W], [U, Z]]
    // max probe residual over the two affine identities for the given plant.
    double affine_residual(const TransferMatrix& G) const;
    bool all_stable_proper(double pole_tol = tol::kPole) const;
};

// K = (Vr - Mr Q)(Ur - Nr Q)^{-1}; every stable proper Q yields an internally
// stabilizing proper controller.
TransferMatrix youla_controller(const CoprimeFactors& cf, const TransferMatrix& Q);

// The parameter behind an internally stabilizing K: Q = Mr^{-1}(Vr - S_ux Ml^{-1}).
// Throws when the loop with K is not internally stable.
TransferMatrix youla_parameter(const CoprimeFactors& cf, const TransferMatrix& K);

// Blocks of S for the plant/controller loop. Requires G strictly proper and
// the loop internally stable (error lists unstable entries otherwise).
IopQuadruple iop_from_controller(const TransferMatrix& G, const TransferMatrix& K);

// K = U Y^{-1}.
TransferMatrix controller_from_iop(const IopQuadruple& q);

// Youla-parameterized quadruple without forming K: Y = (Ur - Nr Q) Ml,
// U = (Vr - Mr Q) Ml, W = (Ur - Nr Q) Nl, Z = I + (Vr - Mr Q) Nl.
IopQuadruple youla_iop_bridge(const CoprimeFactors& cf, const TransferMatrix& Q);

}  // namespace rstab
