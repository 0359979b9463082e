#pragma once

#include "rstab/realization.hpp"
#include "rstab/state_space.hpp"

namespace rstab {

// State-feedback closed-loop response pair, strictly proper and stable, on
// the affine space [zI - A, -B] [phi_x; phi_u] = I.
struct SlsStateFeedback {
    TransferMatrix phi_x;
    TransferMatrix phi_u;
    int horizon = 0;  // FIR length when synthesized

    TransferMatrix stacked() const { return TransferMatrix::from_blocks({{phi_x}, {phi_u}}); }
    // max probe residual of [zI - A, -B] [phi_x; phi_u] - I.
    double affine_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) const;
    bool memberships_ok(double pole_tol = tol::kPole) const;
};

// FIR synthesis over taps 1..horizon: phi_x[1] = I, the one-step recursion
// phi_x[tau+1] = A phi_x[tau] + B phi_u[tau], and a deadbeat terminal tap.
// Among feasible sequences returns the minimizer of the summed squared
// Frobenius norms via an equality-constrained least-squares solve. Throws
// InfeasibleError when the terminal constraint is unreachable at this
// horizon.
SlsStateFeedback sls_sf_synthesize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int horizon);

// K = phi_u phi_x^{-1}.
TransferMatrix sls_sf_controller(const SlsStateFeedback& p);

// Output-feedback response blocks: phi_xx, phi_xy, phi_ux strictly proper
// stable, phi_uy stable proper, on the two affine spaces
// [zI - A, -B] Phi = [I, O] and Phi [zI - A; -C] = [I; O].
struct SlsOutputFeedback {
    TransferMatrix phi_xx, phi_ux, phi_xy, phi_uy;

    TransferMatrix stacked() const {
        return TransferMatrix::from_blocks({{phi_xx, phi_xy}, {phi_ux, phi_uy}});
    }
    double affine_residual_1(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) const;
    double affine_residual_2(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C) const;
    bool memberships_ok(double pole_tol = tol::kPole) const;
};

// Blocks of S for the output-feedback loop; requires internal stability.
SlsOutputFeedback sls_of_from_controller(const StateSpacePlant& plant, const TransferMatrix& K);

// K = K0 (I + D K0)^{-1} with K0 = phi_uy - phi_ux phi_xx^{-1} phi_xy; D = O
// reduces to K = K0.
TransferMatrix sls_of_controller(const SlsOutputFeedback& p, const Eigen::MatrixXd& D);

enum class MixedFlavor { kCor6, kCor7 };

// Mixed SLP/IOP parameterization blocks read from S, stacked as the 2x2
// block matrix the corollary's identities act on:
//   kCor6: [[phi_yx, phi_yy], [phi_ux, phi_uy]]
//   kCor7: [[phi_xy, phi_xu], [phi_uy, phi_uu]]
struct MixedExtraction {
    MixedFlavor flavor;
    TransferMatrix top_left, top_right, bottom_left, bottom_right;
    double residual_1 = 0.0;  // row identity
    double residual_2 = 0.0;  // column identity
    TransferMatrix recovered_K;
    double recovery_residual = 0.0;  // recovered_K vs the input K at probes

    TransferMatrix stacked() const {
        return TransferMatrix::from_blocks({{top_left, top_right}, {bottom_left, bottom_right}});
    }
};

MixedExtraction mixed_extract(const StateSpacePlant& plant, const TransferMatrix& K,
                              MixedFlavor flavor);

// Generalized parameterization read off S of a (y, u, z, w) realization:
// Psi = rows (y, u, z) by columns (y, u, w), with the z-column of S pinned to
// e_z and the w-row pinned to e_w.
struct GslsExtraction {
    TransferMatrix psi;
    double residual_1 = 0.0;
    double residual_2 = 0.0;
    double structure_residual = 0.0;  // S z-column vs e_z, w-row vs e_w
    TransferMatrix recovered_K;       // -psi_uy psi_yy^{-1}
    double recovery_residual = 0.0;
};

GslsExtraction gsls_extract(const Realization& r);

}  // namespace rstab
