#include "rstab/robust.hpp"

#include <algorithm>
#include <cmath>

#include "rstab/errors.hpp"

namespace rstab {

Perturbation::Perturbation(SignalSpace space, std::map<BlockKey, TransferMatrix> blocks)
    : space_(std::move(space)), blocks_(std::move(blocks)),
      delta_(space_.total_dim(), space_.total_dim()) {
    for (const auto& [key, blk] : blocks_) {
        const auto& [row, col] = key;
        if (blk.rows() != space_.dim(row) || blk.cols() != space_.dim(col))
            throw Error("perturbation block (" + row + "," + col + ") shape mismatch");
        const int r0 = space_.offset(row), c0 = space_.offset(col);
        for (int i = 0; i < blk.rows(); ++i)
            for (int j = 0; j < blk.cols(); ++j) delta_.at(r0 + i, c0 + j) = blk.at(i, j);
    }
}

bool Perturbation::all_blocks_stable_proper(double pole_tol) const {
    return std::all_of(blocks_.begin(), blocks_.end(), [&](const auto& kv) {
        return kv.second.classify(pole_tol).all_stable_proper;
    });
}

std::vector<Perturbation::Slot> Perturbation::split_slots() const {
    std::vector<Slot> slots;
    int next = 0;
    for (const auto& [key, blk] : blocks_) {
        (void)blk;
        slots.push_back({key.first, key.second, next, next});
        ++next;
    }
    return slots;
}

TransferMatrix perturbed_stability(const TransferMatrix& S_hat, const Perturbation& delta,
                                   const TransferMatrix* R_hat, double* residual_out) {
    const TransferMatrix& D = delta.assemble();
    const TransferMatrix eye = TransferMatrix::identity(S_hat.rows());
    TransferMatrix left_inv, right_inv;
    try {
        left_inv = (eye - D * S_hat).inverse();
        right_inv = (eye - S_hat * D).inverse();
    } catch (const SingularError&) {
        throw SingularError("perturbation destroys well-posedness");
    }
    const TransferMatrix S1 = S_hat * left_inv;
    const TransferMatrix S2 = right_inv * S_hat;
    double residual = probe_distance(S1, S2);
    if (R_hat) {
        const TransferMatrix direct = (eye - (*R_hat + D)).inverse();
        residual = std::max(residual, probe_distance(S1, direct));
    }
    if (residual_out) *residual_out = residual;
    return S1;
}

namespace {

void fill_witness(RobustReport& report, const TransferMatrix& S, double pole_tol) {
    const MatrixClassification mc = S.classify(pole_tol);
    report.stable = mc.all_stable_proper;
    if (!report.stable) {
        for (int i = 0; i < S.rows(); ++i) {
            for (int j = 0; j < S.cols(); ++j) {
                const Classification& c = mc.entry(i, j, S.cols());
                if (c.is_stable_proper()) continue;
                report.witness_entries.emplace_back(i, j);
                for (const Complex& p : c.poles)
                    if (std::abs(p) >= 1.0 - pole_tol) report.witness_poles.push_back(p);
            }
        }
    }
}

}  // namespace

RobustReport robust_check(const TransferMatrix& S_hat, const Perturbation& delta,
                          double pole_tol) {
    RobustReport report;
    try {
        TransferMatrix S = perturbed_stability(S_hat, delta);
        fill_witness(report, S, pole_tol);
        report.perturbed_S = std::move(S);
    } catch (const SingularError&) {
        report.well_posed = false;
        report.stable = false;
    }
    return report;
}

double small_gain_margin(const TransferMatrix& M, int grid_size) {
    if (!M.classify().all_stable_proper)
        throw Error("small gain margin requires RH-infinity membership");
    const double norm = M.hinf_norm(grid_size);
    if (norm == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / norm;
}

double block_margin(const Realization& nominal, const std::string& a, const std::string& b,
                    int grid_size) {
    const TransferMatrix S = stability_of(nominal);
    const TransferMatrix M = S.block(nominal.space.offset(b), nominal.space.offset(a),
                                     nominal.space.dim(b), nominal.space.dim(a));
    return small_gain_margin(M, grid_size);
}

bool robust_iop_margin(const IopQuadruple& quad, double epsilon, int grid_size) {
    if (epsilon <= 0.0) throw Error("robust_iop_margin requires epsilon > 0");
    if (quad.U.is_zero()) return true;
    return quad.U.hinf_norm(grid_size) <= 1.0 / epsilon;
}

RobustReport iop_nominal_robust_check(const IopQuadruple& quad, const TransferMatrix& delta_G,
                                      double pole_tol) {
    if (!delta_G.classify(pole_tol).all_stable_proper)
        throw Error("iop_nominal_robust_check requires a stable proper plant perturbation");
    RobustReport report;
    const TransferMatrix eye = TransferMatrix::identity(delta_G.rows());
    try {
        TransferMatrix inv = (eye - delta_G * quad.U).inverse();
        fill_witness(report, inv, pole_tol);
        report.perturbed_S = std::move(inv);
    } catch (const SingularError&) {
        report.well_posed = false;
        report.stable = false;
    }
    return report;
}

SlsSfRobustResult sls_sf_robust_check(const SlsStateFeedback& phi_hat, const Eigen::MatrixXd& A,
                                      const Eigen::MatrixXd& B, bool cross_check) {
    if (!phi_hat.memberships_ok())
        throw Error("sls_sf_robust_check requires strictly proper stable responses");
    const int n = static_cast<int>(A.rows());
    const TransferMatrix row =
        TransferMatrix::from_blocks({{z_identity_minus(A), TransferMatrix::constant(-B)}});
    SlsSfRobustResult out;
    out.delta = row * phi_hat.stacked() - TransferMatrix::identity(n);
    try {
        const TransferMatrix inv = (TransferMatrix::identity(n) + out.delta).inverse();
        fill_witness(out.report, inv, tol::kPole);
        out.response_x = phi_hat.phi_x * inv;
        out.response_u = phi_hat.phi_u * inv;
        out.report.perturbed_S = TransferMatrix::from_blocks({{out.response_x}, {out.response_u}});
    } catch (const SingularError&) {
        out.report.well_posed = false;
        out.report.stable = false;
        return out;
    }
    if (cross_check) {
        const TransferMatrix K_hat = phi_hat.phi_u * phi_hat.phi_x.inverse();
        out.direct_verdict =
            check_internal(state_feedback_realization(A, B, K_hat)).stable_ok;
    }
    return out;
}

SlsOfRobustResult sls_of_robust_check(const SlsOutputFeedback& phi_hat,
                                      const StateSpacePlant& plant) {
    if (phi_hat.affine_residual_1(plant.A, plant.B) > 1e-8)
        throw Error("sls_of_robust_check requires the first affine identity to hold");
    const int n = plant.n(), m = plant.m();
    const TransferMatrix col = TransferMatrix::from_blocks(
        {{z_identity_minus(plant.A)}, {TransferMatrix::constant(-plant.C)}});
    const TransferMatrix resid = phi_hat.stacked() * col;
    SlsOfRobustResult out;
    out.delta_1 = resid.block(0, 0, n, n) - TransferMatrix::identity(n);
    out.delta_2 = resid.block(n, 0, m, n);
    out.delta_2_stable = out.delta_2.classify().all_stable_proper;
    try {
        const TransferMatrix W = (TransferMatrix::identity(n) + out.delta_1).inverse();
        fill_witness(out.report, W, tol::kPole);
        const TransferMatrix weight = TransferMatrix::from_blocks({
            {W, TransferMatrix::zero(n, m)},
            {-(out.delta_2 * W), TransferMatrix::identity(m)},
        });
        out.perturbed_blocks = weight * phi_hat.stacked();
        out.report.perturbed_S = out.perturbed_blocks;
    } catch (const SingularError&) {
        out.report.well_posed = false;
        out.report.stable = false;
    }
    return out;
}

RobustReport sls_of_general_robust(const SlsOutputFeedback& phi_hat, const TransferMatrix& dA,
                                   const TransferMatrix& dB, const TransferMatrix& dC,
                                   const TransferMatrix& dD, double pole_tol) {
    for (const TransferMatrix* d : {&dA, &dB, &dC, &dD})
        if (!d->classify(pole_tol).all_stable_proper)
            throw Error("sls_of_general_robust requires stable proper perturbation blocks");
    const TransferMatrix delta = TransferMatrix::from_blocks({{dA, dB}, {dC, dD}});
    const TransferMatrix eye = TransferMatrix::identity(delta.rows());
    RobustReport report;
    try {
        TransferMatrix psi = (eye - delta * phi_hat.stacked()).inverse();
        fill_witness(report, psi, pole_tol);
        report.perturbed_S = std::move(psi);
    } catch (const SingularError&) {
        report.well_posed = false;
        report.stable = false;
    }
    return report;
}

bool sls_of_norm_margin(const SlsOutputFeedback& phi_hat, double epsilon, int grid_size) {
    if (epsilon < 0.0) throw Error("sls_of_norm_margin requires epsilon >= 0");
    if (epsilon == 0.0) return phi_hat.stacked().classify().all_stable_proper;
    return phi_hat.stacked().hinf_norm(grid_size) <= 1.0 / epsilon;
}

YoulaDualReport youla_dual_check(const TransferMatrix& P, const TransferMatrix& Q,
                                 double pole_tol) {
    if (!P.classify(pole_tol).all_stable_proper || !Q.classify(pole_tol).all_stable_proper)
        throw Error("youla_dual_check requires stable proper parameters");
    YoulaDualReport out;
    const int p_rows = P.rows(), q_rows = Q.rows();
    TransferMatrix reduced_inv;
    bool have_reduced = false;
    try {
        reduced_inv = (TransferMatrix::identity(q_rows) - Q * P).inverse();
        have_reduced = true;
        fill_witness(out.reduced, reduced_inv, pole_tol);
        out.reduced.perturbed_S = reduced_inv;
    } catch (const SingularError&) {
        out.reduced.well_posed = false;
        out.reduced.stable = false;
    }
    try {
        const TransferMatrix block = TransferMatrix::from_blocks({
            {TransferMatrix::identity(p_rows), P},
            {Q, TransferMatrix::identity(q_rows)},
        });
        out.block_inverse_stable = block.inverse().classify(pole_tol).all_stable_proper;
    } catch (const SingularError&) {
        out.block_inverse_well_posed = false;
        out.block_inverse_stable = false;
    }
    if (have_reduced) {
        const TransferMatrix lhs = (TransferMatrix::identity(p_rows) - P * Q).inverse();
        const TransferMatrix rhs = TransferMatrix::identity(p_rows) + P * reduced_inv * Q;
        out.identity_residual = probe_distance(lhs, rhs);
    }
    return out;
}

}  // namespace rstab
