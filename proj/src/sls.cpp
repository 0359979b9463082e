#include "rstab/sls.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rstab/errors.hpp"

namespace rstab {

namespace {

TransferMatrix zia_row(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    return TransferMatrix::from_blocks({{z_identity_minus(A), TransferMatrix::constant(-B)}});
}

TransferMatrix zia_col(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C) {
    return TransferMatrix::from_blocks({{z_identity_minus(A)}, {TransferMatrix::constant(-C)}});
}

bool strictly_proper_stable(const TransferMatrix& m, double pole_tol) {
    const MatrixClassification c = m.classify(pole_tol);
    return c.all_strictly_proper && c.all_stable_proper;
}

StabilityReport require_internal(const Realization& r, const char* who) {
    StabilityReport report = check_internal(r);
    if (!report.stable_ok) {
        std::ostringstream msg;
        msg << who << " requires internal stability";
        if (!report.failure.empty()) msg << " (" << report.failure << ")";
        throw Error(msg.str());
    }
    return report;
}

}  // namespace

double SlsStateFeedback::affine_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) const {
    const int n = static_cast<int>(A.rows());
    return probe_distance(zia_row(A, B) * stacked(), TransferMatrix::identity(n));
}

bool SlsStateFeedback::memberships_ok(double pole_tol) const {
    return strictly_proper_stable(phi_x, pole_tol) && strictly_proper_stable(phi_u, pole_tol);
}

SlsStateFeedback sls_sf_synthesize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int horizon) {
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(B.cols());
    if (horizon < 1) throw Error("sls_sf_synthesize requires horizon >= 1");
    const int T = horizon;

    std::vector<Eigen::MatrixXd> Apow(static_cast<size_t>(T) + 1);
    Apow[0] = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= T; ++k) Apow[static_cast<size_t>(k)] = A * Apow[static_cast<size_t>(k - 1)];

    // x_{tau+1} = A^tau + sum_{s<=tau} A^{tau-s} B u_s; stack taps 2..T.
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero((T - 1) * n, T * m);
    for (int tau = 1; tau <= T - 1; ++tau)
        for (int s = 1; s <= tau; ++s)
            M.block((tau - 1) * n, (s - 1) * m, n, m) = Apow[static_cast<size_t>(tau - s)] * B;
    Eigen::MatrixXd Cterm = Eigen::MatrixXd::Zero(n, T * m);
    for (int s = 1; s <= T; ++s)
        Cterm.block(0, (s - 1) * m, n, m) = Apow[static_cast<size_t>(T - s)] * B;

    // Reachability of the deadbeat terminal condition at this horizon.
    const Eigen::MatrixXd b_all = -Apow[static_cast<size_t>(T)];
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Cterm);
    for (int j = 0; j < n; ++j) {
        const Eigen::VectorXd bj = b_all.col(j);
        const double resid = (Cterm * cod.solve(bj) - bj).norm();
        if (resid > 1e-9 * std::max(1.0, bj.norm())) {
            std::ostringstream msg;
            msg << "terminal constraint infeasible at horizon " << T
                << " (residual " << resid << "); try a larger horizon";
            throw InfeasibleError(msg.str());
        }
    }

    // min sum ||x_tau||^2 + ||u_tau||^2  s.t.  Cterm u = b, with x = X0 + M u.
    const Eigen::MatrixXd H =
        Eigen::MatrixXd::Identity(T * m, T * m) + M.transpose() * M;
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(T * m + n, T * m + n);
    kkt.topLeftCorner(T * m, T * m) = H;
    kkt.topRightCorner(T * m, n) = Cterm.transpose();
    kkt.bottomLeftCorner(n, T * m) = Cterm;
    Eigen::FullPivLU<Eigen::MatrixXd> kkt_lu(kkt);

    std::vector<Eigen::MatrixXd> phi_u_taps(static_cast<size_t>(T), Eigen::MatrixXd::Zero(m, n));
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXd x0 = Eigen::VectorXd::Zero((T - 1) * n);
        for (int tau = 1; tau <= T - 1; ++tau)
            x0.segment((tau - 1) * n, n) = Apow[static_cast<size_t>(tau)].col(j);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(T * m + n);
        rhs.head(T * m) = -M.transpose() * x0;
        rhs.tail(n) = b_all.col(j);
        const Eigen::VectorXd sol = kkt_lu.solve(rhs);
        for (int tau = 1; tau <= T; ++tau)
            phi_u_taps[static_cast<size_t>(tau - 1)].col(j) = sol.segment((tau - 1) * m, m);
    }

    ImpulseSequence phix_seq, phiu_seq;
    phix_seq.rows = n;
    phix_seq.cols = n;
    phiu_seq.rows = m;
    phiu_seq.cols = n;
    phix_seq.coefficients.assign(static_cast<size_t>(T) + 1, Eigen::MatrixXd::Zero(n, n));
    phiu_seq.coefficients.assign(static_cast<size_t>(T) + 1, Eigen::MatrixXd::Zero(m, n));
    phix_seq.coefficients[1] = Eigen::MatrixXd::Identity(n, n);
    for (int tau = 1; tau <= T; ++tau) {
        phiu_seq.coefficients[static_cast<size_t>(tau)] = phi_u_taps[static_cast<size_t>(tau - 1)];
        if (tau < T)
            phix_seq.coefficients[static_cast<size_t>(tau + 1)] =
                A * phix_seq.coefficients[static_cast<size_t>(tau)] +
                B * phiu_seq.coefficients[static_cast<size_t>(tau)];
    }
    const Eigen::MatrixXd terminal =
        A * phix_seq.coefficients[static_cast<size_t>(T)] + B * phi_u_taps[static_cast<size_t>(T - 1)];
    if (terminal.cwiseAbs().maxCoeff() > 1e-8)
        throw Error("sls_sf_synthesize terminal tap failed to close");

    SlsStateFeedback out;
    out.phi_x = TransferMatrix::from_fir(phix_seq);
    out.phi_u = TransferMatrix::from_fir(phiu_seq);
    out.horizon = T;
    return out;
}

TransferMatrix sls_sf_controller(const SlsStateFeedback& p) {
    return p.phi_u * p.phi_x.inverse();
}

double SlsOutputFeedback::affine_residual_1(const Eigen::MatrixXd& A,
                                            const Eigen::MatrixXd& B) const {
    const int n = static_cast<int>(A.rows());
    const int p = phi_xy.cols();
    const TransferMatrix rhs = TransferMatrix::from_blocks(
        {{TransferMatrix::identity(n), TransferMatrix::zero(n, p)}});
    return probe_distance(zia_row(A, B) * stacked(), rhs);
}

double SlsOutputFeedback::affine_residual_2(const Eigen::MatrixXd& A,
                                            const Eigen::MatrixXd& C) const {
    const int n = static_cast<int>(A.rows());
    const int m = phi_ux.rows();
    const TransferMatrix rhs = TransferMatrix::from_blocks(
        {{TransferMatrix::identity(n)}, {TransferMatrix::zero(m, n)}});
    return probe_distance(stacked() * zia_col(A, C), rhs);
}

bool SlsOutputFeedback::memberships_ok(double pole_tol) const {
    return strictly_proper_stable(phi_xx, pole_tol) && strictly_proper_stable(phi_ux, pole_tol) &&
           strictly_proper_stable(phi_xy, pole_tol) &&
           phi_uy.classify(pole_tol).all_stable_proper;
}

SlsOutputFeedback sls_of_from_controller(const StateSpacePlant& plant, const TransferMatrix& K) {
    const Realization loop = output_feedback_realization(plant.A, plant.B, plant.C, plant.D, K);
    const StabilityReport report = require_internal(loop, "sls_of_from_controller");
    const TransferMatrix& S = *report.S;
    const auto blk = [&](const char* r, const char* c) {
        return S.block(loop.space.offset(r), loop.space.offset(c), loop.space.dim(r),
                       loop.space.dim(c));
    };
    SlsOutputFeedback out;
    out.phi_xx = blk("x", "x");
    out.phi_ux = blk("u", "x");
    out.phi_xy = blk("x", "y");
    out.phi_uy = blk("u", "y");
    return out;
}

TransferMatrix sls_of_controller(const SlsOutputFeedback& p, const Eigen::MatrixXd& D) {
    const TransferMatrix K0 = p.phi_uy - p.phi_ux * p.phi_xx.inverse() * p.phi_xy;
    if (D.size() == 0 || D.cwiseAbs().maxCoeff() == 0.0) return K0;
    const TransferMatrix eye = TransferMatrix::identity(K0.rows());
    return K0 * (TransferMatrix::identity(K0.cols()) + TransferMatrix::constant(D) * K0).inverse();
}

MixedExtraction mixed_extract(const StateSpacePlant& plant, const TransferMatrix& K,
                              MixedFlavor flavor) {
    const Realization loop = output_feedback_realization(plant.A, plant.B, plant.C, plant.D, K);
    const StabilityReport report = require_internal(loop, "mixed_extract");
    const TransferMatrix& S = *report.S;
    const auto blk = [&](const char* r, const char* c) {
        return S.block(loop.space.offset(r), loop.space.offset(c), loop.space.dim(r),
                       loop.space.dim(c));
    };
    const int n = plant.n(), m = plant.m(), p = plant.p();
    const TransferMatrix G = plant.transfer_function();
    const TransferMatrix res = resolvent(plant.A);

    MixedExtraction out;
    out.flavor = flavor;
    if (flavor == MixedFlavor::kCor6) {
        out.top_left = blk("y", "x");
        out.top_right = blk("y", "y");
        out.bottom_left = blk("u", "x");
        out.bottom_right = blk("u", "y");
        const TransferMatrix stack = out.stacked();
        const TransferMatrix row = TransferMatrix::from_blocks({{TransferMatrix::identity(p), -G}});
        const TransferMatrix rhs1 = TransferMatrix::from_blocks(
            {{TransferMatrix::constant(plant.C) * res, TransferMatrix::identity(p)}});
        out.residual_1 = probe_distance(row * stack, rhs1);
        out.residual_2 =
            probe_distance(stack * zia_col(plant.A, plant.C), TransferMatrix::zero(p + m, n));
        out.recovered_K = out.bottom_right * out.top_right.inverse();
    } else {
        out.top_left = blk("x", "y");
        out.top_right = blk("x", "u");
        out.bottom_left = blk("u", "y");
        out.bottom_right = blk("u", "u");
        const TransferMatrix stack = out.stacked();
        out.residual_1 =
            probe_distance(zia_row(plant.A, plant.B) * stack, TransferMatrix::zero(n, p + m));
        const TransferMatrix col =
            TransferMatrix::from_blocks({{-G}, {TransferMatrix::identity(m)}});
        const TransferMatrix rhs2 = TransferMatrix::from_blocks(
            {{res * TransferMatrix::constant(plant.B)}, {TransferMatrix::identity(m)}});
        out.residual_2 = probe_distance(stack * col, rhs2);
        out.recovered_K = out.bottom_right.inverse() * out.bottom_left;
    }
    out.recovery_residual = probe_distance(out.recovered_K, K);
    return out;
}

GslsExtraction gsls_extract(const Realization& r) {
    for (const char* s : {"y", "u", "z", "w"})
        if (!r.space.has(s)) throw Error("gsls_extract expects signals (y, u, z, w)");
    const TransferMatrix G = -r.block("y", "u");
    const TransferMatrix P_yw = -r.block("y", "w");
    const TransferMatrix P_zu = -r.block("z", "u");
    const TransferMatrix P_zw = -r.block("z", "w");
    if (!G.classify().all_strictly_proper)
        throw Error("gsls_extract requires a strictly proper plant");
    const StabilityReport report = require_internal(r, "gsls_extract");
    const TransferMatrix& S = *report.S;

    const int p = r.space.dim("y"), m = r.space.dim("u"), nz = r.space.dim("z"),
              nw = r.space.dim("w");
    const int oy = r.space.offset("y"), ou = r.space.offset("u"), oz = r.space.offset("z"),
              ow = r.space.offset("w");
    const int total = r.space.total_dim();

    // The z-column of S must be e_z and the w-row must be e_w.
    Eigen::MatrixXd ez = Eigen::MatrixXd::Zero(total, nz);
    ez.block(oz, 0, nz, nz) = Eigen::MatrixXd::Identity(nz, nz);
    Eigen::MatrixXd ew = Eigen::MatrixXd::Zero(nw, total);
    ew.block(0, ow, nw, nw) = Eigen::MatrixXd::Identity(nw, nw);
    GslsExtraction out;
    out.structure_residual =
        std::max(probe_distance(S.block(0, oz, total, nz), TransferMatrix::constant(ez)),
                 probe_distance(S.block(ow, 0, nw, total), TransferMatrix::constant(ew)));

    // Psi: rows (y, u, z) by columns (y, u, w).
    out.psi = TransferMatrix::from_blocks({
        {S.block(oy, oy, p, p), S.block(oy, ou, p, m), S.block(oy, ow, p, nw)},
        {S.block(ou, oy, m, p), S.block(ou, ou, m, m), S.block(ou, ow, m, nw)},
        {S.block(oz, oy, nz, p), S.block(oz, ou, nz, m), S.block(oz, ow, nz, nw)},
    });

    // [Psi | e_3] with column order (y, u, w, z-slot), times the plant data.
    const TransferMatrix e3 = TransferMatrix::from_blocks(
        {{TransferMatrix::zero(p, nz)}, {TransferMatrix::zero(m, nz)}, {TransferMatrix::identity(nz)}});
    const TransferMatrix psi_aug = TransferMatrix::from_blocks({{out.psi, e3}});
    const TransferMatrix m1 = TransferMatrix::from_blocks({
        {G, P_yw},
        {TransferMatrix::identity(m), TransferMatrix::zero(m, nw)},
        {TransferMatrix::zero(nw, m), TransferMatrix::identity(nw)},
        {P_zu, P_zw},
    });
    const TransferMatrix rhs1 = TransferMatrix::from_blocks({
        {TransferMatrix::zero(p, m), TransferMatrix::zero(p, nw)},
        {TransferMatrix::identity(m), TransferMatrix::zero(m, nw)},
        {TransferMatrix::zero(nz, m), TransferMatrix::zero(nz, nw)},
    });
    out.residual_1 = probe_distance(psi_aug * m1, rhs1);

    const TransferMatrix l2 = TransferMatrix::from_blocks({
        {TransferMatrix::identity(p), G, TransferMatrix::zero(p, nz), P_yw},
        {TransferMatrix::zero(nz, p), P_zu, TransferMatrix::identity(nz), P_zw},
    });
    const TransferMatrix bottom = TransferMatrix::from_blocks(
        {{TransferMatrix::zero(nw, p), TransferMatrix::zero(nw, m), TransferMatrix::identity(nw)}});
    const TransferMatrix psi_tall = TransferMatrix::from_blocks({{out.psi}, {bottom}});
    const TransferMatrix rhs2 = TransferMatrix::from_blocks({
        {TransferMatrix::identity(p), TransferMatrix::zero(p, m), TransferMatrix::zero(p, nw)},
        {TransferMatrix::zero(nz, p), TransferMatrix::zero(nz, m), TransferMatrix::zero(nz, nw)},
    });
    out.residual_2 = probe_distance(l2 * psi_tall, rhs2);

    const TransferMatrix psi_yy = out.psi.block(0, 0, p, p);
    const TransferMatrix psi_uy = out.psi.block(p, 0, m, p);
    out.recovered_K = -(psi_uy * psi_yy.inverse());
    out.recovery_residual = probe_distance(out.recovered_K, -r.block("u", "y"));
    return out;
}

}  // namespace rstab
