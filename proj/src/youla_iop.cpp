#include "rstab/youla_iop.hpp"

#include <algorithm>
#include <sstream>

#include "rstab/errors.hpp"

namespace rstab {

TransferMatrix IopQuadruple::stacked() const {
    return TransferMatrix::from_blocks({{Y, W}, {U, Z}});
}

double IopQuadruple::affine_residual(const TransferMatrix& G) const {
    const int p = G.rows(), m = G.cols();
    const TransferMatrix S = stacked();
    const TransferMatrix row = TransferMatrix::from_blocks({{TransferMatrix::identity(p), -G}});
    const TransferMatrix col = TransferMatrix::from_blocks({{-G}, {TransferMatrix::identity(m)}});
    const TransferMatrix lhs1 = row * S;
    const TransferMatrix rhs1 =
        TransferMatrix::from_blocks({{TransferMatrix::identity(p), TransferMatrix::zero(p, m)}});
    const TransferMatrix lhs2 = S * col;
    const TransferMatrix rhs2 =
        TransferMatrix::from_blocks({{TransferMatrix::zero(p, m)}, {TransferMatrix::identity(m)}});
    return std::max(probe_distance(lhs1, rhs1), probe_distance(lhs2, rhs2));
}

bool IopQuadruple::all_stable_proper(double pole_tol) const {
    return Y.classify(pole_tol).all_stable_proper && U.classify(pole_tol).all_stable_proper &&
           W.classify(pole_tol).all_stable_proper && Z.classify(pole_tol).all_stable_proper;
}

TransferMatrix youla_controller(const CoprimeFactors& cf, const TransferMatrix& Q) {
    return (cf.Vr - cf.Mr * Q) * (cf.Ur - cf.Nr * Q).inverse();
}

TransferMatrix youla_parameter(const CoprimeFactors& cf, const TransferMatrix& K) {
    const TransferMatrix G = cf.plant();
    const Realization loop = plant_controller_realization(G, K);
    const StabilityReport report = check_internal(loop);
    if (!report.stable_ok) throw Error("youla_parameter requires an internally stabilizing K");
    const TransferMatrix S_ux = loop.columns_of(*report.S, "x")
                                    .block(loop.space.offset("u"), 0, loop.space.dim("u"),
                                           loop.space.dim("x"));
    return cf.Mr.inverse() * (cf.Vr - S_ux * cf.Ml.inverse());
}

IopQuadruple iop_from_controller(const TransferMatrix& G, const TransferMatrix& K) {
    if (!G.classify().all_strictly_proper)
        throw Error("iop_from_controller requires a strictly proper plant");
    const Realization loop = plant_controller_realization(G, K);
    const StabilityReport report = check_internal(loop);
    if (!report.stable_ok) {
        std::ostringstream msg;
        msg << "iop_from_controller requires internal stability; unstable entries:";
        for (const auto& [i, j] : report.unstable_entries) msg << " (" << i << "," << j << ")";
        if (!report.failure.empty()) msg << " " << report.failure;
        throw Error(msg.str());
    }
    const TransferMatrix& S = *report.S;
    const int p = G.rows(), m = G.cols();
    IopQuadruple q;
    q.Y = S.block(0, 0, p, p);
    q.W = S.block(0, p, p, m);
    q.U = S.block(p, 0, m, p);
    q.Z = S.block(p, p, m, m);
    return q;
}

TransferMatrix controller_from_iop(const IopQuadruple& q) { return q.U * q.Y.inverse(); }

IopQuadruple youla_iop_bridge(const CoprimeFactors& cf, const TransferMatrix& Q) {
    const TransferMatrix right_top = cf.Ur - cf.Nr * Q;
    const TransferMatrix right_bot = cf.Vr - cf.Mr * Q;
    IopQuadruple q;
    q.Y = right_top * cf.Ml;
    q.U = right_bot * cf.Ml;
    q.W = right_top * cf.Nl;
    q.Z = TransferMatrix::identity(cf.Mr.rows()) + right_bot * cf.Nl;
    return q;
}

}  // namespace rstab
