#include "rstab/realization.hpp"

#include <algorithm>
#include <cmath>

#include "rstab/errors.hpp"

namespace rstab {

SignalSpace::SignalSpace(std::vector<std::pair<std::string, int>> signals)
    : signals_(std::move(signals)) {
    for (const auto& [name, dim] : signals_) {
        if (dim <= 0) throw Error("signal '" + name + "' must have positive dimension");
        if (index_.count(name)) throw Error("duplicate signal name '" + name + "'");
        index_[name] = {total_dim_, dim};
        total_dim_ += dim;
    }
}

int SignalSpace::dim(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error("unknown signal '" + name + "'");
    return it->second.second;
}

int SignalSpace::offset(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error("unknown signal '" + name + "'");
    return it->second.first;
}

bool SignalSpace::has(const std::string& name) const { return index_.count(name) > 0; }

Realization::Realization(SignalSpace s, TransferMatrix r) : space(std::move(s)), R(std::move(r)) {
    if (R.rows() != space.total_dim() || R.cols() != space.total_dim())
        throw Error("realization matrix shape does not match the signal space");
}

TransferMatrix Realization::block(const std::string& row, const std::string& col) const {
    return R.block(space.offset(row), space.offset(col), space.dim(row), space.dim(col));
}

TransferMatrix Realization::columns_of(const TransferMatrix& m, const std::string& col) const {
    return m.block(0, space.offset(col), m.rows(), space.dim(col));
}

namespace {

TransferMatrix eye_minus(const TransferMatrix& R) {
    return TransferMatrix::identity(R.rows()) - R;
}

double two_sided_residual(const TransferMatrix& ImR, const TransferMatrix& S) {
    const TransferMatrix eye = TransferMatrix::identity(ImR.rows());
    return std::max(probe_distance(ImR * S, eye), probe_distance(S * ImR, eye));
}

}  // namespace

TransferMatrix stability_of(const Realization& r, double* residual_out) {
    const TransferMatrix ImR = eye_minus(r.R);
    TransferMatrix S;
    try {
        S = ImR.inverse();
    } catch (const SingularError&) {
        throw SingularError("no stability matrix exists");
    }
    if (residual_out) *residual_out = two_sided_residual(ImR, S);
    return S;
}

StabilityReport check_internal(const Realization& r, double pole_tol) {
    StabilityReport report;
    report.causal_ok = true;
    const int blocks = r.space.count();
    for (int bi = 0; bi < blocks; ++bi) {
        for (int bj = 0; bj < blocks; ++bj) {
            if (bi == bj) continue;
            const TransferMatrix blk = r.block(r.space.name(bi), r.space.name(bj));
            if (!blk.classify(pole_tol).all_proper) {
                report.causal_ok = false;
                report.improper_blocks.emplace_back(r.space.name(bi), r.space.name(bj));
            }
        }
    }

    try {
        double residual = 0.0;
        TransferMatrix S = stability_of(r, &residual);
        report.residual = residual;
        const MatrixClassification mc = S.classify(pole_tol);
        report.stable_ok = mc.all_stable_proper;
        if (!mc.all_stable_proper) {
            for (int i = 0; i < S.rows(); ++i)
                for (int j = 0; j < S.cols(); ++j)
                    if (!mc.entry(i, j, S.cols()).is_stable_proper())
                        report.unstable_entries.emplace_back(i, j);
        }
        report.S = std::move(S);
    } catch (const SingularError& e) {
        report.stable_ok = false;
        report.failure = e.what();
    }
    return report;
}

TransferMatrix dependent_column(const Realization& r,
                                const std::map<std::string, TransferMatrix>& partial_S,
                                const std::string& a) {
    if (!r.block(a, a).is_zero()) throw Error("Lemma 2 requires R_aa = O");
    const int total = r.space.total_dim();
    const int da = r.space.dim(a);
    Eigen::MatrixXd ea = Eigen::MatrixXd::Zero(total, da);
    ea.block(r.space.offset(a), 0, da, da) = Eigen::MatrixXd::Identity(da, da);
    TransferMatrix column = TransferMatrix::constant(ea);
    for (const auto& [name, dim] : r.space.signals()) {
        if (name == a) continue;
        auto it = partial_S.find(name);
        if (it == partial_S.end()) throw Error("dependent_column missing S columns for '" + name + "'");
        column = column + it->second * r.block(name, a);
    }
    return column;
}

Realization transform(const Realization& r, const TransferMatrix& T) {
    const TransferMatrix Req = TransferMatrix::identity(T.rows()) - T.inverse() * eye_minus(r.R);
    return Realization(r.space, Req);
}

EquivalenceReport equiv_check(const Realization& r1, const Realization& r2,
                              const TransferMatrix& T, double tolerance) {
    if (r1.R.rows() != r2.R.rows()) throw Error("equiv_check shape mismatch");
    EquivalenceReport rep;
    rep.realization_residual = probe_distance(eye_minus(r2.R), T.inverse() * eye_minus(r1.R));
    rep.stability_residual = probe_distance(stability_of(r2), stability_of(r1) * T);
    rep.equivalent = rep.realization_residual < tolerance && rep.stability_residual < tolerance;
    return rep;
}

TransferMatrix state_update_block(const Eigen::MatrixXd& A) {
    const int n = static_cast<int>(A.rows());
    TransferMatrix blk(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                blk.at(i, j) = RationalFunction(Polynomial({A(i, j) + 1.0, -1.0}), Polynomial::one());
            } else if (A(i, j) != 0.0) {
                blk.at(i, j) = RationalFunction::constant(A(i, j));
            }
        }
    }
    return blk;
}

Realization plant_controller_realization(const TransferMatrix& G, const TransferMatrix& K) {
    if (K.rows() != G.cols() || K.cols() != G.rows())
        throw Error("controller shape must be transposed plant shape");
    const TransferMatrix R = TransferMatrix::from_blocks({
        {TransferMatrix::zero(G.rows(), G.rows()), G},
        {K, TransferMatrix::zero(K.rows(), K.rows())},
    });
    return Realization(SignalSpace({{"x", G.rows()}, {"u", G.cols()}}), R);
}

Realization state_feedback_realization(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                       const TransferMatrix& K) {
    const int n = static_cast<int>(A.rows()), m = static_cast<int>(B.cols());
    if (A.cols() != n || B.rows() != n || K.rows() != m || K.cols() != n)
        throw Error("state feedback dimension mismatch");
    const TransferMatrix R = TransferMatrix::from_blocks({
        {state_update_block(A), TransferMatrix::constant(B)},
        {K, TransferMatrix::zero(m, m)},
    });
    return Realization(SignalSpace({{"x", n}, {"u", m}}), R);
}

Realization output_feedback_realization(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                        const Eigen::MatrixXd& C, const Eigen::MatrixXd& D,
                                        const TransferMatrix& K) {
    const int n = static_cast<int>(A.rows()), m = static_cast<int>(B.cols()),
              p = static_cast<int>(C.rows());
    if (A.cols() != n || B.rows() != n || C.cols() != n || D.rows() != p || D.cols() != m ||
        K.rows() != m || K.cols() != p)
        throw Error("output feedback dimension mismatch");
    const TransferMatrix R = TransferMatrix::from_blocks({
        {state_update_block(A), TransferMatrix::constant(B), TransferMatrix::zero(n, p)},
        {TransferMatrix::zero(m, n), TransferMatrix::zero(m, m), K},
        {TransferMatrix::constant(C), TransferMatrix::constant(D), TransferMatrix::zero(p, p)},
    });
    return Realization(SignalSpace({{"x", n}, {"u", m}, {"y", p}}), R);
}

Realization generalized_realization(const TransferMatrix& G, const TransferMatrix& P_yw,
                                    const TransferMatrix& P_zu, const TransferMatrix& P_zw,
                                    const TransferMatrix& K) {
    const int p = G.rows(), m = G.cols(), nz = P_zu.rows(), nw = P_yw.cols();
    if (P_yw.rows() != p || P_zu.cols() != m || P_zw.rows() != nz || P_zw.cols() != nw ||
        K.rows() != m || K.cols() != p)
        throw Error("generalized realization dimension mismatch");
    const TransferMatrix R = TransferMatrix::from_blocks({
        {TransferMatrix::zero(p, p), -G, TransferMatrix::zero(p, nz), -P_yw},
        {-K, TransferMatrix::zero(m, m), TransferMatrix::zero(m, nz), TransferMatrix::zero(m, nw)},
        {TransferMatrix::zero(nz, p), -P_zu, TransferMatrix::zero(nz, nz), -P_zw},
        {TransferMatrix::zero(nw, p), TransferMatrix::zero(nw, m), TransferMatrix::zero(nw, nz),
         TransferMatrix::zero(nw, nw)},
    });
    return Realization(SignalSpace({{"y", p}, {"u", m}, {"z", nz}, {"w", nw}}), R);
}

}  // namespace rstab
