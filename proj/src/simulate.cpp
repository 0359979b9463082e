#include "rstab/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "rstab/errors.hpp"
#include "rstab/state_space.hpp"

namespace rstab {

namespace {

// Matches blocks of the shape M + (1-z)I: polynomial entries, degree <= 1,
// z-coefficient -1 on the diagonal and 0 off it. Returns M when matched.
bool one_step_block(const TransferMatrix& blk, Eigen::MatrixXd* M) {
    const int n = blk.rows();
    Eigen::MatrixXd out(n, n);
    bool has_shift = false;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const RationalFunction& r = blk.at(i, j);
            if (r.den().degree() != 0) return false;
            const Polynomial& p = r.num();
            if (p.degree() > 1) return false;
            const double c1 = p.coeff(1);
            if (i == j) {
                if (std::abs(c1 + 1.0) > 1e-12) return false;
                has_shift = true;
                out(i, j) = p.coeff(0) - 1.0;
            } else {
                if (c1 != 0.0) return false;
                out(i, j) = p.coeff(0);
            }
        }
    }
    if (!has_shift) return false;
    *M = std::move(out);
    return true;
}

}  // namespace

RealizationProgram RealizationProgram::compile(const Realization& r) {
    RealizationProgram prog;
    prog.space_ = r.space;
    prog.total_ = r.space.total_dim();
    prog.is_dynamic_row_.assign(static_cast<size_t>(prog.total_), false);

    // Diagonal blocks in one-step form become dynamic rows.
    for (const auto& [name, dim] : r.space.signals()) {
        const TransferMatrix blk = r.block(name, name);
        Eigen::MatrixXd M;
        if (one_step_block(blk, &M)) {
            DynamicBlock d;
            d.offset = r.space.offset(name);
            d.dim = dim;
            d.A = std::move(M);
            for (int i = 0; i < dim; ++i)
                prog.is_dynamic_row_[static_cast<size_t>(d.offset + i)] = true;
            prog.dynamic_.push_back(std::move(d));
        }
    }

    // Every remaining entry runs as a difference equation and must be proper.
    for (int i = 0; i < prog.total_; ++i) {
        for (int j = 0; j < prog.total_; ++j) {
            const RationalFunction& rf = r.R.at(i, j);
            if (rf.is_zero()) continue;
            bool inside_dynamic = false;
            for (const DynamicBlock& d : prog.dynamic_)
                if (i >= d.offset && i < d.offset + d.dim && j >= d.offset && j < d.offset + d.dim)
                    inside_dynamic = true;
            if (inside_dynamic) continue;
            if (rf.num().degree() > rf.den().degree())
                throw IllPosedError("ill-posed diagram: improper entry outside a one-step block");
            Entry e;
            e.row = i;
            e.col = j;
            e.order = rf.den().degree();
            e.den.resize(static_cast<size_t>(e.order) + 1);
            e.num.resize(static_cast<size_t>(e.order) + 1);
            for (int k = 0; k <= e.order; ++k) {
                e.den[static_cast<size_t>(k)] = rf.den().coeff(k);
                e.num[static_cast<size_t>(k)] = rf.num().coeff(k);
            }
            e.feedthrough = e.num[static_cast<size_t>(e.order)];
            prog.entries_.push_back(std::move(e));
        }
    }

    prog.static_index_of_row_.assign(static_cast<size_t>(prog.total_), -1);
    for (int i = 0; i < prog.total_; ++i) {
        if (!prog.is_dynamic_row_[static_cast<size_t>(i)]) {
            prog.static_index_of_row_[static_cast<size_t>(i)] = static_cast<int>(prog.static_rows_.size());
            prog.static_rows_.push_back(i);
        }
    }

    // Instantaneous loop among static rows; ill-posed when singular.
    const int ns = static_cast<int>(prog.static_rows_.size());
    Eigen::MatrixXd loop = Eigen::MatrixXd::Identity(ns, ns);
    for (const Entry& e : prog.entries_) {
        const int si = prog.static_index_of_row_[static_cast<size_t>(e.row)];
        const int sj = prog.static_index_of_row_[static_cast<size_t>(e.col)];
        if (si >= 0 && sj >= 0 && e.feedthrough != 0.0) loop(si, sj) -= e.feedthrough;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> check(loop);
    if (ns > 0 && !check.isInvertible()) throw IllPosedError("ill-posed diagram");
    prog.loop_lu_ = Eigen::PartialPivLU<Eigen::MatrixXd>(loop);
    return prog;
}

SimTrace RealizationProgram::simulate(const Eigen::MatrixXd& disturbance, int steps) const {
    if (steps < 1) throw Error("simulate requires steps >= 1");
    if (disturbance.cols() != total_ || disturbance.rows() < steps)
        throw Error("disturbance shape must be at least steps x total dimension");

    SimTrace trace;
    trace.space = space_;
    trace.steps = steps;
    trace.values = Eigen::MatrixXd::Zero(steps, total_);

    // Per-run state: input/output histories per entry, pending dynamic values.
    std::vector<std::vector<double>> uhist(entries_.size());
    std::vector<std::vector<double>> yhist(entries_.size());
    for (size_t k = 0; k < entries_.size(); ++k) {
        uhist[k].assign(static_cast<size_t>(entries_[k].order), 0.0);
        yhist[k].assign(static_cast<size_t>(entries_[k].order), 0.0);
    }
    Eigen::VectorXd dyn_value = Eigen::VectorXd::Zero(total_);
    std::vector<double> past(entries_.size(), 0.0);

    const int ns = static_cast<int>(static_rows_.size());
    Eigen::VectorXd eta(total_);
    for (int t = 0; t < steps; ++t) {
        eta.setZero();
        for (const DynamicBlock& d : dynamic_)
            eta.segment(d.offset, d.dim) = dyn_value.segment(d.offset, d.dim);

        // History part of every entry output; hist[k] holds time t-1-k.
        for (size_t k = 0; k < entries_.size(); ++k) {
            const Entry& e = entries_[k];
            double acc = 0.0;
            for (int i = 0; i < e.order; ++i) {
                acc += e.num[static_cast<size_t>(i)] * uhist[k][static_cast<size_t>(e.order - 1 - i)];
                acc -= e.den[static_cast<size_t>(i)] * yhist[k][static_cast<size_t>(e.order - 1 - i)];
            }
            past[k] = acc;
        }

        if (ns > 0) {
            Eigen::VectorXd rhs(ns);
            for (int s = 0; s < ns; ++s)
                rhs(s) = disturbance(t, static_rows_[static_cast<size_t>(s)]);
            for (size_t k = 0; k < entries_.size(); ++k) {
                const Entry& e = entries_[k];
                const int si = static_index_of_row_[static_cast<size_t>(e.row)];
                if (si < 0) continue;
                rhs(si) += past[k];
                if (is_dynamic_row_[static_cast<size_t>(e.col)] && e.feedthrough != 0.0)
                    rhs(si) += e.feedthrough * eta(e.col);
            }
            const Eigen::VectorXd solved = loop_lu_.solve(rhs);
            for (int s = 0; s < ns; ++s) eta(static_rows_[static_cast<size_t>(s)]) = solved(s);
        }

        trace.values.row(t) = eta.transpose();

        // Entry outputs at time t; aggregate them for the dynamic updates.
        Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(total_);
        for (size_t k = 0; k < entries_.size(); ++k) {
            const Entry& e = entries_[k];
            const double in = eta(e.col);
            const double out = e.feedthrough * in + past[k];
            if (e.order > 0) {
                uhist[k].erase(uhist[k].begin() + (e.order - 1));
                uhist[k].insert(uhist[k].begin(), in);
                yhist[k].erase(yhist[k].begin() + (e.order - 1));
                yhist[k].insert(yhist[k].begin(), out);
            }
            row_sum(e.row) += out;
        }
        for (const DynamicBlock& d : dynamic_) {
            dyn_value.segment(d.offset, d.dim) =
                d.A * eta.segment(d.offset, d.dim) + row_sum.segment(d.offset, d.dim) +
                disturbance.row(t).segment(d.offset, d.dim).transpose();
        }
    }
    return trace;
}

RealizationProgram compile(const Realization& r) { return RealizationProgram::compile(r); }

SimTrace simulate(const RealizationProgram& p, const Eigen::MatrixXd& disturbance, int steps) {
    return p.simulate(disturbance, steps);
}

ImpulseMatchReport impulse_match(const Realization& r, int horizon, double tolerance) {
    const StabilityReport stab = check_internal(r);
    if (!stab.stable_ok) throw Error("impulse_match requires internal stability");
    const ImpulseSequence markov = stab.S->impulse(horizon);
    const RealizationProgram prog = RealizationProgram::compile(r);
    const int total = r.space.total_dim();

    ImpulseMatchReport report;
    for (int j = 0; j < total; ++j) {
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(horizon + 1, total);
        d(0, j) = 1.0;
        const SimTrace trace = prog.simulate(d, horizon + 1);
        for (int t = 0; t <= horizon; ++t) {
            const Eigen::VectorXd expect = markov.coefficients[static_cast<size_t>(t)].col(j);
            const double dev = (trace.values.row(t).transpose() - expect).cwiseAbs().maxCoeff();
            report.max_deviation = std::max(report.max_deviation, dev);
        }
    }
    report.match = report.max_deviation <= tolerance;
    return report;
}

namespace {

Realization sls_delta_realization(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                  const TransferMatrix& u_block, const TransferMatrix& dx_block,
                                  const TransferMatrix& du_block, const TransferMatrix& dd_block) {
    const int n = static_cast<int>(A.rows()), m = static_cast<int>(B.cols());
    const TransferMatrix R = TransferMatrix::from_blocks({
        {state_update_block(A), TransferMatrix::constant(B), TransferMatrix::zero(n, n)},
        {TransferMatrix::zero(m, n), TransferMatrix::zero(m, m), u_block},
        {dx_block, du_block, dd_block},
    });
    return Realization(SignalSpace({{"x", n}, {"u", m}, {"delta", n}}), R);
}

}  // namespace

Realization sls_original_realization(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                     const TransferMatrix& phi_x, const TransferMatrix& phi_u) {
    const int n = static_cast<int>(A.rows());
    const RationalFunction zf = RationalFunction::z();
    return sls_delta_realization(A, B, phi_u * zf,
                                 TransferMatrix::identity(n),
                                 TransferMatrix::zero(n, static_cast<int>(B.cols())),
                                 TransferMatrix::identity(n) - phi_x * zf);
}

Realization sls_deployment_realization(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                       const TransferMatrix& phi_u) {
    const int n = static_cast<int>(A.rows()), m = static_cast<int>(B.cols());
    // z^{-1}(zI - A) and -z^{-1} B.
    TransferMatrix dx(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            dx.at(i, j) = RationalFunction(Polynomial({-A(i, j), i == j ? 1.0 : 0.0}), Polynomial::z());
    TransferMatrix du(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (B(i, j) != 0.0)
                du.at(i, j) = RationalFunction(Polynomial::constant(-B(i, j)), Polynomial::z());
    return sls_delta_realization(A, B, phi_u * RationalFunction::z(), dx, du,
                                 TransferMatrix::zero(n, n));
}

Realization sls_separated_realization(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                      const TransferMatrix& Pc, const TransferMatrix& Mc) {
    const int n = static_cast<int>(A.rows());
    const RationalFunction zf = RationalFunction::z();
    return sls_delta_realization(A, B, Mc * zf,
                                 TransferMatrix::identity(n),
                                 TransferMatrix::zero(n, static_cast<int>(B.cols())),
                                 TransferMatrix::identity(n) - Pc * zf);
}

SeparationReport li2020_verify(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                               const TransferMatrix& phi_x, const TransferMatrix& phi_u,
                               const TransferMatrix& Pc, const TransferMatrix& Mc,
                               double tolerance) {
    const TransferMatrix row =
        TransferMatrix::from_blocks({{z_identity_minus(A), TransferMatrix::constant(-B)}});
    const TransferMatrix pair = TransferMatrix::from_blocks({{Pc}, {Mc}});
    const TransferMatrix phis = TransferMatrix::from_blocks({{phi_x}, {phi_u}});
    SeparationReport report;
    report.residual = probe_distance(phis * (row * pair), pair);
    report.ok = report.residual < tolerance;
    const TransferMatrix delta_c = row * pair;
    try {
        const TransferMatrix s_dx = delta_c.inverse() * RationalFunction::delay(1);
        const MatrixClassification c = s_dx.classify();
        report.s_dx_strictly_proper_stable = c.all_strictly_proper && c.all_stable_proper;
    } catch (const SingularError&) {
        report.s_dx_strictly_proper_stable = false;
    }
    return report;
}

}  // namespace rstab
