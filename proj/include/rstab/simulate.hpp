#pragma once

#include <map>
#include <string>
#include <vector>

#include "rstab/realization.hpp"

namespace rstab {

struct SimTrace {
    SignalSpace space;
    int steps = 0;
    Eigen::MatrixXd values;  // steps x total_dim, signals in space order

    Eigen::MatrixXd signal(const std::string& name) const {
        return values.block(0, space.offset(name), steps, space.dim(name));
    }
};

// Executable form of a realization: each rational entry compiled to a
// difference equation, diagonal blocks of the one-step form A + (1-z)I
// rewritten to the update x[t+1] = A x[t] + ..., and the instantaneous
// feedthrough loop factorized once. Immutable and shareable; per-run state
// is private to each simulate call.
class RealizationProgram {
  public:
    static RealizationProgram compile(const Realization& r);

    const SignalSpace& space() const { return space_; }

    // Unrolls eta = R eta + d from zero initial state; d is steps x total_dim
    // (extra rows ignored, missing rows are an error).
    SimTrace simulate(const Eigen::MatrixXd& disturbance, int steps) const;

  private:
    struct Entry {
        int row = 0;
        int col = 0;
        int order = 0;                // denominator degree
        std::vector<double> num;      // ascending, padded to order + 1
        std::vector<double> den;      // ascending, monic
        double feedthrough = 0.0;     // num[order]
    };

    struct DynamicBlock {
        int offset = 0;
        int dim = 0;
        Eigen::MatrixXd A;
    };

    SignalSpace space_;
    int total_ = 0;
    std::vector<Entry> entries_;
    std::vector<DynamicBlock> dynamic_;
    std::vector<bool> is_dynamic_row_;
    std::vector<int> static_rows_;           // global row -> listed order
    std::vector<int> static_index_of_row_;   // global row -> static index or -1
    Eigen::PartialPivLU<Eigen::MatrixXd> loop_lu_;  // I - D_ss factorized
};

RealizationProgram compile(const Realization& r);
SimTrace simulate(const RealizationProgram& p, const Eigen::MatrixXd& disturbance, int steps);

struct ImpulseMatchReport {
    bool match = false;
    double max_deviation = 0.0;
};

// Simulated unit-impulse responses per disturbance channel against the
// Markov coefficients of the stability matrix. Requires internal stability.
ImpulseMatchReport impulse_match(const Realization& r, int horizon, double tolerance);

// --- SLS controller realizations ---

// Dual-convolution form: blocks z phi_u and I - z phi_x around the plant,
// signals (x, u, delta).
Realization sls_original_realization(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                     const TransferMatrix& phi_x, const TransferMatrix& phi_u);

// Single-convolution deployment form: delta reconstructs the disturbance by
// delta[t] = x[t] - A x[t-1] - B u[t-1]; needs Schur-stable A.
Realization sls_deployment_realization(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                       const TransferMatrix& phi_u);

// Separated closed-loop design: blocks z Mc and I - z Pc in place of the
// response pair.
Realization sls_separated_realization(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                      const TransferMatrix& Pc, const TransferMatrix& Mc);

struct SeparationReport {
    bool ok = false;
    double residual = 0.0;            // fixed-point identity at probes
    bool s_dx_strictly_proper_stable = false;  // certifies S stable without simulation
};

// Fixed-point check [phi_x; phi_u][zI-A, -B][Pc; Mc] = [Pc; Mc] plus the
// S_dx membership shortcut.
SeparationReport li2020_verify(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                               const TransferMatrix& phi_x, const TransferMatrix& phi_u,
                               const TransferMatrix& Pc, const TransferMatrix& Mc,
                               double tolerance = 1e-9);

}  // namespace rstab
