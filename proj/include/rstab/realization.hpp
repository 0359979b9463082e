#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rstab/transfer_matrix.hpp"

namespace rstab {

// Ordered, named signal blocks; block addressing is by name so corollary-level
// code never relies on raw index arithmetic.
class SignalSpace {
  public:
    SignalSpace() = default;
    explicit SignalSpace(std::vector<std::pair<std::string, int>> signals);

    int total_dim() const { return total_dim_; }
    int count() const { return static_cast<int>(signals_.size()); }
    const std::string& name(int i) const { return signals_[static_cast<size_t>(i)].first; }
    int dim(const std::string& name) const;
    int offset(const std::string& name) const;
    bool has(const std::string& name) const;
    const std::vector<std::pair<std::string, int>>& signals() const { return signals_; }

    bool operator==(const SignalSpace& o) const { return signals_ == o.signals_; }

  private:
    std::vector<std::pair<std::string, int>> signals_;
    std::map<std::string, std::pair<int, int>> index_;  // name -> (offset, dim)
    int total_dim_ = 0;
};

// A named signal space together with its realization matrix: eta = R eta + d.
struct Realization {
    SignalSpace space;
    TransferMatrix R;

    Realization(SignalSpace s, TransferMatrix r);

    TransferMatrix block(const std::string& row, const std::string& col) const;
    // Column block of an arbitrary total-height matrix, addressed by signal.
    TransferMatrix columns_of(const TransferMatrix& m, const std::string& col) const;
};

struct StabilityReport {
    bool causal_ok = false;
    std::vector<std::pair<std::string, std::string>> improper_blocks;
    std::optional<TransferMatrix> S;
    bool stable_ok = false;
    std::vector<std::pair<int, int>> unstable_entries;
    double residual = 0.0;  // max probe residual of (I-R)S - I and S(I-R) - I
    std::string failure;    // set when no stability matrix exists
};

// S with (I-R)S = S(I-R) = I. Throws SingularError when I-R has no inverse
// over the rational field. residual_out, when given, receives the two-sided
// probe residual.
TransferMatrix stability_of(const Realization& r, double* residual_out = nullptr);

// Causality of every off-diagonal block plus RH-infinity membership of S.
// Diagonal blocks are exempt from the properness requirement.
StabilityReport check_internal(const Realization& r, double pole_tol = tol::kPole);

// Column dependency shortcut: with R_aa = O, the a-columns of S follow from
// the others as e_a + sum_{b != a} S_{:,b} R_{ba}.
TransferMatrix dependent_column(const Realization& r,
                                const std::map<std::string, TransferMatrix>& partial_S,
                                const std::string& a);

// Equivalent system under the disturbance transformation d = T w:
// I - R_eq = T^{-1} (I - R), and stability_of(result) = stability_of(r) * T.
Realization transform(const Realization& r, const TransferMatrix& T);

struct EquivalenceReport {
    bool equivalent = false;
    double realization_residual = 0.0;  // (I-R2) - T^{-1}(I-R1) at probes
    double stability_residual = 0.0;    // S2 - S1 T at probes
};

EquivalenceReport equiv_check(const Realization& r1, const Realization& r2,
                              const TransferMatrix& T, double tolerance = 1e-7);

// --- Builders with the block layouts fixed by the corresponding figures ---

// Plant/controller loop: R = [[0, G], [K, 0]], signals (x, u).
Realization plant_controller_realization(const TransferMatrix& G, const TransferMatrix& K);

// State feedback: R = [[A + (1-z)I, B], [K, 0]], signals (x, u).
Realization state_feedback_realization(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                       const TransferMatrix& K);

// Output feedback: R = [[A + (1-z)I, B, 0], [0, 0, K], [C, D, 0]],
// signals (x, u, y).
Realization output_feedback_realization(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                        const Eigen::MatrixXd& C, const Eigen::MatrixXd& D,
                                        const TransferMatrix& K);

// Generalized loop with output z and disturbance w; plant and controller
// enter negated. Signals (y, u, z, w).
Realization generalized_realization(const TransferMatrix& G, const TransferMatrix& P_yw,
                                    const TransferMatrix& P_zu, const TransferMatrix& P_zw,
                                    const TransferMatrix& K);

// A + (1-z)I as a transfer-matrix block.
TransferMatrix state_update_block(const Eigen::MatrixXd& A);

}  // namespace rstab
