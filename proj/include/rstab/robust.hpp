#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "rstab/realization.hpp"
#include "rstab/sls.hpp"
#include "rstab/youla_iop.hpp"

namespace rstab {

// Additive realization perturbation with named non-zero blocks; entries
// outside the declared blocks are identically zero by construction.
class Perturbation {
  public:
    using BlockKey = std::pair<std::string, std::string>;

    Perturbation(SignalSpace space, std::map<BlockKey, TransferMatrix> blocks);

    const SignalSpace& space() const { return space_; }
    const std::map<BlockKey, TransferMatrix>& blocks() const { return blocks_; }
    // Full-size delta matrix.
    const TransferMatrix& assemble() const { return delta_; }
    bool all_blocks_stable_proper(double pole_tol = tol::kPole) const;

    // Dummy-signal split: each declared block gets its own slot row/column,
    // so the split form carries at most one block per slot row and per slot
    // column (the block-diagonalizable structure used by mu-style analysis).
    struct Slot {
        std::string row, col;
        int slot_row = 0, slot_col = 0;
    };
    std::vector<Slot> split_slots() const;

  private:
    SignalSpace space_;
    std::map<BlockKey, TransferMatrix> blocks_;
    TransferMatrix delta_;
};

struct RobustReport {
    std::optional<TransferMatrix> perturbed_S;
    bool stable = false;
    bool well_posed = true;
    std::vector<std::pair<int, int>> witness_entries;
    std::vector<Complex> witness_poles;
    std::optional<double> margin;
};

// S(Delta) = S_hat (I - Delta S_hat)^{-1} = (I - S_hat Delta)^{-1} S_hat.
// Both forms are computed and must agree; residual_out receives their probe
// distance, maximized with the direct-path distance when R_hat is supplied
// (cross-check mode). Throws SingularError when I - Delta S_hat has no
// inverse.
TransferMatrix perturbed_stability(const TransferMatrix& S_hat, const Perturbation& delta,
                                   const TransferMatrix* R_hat = nullptr,
                                   double* residual_out = nullptr);

// Single-Delta verdict; well-posedness failures are reported, not thrown.
RobustReport robust_check(const TransferMatrix& S_hat, const Perturbation& delta,
                          double pole_tol = tol::kPole);

// 1 / ||M||_inf: every Delta with smaller norm leaves (I - Delta M)^{-1}
// stable by small gain.
double small_gain_margin(const TransferMatrix& M, int grid_size = 512);

// Margin against a perturbation entering R at block (a, b): the loop gain
// seen by the perturbation is S_ba.
double block_margin(const Realization& nominal, const std::string& a, const std::string& b,
                    int grid_size = 512);

// ||U||_inf <= 1/epsilon: membership in the robustly stabilizing set against
// plant perturbations of norm below epsilon.
bool robust_iop_margin(const IopQuadruple& quad, double epsilon, int grid_size = 512);

// Nominal IOP controller against a given stable plant perturbation:
// stabilizes the perturbed loop iff (I - Delta_G U)^{-1} is stable proper.
RobustReport iop_nominal_robust_check(const IopQuadruple& quad, const TransferMatrix& delta_G,
                                      double pole_tol = tol::kPole);

// Perturbed state-feedback response pair: Delta = [zI-A, -B][phi; ] - I,
// verdict on (I + Delta)^{-1}, achieved responses [phi_x; phi_u](I+Delta)^{-1}.
struct SlsSfRobustResult {
    RobustReport report;
    TransferMatrix delta;
    TransferMatrix response_x, response_u;
    std::optional<bool> direct_verdict;  // cross-check against the assembled loop
};

SlsSfRobustResult sls_sf_robust_check(const SlsStateFeedback& phi_hat, const Eigen::MatrixXd& A,
                                      const Eigen::MatrixXd& B, bool cross_check = false);

// Output-feedback blocks satisfying the first affine identity exactly; the
// residual of the second defines (Delta_1, Delta_2). Verdict on
// (I + Delta_1)^{-1}; the perturbed blocks follow the explicit weighting
// formula; Delta_2 stays stable proper.
struct SlsOfRobustResult {
    RobustReport report;
    TransferMatrix delta_1, delta_2;
    TransferMatrix perturbed_blocks;  // 2x2 stacked
    bool delta_2_stable = false;
};

SlsOfRobustResult sls_of_robust_check(const SlsOutputFeedback& phi_hat,
                                      const StateSpacePlant& plant);

// General structured (A, B, C, D) perturbation of the output-feedback plant:
// stable iff Psi = (I - [[dA, dB],[dC, dD]] Phi-block)^{-1} is stable proper.
RobustReport sls_of_general_robust(const SlsOutputFeedback& phi_hat, const TransferMatrix& dA,
                                   const TransferMatrix& dB, const TransferMatrix& dC,
                                   const TransferMatrix& dD, double pole_tol = tol::kPole);

// ||[[phi_xx, phi_xy],[phi_ux, phi_uy]]||_inf <= 1/epsilon.
bool sls_of_norm_margin(const SlsOutputFeedback& phi_hat, double epsilon, int grid_size = 512);

// Primal-dual parameters: the reduced sufficient condition tests
// (I - Q P)^{-1}; the full block inverse [[I, P],[Q, I]]^{-1} is computed
// alongside, plus the internal-consistency identity
// (I - P Q)^{-1} = I + P (I - Q P)^{-1} Q.
struct YoulaDualReport {
    RobustReport reduced;  // verdict on (I - Q P)^{-1}
    bool block_inverse_stable = false;
    bool block_inverse_well_posed = true;
    double identity_residual = 0.0;
};

YoulaDualReport youla_dual_check(const TransferMatrix& P, const TransferMatrix& Q,
                                 double pole_tol = tol::kPole);

}  // namespace rstab
