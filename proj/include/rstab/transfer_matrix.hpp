#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rstab/rational.hpp"

namespace rstab {

// FIR coefficient run: coefficients[tau] is the matrix weight of z^{-tau}.
struct ImpulseSequence {
    int rows = 0;
    int cols = 0;
    std::vector<Eigen::MatrixXd> coefficients;  // size horizon + 1

    int horizon() const { return static_cast<int>(coefficients.size()) - 1; }
};

struct MatrixClassification {
    bool all_proper = true;
    bool all_strictly_proper = true;
    bool all_stable_proper = true;
    // Row-major per-entry records.
    std::vector<Classification> entries;

    const Classification& entry(int i, int j, int cols) const {
        return entries[static_cast<size_t>(i * cols + j)];
    }
};

// Dense matrix of rational functions in canonical form. Immutable in use:
// all operations return new values.
class TransferMatrix {
  public:
    TransferMatrix() = default;
    TransferMatrix(int rows, int cols);
    TransferMatrix(int rows, int cols, std::vector<RationalFunction> entries);

    static TransferMatrix zero(int rows, int cols) { return TransferMatrix(rows, cols); }
    static TransferMatrix identity(int n);
    static TransferMatrix constant(const Eigen::MatrixXd& m);
    static TransferMatrix scalar(RationalFunction r);
    // Block concatenation; throws naming the offending block on dimension
    // mismatch.
    static TransferMatrix from_blocks(const std::vector<std::vector<TransferMatrix>>& blocks);
    static TransferMatrix from_fir(const ImpulseSequence& seq);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const RationalFunction& at(int i, int j) const {
        return entries_[static_cast<size_t>(i * cols_ + j)];
    }
    RationalFunction& at(int i, int j) { return entries_[static_cast<size_t>(i * cols_ + j)]; }

    TransferMatrix block(int row0, int col0, int nrows, int ncols) const;
    bool is_zero() const;

    TransferMatrix operator+(const TransferMatrix& o) const;
    TransferMatrix operator-(const TransferMatrix& o) const;
    TransferMatrix operator*(const TransferMatrix& o) const;
    TransferMatrix operator*(const RationalFunction& s) const;
    TransferMatrix operator*(double s) const;
    TransferMatrix operator-() const { return *this * -1.0; }
    TransferMatrix transpose() const;

    Eigen::MatrixXcd eval(Complex zv) const;

    // Gaussian elimination over the rational-function field. Pivots by
    // magnitude at z = 2; a column whose candidates all vanish at the
    // singularity probes means the matrix is singular over the field.
    TransferMatrix inverse() const;

    MatrixClassification classify(double pole_tol = tol::kPole) const;

    // Largest singular value over a uniform frequency grid on [0, pi],
    // refined by golden-section search around the grid argmax. Requires
    // every entry in RH-infinity.
    double hinf_norm(int grid_size = 512) const;

    // Markov coefficients out to the horizon; requires all entries proper.
    ImpulseSequence impulse(int horizon) const;

    TransferMatrix cancelled(double cancel_tol) const;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<RationalFunction> entries_;
};

TransferMatrix operator*(const RationalFunction& s, const TransferMatrix& m);
TransferMatrix operator*(double s, const TransferMatrix& m);

// max over the standard probe points of the Frobenius norm of (a - b)(z).
double probe_distance(const TransferMatrix& a, const TransferMatrix& b);
// max over probes of ||m(z) - I||_F.
double identity_residual(const TransferMatrix& m);

}  // namespace rstab
