#include "rstab/transfer_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rstab/errors.hpp"

namespace rstab {

TransferMatrix::TransferMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), entries_(static_cast<size_t>(rows) * static_cast<size_t>(cols)) {}

TransferMatrix::TransferMatrix(int rows, int cols, std::vector<RationalFunction> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != static_cast<size_t>(rows_) * static_cast<size_t>(cols_))
        throw Error("transfer matrix entry count does not match its shape");
}

TransferMatrix TransferMatrix::identity(int n) {
    TransferMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = RationalFunction::one();
    return m;
}

TransferMatrix TransferMatrix::constant(const Eigen::MatrixXd& src) {
    TransferMatrix m(static_cast<int>(src.rows()), static_cast<int>(src.cols()));
    for (int i = 0; i < m.rows_; ++i)
        for (int j = 0; j < m.cols_; ++j)
            if (src(i, j) != 0.0) m.at(i, j) = RationalFunction::constant(src(i, j));
    return m;
}

TransferMatrix TransferMatrix::scalar(RationalFunction r) {
    TransferMatrix m(1, 1);
    m.at(0, 0) = std::move(r);
    return m;
}

TransferMatrix TransferMatrix::from_blocks(const std::vector<std::vector<TransferMatrix>>& blocks) {
    if (blocks.empty() || blocks.front().empty()) throw Error("empty block grid");
    const size_t bcols = blocks.front().size();
    std::vector<int> row_heights(blocks.size(), 0);
    std::vector<int> col_widths(bcols, 0);
    for (size_t bi = 0; bi < blocks.size(); ++bi) {
        if (blocks[bi].size() != bcols) throw Error("ragged block grid");
        for (size_t bj = 0; bj < bcols; ++bj) {
            const TransferMatrix& b = blocks[bi][bj];
            if (row_heights[bi] == 0) row_heights[bi] = b.rows();
            if (col_widths[bj] == 0) col_widths[bj] = b.cols();
            if (b.rows() != row_heights[bi] || b.cols() != col_widths[bj]) {
                std::ostringstream msg;
                msg << "block (" << bi << "," << bj << ") is " << b.rows() << "x" << b.cols()
                    << ", expected " << row_heights[bi] << "x" << col_widths[bj];
                throw Error(msg.str());
            }
        }
    }
    int total_rows = 0, total_cols = 0;
    for (int h : row_heights) total_rows += h;
    for (int w : col_widths) total_cols += w;
    TransferMatrix out(total_rows, total_cols);
    int r0 = 0;
    for (size_t bi = 0; bi < blocks.size(); ++bi) {
        int c0 = 0;
        for (size_t bj = 0; bj < bcols; ++bj) {
            const TransferMatrix& b = blocks[bi][bj];
            for (int i = 0; i < b.rows(); ++i)
                for (int j = 0; j < b.cols(); ++j) out.at(r0 + i, c0 + j) = b.at(i, j);
            c0 += col_widths[bj];
        }
        r0 += row_heights[bi];
    }
    return out;
}

TransferMatrix TransferMatrix::from_fir(const ImpulseSequence& seq) {
    const int horizon = seq.horizon();
    TransferMatrix out(seq.rows, seq.cols);
    const Polynomial den = Polynomial::monomial(horizon);
    for (int i = 0; i < seq.rows; ++i) {
        for (int j = 0; j < seq.cols; ++j) {
            std::vector<double> num(static_cast<size_t>(horizon) + 1, 0.0);
            for (int tau = 0; tau <= horizon; ++tau)
                num[static_cast<size_t>(horizon - tau)] = seq.coefficients[static_cast<size_t>(tau)](i, j);
            out.at(i, j) = RationalFunction(Polynomial(std::move(num)), den);
        }
    }
    return out;
}

TransferMatrix TransferMatrix::block(int row0, int col0, int nrows, int ncols) const {
    TransferMatrix out(nrows, ncols);
    for (int i = 0; i < nrows; ++i)
        for (int j = 0; j < ncols; ++j) out.at(i, j) = at(row0 + i, col0 + j);
    return out;
}

bool TransferMatrix::is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const RationalFunction& r) { return r.is_zero(); });
}

TransferMatrix TransferMatrix::operator+(const TransferMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("transfer matrix addition shape mismatch");
    TransferMatrix out(rows_, cols_);
    for (size_t k = 0; k < entries_.size(); ++k) out.entries_[k] = entries_[k] + o.entries_[k];
    return out;
}

TransferMatrix TransferMatrix::operator-(const TransferMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("transfer matrix subtraction shape mismatch");
    TransferMatrix out(rows_, cols_);
    for (size_t k = 0; k < entries_.size(); ++k) out.entries_[k] = entries_[k] - o.entries_[k];
    return out;
}

TransferMatrix TransferMatrix::operator*(const TransferMatrix& o) const {
    if (cols_ != o.rows_) throw Error("transfer matrix product inner dimension mismatch");
    TransferMatrix out(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < o.cols_; ++j) {
            RationalFunction acc;
            for (int k = 0; k < cols_; ++k) acc = acc + at(i, k) * o.at(k, j);
            out.at(i, j) = std::move(acc);
        }
    }
    return out;
}

TransferMatrix TransferMatrix::operator*(const RationalFunction& s) const {
    TransferMatrix out(rows_, cols_);
    for (size_t k = 0; k < entries_.size(); ++k) out.entries_[k] = entries_[k] * s;
    return out;
}

TransferMatrix TransferMatrix::operator*(double s) const {
    TransferMatrix out(rows_, cols_);
    for (size_t k = 0; k < entries_.size(); ++k) out.entries_[k] = entries_[k] * s;
    return out;
}

TransferMatrix TransferMatrix::transpose() const {
    TransferMatrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out.at(j, i) = at(i, j);
    return out;
}

Eigen::MatrixXcd TransferMatrix::eval(Complex zv) const {
    Eigen::MatrixXcd m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m(i, j) = at(i, j).eval(zv);
    return m;
}

namespace {

// Scale-free magnitude of a polynomial at z: |p(z)| relative to the sum of
// its term magnitudes. Near zero only when z is numerically a root.
double normalized_magnitude(const Polynomial& p, Complex zv) {
    if (p.is_zero()) return 0.0;
    const double az = std::abs(zv);
    double scale = 0.0, power = 1.0;
    for (double c : p.coeffs()) {
        scale += std::abs(c) * power;
        power *= az;
    }
    return std::abs(p.eval(zv)) / std::max(scale, 1e-300);
}

// One scale factor per augmented row; both halves must move together so the
// final per-row division is unaffected.
void rescale_poly_row(std::vector<Polynomial>& left, std::vector<Polynomial>& right) {
    double top = 0.0;
    for (const std::vector<Polynomial>* half : {&left, &right})
        for (const Polynomial& p : *half)
            for (double c : p.coeffs()) top = std::max(top, std::abs(c));
    if (top <= 0.0) return;
    for (std::vector<Polynomial>* half : {&left, &right})
        for (Polynomial& p : *half) p = p * (1.0 / top);
}

}  // namespace

TransferMatrix TransferMatrix::inverse() const {
    if (rows_ != cols_) throw Error("inverse of non-square transfer matrix");
    const int n = rows_;
    if (n == 1) {
        const RationalFunction& e = at(0, 0);
        bool nonzero = false;
        for (const Complex& p : pivot_probes())
            if (!e.is_zero() && normalized_magnitude(e.num(), p) >= tol::kPivot) nonzero = true;
        if (!nonzero) throw SingularError("transfer matrix singular");
        TransferMatrix out(1, 1);
        out.at(0, 0) = e.inverse();
        return out;
    }

    // Fraction-free Gauss-Jordan on the row-denominator-cleared augmented
    // matrix. Every mid-stream division is an exact polynomial division by
    // the previous pivot; the only rational divisions happen once per row at
    // the end. Keeps elimination noise at rounding level instead of
    // compounding through division chains.
    std::vector<std::vector<Polynomial>> work(static_cast<size_t>(n)),
        aug(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Least common denominator of the row through the pole lists.
        std::vector<Complex> row_poles;
        Polynomial row_den = Polynomial::one();
        for (int j = 0; j < n; ++j) {
            const RationalFunction& e = at(i, j);
            if (e.is_zero()) continue;
            std::vector<Complex> extra;
            std::vector<bool> used_mine(row_poles.size(), false);
            for (const Complex& p : e.poles()) {
                int hit = -1;
                double best = 1e-9;
                for (size_t k = 0; k < row_poles.size(); ++k) {
                    if (used_mine[k]) continue;
                    const double d = std::abs(row_poles[k] - p);
                    if (d < best) {
                        best = d;
                        hit = static_cast<int>(k);
                    }
                }
                if (hit >= 0)
                    used_mine[static_cast<size_t>(hit)] = true;
                else
                    extra.push_back(p);
            }
            row_poles.insert(row_poles.end(), extra.begin(), extra.end());
            row_den = row_den * Polynomial::from_roots(extra, 1.0);
        }
        work[static_cast<size_t>(i)].resize(static_cast<size_t>(n));
        aug[static_cast<size_t>(i)].assign(static_cast<size_t>(n), Polynomial::zero());
        for (int j = 0; j < n; ++j) {
            const RationalFunction& e = at(i, j);
            if (e.is_zero()) continue;
            const Polynomial lift = row_den.divmod(e.den()).first;
            work[static_cast<size_t>(i)][static_cast<size_t>(j)] = e.num() * lift;
        }
        aug[static_cast<size_t>(i)][static_cast<size_t>(i)] = row_den;
        rescale_poly_row(work[static_cast<size_t>(i)], aug[static_cast<size_t>(i)]);
    }

    std::vector<bool> used(static_cast<size_t>(n), false);
    std::vector<int> pivot_row_of_col(static_cast<size_t>(n), -1);
    Polynomial prev = Polynomial::one();
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        double best = -1.0;
        for (int r = 0; r < n; ++r) {
            if (used[static_cast<size_t>(r)]) continue;
            const Polynomial& cand = work[static_cast<size_t>(r)][static_cast<size_t>(col)];
            bool nonzero = false;
            for (const Complex& p : pivot_probes())
                if (normalized_magnitude(cand, p) >= tol::kPivot) nonzero = true;
            if (!nonzero) continue;
            const double score = normalized_magnitude(cand, Complex(2.0, 0.0));
            if (score > best) {
                best = score;
                pivot = r;
            }
        }
        if (pivot < 0) throw SingularError("transfer matrix singular");
        used[static_cast<size_t>(pivot)] = true;
        pivot_row_of_col[static_cast<size_t>(col)] = pivot;
        const Polynomial p = work[static_cast<size_t>(pivot)][static_cast<size_t>(col)];

        for (int r = 0; r < n; ++r) {
            if (r == pivot) continue;
            const Polynomial f = work[static_cast<size_t>(r)][static_cast<size_t>(col)];
            auto update = [&](std::vector<Polynomial>& row, const std::vector<Polynomial>& prow) {
                for (int j = 0; j < n; ++j) {
                    Polynomial next =
                        p * row[static_cast<size_t>(j)] - f * prow[static_cast<size_t>(j)];
                    row[static_cast<size_t>(j)] =
                        prev.degree() == 0 ? next * (1.0 / prev.coeff(0)) : next.divmod(prev).first;
                }
            };
            update(work[static_cast<size_t>(r)], work[static_cast<size_t>(pivot)]);
            update(aug[static_cast<size_t>(r)], aug[static_cast<size_t>(pivot)]);
            work[static_cast<size_t>(r)][static_cast<size_t>(col)] = Polynomial::zero();
            rescale_poly_row(work[static_cast<size_t>(r)], aug[static_cast<size_t>(r)]);
        }
        prev = p;
    }

    TransferMatrix out(n, n);
    for (int col = 0; col < n; ++col) {
        const int r = pivot_row_of_col[static_cast<size_t>(col)];
        const Polynomial& d = work[static_cast<size_t>(r)][static_cast<size_t>(col)];
        std::vector<Complex> droots;
        if (d.degree() >= 1) droots = d.roots();
        for (int j = 0; j < n; ++j)
            out.at(col, j) = RationalFunction::with_known_poles(
                aug[static_cast<size_t>(r)][static_cast<size_t>(j)], d, droots);
    }
    return out;
}

MatrixClassification TransferMatrix::classify(double pole_tol) const {
    MatrixClassification mc;
    mc.entries.reserve(entries_.size());
    for (const RationalFunction& r : entries_) {
        Classification c = r.classify(pole_tol);
        mc.all_proper = mc.all_proper && c.is_proper();
        mc.all_strictly_proper = mc.all_strictly_proper && c.is_strictly_proper();
        mc.all_stable_proper = mc.all_stable_proper && c.is_stable_proper();
        mc.entries.push_back(std::move(c));
    }
    return mc;
}

namespace {

double sigma_max(const Eigen::MatrixXcd& m) {
    // Power iteration on m^H m; tolerance 1e-12 on the Rayleigh quotient,
    // capped at 200 iterations.
    const int n = static_cast<int>(m.cols());
    if (n == 1) return m.col(0).norm();
    const Eigen::MatrixXcd g = m.adjoint() * m;
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n) / std::sqrt(static_cast<double>(n));
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        Eigen::VectorXcd w = g * v;
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        v = w / nw;
        const double next = std::real(v.dot(g * v));
        if (std::abs(next - lambda) <= 1e-12 * std::max(1.0, std::abs(next))) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::sqrt(std::max(0.0, lambda));
}

}  // namespace

double TransferMatrix::hinf_norm(int grid_size) const {
    if (!classify().all_stable_proper) throw Error("H-infinity norm requires RH-infinity membership");
    if (grid_size < 2) throw Error("H-infinity grid needs at least two points");
    const double pi = std::acos(-1.0);

    auto gain = [this](double omega) { return sigma_max(eval(std::polar(1.0, omega))); };

    double best = -1.0;
    int best_idx = 0;
    for (int k = 0; k < grid_size; ++k) {
        const double omega = pi * k / (grid_size - 1);
        const double g = gain(omega);
        if (g > best) {
            best = g;
            best_idx = k;
        }
    }

    // Golden-section refinement between the grid neighbors of the argmax.
    double lo = pi * std::max(0, best_idx - 1) / (grid_size - 1);
    double hi = pi * std::min(grid_size - 1, best_idx + 1) / (grid_size - 1);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - gr * (hi - lo);
    double b = lo + gr * (hi - lo);
    double fa = gain(a), fb = gain(b);
    while (hi - lo > 1e-9) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + gr * (hi - lo);
            fb = gain(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - gr * (hi - lo);
            fa = gain(a);
        }
        best = std::max(best, std::max(fa, fb));
    }
    return best;
}

ImpulseSequence TransferMatrix::impulse(int horizon) const {
    ImpulseSequence seq;
    seq.rows = rows_;
    seq.cols = cols_;
    seq.coefficients.assign(static_cast<size_t>(horizon) + 1, Eigen::MatrixXd::Zero(rows_, cols_));
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) {
            const std::vector<double> h = at(i, j).impulse(horizon);
            for (int tau = 0; tau <= horizon; ++tau)
                seq.coefficients[static_cast<size_t>(tau)](i, j) = h[static_cast<size_t>(tau)];
        }
    }
    return seq;
}

TransferMatrix TransferMatrix::cancelled(double cancel_tol) const {
    TransferMatrix out(rows_, cols_);
    for (size_t k = 0; k < entries_.size(); ++k) out.entries_[k] = entries_[k].cancelled(cancel_tol);
    return out;
}

TransferMatrix operator*(const RationalFunction& s, const TransferMatrix& m) { return m * s; }
TransferMatrix operator*(double s, const TransferMatrix& m) { return m * s; }

double probe_distance(const TransferMatrix& a, const TransferMatrix& b) {
    double worst = 0.0;
    for (const Complex& p : probe_points()) worst = std::max(worst, (a.eval(p) - b.eval(p)).norm());
    return worst;
}

double identity_residual(const TransferMatrix& m) {
    double worst = 0.0;
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
    for (const Complex& p : probe_points()) worst = std::max(worst, (m.eval(p) - eye).norm());
    return worst;
}

}  // namespace rstab
