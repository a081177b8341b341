#include "nhim/interval_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "nhim/rounding.hpp"

namespace nhim {

namespace r = rounding;

IntervalMatrix::IntervalMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Interval(0.0)) {}

IntervalMatrix::IntervalMatrix(const Eigen::MatrixXd& m)
    : IntervalMatrix(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())) {
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = Interval(m(i, j));
    }
}

IntervalMatrix IntervalMatrix::identity(std::size_t n) {
    IntervalMatrix id(n, n);
    for (std::size_t i = 0; i < n; ++i) id(i, i) = Interval(1.0);
    return id;
}

Eigen::MatrixXd IntervalMatrix::mid() const {
    Eigen::MatrixXd m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).mid();
    }
    return m;
}

Eigen::MatrixXd IntervalMatrix::mag() const {
    Eigen::MatrixXd m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).mag();
    }
    return m;
}

Eigen::MatrixXd IntervalMatrix::rad() const {
    Eigen::MatrixXd m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).rad();
    }
    return m;
}

bool IntervalMatrix::contains(const Eigen::MatrixXd& m) const {
    if (static_cast<std::size_t>(m.rows()) != rows_ || static_cast<std::size_t>(m.cols()) != cols_) {
        return false;
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            if (!(*this)(i, j).contains(m(i, j))) return false;
        }
    }
    return true;
}

bool IntervalMatrix::contains(const IntervalMatrix& m) const {
    if (m.rows_ != rows_ || m.cols_ != cols_) return false;
    for (std::size_t k = 0; k < data_.size(); ++k) {
        if (!data_[k].contains(m.data_[k])) return false;
    }
    return true;
}

IntervalMatrix IntervalMatrix::sub_block(const std::vector<std::size_t>& row_idx,
                                         const std::vector<std::size_t>& col_idx) const {
    IntervalMatrix out(row_idx.size(), col_idx.size());
    for (std::size_t i = 0; i < row_idx.size(); ++i) {
        for (std::size_t j = 0; j < col_idx.size(); ++j) {
            if (row_idx[i] >= rows_ || col_idx[j] >= cols_) throw ShapeError("sub_block index out of range");
            out(i, j) = (*this)(row_idx[i], col_idx[j]);
        }
    }
    return out;
}

IntervalMatrix IntervalMatrix::transpose() const {
    IntervalMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    }
    return t;
}

namespace {

void require_same_shape(const IntervalMatrix& a, const IntervalMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("matrix shapes differ");
}

// Upper bound of max_i sum_j |a_ij|.
double row_sum_norm_ub(const Eigen::MatrixXd& mag) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < mag.rows(); ++i) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < mag.cols(); ++j) s = r::add_up(s, mag(i, j));
        best = std::max(best, s);
    }
    return best;
}

// Gershgorin lower bound of the smallest real eigenvalue; valid whenever all
// eigenvalues of every member are real.
double gershgorin_lower(const IntervalMatrix& g) {
    double best = r::kInf;
    for (std::size_t i = 0; i < g.rows(); ++i) {
        double radius = 0.0;
        for (std::size_t j = 0; j < g.cols(); ++j) {
            if (j != i) radius = r::add_up(radius, g(i, j).mag());
        }
        best = std::min(best, r::sub_down(g(i, i).lo(), radius));
    }
    return best;
}

double gershgorin_upper(const IntervalMatrix& g) {
    double best = -r::kInf;
    for (std::size_t i = 0; i < g.rows(); ++i) {
        double radius = 0.0;
        for (std::size_t j = 0; j < g.cols(); ++j) {
            if (j != i) radius = r::add_up(radius, g(i, j).mag());
        }
        best = std::max(best, r::add_up(g(i, i).hi(), radius));
    }
    return best;
}

bool all_finite(const IntervalMatrix& a) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (!std::isfinite(a(i, j).lo()) || !std::isfinite(a(i, j).hi())) return false;
        }
    }
    return true;
}

}  // namespace

IntervalMatrix operator+(const IntervalMatrix& a, const IntervalMatrix& b) {
    require_same_shape(a, b);
    IntervalMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
    }
    return c;
}

IntervalMatrix operator-(const IntervalMatrix& a, const IntervalMatrix& b) {
    require_same_shape(a, b);
    IntervalMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    }
    return c;
}

IntervalMatrix operator*(const IntervalMatrix& a, const IntervalMatrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("matrix product shape mismatch");
    IntervalMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            Interval s(0.0);
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    }
    return c;
}

IntervalVector operator*(const IntervalMatrix& a, const IntervalVector& v) {
    if (a.cols() != v.size()) throw ShapeError("matrix-vector shape mismatch");
    IntervalVector out(a.rows(), Interval(0.0));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Interval s(0.0);
        for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * v[k];
        out[i] = s;
    }
    return out;
}

IntervalMatrix operator*(const Interval& s, const IntervalMatrix& a) {
    IntervalMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
    }
    return c;
}

IntervalMatrix hull(const IntervalMatrix& a, const IntervalMatrix& b) {
    require_same_shape(a, b);
    IntervalMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = hull(a(i, j), b(i, j));
    }
    return c;
}

IntervalVector hull(const IntervalVector& a, const IntervalVector& b) {
    if (a.size() != b.size()) throw ShapeError("vector sizes differ");
    IntervalVector c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = hull(a[i], b[i]);
    return c;
}

IntervalMatrix gram(const IntervalMatrix& a) {
    const std::size_t n = a.cols();
    IntervalMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        Interval d(0.0);
        for (std::size_t k = 0; k < a.rows(); ++k) d += sqr(a(k, i));
        g(i, i) = d;
        for (std::size_t j = i + 1; j < n; ++j) {
            Interval s(0.0);
            for (std::size_t k = 0; k < a.rows(); ++k) s += a(k, i) * a(k, j);
            g(i, j) = s;
            g(j, i) = s;
        }
    }
    return g;
}

double op_norm_ub(const IntervalMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    Eigen::MatrixXd mag = a.mag();
    if (a.rows() == 1 || a.cols() == 1) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < mag.size(); ++i) s = r::add_up(s, r::mul_up(mag(i), mag(i)));
        return r::sqrt_up(s);
    }
    double one = row_sum_norm_ub(mag.transpose());
    double inf = row_sum_norm_ub(mag);
    double holder = r::sqrt_up(r::mul_up(one, inf));
    double spectral = r::sqrt_up(std::max(0.0, gershgorin_upper(gram(a))));
    return std::min(holder, spectral);
}

double m_lb(const IntervalMatrix& a) {
    if (!a.square()) throw ShapeError("m_lb needs a square matrix");
    const std::size_t n = a.rows();
    if (n == 0) return 0.0;
    if (n == 1) return a(0, 0).mig();
    if (!all_finite(a)) return 0.0;

    IntervalMatrix g = gram(a);
    double lambda = gershgorin_lower(g);

    // Gershgorin after an approximate diagonalisation of the midpoint Gram
    // matrix. The similarity keeps the (real) spectrum, and Q^{-1} is enclosed
    // rigorously, so the disc bound stays valid.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g.mid());
    if (eig.info() == Eigen::Success) {
        try {
            IntervalMatrix q(eig.eigenvectors());
            IntervalMatrix q_inv = inverse_enclosure(q);
            lambda = std::max(lambda, gershgorin_lower(q_inv * g * q));
        } catch (const NotInvertibleError&) {
        }
    }
    if (!(lambda > 0.0)) return 0.0;
    return r::sqrt_down(lambda);
}

IntervalMatrix inverse_enclosure(const IntervalMatrix& a) {
    if (!a.square()) throw ShapeError("inverse_enclosure needs a square matrix");
    const std::size_t n = a.rows();
    if (n == 0) return a;
    if (!all_finite(a)) throw NotInvertibleError("not invertible as enclosed: unbounded entries");

    Eigen::FullPivLU<Eigen::MatrixXd> lu(a.mid());
    if (!lu.isInvertible()) throw NotInvertibleError("not invertible as enclosed: singular midpoint");
    Eigen::MatrixXd y = lu.inverse();
    if (!y.allFinite()) throw NotInvertibleError("not invertible as enclosed: singular midpoint");

    IntervalMatrix iy(y);
    IntervalMatrix e = IntervalMatrix::identity(n) - iy * a;
    double beta = row_sum_norm_ub(e.mag());
    if (!(beta < 1.0)) throw NotInvertibleError("not invertible as enclosed: residual bound >= 1");

    // A^{-1} = sum_k E^k Y = Y + E Y + E^2 (I - E)^{-1} Y, the tail bounded in
    // the infinity norm by beta^2 |Y| / (1 - beta).
    double y_norm = row_sum_norm_ub(y.cwiseAbs());
    double tail = r::div_up(r::mul_up(r::mul_up(beta, beta), y_norm), r::sub_down(1.0, beta));
    IntervalMatrix out = iy + e * iy;
    Interval pad(-tail, tail);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out(i, j) += pad;
    }
    return out;
}

std::ostream& operator<<(std::ostream& os, const IntervalMatrix& a) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) os << (j ? " " : "") << a(i, j);
        os << '\n';
    }
    return os;
}

}  // namespace nhim
