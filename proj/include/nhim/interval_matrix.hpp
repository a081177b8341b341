#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "nhim/interval.hpp"

namespace nhim {

using IntervalVector = std::vector<Interval>;

// Dense row-major matrix of intervals.
class IntervalMatrix {
public:
    IntervalMatrix() = default;
    IntervalMatrix(std::size_t rows, std::size_t cols);
    // Degenerate enclosure of a point matrix.
    explicit IntervalMatrix(const Eigen::MatrixXd& m);

    static IntervalMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    Interval& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Interval& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Eigen::MatrixXd mid() const;
    // Entry-wise max |a_ij|.
    Eigen::MatrixXd mag() const;
    // Entry-wise upper bound on the radius.
    Eigen::MatrixXd rad() const;

    bool contains(const Eigen::MatrixXd& m) const;
    bool contains(const IntervalMatrix& m) const;

    // Rows and columns picked by index lists, in the given order.
    IntervalMatrix sub_block(const std::vector<std::size_t>& row_idx,
                             const std::vector<std::size_t>& col_idx) const;

    IntervalMatrix transpose() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Interval> data_;
};

IntervalMatrix operator+(const IntervalMatrix& a, const IntervalMatrix& b);
IntervalMatrix operator-(const IntervalMatrix& a, const IntervalMatrix& b);
IntervalMatrix operator*(const IntervalMatrix& a, const IntervalMatrix& b);
IntervalVector operator*(const IntervalMatrix& a, const IntervalVector& v);
IntervalMatrix operator*(const Interval& s, const IntervalMatrix& a);

IntervalMatrix hull(const IntervalMatrix& a, const IntervalMatrix& b);
IntervalVector hull(const IntervalVector& a, const IntervalVector& b);

// Enclosure of {A^T A : A in a}; the diagonal uses interval squares.
IntervalMatrix gram(const IntervalMatrix& a);

// Upper bound of sup over a of the Euclidean operator norm.
double op_norm_ub(const IntervalMatrix& a);

// Lower bound of inf over a of m(A) = min_{|x|=1} |Ax|. Zero when nothing
// positive can be certified. Throws ShapeError for non-square input.
double m_lb(const IntervalMatrix& a);

// Enclosure of {A^{-1} : A in a}. Throws NotInvertibleError when the midpoint
// is singular or the residual bound is not a contraction.
IntervalMatrix inverse_enclosure(const IntervalMatrix& a);

std::ostream& operator<<(std::ostream& os, const IntervalMatrix& a);

}  // namespace nhim
