#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace itscf::nn {

using Vec = std::vector<double>;

// Row-major dense matrix of doubles.
struct Mat {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> data;

    Mat() = default;
    Mat(size_t r, size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double* row(size_t i) { return data.data() + i * cols; }
    const double* row(size_t i) const { return data.data() + i * cols; }
    double& operator()(size_t i, size_t j) { return data[i * cols + j]; }
    double operator()(size_t i, size_t j) const { return data[i * cols + j]; }

    void zero() { data.assign(data.size(), 0.0); }
    bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
    bool operator==(const Mat&) const = default;
};

inline Mat transpose(const Mat& a) {
    Mat t(a.cols, a.rows);
    for (size_t i = 0; i < a.rows; ++i)
        for (size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

inline void axpy(double* y, const double* x, double alpha, size_t n) {
    for (size_t j = 0; j < n; ++j) y[j] += alpha * x[j];
}

// C += A * B, with A m-by-k, B k-by-n, C m-by-n. The inner loop updates a
// full row of C so it vectorizes without FP reassociation.
inline void gemm_nn_acc(Mat& c, const Mat& a, const Mat& b) {
    assert(a.cols == b.rows && c.rows == a.rows && c.cols == b.cols);
    const size_t n = c.cols;
    for (size_t i = 0; i < a.rows; ++i) {
        double* crow = c.row(i);
        const double* arow = a.row(i);
        for (size_t k = 0; k < a.cols; ++k) axpy(crow, b.row(k), arow[k], n);
    }
}

// C += A^T * B, with A k-by-m, B k-by-n, C m-by-n.
inline void gemm_tn_acc(Mat& c, const Mat& a, const Mat& b) {
    assert(a.rows == b.rows && c.rows == a.cols && c.cols == b.cols);
    const size_t n = c.cols;
    for (size_t r = 0; r < a.rows; ++r) {
        const double* arow = a.row(r);
        const double* brow = b.row(r);
        for (size_t i = 0; i < a.cols; ++i) axpy(c.row(i), brow, arow[i], n);
    }
}

// y += column sums of A.
inline void add_col_sums(Vec& y, const Mat& a) {
    assert(y.size() == a.cols);
    for (size_t i = 0; i < a.rows; ++i) axpy(y.data(), a.row(i), 1.0, a.cols);
}

inline void add_row_broadcast(Mat& c, const Vec& v) {
    assert(c.cols == v.size());
    for (size_t i = 0; i < c.rows; ++i) axpy(c.row(i), v.data(), 1.0, c.cols);
}

} // namespace itscf::nn
