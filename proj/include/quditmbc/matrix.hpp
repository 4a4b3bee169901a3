#ifndef QUDITMBC_MATRIX_HPP
#define QUDITMBC_MATRIX_HPP

/*
 * Small dense complex matrices.  Everything here runs on d x d or d^2 x d^2
 * operators with d <= 7, so plain O(n^3) routines are fine.
 */

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "zd.hpp"

namespace qmbc {

struct CMat {
    int rows = 0;
    int cols = 0;
    std::vector<Cx> a;

    CMat() = default;
    CMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, Cx(0, 0)) {}

    Cx& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    const Cx& at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

    static CMat identity(int n) {
        CMat m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = Cx(1, 0);
        return m;
    }
};

inline CMat matmul(const CMat& x, const CMat& y) {
    if (x.cols != y.rows) throw std::invalid_argument("matmul: shape mismatch");
    CMat z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            Cx xv = x.at(i, k);
            if (xv == Cx(0, 0)) continue;
            for (int j = 0; j < y.cols; ++j) z.at(i, j) += xv * y.at(k, j);
        }
    return z;
}

inline CMat adjoint(const CMat& x) {
    CMat z(x.cols, x.rows);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) z.at(j, i) = std::conj(x.at(i, j));
    return z;
}

inline CMat kron(const CMat& x, const CMat& y) {
    CMat z(x.rows * y.rows, x.cols * y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j)
            for (int k = 0; k < y.rows; ++k)
                for (int l = 0; l < y.cols; ++l)
                    z.at(i * y.rows + k, j * y.cols + l) = x.at(i, j) * y.at(k, l);
    return z;
}

inline CMat scale(const CMat& x, Cx s) {
    CMat z = x;
    for (auto& v : z.a) v *= s;
    return z;
}

inline double max_abs_diff(const CMat& x, const CMat& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("max_abs_diff: shape");
    double m = 0.0;
    for (size_t i = 0; i < x.a.size(); ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
    return m;
}

inline bool is_unitary(const CMat& u, double tol = 1e-10) {
    if (u.rows != u.cols) return false;
    return max_abs_diff(matmul(u, adjoint(u)), CMat::identity(u.rows)) <= tol;
}

// equality up to one global phase
inline bool equal_up_to_phase(const CMat& x, const CMat& y, double tol = 1e-10) {
    if (x.rows != y.rows || x.cols != y.cols) return false;
    size_t pivot = 0;
    double best = 0;
    for (size_t i = 0; i < x.a.size(); ++i)
        if (std::abs(x.a[i]) > best) {
            best = std::abs(x.a[i]);
            pivot = i;
        }
    if (best < tol) {
        for (const auto& v : y.a)
            if (std::abs(v) > tol) return false;
        return true;
    }
    if (std::abs(y.a[pivot]) < tol) return false;
    Cx phase = x.a[pivot] / y.a[pivot];
    if (std::abs(std::abs(phase) - 1.0) > tol) return false;
    return max_abs_diff(x, scale(y, phase)) <= tol;
}

// numerical rank by Gaussian elimination with partial pivoting
inline int matrix_rank(CMat m, double tol = 1e-9) {
    int rank = 0;
    int row = 0;
    for (int col = 0; col < m.cols && row < m.rows; ++col) {
        int piv = -1;
        double best = tol;
        for (int r = row; r < m.rows; ++r)
            if (std::abs(m.at(r, col)) > best) {
                best = std::abs(m.at(r, col));
                piv = r;
            }
        if (piv < 0) continue;
        for (int c = 0; c < m.cols; ++c) std::swap(m.at(row, c), m.at(piv, c));
        for (int r = 0; r < m.rows; ++r) {
            if (r == row) continue;
            Cx f = m.at(r, col) / m.at(row, col);
            if (f == Cx(0, 0)) continue;
            for (int c = 0; c < m.cols; ++c) m.at(r, c) -= f * m.at(row, c);
        }
        ++row;
        ++rank;
    }
    return rank;
}

// operator Schmidt rank of a two-qudit gate u (d^2 x d^2): rank of the
// reshuffled matrix R[(i,i'),(j,j')] = U[(i,j),(i',j')]
inline int operator_schmidt_rank(const CMat& u, int d, double tol = 1e-9) {
    if (u.rows != d * d || u.cols != d * d)
        throw std::invalid_argument("operator_schmidt_rank: expected d^2 x d^2");
    CMat r(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int ip = 0; ip < d; ++ip)
                for (int jp = 0; jp < d; ++jp)
                    r.at(i * d + ip, j * d + jp) = u.at(i * d + j, ip * d + jp);
    return matrix_rank(r, tol);
}

}  // namespace qmbc

#endif
