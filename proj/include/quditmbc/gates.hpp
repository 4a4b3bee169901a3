#ifndef QUDITMBC_GATES_HPP
#define QUDITMBC_GATES_HPP

/*
 * Single- and two-qudit gate matrices and measurement bases.
 *
 * Conventions (fixed across the whole library):
 *   X |k> = |k-1>,   Z |k> = w^k |k>,   w = exp(2*pi*i/d)
 *   |+_j> = (1/sqrt d) sum_k w^{jk} |k>,  |+> = |+_0>
 *   F |k> = |+_k>,   S_c |k> = |ck>,   F_q = F S_q
 *   CZ^q |k,l> = w^{qkl} |k,l>
 *
 * Measuring "in the basis of operator O" yields outcome m exactly when the
 * state is projected onto the eigenvector of O with eigenvalue w^m.  For a
 * basis given by a unitary U (not an operator spectrum), outcome m labels
 * the column U|m>.
 */

#include <string>

#include "matrix.hpp"
#include "zd.hpp"

namespace qmbc {

// t-th triangular number t(t-1)/2, exact
inline long long tri(long long t) { return t * (t - 1) / 2; }

inline CMat pauli_x(const PrimeDim& dim) {
    CMat m(dim.d, dim.d);
    for (int k = 0; k < dim.d; ++k) m.at(mod_d(k - 1, dim.d), k) = Cx(1, 0);
    return m;
}

inline CMat pauli_z(const PrimeDim& dim) {
    PhaseTable w(dim.d);
    CMat m(dim.d, dim.d);
    for (int k = 0; k < dim.d; ++k) m.at(k, k) = w(k);
    return m;
}

inline CMat x_pow(const PrimeDim& dim, long long t) {
    int s = mod_d(t, dim.d);
    CMat m(dim.d, dim.d);
    for (int k = 0; k < dim.d; ++k) m.at(mod_d(k - s, dim.d), k) = Cx(1, 0);
    return m;
}

inline CMat z_pow(const PrimeDim& dim, long long t) {
    PhaseTable w(dim.d);
    CMat m(dim.d, dim.d);
    for (int k = 0; k < dim.d; ++k) m.at(k, k) = w(static_cast<long long>(k) * mod_d(t, dim.d));
    return m;
}

inline CMat fourier(const PrimeDim& dim) {
    PhaseTable w(dim.d);
    double s = 1.0 / std::sqrt(static_cast<double>(dim.d));
    CMat m(dim.d, dim.d);
    for (int j = 0; j < dim.d; ++j)
        for (int k = 0; k < dim.d; ++k) m.at(j, k) = w(static_cast<long long>(j) * k) * s;
    return m;
}

// S_c |k> = |ck>; full-rank permutation exactly when gcd(c,d)=1
inline CMat perm_s(const PrimeDim& dim, int c) {
    c = mod_d(c, dim.d);
    if (c == 0) throw std::invalid_argument("perm_s: c must be nonzero mod d");
    CMat m(dim.d, dim.d);
    for (int k = 0; k < dim.d; ++k) m.at(mod_d(static_cast<long long>(c) * k, dim.d), k) = Cx(1, 0);
    return m;
}

inline CMat fourier_q(const PrimeDim& dim, int q) { return matmul(fourier(dim), perm_s(dim, q)); }

// diagonal w^{lin*j + quad*j^2}
inline CMat diag_poly(const PrimeDim& dim, long long lin, long long quad) {
    PhaseTable w(dim.d);
    CMat m(dim.d, dim.d);
    for (int j = 0; j < dim.d; ++j)
        m.at(j, j) = w(lin * j + quad * j * static_cast<long long>(j));
    return m;
}

// W: commutes with Z, conjugates X to w^{-(d-1)/2} Z X.   (odd d)
inline CMat w_gate(const PrimeDim& dim) {
    if (!dim.odd) throw std::invalid_argument("w_gate: requires odd d");
    PhaseTable w(dim.d);
    CMat m(dim.d, dim.d);
    for (int j = 0; j < dim.d; ++j) m.at(j, j) = w(static_cast<long long>(j) * (dim.d - j) / 2);
    return m;
}

// U^{(1n)}: commutes with X, conjugates Z to w^{-n(d-1)/2} Z X^n.   (odd d)
inline CMat u1n_gate(const PrimeDim& dim, int n) {
    if (!dim.odd) throw std::invalid_argument("u1n_gate: requires odd d");
    PhaseTable w(dim.d);
    CMat diag(dim.d, dim.d);
    for (int j = 0; j < dim.d; ++j)
        diag.at(j, j) = w(static_cast<long long>(n) * j * (j - dim.d) / 2);
    CMat f = fourier(dim);
    return matmul(matmul(f, diag), adjoint(f));
}

// U~^{(n1)}(e): maps X -> Z^dagger and Z -> w^{ne(e-d)/2} Z^{ne^2} X.
// e = 1 gives U^{(n1)}.   (odd d)
inline CMat un1_gate(const PrimeDim& dim, int n, int e = 1) {
    if (!dim.odd) throw std::invalid_argument("un1_gate: requires odd d");
    PhaseTable w(dim.d);
    CMat diag(dim.d, dim.d);
    long long ee = mod_d(e, dim.d);
    for (int j = 0; j < dim.d; ++j) {
        long long expo = -static_cast<long long>(j) * n * (ee * (ee - dim.d) / 2) -
                         n * ee * ee * tri(j);
        diag.at(j, j) = w(expo);
    }
    return matmul(diag, fourier(dim));
}

// Z^alpha(m) = sum_n |n> exp(2 pi i alpha (n + m_n d)/d) <n|, real alpha
inline CMat z_alpha(const PrimeDim& dim, double alpha, const std::vector<long long>& m) {
    if (static_cast<int>(m.size()) != dim.d) throw std::invalid_argument("z_alpha: |m| != d");
    CMat g(dim.d, dim.d);
    for (int n = 0; n < dim.d; ++n) {
        double ang = 2.0 * kPi * alpha * (n + static_cast<double>(m[n]) * dim.d) / dim.d;
        g.at(n, n) = Cx(std::cos(ang), std::sin(ang));
    }
    return g;
}

// X^alpha(m) = F Z^alpha(m) F^dagger (diagonal in the Fourier basis)
inline CMat x_alpha(const PrimeDim& dim, double alpha, const std::vector<long long>& m) {
    CMat f = fourier(dim);
    return matmul(matmul(f, z_alpha(dim, alpha, m)), adjoint(f));
}

inline CMat cz_pow_matrix(const PrimeDim& dim, long long q) {
    PhaseTable w(dim.d);
    int d = dim.d;
    CMat m(d * d, d * d);
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
            m.at(k * d + l, k * d + l) = w(q * k * l);
    return m;
}

inline CMat ccz_pow_matrix(const PrimeDim& dim, long long kk) {
    PhaseTable w(dim.d);
    int d = dim.d;
    CMat m(d * d * d, d * d * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c) {
                int i = (a * d + b) * d + c;
                m.at(i, i) = w(kk * a * b * c);
            }
    return m;
}

// U~(q): the CZ^q gate conjugated into the X basis,
// sum_{jk} w^{qjk} |+_j><+_j| (x) |+_k><+_k|
inline CMat utilde_gate(const PrimeDim& dim, long long q) {
    CMat f = fourier(dim);
    CMat ff = kron(f, f);
    return matmul(matmul(ff, cz_pow_matrix(dim, q)), adjoint(ff));
}

// ---------------------------------------------------------------------------
// measurement bases

struct Basis {
    std::string label;
    int d = 0;
    std::vector<Cx> col;  // col[m*d + j] = <j|chi_m>

    const Cx* vec(int m) const { return col.data() + static_cast<size_t>(m) * d; }
};

inline Basis basis_from_columns(const std::string& label, const CMat& u) {
    Basis b;
    b.label = label;
    b.d = u.rows;
    b.col.resize(static_cast<size_t>(u.rows) * u.cols);
    for (int m = 0; m < u.cols; ++m)
        for (int j = 0; j < u.rows; ++j) b.col[static_cast<size_t>(m) * u.rows + j] = u.at(j, m);
    return b;
}

inline Basis basis_computational(const PrimeDim& dim) {
    return basis_from_columns("Z", CMat::identity(dim.d));
}

inline Basis basis_fourier(const PrimeDim& dim) {
    return basis_from_columns("X", fourier(dim));
}

// basis defined by the unitary F_q^dagger: outcome j labels the column
// F_q^dagger |j> = |+_{-qj}>
inline Basis basis_fq_dagger(const PrimeDim& dim, int q) {
    return basis_from_columns("Fq_dag(" + std::to_string(mod_d(q, dim.d)) + ")",
                              adjoint(fourier_q(dim, q)));
}

// eigenbasis of w^{c0} Z^a X^b, outcome m <-> eigenvalue w^m.
// For b != 0 the eigenvector is supported on the orbit l = t*b:
//   amp[t b mod d] = w^{t(m-c0) - a b t(t-1)/2} / sqrt d
// which needs a*b*(d-1) even (always true for odd d).
inline Basis basis_pauli(const PrimeDim& dim, long long c0, long long a, long long b) {
    int d = dim.d;
    int av = mod_d(a, d), bv = mod_d(b, d);
    Basis out;
    out.label = "P(" + std::to_string(mod_d(c0, d)) + ";Z^" + std::to_string(av) + "X^" +
                std::to_string(bv) + ")";
    out.d = d;
    out.col.assign(static_cast<size_t>(d) * d, Cx(0, 0));
    PhaseTable w(d);
    if (bv == 0) {
        if (av == 0) throw std::invalid_argument("basis_pauli: identity has no outcome labels");
        int ainv = mod_inverse(av, d);
        for (int m = 0; m < d; ++m) {
            int j = mod_d(static_cast<long long>(ainv) * (m - c0), d);
            out.col[static_cast<size_t>(m) * d + j] = Cx(1, 0);
        }
        return out;
    }
    if (!dim.odd && (static_cast<long long>(av) * bv) % 2 != 0)
        throw std::invalid_argument("basis_pauli: Z^a X^b has no w^m eigenbasis for d = 2, a*b odd");
    double s = 1.0 / std::sqrt(static_cast<double>(d));
    for (int m = 0; m < d; ++m) {
        for (int t = 0; t < d; ++t) {
            int l = mod_d(static_cast<long long>(t) * bv, d);
            long long expo = static_cast<long long>(t) * (m - c0) - a * b * tri(t);
            out.col[static_cast<size_t>(m) * d + l] = w(expo) * s;
        }
    }
    return out;
}

// eigenbasis of X^t (Fourier vectors with outcomes relabeled by t)
inline Basis basis_x_power(const PrimeDim& dim, long long t) {
    Basis b = basis_pauli(dim, 0, 0, t);
    b.label = "X^" + std::to_string(mod_d(t, dim.d));
    return b;
}

// exponents alpha_l solving alpha_{k+l} + l = alpha_l with alpha_0 = 0;
// the walk l = t*k visits every residue because gcd(k,d) = 1
inline std::vector<int> zxk_alpha(const PrimeDim& dim, int k) {
    int d = dim.d;
    k = mod_d(k, d);
    if (k == 0) throw std::invalid_argument("zxk_alpha: k must be nonzero mod d");
    if (!dim.odd) throw std::invalid_argument("zxk_alpha: requires odd d");
    std::vector<int> alpha(d, 0);
    for (int t = 0; t < d; ++t) alpha[mod_d(static_cast<long long>(t) * k, d)] = mod_d(-k * tri(t), d);
    return alpha;
}

// eigenbasis of Z X^k in the alpha-recursion gauge: the eigenvector with
// eigenvalue w^m is (1/sqrt d) sum_l w^{alpha_l} |l+m> where
// alpha_{k+l} + l = alpha_l and alpha_0 = 0.  Requires odd d and k != 0.
inline Basis basis_zxk(const PrimeDim& dim, int k) {
    int d = dim.d;
    k = mod_d(k, d);
    std::vector<int> alpha = zxk_alpha(dim, k);
    PhaseTable w(d);
    double s = 1.0 / std::sqrt(static_cast<double>(d));
    Basis out;
    out.label = "ZX^" + std::to_string(k);
    out.d = d;
    out.col.assign(static_cast<size_t>(d) * d, Cx(0, 0));
    for (int m = 0; m < d; ++m)
        for (int l = 0; l < d; ++l)
            out.col[static_cast<size_t>(m) * d + mod_d(l + m, d)] = w(alpha[l]) * s;
    return out;
}

inline bool basis_is_orthonormal(const Basis& b, double tol = 1e-10) {
    for (int m = 0; m < b.d; ++m)
        for (int n = 0; n < b.d; ++n) {
            Cx ip(0, 0);
            for (int j = 0; j < b.d; ++j) ip += std::conj(b.vec(m)[j]) * b.vec(n)[j];
            double want = (m == n) ? 1.0 : 0.0;
            if (std::abs(std::abs(ip) - want) > tol) return false;
        }
    return true;
}

}  // namespace qmbc

#endif
