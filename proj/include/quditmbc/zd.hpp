#ifndef QUDITMBC_ZD_HPP
#define QUDITMBC_ZD_HPP

/*
 * Exact arithmetic over Z_d and the d-th roots of unity.
 *
 * All symbolic phase bookkeeping in this library is done with integer
 * exponents of w = exp(2*pi*i/d); conversion to complex doubles happens
 * only at the state-vector boundary.  Division by 2 is realized as
 * multiplication by the inverse of 2 mod d and therefore requires odd d.
 */

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>
#include <cmath>

namespace qmbc {

using Cx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

// qudit dimension with primality certificate
struct PrimeDim {
    int d;
    bool odd;  // d > 2; gates modules that divide by 2 require this

    explicit PrimeDim(int dim) : d(dim), odd(dim > 2) {
        if (dim < 2) throw std::invalid_argument("PrimeDim: d must be >= 2");
        for (int f = 2; f * f <= dim; ++f) {
            if (dim % f == 0)
                throw std::invalid_argument("PrimeDim: " + std::to_string(dim) + " is not prime");
        }
    }
};

// canonical representative of x mod d in [0, d)
inline int mod_d(long long x, int d) {
    long long r = x % d;
    if (r < 0) r += d;
    return static_cast<int>(r);
}

// element of Z_d
struct Zd {
    int v;
    int d;

    Zd(long long value, const PrimeDim& dim) : v(mod_d(value, dim.d)), d(dim.d) {}
    Zd(long long value, int dim) : v(mod_d(value, dim)), d(dim) {}

    Zd operator+(const Zd& o) const { return Zd(static_cast<long long>(v) + o.v, d); }
    Zd operator-(const Zd& o) const { return Zd(static_cast<long long>(v) - o.v, d); }
    Zd operator*(const Zd& o) const { return Zd(static_cast<long long>(v) * o.v, d); }
    Zd operator-() const { return Zd(-static_cast<long long>(v), d); }
    bool operator==(const Zd& o) const { return v == o.v && d == o.d; }
};

// multiplicative inverse mod prime d; errors on zero
inline int mod_inverse(int a, int d) {
    a = mod_d(a, d);
    if (a == 0) throw std::domain_error("mod_inverse: no inverse of 0");
    // d is tiny and prime, a scan is plenty
    for (int b = 1; b < d; ++b) {
        if ((a * b) % d == 1) return b;
    }
    throw std::domain_error("mod_inverse: no inverse found (d not prime?)");
}

inline Zd mod_inverse(const Zd& a) { return Zd(mod_inverse(a.v, a.d), a.d); }

// k * 2^{-1} mod d; defined only for odd d
inline int half_times(long long k, const PrimeDim& dim) {
    if (!dim.odd) throw std::domain_error("half_times: undefined for d = 2");
    return mod_d(k * mod_inverse(2, dim.d), dim.d);
}

inline Zd half_times(const Zd& k) {
    PrimeDim dim(k.d);
    return Zd(half_times(k.v, dim), k.d);
}

// phase w^exponent with w = exp(2*pi*i/d)
struct PhaseExp {
    Zd e;

    explicit PhaseExp(const Zd& exponent) : e(exponent) {}
    PhaseExp operator+(const PhaseExp& o) const { return PhaseExp(e + o.e); }
};

inline Cx omega_complex(int exponent, int d) {
    double ang = 2.0 * kPi * mod_d(exponent, d) / d;
    return Cx(std::cos(ang), std::sin(ang));
}

inline Cx omega_complex(const PhaseExp& p) { return omega_complex(p.e.v, p.e.d); }

// precomputed table w^t, t = 0..d-1; each entry evaluated directly so no
// error accumulates from repeated multiplication
struct PhaseTable {
    int d;
    std::vector<Cx> w;

    explicit PhaseTable(int dim) : d(dim), w(dim) {
        for (int t = 0; t < dim; ++t) w[t] = omega_complex(t, dim);
    }

    const Cx& operator()(long long exponent) const { return w[mod_d(exponent, d)]; }
};

}  // namespace qmbc

#endif
