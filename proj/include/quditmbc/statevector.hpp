#ifndef QUDITMBC_STATEVECTOR_HPP
#define QUDITMBC_STATEVECTOR_HPP

/*
 * Dense n-qudit state vector.  This is the brute-force ground truth that
 * every symbolic module is checked against, so it favors clarity over
 * speed; sizes are capped at desk scale.
 *
 * Site ordering: site 0 is the most significant digit of the amplitude
 * index, i.e. index = sum_s digit(s) * d^{n-1-s}.
 */

#include <sstream>
#include <iomanip>

#include "gates.hpp"
#include "rng.hpp"
#include "zd.hpp"

#include "json.hpp"

namespace qmbc {

constexpr std::size_t kDefaultAmpCap = 390625;  // 5^8

inline std::size_t pow_size(int d, int n) {
    std::size_t s = 1;
    for (int i = 0; i < n; ++i) s *= static_cast<std::size_t>(d);
    return s;
}

struct StateVector {
    int d = 2;
    int n = 0;
    std::vector<Cx> amps;

    std::size_t size() const { return amps.size(); }

    std::size_t stride(int site) const { return pow_size(d, n - 1 - site); }

    int digit(std::size_t index, int site) const {
        return static_cast<int>((index / stride(site)) % static_cast<std::size_t>(d));
    }

    static StateVector plus_state(const PrimeDim& dim, int sites,
                                  std::size_t cap = kDefaultAmpCap) {
        std::size_t sz = pow_size(dim.d, sites);
        if (sz > cap) throw std::length_error("StateVector: d^n exceeds cap");
        StateVector s;
        s.d = dim.d;
        s.n = sites;
        s.amps.assign(sz, Cx(1.0 / std::sqrt(static_cast<double>(sz)), 0));
        return s;
    }

    // |in> on the leading `input_qudits` sites, |+> everywhere else
    static StateVector with_input(const PrimeDim& dim, int sites, const std::vector<Cx>& input,
                                  int input_qudits, std::size_t cap = kDefaultAmpCap) {
        std::size_t sz = pow_size(dim.d, sites);
        if (sz > cap) throw std::length_error("StateVector: d^n exceeds cap");
        std::size_t in_sz = pow_size(dim.d, input_qudits);
        if (input.size() != in_sz) throw std::invalid_argument("with_input: amplitude count");
        StateVector s;
        s.d = dim.d;
        s.n = sites;
        std::size_t rest = sz / in_sz;
        double scale = 1.0 / std::sqrt(static_cast<double>(rest));
        s.amps.resize(sz);
        for (std::size_t i = 0; i < in_sz; ++i)
            for (std::size_t r = 0; r < rest; ++r) s.amps[i * rest + r] = input[i] * scale;
        double nn = 0;
        for (const auto& a : s.amps) nn += std::norm(a);
        if (std::abs(nn - 1.0) > 1e-9) {
            double inv = 1.0 / std::sqrt(nn);
            for (auto& a : s.amps) a *= inv;
        }
        return s;
    }

    double norm() const {
        double nn = 0;
        for (const auto& a : amps) nn += std::norm(a);
        return std::sqrt(nn);
    }

    Cx inner(const StateVector& o) const {
        if (d != o.d || n != o.n) throw std::invalid_argument("inner: shape mismatch");
        Cx s(0, 0);
        for (std::size_t i = 0; i < amps.size(); ++i) s += std::conj(amps[i]) * o.amps[i];
        return s;
    }

    void check_site(int site) const {
        if (site < 0 || site >= n) throw std::out_of_range("StateVector: site out of range");
    }

    void apply_global_phase(long long e) {
        PhaseTable w(d);
        Cx f = w(e);
        for (auto& a : amps) a *= f;
    }

    // diagonal w^{lin*j + quad*j^2} on one site
    void apply_diag_poly(int site, long long lin, long long quad) {
        check_site(site);
        PhaseTable w(d);
        std::vector<Cx> f(d);
        for (int j = 0; j < d; ++j) f[j] = w(lin * j + quad * j * static_cast<long long>(j));
        std::size_t st = stride(site);
        std::size_t block = st * static_cast<std::size_t>(d);
        for (std::size_t base = 0; base < amps.size(); base += block)
            for (int j = 0; j < d; ++j) {
                Cx fj = f[j];
                if (fj == Cx(1, 0)) continue;
                for (std::size_t off = 0; off < st; ++off) amps[base + j * st + off] *= fj;
            }
    }

    void apply_z_pow(int site, long long t) { apply_diag_poly(site, t, 0); }

    // X^t: |j> -> |j-t>
    void apply_x_pow(int site, long long t) {
        check_site(site);
        int s = mod_d(t, d);
        if (s == 0) return;
        std::size_t st = stride(site);
        std::size_t block = st * static_cast<std::size_t>(d);
        std::vector<Cx> tmp(d);
        for (std::size_t base = 0; base < amps.size(); base += block)
            for (std::size_t off = 0; off < st; ++off) {
                for (int j = 0; j < d; ++j) tmp[mod_d(j - s, d)] = amps[base + j * st + off];
                for (int j = 0; j < d; ++j) amps[base + j * st + off] = tmp[j];
            }
    }

    // S_c: |j> -> |cj>
    void apply_perm(int site, int c) {
        check_site(site);
        c = mod_d(c, d);
        if (c == 0) throw std::invalid_argument("apply_perm: c must be nonzero");
        if (c == 1) return;
        std::size_t st = stride(site);
        std::size_t block = st * static_cast<std::size_t>(d);
        std::vector<Cx> tmp(d);
        for (std::size_t base = 0; base < amps.size(); base += block)
            for (std::size_t off = 0; off < st; ++off) {
                for (int j = 0; j < d; ++j)
                    tmp[mod_d(static_cast<long long>(c) * j, d)] = amps[base + j * st + off];
                for (int j = 0; j < d; ++j) amps[base + j * st + off] = tmp[j];
            }
    }

    void apply_cz_pow(int a, int b, long long q) {
        check_site(a);
        check_site(b);
        if (a == b) throw std::invalid_argument("apply_cz_pow: sites must differ");
        if (mod_d(q, d) == 0) return;
        PhaseTable w(d);
        std::size_t sa = stride(a), sb = stride(b);
        for (std::size_t i = 0; i < amps.size(); ++i) {
            int ja = static_cast<int>((i / sa) % static_cast<std::size_t>(d));
            int jb = static_cast<int>((i / sb) % static_cast<std::size_t>(d));
            if (ja && jb) amps[i] *= w(q * ja * jb);
        }
    }

    void apply_ccz_pow(int a, int b, int c, long long k) {
        check_site(a);
        check_site(b);
        check_site(c);
        if (a == b || b == c || a == c)
            throw std::invalid_argument("apply_ccz_pow: sites must be distinct");
        if (mod_d(k, d) == 0) return;
        PhaseTable w(d);
        std::size_t sa = stride(a), sb = stride(b), sc = stride(c);
        for (std::size_t i = 0; i < amps.size(); ++i) {
            int ja = static_cast<int>((i / sa) % static_cast<std::size_t>(d));
            int jb = static_cast<int>((i / sb) % static_cast<std::size_t>(d));
            int jc = static_cast<int>((i / sc) % static_cast<std::size_t>(d));
            if (ja && jb && jc) amps[i] *= w(k * ja * jb * jc);
        }
    }

    void apply_local(int site, const CMat& u) {
        check_site(site);
        if (u.rows != d || u.cols != d) throw std::invalid_argument("apply_local: shape");
        std::size_t st = stride(site);
        std::size_t block = st * static_cast<std::size_t>(d);
        std::vector<Cx> tmp(d);
        for (std::size_t base = 0; base < amps.size(); base += block)
            for (std::size_t off = 0; off < st; ++off) {
                for (int r = 0; r < d; ++r) {
                    Cx acc(0, 0);
                    for (int cc = 0; cc < d; ++cc) acc += u.at(r, cc) * amps[base + cc * st + off];
                    tmp[r] = acc;
                }
                for (int r = 0; r < d; ++r) amps[base + r * st + off] = tmp[r];
            }
    }

    // two-site gate; row/col index = j_a * d + j_b
    void apply_local2(int a, int b, const CMat& u) {
        check_site(a);
        check_site(b);
        if (a == b) throw std::invalid_argument("apply_local2: sites must differ");
        int dd = d * d;
        if (u.rows != dd || u.cols != dd) throw std::invalid_argument("apply_local2: shape");
        std::size_t sa = stride(a), sb = stride(b);
        std::vector<Cx> in(dd), out(dd);
        std::vector<char> seen(amps.size(), 0);
        for (std::size_t i = 0; i < amps.size(); ++i) {
            if (seen[i]) continue;
            std::size_t base = i - digit(i, a) * sa - digit(i, b) * sb;
            for (int ja = 0; ja < d; ++ja)
                for (int jb = 0; jb < d; ++jb) {
                    std::size_t idx = base + ja * sa + jb * sb;
                    in[ja * d + jb] = amps[idx];
                    seen[idx] = 1;
                }
            for (int r = 0; r < dd; ++r) {
                Cx acc(0, 0);
                for (int c = 0; c < dd; ++c) acc += u.at(r, c) * in[c];
                out[r] = acc;
            }
            for (int ja = 0; ja < d; ++ja)
                for (int jb = 0; jb < d; ++jb) amps[base + ja * sa + jb * sb] = out[ja * d + jb];
        }
    }
};

inline double fidelity_up_to_phase(const StateVector& a, const StateVector& b) {
    return std::abs(a.inner(b));
}

struct MeasResult {
    int outcome = 0;
    double prob = 0.0;
};

namespace detail {

inline std::vector<double> outcome_weights(const StateVector& s, int site, const Basis& b) {
    std::vector<double> w(s.d, 0.0);
    std::size_t st = s.stride(site);
    std::size_t block = st * static_cast<std::size_t>(s.d);
    for (std::size_t base = 0; base < s.size(); base += block)
        for (std::size_t off = 0; off < st; ++off)
            for (int m = 0; m < s.d; ++m) {
                Cx acc(0, 0);
                for (int j = 0; j < s.d; ++j)
                    acc += std::conj(b.vec(m)[j]) * s.amps[base + j * st + off];
                w[m] += std::norm(acc);
            }
    return w;
}

inline int pick_outcome(const std::vector<double>& w, int forced, SplitMix64* rng) {
    if (forced >= 0) {
        if (forced >= static_cast<int>(w.size()))
            throw std::out_of_range("measure: forced outcome out of range");
        if (w[forced] < 1e-12)
            throw std::domain_error("measure: forced outcome has zero probability");
        return forced;
    }
    if (!rng) throw std::invalid_argument("measure: sampling requires an rng");
    double total = 0;
    for (double x : w) total += x;
    double r = rng->next_double() * total;
    double acc = 0;
    for (std::size_t m = 0; m < w.size(); ++m) {
        acc += w[m];
        if (r < acc) return static_cast<int>(m);
    }
    return static_cast<int>(w.size()) - 1;
}

}  // namespace detail

// Project `site` onto basis vector `outcome` and drop the site (n -> n-1).
// forced < 0 means sample with rng.  Returned prob is the Born weight.
inline MeasResult measure_remove(StateVector& s, int site, const Basis& b, int forced = -1,
                                 SplitMix64* rng = nullptr) {
    s.check_site(site);
    if (b.d != s.d) throw std::invalid_argument("measure: basis dimension mismatch");
    auto w = detail::outcome_weights(s, site, b);
    int m = detail::pick_outcome(w, forced, rng);
    double scale = 1.0 / std::sqrt(w[m]);
    std::size_t st = s.stride(site);
    std::size_t block = st * static_cast<std::size_t>(s.d);
    std::vector<Cx> out(s.size() / s.d);
    for (std::size_t base = 0; base < s.size(); base += block)
        for (std::size_t off = 0; off < st; ++off) {
            Cx acc(0, 0);
            for (int j = 0; j < s.d; ++j) acc += std::conj(b.vec(m)[j]) * s.amps[base + j * st + off];
            out[base / s.d + off] = acc * scale;
        }
    s.amps.swap(out);
    s.n -= 1;
    return {m, w[m]};
}

// Same projection but the site is kept, left in the outcome's basis vector.
inline MeasResult measure_collapse(StateVector& s, int site, const Basis& b, int forced = -1,
                                   SplitMix64* rng = nullptr) {
    s.check_site(site);
    if (b.d != s.d) throw std::invalid_argument("measure: basis dimension mismatch");
    auto w = detail::outcome_weights(s, site, b);
    int m = detail::pick_outcome(w, forced, rng);
    double scale = 1.0 / std::sqrt(w[m]);
    std::size_t st = s.stride(site);
    std::size_t block = st * static_cast<std::size_t>(s.d);
    for (std::size_t base = 0; base < s.size(); base += block)
        for (std::size_t off = 0; off < st; ++off) {
            Cx acc(0, 0);
            for (int j = 0; j < s.d; ++j) acc += std::conj(b.vec(m)[j]) * s.amps[base + j * st + off];
            for (int j = 0; j < s.d; ++j) s.amps[base + j * st + off] = acc * scale * b.vec(m)[j];
        }
    return {m, w[m]};
}

// debug dump: site order, d, n, re/im pairs
inline std::string state_to_json(const StateVector& s) {
    nlohmann::json j;
    j["schema"] = "quditmbc.state/1";
    j["d"] = s.d;
    j["n"] = s.n;
    j["site_order"] = "site0-most-significant";
    auto& arr = j["amps"] = nlohmann::json::array();
    for (const auto& a : s.amps) arr.push_back({a.real(), a.imag()});
    return j.dump();
}

}  // namespace qmbc

#endif
