#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "quditmbc/statevector.hpp"

using namespace qmbc;

namespace {

StateVector basis_state(const PrimeDim& dim, const std::vector<int>& digits) {
    StateVector s;
    s.d = dim.d;
    s.n = static_cast<int>(digits.size());
    s.amps.assign(pow_size(dim.d, s.n), Cx(0, 0));
    std::size_t idx = 0;
    for (int dg : digits) idx = idx * dim.d + dg;
    s.amps[idx] = Cx(1, 0);
    return s;
}

}  // namespace

TEST_CASE("plus state amplitudes") {
    PrimeDim d2(2), d3(3);
    auto s = StateVector::plus_state(d2, 1);
    CHECK(s.amps.size() == 2);
    for (auto a : s.amps) CHECK(std::abs(a - Cx(1.0 / std::sqrt(2.0), 0)) < 1e-12);

    auto t = StateVector::plus_state(d3, 1);
    for (auto a : t.amps) CHECK(std::abs(a - Cx(1.0 / std::sqrt(3.0), 0)) < 1e-12);

    auto u = StateVector::plus_state(d3, 2);
    CHECK(u.amps.size() == 9);
    for (auto a : u.amps) CHECK(std::abs(a - Cx(1.0 / 3.0, 0)) < 1e-12);

    CHECK_THROWS_AS(StateVector::plus_state(PrimeDim(5), 9), std::length_error);
}

TEST_CASE("cz powers act diagonally") {
    PrimeDim d2(2), d3(3);

    auto s = StateVector::plus_state(d3, 2);
    auto s0 = s;
    s.apply_cz_pow(0, 1, 0);
    CHECK(fidelity_up_to_phase(s, s0) == doctest::Approx(1.0).epsilon(1e-12));

    auto q = basis_state(d2, {1, 1});
    q.apply_cz_pow(0, 1, 1);
    CHECK(std::abs(q.amps[3] - Cx(-1, 0)) < 1e-12);

    auto r = basis_state(d3, {1, 2});
    r.apply_cz_pow(0, 1, 2);
    // phase w^{2*1*2} = w^{4 mod 3} = w
    CHECK(std::abs(r.amps[1 * 3 + 2] - omega_complex(1, 3)) < 1e-12);

    CHECK_THROWS_AS(s.apply_cz_pow(0, 5, 1), std::out_of_range);
    CHECK_THROWS_AS(s.apply_cz_pow(0, 0, 1), std::invalid_argument);
}

TEST_CASE("ccz powers and their symmetry") {
    PrimeDim d2(2), d3(3);

    auto q = basis_state(d2, {1, 1, 1});
    q.apply_ccz_pow(0, 1, 2, 1);
    CHECK(std::abs(q.amps[7] - Cx(-1, 0)) < 1e-12);

    auto r = basis_state(d3, {1, 2, 2});
    r.apply_ccz_pow(0, 1, 2, 1);
    CHECK(std::abs(r.amps[(1 * 3 + 2) * 3 + 2] - omega_complex(1, 3)) < 1e-12);

    // argument order is irrelevant
    auto a = StateVector::plus_state(d3, 3);
    a.apply_cz_pow(0, 2, 1);  // scramble a bit first
    auto b = a;
    a.apply_ccz_pow(0, 1, 2, 2);
    b.apply_ccz_pow(2, 0, 1, 2);
    double diff = 0;
    for (std::size_t i = 0; i < a.amps.size(); ++i)
        diff = std::max(diff, std::abs(a.amps[i] - b.amps[i]));
    CHECK(diff < 1e-12);

    CHECK_THROWS_AS(a.apply_ccz_pow(0, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("gates preserve the norm") {
    PrimeDim d5(5);
    auto s = StateVector::plus_state(d5, 3);
    s.apply_ccz_pow(0, 1, 2, 3);
    s.apply_cz_pow(1, 2, 4);
    s.apply_x_pow(0, 2);
    s.apply_z_pow(2, 3);
    s.apply_perm(1, 3);
    s.apply_diag_poly(0, 2, 4);
    s.apply_local(2, w_gate(d5));
    CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("basis vectors: orthonormality and eigenvector contracts") {
    for (int dd : {3, 5}) {
        PrimeDim dim(dd);
        CHECK(basis_is_orthonormal(basis_computational(dim)));
        CHECK(basis_is_orthonormal(basis_fourier(dim)));
        CHECK(basis_is_orthonormal(basis_fq_dagger(dim, 2)));
        for (int k = 1; k < dd; ++k) CHECK(basis_is_orthonormal(basis_zxk(dim, k)));
        CHECK(basis_is_orthonormal(basis_pauli(dim, 1, 2, 1)));
    }

    // ZX^k eigenbasis: (Z X^k) |psi_k^m> = w^m |psi_k^m>, oracle = direct matrix action
    PrimeDim d3(3);
    CMat z = pauli_z(d3);
    for (int k = 1; k <= 2; ++k) {
        CMat zxk = matmul(z, x_pow(d3, k));
        Basis b = basis_zxk(d3, k);
        for (int m = 0; m < 3; ++m) {
            for (int row = 0; row < 3; ++row) {
                Cx acc(0, 0);
                for (int col = 0; col < 3; ++col) acc += zxk.at(row, col) * b.vec(m)[col];
                CHECK(std::abs(acc - omega_complex(m, 3) * b.vec(m)[row]) < 1e-10);
            }
        }
    }

    CHECK_THROWS_AS(basis_zxk(d3, 0), std::invalid_argument);
    CHECK_THROWS_AS(basis_zxk(PrimeDim(2), 1), std::invalid_argument);

    // Fourier and computational are mutually unbiased
    for (int dd : {2, 3, 5}) {
        PrimeDim dim(dd);
        Basis f = basis_fourier(dim);
        double want = 1.0 / std::sqrt(static_cast<double>(dd));
        for (int m = 0; m < dd; ++m)
            for (int j = 0; j < dd; ++j) CHECK(std::abs(std::abs(f.vec(m)[j]) - want) < 1e-12);
    }
}

TEST_CASE("pauli eigenbasis diagonalizes w^c0 Z^a X^b") {
    for (int dd : {3, 5}) {
        PrimeDim dim(dd);
        for (int a = 0; a < dd; ++a)
            for (int b = 0; b < dd; ++b) {
                if (a == 0 && b == 0) continue;
                int c0 = (a + 2 * b) % dd;
                Basis bas = basis_pauli(dim, c0, a, b);
                CHECK(basis_is_orthonormal(bas));
                CMat op = scale(matmul(z_pow(dim, a), x_pow(dim, b)), omega_complex(c0, dd));
                for (int m = 0; m < dd; ++m)
                    for (int row = 0; row < dd; ++row) {
                        Cx acc(0, 0);
                        for (int col = 0; col < dd; ++col) acc += op.at(row, col) * bas.vec(m)[col];
                        CHECK(std::abs(acc - omega_complex(m, dd) * bas.vec(m)[row]) < 1e-10);
                    }
            }
    }
}

TEST_CASE("measurement: uniform outcomes on |+>, deterministic on |0>") {
    PrimeDim d3(3);
    Basis comp = basis_computational(d3);

    for (int forced = 0; forced < 3; ++forced) {
        auto s = StateVector::plus_state(d3, 1);
        auto r = measure_remove(s, 0, comp, forced);
        CHECK(r.prob == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
        CHECK(s.n == 0);
    }

    auto z = basis_state(d3, {0});
    auto r = measure_remove(z, 0, comp, 0);
    CHECK(r.outcome == 0);
    CHECK(r.prob == doctest::Approx(1.0).epsilon(1e-10));

    auto z2 = basis_state(d3, {0});
    CHECK_THROWS_AS(measure_remove(z2, 0, comp, 1), std::domain_error);

    // weights sum to 1 over outcomes
    auto s = StateVector::plus_state(d3, 2);
    s.apply_cz_pow(0, 1, 1);
    double total = 0;
    for (int m = 0; m < 3; ++m) {
        auto c = s;
        total += measure_remove(c, 0, comp, m).prob;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("measuring one half of CZ|+>|+> collapses the partner") {
    PrimeDim d3(3);
    auto s = StateVector::plus_state(d3, 2);
    s.apply_cz_pow(0, 1, 1);
    auto r = measure_remove(s, 0, basis_computational(d3), 1);
    CHECK(r.prob == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    // partner should be |+_1>
    StateVector want;
    want.d = 3;
    want.n = 1;
    want.amps.resize(3);
    for (int k = 0; k < 3; ++k) want.amps[k] = omega_complex(k, 3) / std::sqrt(3.0);
    CHECK(fidelity_up_to_phase(s, want) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("fidelity up to phase") {
    PrimeDim d3(3);
    auto s = StateVector::plus_state(d3, 2);
    s.apply_cz_pow(0, 1, 2);
    CHECK(fidelity_up_to_phase(s, s) == doctest::Approx(1.0).epsilon(1e-12));

    auto t = s;
    t.apply_global_phase(1);
    CHECK(fidelity_up_to_phase(s, t) == doctest::Approx(1.0).epsilon(1e-12));

    auto a = basis_state(d3, {0});
    auto b = basis_state(d3, {1});
    CHECK(fidelity_up_to_phase(a, b) == doctest::Approx(0.0).epsilon(1e-12));

    auto c = StateVector::plus_state(d3, 1);
    CHECK_THROWS_AS(fidelity_up_to_phase(c, s), std::invalid_argument);
}

TEST_CASE("CCZ conjugation identity on matrices") {
    // CCZ^{-k} X_a CCZ^{k} = CZ^{k}_(bc) X_a
    for (int dd : {2, 3, 5}) {
        PrimeDim dim(dd);
        for (int k = 1; k < dd && k < 4; ++k) {
            CMat ccz = ccz_pow_matrix(dim, k);
            CMat xa = kron(pauli_x(dim), CMat::identity(dd * dd));
            CMat lhs = matmul(matmul(adjoint(ccz), xa), ccz);
            CMat rhs = matmul(kron(CMat::identity(dd), cz_pow_matrix(dim, k)), xa);
            CHECK(max_abs_diff(lhs, rhs) < 1e-10);
        }
    }
}

TEST_CASE("S_c commutation relations") {
    // S_c X = X^c S_c and S_c Z = Z^{c^{-1}} S_c
    for (int dd : {3, 5, 7}) {
        PrimeDim dim(dd);
        for (int c = 1; c < dd; ++c) {
            CMat sc = perm_s(dim, c);
            CHECK(max_abs_diff(matmul(sc, pauli_x(dim)), matmul(x_pow(dim, c), sc)) < 1e-10);
            CHECK(max_abs_diff(matmul(sc, pauli_z(dim)),
                               matmul(z_pow(dim, mod_inverse(c, dd)), sc)) < 1e-10);
        }
    }
}

TEST_CASE("two-site gate application agrees with the diagonal fast path") {
    PrimeDim d3(3);
    auto a = StateVector::plus_state(d3, 3);
    a.apply_ccz_pow(0, 1, 2, 1);
    auto b = a;
    a.apply_cz_pow(2, 0, 2);                       // note reversed site order
    CMat cz = cz_pow_matrix(d3, 2);
    b.apply_local2(2, 0, cz);
    double diff = 0;
    for (std::size_t i = 0; i < a.amps.size(); ++i)
        diff = std::max(diff, std::abs(a.amps[i] - b.amps[i]));
    CHECK(diff < 1e-12);
}

TEST_CASE("with_input plants the input state on leading sites") {
    PrimeDim d3(3);
    std::vector<Cx> in = {Cx(0.6, 0), Cx(0, 0.8), Cx(0, 0)};
    auto s = StateVector::with_input(d3, 2, in, 1);
    CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-10));
    // site 1 in |+>, site 0 in `in`
    auto r = measure_remove(s, 1, basis_fourier(d3), 0);
    CHECK(r.prob == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(s.amps[0] - in[0]) < 1e-10);
    CHECK(std::abs(s.amps[1] - in[1]) < 1e-10);
}

TEST_CASE("sampled measurement reproduces Born statistics") {
    PrimeDim d3(3);
    SplitMix64 rng(12345);
    std::vector<int> counts(3, 0);
    const int trials = 3000;
    for (int t = 0; t < trials; ++t) {
        auto s = StateVector::plus_state(d3, 1);
        auto r = measure_remove(s, 0, basis_computational(d3), -1, &rng);
        counts[r.outcome]++;
    }
    for (int m = 0; m < 3; ++m) {
        double p = static_cast<double>(counts[m]) / trials;
        CHECK(std::abs(p - 1.0 / 3.0) < 0.05);
    }
}

TEST_CASE("json dump is parseable and carries shape") {
    PrimeDim d2(2);
    auto s = StateVector::plus_state(d2, 2);
    auto j = nlohmann::json::parse(state_to_json(s));
    CHECK(j["d"] == 2);
    CHECK(j["n"] == 2);
    CHECK(j["amps"].size() == 4);
}
