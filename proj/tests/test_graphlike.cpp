#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "quditmbc/graphlike.hpp"

using namespace qmbc;

namespace {

GraphLikeState random_graph(const PrimeDim& dim, SplitMix64& rng, int max_vertices = 6) {
    int n = 2 + rng.next_below(max_vertices - 1);
    GraphLikeState g(dim);
    for (int v = 0; v < n; ++v) g.add_vertex(v);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (rng.next_double() < 0.5) g.add_edge(a, b, 1 + rng.next_below(dim.d - 1));
    return g;
}

// forced-outcome measurement of `plan` on to_statevector(g); tracks the
// vertex -> site shifts as sites are removed
StateVector oracle_measure(const GraphLikeState& g,
                           const std::vector<std::tuple<int, Basis, int>>& plan,
                           std::vector<double>* probs = nullptr) {
    StateVector psi = g.to_statevector();
    std::vector<int> live = g.site_order();
    for (const auto& [v, basis, outcome] : plan) {
        auto it = std::find(live.begin(), live.end(), v);
        REQUIRE(it != live.end());
        int site = static_cast<int>(it - live.begin());
        auto r = measure_remove(psi, site, basis, outcome);
        if (probs) probs->push_back(r.prob);
        live.erase(it);
    }
    return psi;
}

void check_rule_oracle(const GraphLikeState& before, const GraphLikeState& after,
                       const std::vector<std::tuple<int, Basis, int>>& plan, double tol = 1e-9) {
    std::vector<double> probs;
    StateVector truth = oracle_measure(before, plan, &probs);
    StateVector symbolic = after.to_statevector();
    REQUIRE(truth.n == symbolic.n);
    CHECK(fidelity_up_to_phase(truth, symbolic) >= 1.0 - tol);
    // rule measurements on graph states have uniform outcome branches
    for (double p : probs) CHECK(p == doctest::Approx(1.0 / before.d()).epsilon(1e-9));
}

}  // namespace

TEST_CASE("to_statevector basics") {
    PrimeDim d2(2), d3(3);

    GraphLikeState empty(d3);
    empty.add_vertex(0);
    empty.add_vertex(1);
    StateVector s = empty.to_statevector();
    CHECK(fidelity_up_to_phase(s, StateVector::plus_state(d3, 2)) ==
          doctest::Approx(1.0).epsilon(1e-12));

    GraphLikeState pair(d2);
    pair.add_vertex(0);
    pair.add_vertex(1);
    pair.add_edge(0, 1, 1);
    StateVector c = pair.to_statevector();
    StateVector want = StateVector::plus_state(d2, 2);
    want.apply_cz_pow(0, 1, 1);
    CHECK(fidelity_up_to_phase(c, want) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(stabilizer_check(pair));
}

TEST_CASE("stabilizer check over weighted paths and a triangle") {
    PrimeDim d5(5), d3(3);
    for (int p = 1; p < 5; ++p)
        for (int q = 1; q < 5; ++q) {
            GraphLikeState g(d5);
            for (int v : {0, 1, 2}) g.add_vertex(v);
            g.add_edge(0, 1, p);
            g.add_edge(1, 2, q);
            CHECK(stabilizer_check(g));
        }

    GraphLikeState tri(d3);
    for (int v : {0, 1, 2}) tri.add_vertex(v);
    tri.add_edge(0, 1, 1);
    tri.add_edge(1, 2, 2);
    tri.add_edge(0, 2, 1);
    CHECK(stabilizer_check(tri));

    // corrupted weight checked against the honest state must fail
    GraphLikeState bad(d3);
    for (int v : {0, 1, 2}) bad.add_vertex(v);
    bad.add_edge(0, 1, 1);
    bad.add_edge(1, 2, 2);
    GraphLikeState good = bad;
    bad.adj[1][2] = 1;
    bad.adj[2][1] = 1;
    std::string diag;
    CHECK(stabilizer_check(good));
    CHECK_FALSE(stabilizer_check_state(bad, good.to_statevector(), 1e-10, &diag));
    CHECK(!diag.empty());

    GraphLikeState framed(d3);
    framed.add_vertex(0);
    framed.frame.at(0).append_diag(3, 1, 0);
    CHECK_THROWS_AS(stabilizer_check(framed), std::invalid_argument);
}

TEST_CASE("rule a: Z measurement removes the vertex and leaves Z frames") {
    PrimeDim d3(3);
    GraphLikeState g(d3);
    for (int v : {0, 1, 2}) g.add_vertex(v);
    g.add_edge(0, 1, 1);
    g.add_edge(1, 2, 1);

    GraphLikeState h = g;
    h.measure_z(1, 0);
    CHECK(h.num_edges() == 0);
    CHECK(h.frames_trivial());

    h = g;
    h.measure_z(1, 1);
    CHECK(h.num_edges() == 0);
    CHECK(h.frame.at(0).lin == 1);
    CHECK(h.frame.at(2).lin == 1);

    for (int m = 0; m < 3; ++m) {
        GraphLikeState after = g;
        after.measure_z(1, m);
        check_rule_oracle(g, after, {{1, basis_computational(d3), m}});
    }

    CHECK_THROWS_AS(h.measure_z(1, 0), std::invalid_argument);  // already gone
}

TEST_CASE("rule b: X pair merges left onto right") {
    PrimeDim d3(3);
    // chain x(3) - a(0) - b(1) - c(2), all weights 1
    GraphLikeState g(d3);
    for (int v : {0, 1, 2, 3}) g.add_vertex(v);
    g.add_edge(3, 0, 1);
    g.add_edge(0, 1, 1);
    g.add_edge(1, 2, 1);

    GraphLikeState h = g;
    h.measure_x_pair(0, 1, 0, 0);
    CHECK(h.weight(3, 2) == 2);  // -1 mod 3
    CHECK(h.num_vertices() == 2);

    Basis fx = basis_fourier(d3);
    for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n) {
            GraphLikeState after = g;
            after.measure_x_pair(0, 1, m, n);
            check_rule_oracle(g, after, {{0, fx, m}, {1, fx, n}});
        }

    // degree precondition
    GraphLikeState bad = g;
    bad.add_edge(1, 3, 1);
    CHECK_THROWS_AS(bad.measure_x_pair(0, 1, 0, 0), std::invalid_argument);
}

TEST_CASE("rule b: isolated segment leaves only frames") {
    PrimeDim d3(3);
    GraphLikeState g(d3);
    for (int v : {0, 1, 2}) g.add_vertex(v);
    g.add_edge(0, 1, 2);
    g.add_edge(1, 2, 1);
    Basis fx = basis_fourier(d3);
    for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n) {
            GraphLikeState after = g;
            after.measure_x_pair(0, 1, m, n);
            CHECK(after.num_vertices() == 1);
            CHECK(after.num_edges() == 0);
            check_rule_oracle(g, after, {{0, fx, m}, {1, fx, n}});
        }
}

TEST_CASE("rule c: ZX^k entangles or disentangles the two neighbors") {
    PrimeDim d3(3);
    // a(0) - v(1) - c(2), p = q = 1, no a-c edge
    GraphLikeState g(d3);
    for (int v : {0, 1, 2}) g.add_vertex(v);
    g.add_edge(0, 1, 1);
    g.add_edge(1, 2, 1);

    int k = mod_d(-mod_inverse(1, 3) * mod_inverse(1, 3), 3);  // k = -p^{-1}q^{-1} = 2
    GraphLikeState h = g;
    h.measure_zxk(1, k, 0);
    CHECK(h.weight(0, 2) == 1);  // CZ created

    // with an existing a-c edge of weight r, k = r p^{-1} q^{-1} disentangles
    GraphLikeState g2 = g;
    g2.add_edge(0, 2, 2);
    GraphLikeState h2 = g2;
    h2.measure_zxk(1, 2, 0);
    CHECK(h2.weight(0, 2) == 0);

    Basis b1 = basis_zxk(d3, 1), b2 = basis_zxk(d3, 2);
    for (int kk = 1; kk <= 2; ++kk)
        for (int m = 0; m < 3; ++m) {
            GraphLikeState after = g2;
            after.measure_zxk(1, kk, m);
            check_rule_oracle(g2, after, {{1, kk == 1 ? b1 : b2, m}});
        }

    CHECK_THROWS_AS(g.measure_zxk(1, 0, 0), std::invalid_argument);
    GraphLikeState gq(PrimeDim(2));
    gq.add_vertex(0);
    CHECK_THROWS_AS(gq.measure_zxk(0, 1, 0), std::invalid_argument);
}

TEST_CASE("junction rule: disentangle a-c, entangle both with the spare leg") {
    PrimeDim d5(5);
    int p = 2, q = 3, s = 4, r = 1;
    GraphLikeState g(d5);
    for (int v : {0, 1, 2, 3}) g.add_vertex(v);  // a=0, b=1, c=2, leg=3
    g.add_edge(0, 1, p);
    g.add_edge(1, 2, q);
    g.add_edge(1, 3, s);
    g.add_edge(0, 2, r);

    int k = mod_d(static_cast<long long>(r) * mod_inverse(p, 5) * mod_inverse(q, 5), 5);
    GraphLikeState h = g;
    h.measure_zxk(1, k, 0);
    CHECK(h.weight(0, 2) == 0);
    CHECK(h.weight(0, 3) == mod_d(-static_cast<long long>(k) * p * s, 5));
    CHECK(h.weight(2, 3) == mod_d(-static_cast<long long>(k) * q * s, 5));

    for (int m = 0; m < 5; ++m) {
        GraphLikeState after = g;
        after.measure_zxk(1, k, m);
        check_rule_oracle(g, after, {{1, basis_zxk(d5, k), m}});
    }
}

TEST_CASE("rule-oracle equivalence on random host graphs") {
    for (int dd : {3, 5}) {
        PrimeDim dim(dd);
        SplitMix64 rng(0xABCD + dd);
        int done_a = 0, done_b = 0, done_c = 0;
        while (done_a < 12 || done_b < 12 || done_c < 12) {
            GraphLikeState g = random_graph(dim, rng);
            auto vs = g.vertices();

            if (done_a < 12) {
                int v = vs[rng.next_below(static_cast<int>(vs.size()))];
                for (int m = 0; m < dd; ++m) {
                    GraphLikeState after = g;
                    after.measure_z(v, m);
                    check_rule_oracle(g, after, {{v, basis_computational(dim), m}});
                }
                ++done_a;
            }

            if (done_b < 12) {
                int a = -1, b = -1;
                for (int v : vs)
                    if (g.degree(v) == 2) {
                        b = v;
                        a = g.adj.at(v).begin()->first;
                        break;
                    }
                if (b >= 0) {
                    Basis fx = basis_fourier(dim);
                    for (int m = 0; m < dd; ++m)
                        for (int n = 0; n < dd; ++n) {
                            GraphLikeState after = g;
                            after.measure_x_pair(a, b, m, n);
                            check_rule_oracle(g, after, {{a, fx, m}, {b, fx, n}});
                        }
                    ++done_b;
                }
            }

            if (done_c < 12) {
                int v = vs[rng.next_below(static_cast<int>(vs.size()))];
                int k = 1 + rng.next_below(dd - 1);
                Basis bz = basis_zxk(dim, k);
                for (int m = 0; m < dd; ++m) {
                    GraphLikeState after = g;
                    after.measure_zxk(v, k, m);
                    check_rule_oracle(g, after, {{v, bz, m}});
                }
                ++done_c;
            }
        }
    }
}

TEST_CASE("f(R) recursion: gauss-sum ratio is the quadratic phase") {
    for (int dd : {3, 5, 7}) {
        PrimeDim dim(dd);
        for (int k = 1; k < dd; ++k) {
            auto alpha = zxk_alpha(dim, k);
            auto f = [&](int R) {
                Cx acc(0, 0);
                for (int l = 0; l < dd; ++l)
                    acc += omega_complex(mod_d(-alpha[l] + static_cast<long long>(l) * R, dd), dd);
                return acc / std::sqrt(static_cast<double>(dd));
            };
            Cx f0 = f(0);
            for (int R = 0; R < 2 * dd; ++R) {
                long long e = -half_times(k, dim) * static_cast<long long>(R) * (R - 1);
                Cx want = omega_complex(mod_d(e, dd), dd) * f0;
                CHECK(std::abs(f(R) - want) < 1e-10);
            }
        }
    }
}

TEST_CASE("Z measurements on disjoint vertices commute symbolically") {
    PrimeDim d5(5);
    SplitMix64 rng(777);
    for (int trial = 0; trial < 20; ++trial) {
        GraphLikeState g = random_graph(d5, rng);
        auto vs = g.vertices();
        if (vs.size() < 2) continue;
        int a = vs[0], b = vs[1];
        int ma = rng.next_below(5), mb = rng.next_below(5);
        GraphLikeState g1 = g, g2 = g;
        g1.measure_z(a, ma);
        g1.measure_z(b, mb);
        g2.measure_z(b, mb);
        g2.measure_z(a, ma);
        CHECK(same_graph(g1, g2));
    }
}

TEST_CASE("edge weights stay in 1..d-1 under random rule applications") {
    PrimeDim d5(5);
    SplitMix64 rng(31337);
    for (int trial = 0; trial < 30; ++trial) {
        GraphLikeState g = random_graph(d5, rng);
        while (g.num_vertices() > 1) {
            auto vs = g.vertices();
            int v = vs[rng.next_below(static_cast<int>(vs.size()))];
            if (rng.next_below(2) == 0)
                g.measure_z(v, rng.next_below(5));
            else
                g.measure_zxk(v, 1 + rng.next_below(4), rng.next_below(5));
            for (const auto& [a, nbs] : g.adj)
                for (const auto& [b, w] : nbs) {
                    CHECK(w >= 1);
                    CHECK(w <= 4);
                }
        }
    }
}

TEST_CASE("frames compose associatively and multiplicatively") {
    PrimeDim d5(5);
    SplitMix64 rng(2024);
    auto random_frame = [&] {
        LocalFrame f;
        f.z_pow = rng.next_below(5);
        f.x_pow = rng.next_below(5);
        f.perm = 1 + rng.next_below(4);
        f.lin = rng.next_below(5);
        f.quad = rng.next_below(5);
        f.phase = rng.next_below(5);
        return f;
    };
    for (int trial = 0; trial < 25; ++trial) {
        LocalFrame a = random_frame(), b = random_frame(), c = random_frame();
        CMat want = matmul(a.realize(d5), b.realize(d5));
        CMat got = compose(d5, a, b).realize(d5);
        CHECK(max_abs_diff(want, got) < 1e-10);
        CMat w3 = matmul(want, c.realize(d5));
        CMat g3a = compose(d5, compose(d5, a, b), c).realize(d5);
        CMat g3b = compose(d5, a, compose(d5, b, c)).realize(d5);
        CHECK(max_abs_diff(w3, g3a) < 1e-10);
        CHECK(max_abs_diff(w3, g3b) < 1e-10);
    }
}

TEST_CASE("graph json round-trip") {
    PrimeDim d3(3);
    SplitMix64 rng(55);
    GraphLikeState g = random_graph(d3, rng);
    g.measure_zxk(g.vertices()[0], 1, 2);  // generate some frames
    GraphLikeState h = graph_from_json(graph_to_json(g));
    CHECK(same_graph(g, h));
}
