#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <deque>
#include <filesystem>
#include <fstream>

#include "quditmbc/percolation.hpp"

using namespace qmbc;

namespace {

// reachability oracle, independent of the union-find path
bool spans_bfs(const PercLattice& lat, const std::vector<char>& occ) {
    std::vector<std::vector<int>> adj(lat.n_vertices);
    for (std::size_t e = 0; e < lat.edges.size(); ++e)
        if (occ[e]) {
            adj[lat.edges[e].u].push_back(lat.edges[e].v);
            adj[lat.edges[e].v].push_back(lat.edges[e].u);
        }
    auto reach = [&](const std::vector<int>& from, const std::vector<int>& to) {
        std::vector<char> seen(lat.n_vertices, 0);
        std::deque<int> q(from.begin(), from.end());
        for (int v : from) seen[v] = 1;
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            for (int u : adj[v])
                if (!seen[u]) {
                    seen[u] = 1;
                    q.push_back(u);
                }
        }
        for (int v : to)
            if (seen[v]) return true;
        return false;
    };
    return reach(lat.left, lat.right) && reach(lat.top, lat.bottom);
}

}  // namespace

TEST_CASE("lattice builders produce valid junction graphs") {
    for (int L : {2, 3, 5, 8}) {
        auto h = build_perc_honeycomb(L);
        CHECK(h.n_plaquettes == L * L);
        CHECK(h.n_vertices == 2 * (L - 1) * (L - 1));
        std::vector<int> deg(h.n_vertices, 0);
        for (const auto& e : h.edges) {
            CHECK(e.u != e.v);
            CHECK(e.plaq_a != e.plaq_b);
            CHECK(e.plaq_a < h.n_plaquettes);
            CHECK(e.plaq_b < h.n_plaquettes);
            deg[e.u]++;
            deg[e.v]++;
        }
        for (int dd : deg) CHECK(dd <= 3);  // honeycomb junctions are trivalent

        auto s = build_perc_square(L);
        std::vector<int> degs(s.n_vertices, 0);
        for (const auto& e : s.edges) {
            degs[e.u]++;
            degs[e.v]++;
        }
        for (int dd : degs) CHECK(dd <= 4);
    }
    CHECK_THROWS_AS(build_perc_honeycomb(1), std::invalid_argument);
}

TEST_CASE("equal outcomes produce no edges; full occupation spans") {
    PrimeDim d3(3);
    auto lat = build_perc_honeycomb(4);
    EdgeConfig cfg;
    cfg.outcomes.assign(lat.n_plaquettes, 2);
    cfg.occupied.assign(lat.edges.size(), 0);
    for (std::size_t e = 0; e < lat.edges.size(); ++e)
        cfg.occupied[e] = cfg.outcomes[lat.edges[e].plaq_a] != cfg.outcomes[lat.edges[e].plaq_b];
    int occ = 0;
    for (char o : cfg.occupied) occ += o;
    CHECK(occ == 0);
    CHECK_FALSE(spans(lat, cfg));

    std::vector<char> full(lat.edges.size(), 1);
    CHECK(spans(lat, full));
    std::vector<char> empty(lat.edges.size(), 0);
    CHECK_FALSE(spans(lat, empty));
}

TEST_CASE("per-edge occupation approaches 1 - 1/d") {
    for (int dd : {2, 3, 5}) {
        PrimeDim dim(dd);
        auto lat = build_perc_honeycomb(4);
        SplitMix64 rng(4242 + dd);
        const int trials = 20000;
        std::size_t edge = lat.edges.size() / 2;
        int hits = 0;
        for (int t = 0; t < trials; ++t) {
            EdgeConfig cfg = sample_config(lat, dim, rng);
            hits += cfg.occupied[edge];
        }
        double want = 1.0 - 1.0 / dd;
        double sigma = std::sqrt(want * (1 - want) / trials);
        CHECK(std::abs(static_cast<double>(hits) / trials - want) < 3.5 * sigma);
    }
}

TEST_CASE("spans agrees with a BFS oracle on random configurations") {
    for (int dd : {2, 3}) {
        PrimeDim dim(dd);
        for (PercKind kind : {PercKind::Honeycomb, PercKind::Square}) {
            auto lat = build_perc_lattice(kind, 10);
            SplitMix64 rng(1000 + dd + static_cast<int>(kind));
            int agree = 0;
            for (int t = 0; t < 1000; ++t) {
                EdgeConfig cfg = sample_config(lat, dim, rng);
                bool a = spans(lat, cfg);
                bool b = spans_bfs(lat, cfg.occupied);
                if (a == b) ++agree;
            }
            CHECK(agree == 1000);
        }
    }
}

TEST_CASE("union-find Euler bookkeeping") {
    PrimeDim d3(3);
    auto lat = build_perc_square(6);
    SplitMix64 rng(17);
    for (int t = 0; t < 50; ++t) {
        EdgeConfig cfg = sample_config(lat, d3, rng);
        UnionFind uf(lat.n_vertices);
        for (std::size_t e = 0; e < lat.edges.size(); ++e)
            if (cfg.occupied[e]) uf.unite(lat.edges[e].u, lat.edges[e].v);
        CHECK(uf.components() + uf.merges == lat.n_vertices);
    }
}

TEST_CASE("adding edges never destroys spanning") {
    PrimeDim d2(2);
    auto lat = build_perc_honeycomb(6);
    SplitMix64 rng(5150);
    for (int t = 0; t < 40; ++t) {
        EdgeConfig cfg = sample_config(lat, d2, rng);
        bool before = spans(lat, cfg);
        std::vector<char> occ = cfg.occupied;
        for (int add = 0; add < 10; ++add) {
            occ[rng.next_below(static_cast<int>(occ.size()))] = 1;
            bool after = spans(lat, occ);
            CHECK((!before || after));
            before = after;
        }
    }
}

TEST_CASE("percolation probability: determinism and thread independence") {
    PrimeDim d3(3);
    auto lat = build_perc_honeycomb(8);
    auto a = percolation_probability(lat, d3, 500, 99, 1);
    auto b = percolation_probability(lat, d3, 500, 99, 1);
    auto c = percolation_probability(lat, d3, 500, 99, 4);
    CHECK(a.prob == b.prob);
    CHECK(a.prob == c.prob);
    CHECK(a.se == doctest::Approx(std::sqrt(a.prob * (1 - a.prob) / 500)));
}

TEST_CASE("d=2 spans far less often than d=3 on the honeycomb") {
    PrimeDim d2(2), d3(3);
    auto lat = build_perc_honeycomb(16);
    auto p2 = percolation_probability(lat, d2, 400, 7);
    auto p3 = percolation_probability(lat, d3, 400, 7);
    CHECK(p3.prob > p2.prob + 0.3);
}

TEST_CASE("stability curve endpoints") {
    PrimeDim d3(3);
    auto lat = build_perc_honeycomb(8);
    auto curve = stability_curve(lat, d3, {0.0, 1.0}, 30, 10, 2718);
    CHECK(curve.size() == 2);
    CHECK(curve[1].prob == 0.0);
    // at p = 0 the protocol reduces to plain percolation over the patterns
    auto plain = percolation_probability(lat, d3, 30, 2718);
    CHECK(curve[0].prob == doctest::Approx(plain.prob).epsilon(1e-12));

    auto again = stability_curve(lat, d3, {0.0, 1.0}, 30, 10, 2718);
    CHECK(curve[0].prob == again[0].prob);

    CHECK_THROWS_AS(stability_curve(lat, d3, {1.5}, 2, 2, 1), std::invalid_argument);
}

TEST_CASE("csv output has the documented header and rows") {
    std::string path = (std::filesystem::temp_directory_path() / "qmbc_perc_test.csv").string();
    write_percolation_csv(path, {{PercKind::Honeycomb, 3, 10, 100, 7, 0.0, 0.5, 0.05},
                                 {PercKind::Square, 5, 20, 100, 7, 0.1, 0.75, 0.04}});
    std::ifstream f(path);
    std::string line;
    std::getline(f, line);
    CHECK(line.rfind("# schema=quditmbc.perc-csv/1", 0) == 0);
    std::getline(f, line);
    CHECK(line == "kind,d,L,trials,seed,delete_p,prob,stderr");
    std::getline(f, line);
    CHECK(line.rfind("honeycomb,3,10,100,7,0,0.5", 0) == 0);
    std::filesystem::remove(path);
}
