#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "quditmbc/reduce.hpp"

using namespace qmbc;

TEST_CASE("config_to_graph matches occupation and weights") {
    PrimeDim d3(3);
    auto lat = build_perc_honeycomb(4);
    SplitMix64 rng(1);
    auto cfg = sample_config(lat, d3, rng);
    auto g = config_to_graph(lat, cfg, d3, 2);
    for (std::size_t e = 0; e < lat.edges.size(); ++e) {
        int w = g.weight(lat.edges[e].u, lat.edges[e].v);
        if (cfg.occupied[e])
            CHECK(w == mod_d(2LL * (cfg.outcomes[lat.edges[e].plaq_a] -
                                    cfg.outcomes[lat.edges[e].plaq_b]),
                             3));
        else
            CHECK(w == 0);
    }
}

TEST_CASE("subcritical configurations are rejected") {
    PrimeDim d3(3);
    auto lat = build_perc_honeycomb(10);
    EdgeConfig cfg;
    cfg.outcomes.assign(lat.n_plaquettes, 0);  // nothing occupied
    cfg.occupied.assign(lat.edges.size(), 0);
    auto r = reduce_to_cluster(lat, cfg, d3, 1, 2, 42);
    CHECK_FALSE(r.ok);
    CHECK(r.error == "subcritical instance");
}

TEST_CASE("reduce d=3 L=10 to a 2x2 cluster-like grid") {
    PrimeDim d3(3);
    auto lat = build_perc_honeycomb(10);
    int ok = 0, audited = 0;
    double min_fid = 1.0;
    for (uint64_t seed = 0; seed < 6; ++seed) {
        SplitMix64 rng = make_stream(4000, seed);
        auto cfg = sample_config(lat, d3, rng);
        auto r = reduce_to_cluster(lat, cfg, d3, 1, 2, seed);
        if (!r.ok) continue;
        ++ok;
        CHECK(r.crossings.size() == 2);

        // final graph: strip frames and check the grid stabilizers
        GraphLikeState stripped(d3);
        for (int v : r.final_graph.vertices()) stripped.add_vertex(v);
        for (const auto& [v, nbs] : r.final_graph.adj)
            for (const auto& [u, w] : nbs)
                if (v < u) stripped.add_edge(v, u, w);
        CHECK(stripped.num_vertices() == 4);
        CHECK(stripped.num_edges() == 4);
        CHECK(stabilizer_check(stripped));

        // every schedule step passes the state-vector excerpt oracle
        auto audit = audit_schedule(r.initial_graph, r.schedule, 10);
        audited += audit.checked;
        min_fid = std::min(min_fid, audit.min_fidelity);
        CHECK(audit.min_fidelity >= 1.0 - 1e-9);

        // determinism
        auto r2 = reduce_to_cluster(lat, cfg, d3, 1, 2, seed);
        CHECK(r2.ok);
        CHECK(r2.schedule.size() == r.schedule.size());
        CHECK(same_graph(r2.final_graph, r.final_graph));
    }
    CHECK(ok >= 5);       // supercritical regime: near-certain success
    CHECK(audited > 100);  // the oracle actually ran
    MESSAGE("reduced ", ok, "/6 instances, audited ", audited, " steps, min fidelity ", min_fid);
}

TEST_CASE("reduce d=5 L=16 to a 3x3 grid exercises the crossing merges") {
    PrimeDim d5(5);
    auto lat = build_perc_honeycomb(16);
    int ok = 0;
    bool merged = false;
    for (uint64_t seed = 0; seed < 8 && ok < 3; ++seed) {
        SplitMix64 rng = make_stream(5100, seed);
        auto cfg = sample_config(lat, d5, rng);
        auto r = reduce_to_cluster(lat, cfg, d5, 2, 3, seed);
        if (!r.ok) continue;
        ++ok;
        GraphLikeState stripped(d5);
        for (int v : r.final_graph.vertices()) stripped.add_vertex(v);
        for (const auto& [v, nbs] : r.final_graph.adj)
            for (const auto& [u, w] : nbs)
                if (v < u) stripped.add_edge(v, u, w);
        CHECK(stripped.num_vertices() == 9);
        CHECK(stripped.num_edges() == 12);
        CHECK(stabilizer_check(stripped, 1e-10, nullptr, 2000000));
        for (const auto& s : r.schedule)
            if (s.op == ScheduleStep::Op::XPair) merged = true;
        auto audit = audit_schedule(r.initial_graph, r.schedule, 10);
        CHECK(audit.min_fidelity >= 1.0 - 1e-9);
    }
    CHECK(ok >= 2);
    CHECK(merged);
}

TEST_CASE("schedule json") {
    PrimeDim d3(3);
    auto lat = build_perc_honeycomb(10);
    SplitMix64 rng = make_stream(4000, 0);
    auto cfg = sample_config(lat, d3, rng);
    auto r = reduce_to_cluster(lat, cfg, d3, 1, 2, 0);
    auto j = schedule_to_json(r, d3, 1, 10, "honeycomb", 0);
    CHECK(j["schema"] == "quditmbc.schedule/1");
    CHECK(j["steps"].size() == r.schedule.size());
    if (r.ok) CHECK(j["final_graph"]["edges"].size() == 4);
}

TEST_CASE("square-lattice reduction also works") {
    PrimeDim d3(3);
    auto lat = build_perc_square(10);
    int ok = 0;
    for (uint64_t seed = 0; seed < 4 && ok < 2; ++seed) {
        SplitMix64 rng = make_stream(6000, seed);
        auto cfg = sample_config(lat, d3, rng);
        auto r = reduce_to_cluster(lat, cfg, d3, 1, 2, seed);
        if (!r.ok) continue;
        ++ok;
        auto audit = audit_schedule(r.initial_graph, r.schedule, 10);
        CHECK(audit.min_fidelity >= 1.0 - 1e-9);
    }
    CHECK(ok >= 1);
}
