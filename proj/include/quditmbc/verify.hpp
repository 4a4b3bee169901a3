#ifndef QUDITMBC_VERIFY_HPP
#define QUDITMBC_VERIFY_HPP

/*
 * Aggregated verification suites: rewrite rules against the state-vector
 * oracle, sublattice symmetry, the decorated-domain-wall operator
 * equivalence, and the gate constructions.  Each suite returns a list of
 * named checks with minimum fidelities, serializable as one JSON report.
 */

#include "cluster_gates.hpp"
#include "ddw.hpp"
#include "lattice.hpp"
#include "reduce.hpp"

namespace qmbc {

struct SuiteCheck {
    std::string name;
    double min_fidelity = 0.0;
    bool pass = false;
};

struct SuiteResult {
    std::string suite;
    int d = 0;
    bool pass = true;
    std::vector<SuiteCheck> checks;

    void add(const std::string& name, double min_fid, double tol) {
        bool ok = min_fid >= 1.0 - tol;
        checks.push_back({name, min_fid, ok});
        pass = pass && ok;
    }

    void add_report(const VerifyReport& rep) {
        checks.push_back({rep.name, rep.min_fidelity, rep.pass});
        pass = pass && rep.pass;
    }

    const SuiteCheck* first_failure() const {
        for (const auto& c : checks)
            if (!c.pass) return &c;
        return nullptr;
    }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : checks)
            arr.push_back({{"name", c.name}, {"min_fidelity", c.min_fidelity}, {"pass", c.pass}});
        return {{"suite", suite}, {"d", d}, {"pass", pass}, {"checks", arr}};
    }
};

namespace detail {

inline GraphLikeState random_host_graph(const PrimeDim& dim, SplitMix64& rng,
                                        int max_vertices = 6) {
    int n = 2 + rng.next_below(max_vertices - 1);
    GraphLikeState g(dim);
    for (int v = 0; v < n; ++v) g.add_vertex(v);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (rng.next_double() < 0.5) g.add_edge(a, b, 1 + rng.next_below(dim.d - 1));
    return g;
}

// forced-outcome oracle for one rule application: minimum fidelity between
// the symbolic result and the measured state over the given plans
inline double rule_oracle_min_fidelity(
    const GraphLikeState& before,
    const std::vector<std::pair<GraphLikeState, std::vector<std::tuple<int, Basis, int>>>>&
        cases) {
    StateVector psi0 = before.to_statevector();
    double min_f = 1.0;
    for (const auto& [after, plan] : cases) {
        StateVector psi = psi0;
        std::vector<int> live = before.site_order();
        for (const auto& [v, basis, outcome] : plan) {
            auto it = std::find(live.begin(), live.end(), v);
            int site = static_cast<int>(it - live.begin());
            measure_remove(psi, site, basis, outcome);
            live.erase(it);
        }
        min_f = std::min(min_f, fidelity_up_to_phase(psi, after.to_statevector()));
    }
    return min_f;
}

inline std::vector<Cx> random_state(const PrimeDim& dim, SplitMix64& rng, int qudits = 1) {
    std::size_t n = pow_size(dim.d, qudits);
    std::vector<Cx> v(n);
    double norm = 0;
    for (auto& a : v) {
        a = Cx(rng.next_double() - 0.5, rng.next_double() - 0.5);
        norm += std::norm(a);
    }
    norm = std::sqrt(norm);
    for (auto& a : v) a /= norm;
    return v;
}

}  // namespace detail

// rules a/b/c and the junction rule against the brute-force oracle
inline SuiteResult run_suite_rules(const PrimeDim& dim, uint64_t seed, int hosts = 40,
                                   double tol = 1e-9) {
    if (!dim.odd) throw std::invalid_argument("rules suite requires odd prime d");
    SuiteResult res{"rules", dim.d};
    SplitMix64 rng(seed);
    double fa = 1.0, fb = 1.0, fc = 1.0, fj = 1.0;
    int na = 0, nb = 0, nc = 0;
    Basis comp = basis_computational(dim), fx = basis_fourier(dim);
    while (na < hosts || nb < hosts || nc < hosts) {
        GraphLikeState g = detail::random_host_graph(dim, rng);
        auto vs = g.vertices();
        if (na < hosts) {
            int v = vs[rng.next_below(static_cast<int>(vs.size()))];
            std::vector<std::pair<GraphLikeState, std::vector<std::tuple<int, Basis, int>>>> cs;
            for (int m = 0; m < dim.d; ++m) {
                GraphLikeState h = g;
                h.measure_z(v, m);
                cs.push_back({std::move(h), {{v, comp, m}}});
            }
            fa = std::min(fa, detail::rule_oracle_min_fidelity(g, cs));
            ++na;
        }
        if (nb < hosts) {
            int a = -1, b = -1;
            for (int v : vs)
                if (g.degree(v) == 2) {
                    b = v;
                    a = g.adj.at(v).begin()->first;
                    break;
                }
            if (b >= 0) {
                std::vector<std::pair<GraphLikeState, std::vector<std::tuple<int, Basis, int>>>> cs;
                for (int m = 0; m < dim.d; ++m)
                    for (int n = 0; n < dim.d; ++n) {
                        GraphLikeState h = g;
                        h.measure_x_pair(a, b, m, n);
                        cs.push_back({std::move(h), {{a, fx, m}, {b, fx, n}}});
                    }
                fb = std::min(fb, detail::rule_oracle_min_fidelity(g, cs));
                ++nb;
            }
        }
        if (nc < hosts) {
            int v = vs[rng.next_below(static_cast<int>(vs.size()))];
            int k = 1 + rng.next_below(dim.d - 1);
            Basis bz = basis_zxk(dim, k);
            std::vector<std::pair<GraphLikeState, std::vector<std::tuple<int, Basis, int>>>> cs;
            for (int m = 0; m < dim.d; ++m) {
                GraphLikeState h = g;
                h.measure_zxk(v, k, m);
                cs.push_back({std::move(h), {{v, bz, m}}});
            }
            fc = std::min(fc, detail::rule_oracle_min_fidelity(g, cs));
            ++nc;
        }
    }
    // junction hosts: b with three neighbors, existing a-c edge, k chosen
    // to disentangle a-c while hooking both onto the spare leg
    for (int trial = 0; trial < hosts / 2 + 1; ++trial) {
        int p = 1 + rng.next_below(dim.d - 1), q = 1 + rng.next_below(dim.d - 1);
        int s = 1 + rng.next_below(dim.d - 1), r = 1 + rng.next_below(dim.d - 1);
        GraphLikeState g(dim);
        for (int v : {0, 1, 2, 3}) g.add_vertex(v);
        g.add_edge(0, 1, p);
        g.add_edge(1, 2, q);
        g.add_edge(1, 3, s);
        g.add_edge(0, 2, r);
        int k = mod_d(static_cast<long long>(r) * mod_inverse(p, dim.d) % dim.d *
                          mod_inverse(q, dim.d),
                      dim.d);
        Basis bz = basis_zxk(dim, k);
        std::vector<std::pair<GraphLikeState, std::vector<std::tuple<int, Basis, int>>>> cs;
        for (int m = 0; m < dim.d; ++m) {
            GraphLikeState h = g;
            h.measure_zxk(1, k, m);
            if (h.weight(0, 2) != 0) fj = 0.0;
            cs.push_back({std::move(h), {{1, bz, m}}});
        }
        fj = std::min(fj, detail::rule_oracle_min_fidelity(g, cs));
    }
    res.add("rule_a_z", fa, tol);
    res.add("rule_b_x_pair", fb, tol);
    res.add("rule_c_zxk", fc, tol);
    res.add("junction_rule", fj, tol);
    return res;
}

// X^m color-class symmetry of the periodic resource states
inline SuiteResult run_suite_symmetry(const PrimeDim& dim, int k, std::size_t cap = 2000000) {
    SuiteResult res{"symmetry", dim.d};
    auto tri = build_lattice(LatticeKind::Triangular, 3, 3, Boundary::Periodic);
    auto st = build_spt_state(tri, dim, k, cap);
    double f = 1.0;
    for (int color = 0; color < 3; ++color)
        for (int m = 0; m < dim.d; ++m) f = std::min(f, verify_symmetry(st, tri, dim, color, m));
    res.add("triangular_3x3_Xm", f, 1e-10);
    auto uj = build_lattice(LatticeKind::UnionJack, 2, 2, Boundary::Periodic);
    auto su = build_spt_state(uj, dim, k, cap);
    f = 1.0;
    for (int color = 0; color < 3; ++color)
        for (int m = 0; m < dim.d; ++m) f = std::min(f, verify_symmetry(su, uj, dim, color, m));
    res.add("union_jack_2x2_Xm", f, 1e-10);
    return res;
}

// per-face controlled-wall assembly against the triangle product
inline SuiteResult run_suite_ddw(const PrimeDim& dim, int k) {
    SuiteResult res{"ddw", dim.d};
    auto one = build_ddw_patch({{0, 0}});
    res.add("one_face", ddw_equivalence(one, dim, k), 1e-10);
    auto two = build_ddw_patch({{0, 0}, {1, 0}});
    res.add("two_faces", ddw_equivalence(two, dim, k), 1e-10);
    return res;
}

// gate constructions, one randomized weight draw per family
inline SuiteResult run_suite_gates(const PrimeDim& dim, uint64_t seed) {
    if (!dim.odd) throw std::invalid_argument("gates suite requires odd prime d");
    SuiteResult res{"gates", dim.d};
    SplitMix64 rng(seed);
    auto rw = [&] { return 1 + rng.next_below(dim.d - 1); };
    auto input = detail::random_state(dim, rng);

    res.add_report(teleport(dim, rw(), input));
    res.add_report(identity_pattern(dim, rw(), rw(), input));

    std::vector<long long> m(dim.d);
    for (auto& x : m) x = rng.next_below(5) - 2;
    res.add_report(
        realize_xalpha(dim, {rw(), rw(), rw(), rw()}, rng.next_double(), m, input));
    res.add_report(realize_clifford(dim, CliffordFamily::U1n, 1 + rng.next_below(2),
                                    {rw(), rw(), rw(), rw()}, input));
    res.add_report(realize_clifford(dim, CliffordFamily::W, 0, {rw(), rw(), rw(), rw()}, input));
    res.add_report(realize_clifford(dim, CliffordFamily::Un1, 1 + rng.next_below(2),
                                    {rw(), rw(), rw(), rw(), rw()}, input));
    auto input2 = detail::random_state(dim, rng, 2);
    res.add_report(realize_imprimitive(dim, {rw(), rw(), rw(), rw(), rw()}, input2));
    return res;
}

}  // namespace qmbc

#endif
