#ifndef QUDITMBC_GRAPHLIKE_HPP
#define QUDITMBC_GRAPHLIKE_HPP

/*
 * Symbolic qudit graph-like states
 *
 *   |g> = (prod_v U_v) (prod_{(a,b)} CZ^{r_(a,b)}) |+...+>
 *
 * with edge weights r in {1..d-1} and a per-vertex local frame U_v that
 * accumulates the corrections produced by the measurement rules:
 *
 *   measure_z      Z measurement of v, outcome m: delete v, every neighbor
 *                  (weight w) picks up the diagonal w^{m w j}.
 *   measure_x_pair X measurements of (a,b), outcomes (m,n), where b has
 *                  exactly the neighbors {a,c}: delete a and b, re-attach
 *                  a's remaining edges to c with weight -w p^{-1} q.
 *   measure_zxk    ZX^k measurement of v, outcome m: delete v, every pair
 *                  of neighbors (x,y) gains edge weight -k w_x w_y, every
 *                  neighbor x gains the diagonal
 *                  w^{(m + k/2) w_x j - (k/2) w_x^2 j^2},  1/2 = 2^{-1} mod d.
 *
 * The rules act on the frame-free graph; an exported schedule must
 * conjugate each later basis by the frame sitting on the measured vertex.
 */

#include <map>
#include <set>

#include "statevector.hpp"

#include "json.hpp"

namespace qmbc {

// local correction U = w^{phase} Z^{z_pow} X^{x_pow} S_{perm} D, with
// D = diag_j w^{lin j + quad j^2} applied first
struct LocalFrame {
    int z_pow = 0;
    int x_pow = 0;
    int perm = 1;
    int lin = 0;
    int quad = 0;
    int phase = 0;

    bool is_identity() const {
        return z_pow == 0 && x_pow == 0 && perm == 1 && lin == 0 && quad == 0 && phase == 0;
    }

    // multiply a diagonal correction on the right (next to the graph state)
    void append_diag(int d, long long lin_add, long long quad_add, long long phase_add = 0) {
        lin = mod_d(lin + lin_add, d);
        quad = mod_d(quad + quad_add, d);
        phase = mod_d(phase + phase_add, d);
    }

    CMat realize(const PrimeDim& dim) const {
        CMat u = diag_poly(dim, lin, quad);
        if (perm != 1) u = matmul(perm_s(dim, perm), u);
        if (x_pow != 0) u = matmul(x_pow_mat(dim), u);
        if (z_pow != 0) u = matmul(z_pow_mat(dim), u);
        if (phase != 0) u = scale(u, omega_complex(phase, dim.d));
        return u;
    }

   private:
    CMat x_pow_mat(const PrimeDim& dim) const { return qmbc::x_pow(dim, x_pow); }
    CMat z_pow_mat(const PrimeDim& dim) const { return qmbc::z_pow(dim, z_pow); }
};

// frame of the product A*B, renormalized to canonical factor order
inline LocalFrame compose(const PrimeDim& dim, const LocalFrame& a, const LocalFrame& b) {
    int d = dim.d;
    LocalFrame r;
    // start from A's factors, then push B's factors in from the right:
    //   A B = w^pA Z^zA X^xA S_cA D_A  w^pB Z^zB X^xB S_cB D_B
    long long phase = a.phase + b.phase;
    long long z = a.z_pow, x = a.x_pow;
    long long c = a.perm;
    long long lin = a.lin, quad = a.quad;
    // D_A  Z^zB -> Z^zB D_A  (both diagonal)
    // S_cA Z^zB -> Z^{zB cA^{-1}} S_cA
    long long cinv = mod_inverse(static_cast<int>(c), d);
    long long zb = mod_d(static_cast<long long>(b.z_pow) * cinv, d);
    // X^xA Z^zb' -> w^{zb' xA} Z^zb' X^xA
    phase += zb * x;
    z = z + zb;
    // D_A X^xB -> X^xB D'_A with D'(j) = D(j - xB)
    long long xb = b.x_pow;
    phase += quad * xb * xb - lin * xb;
    lin = lin - 2 * quad * xb;
    // S_cA X^xb -> X^{xb cA} S_cA
    x = x + mod_d(xb * c, d);
    // D'_A S_cB -> S_cB D''_A with D''(j) = D'(cB j)
    long long cb = mod_d(b.perm, d);
    lin = mod_d(lin * cb, d);
    quad = mod_d(quad * cb * cb, d);
    c = mod_d(c * cb, d);
    // remaining D''_A D_B: exponents add
    lin += b.lin;
    quad += b.quad;
    r.phase = mod_d(phase, d);
    r.z_pow = mod_d(z, d);
    r.x_pow = mod_d(x, d);
    r.perm = static_cast<int>(c);
    r.lin = mod_d(lin, d);
    r.quad = mod_d(quad, d);
    return r;
}

struct GraphLikeState {
    PrimeDim dim;
    std::map<int, std::map<int, int>> adj;  // vertex -> neighbor -> weight in 1..d-1
    std::map<int, LocalFrame> frame;

    explicit GraphLikeState(const PrimeDim& d) : dim(d) {}

    int d() const { return dim.d; }

    bool has_vertex(int v) const { return adj.count(v) != 0; }

    void add_vertex(int v) {
        if (!has_vertex(v)) {
            adj[v];
            frame[v];
        }
    }

    void require_vertex(int v) const {
        if (!has_vertex(v)) throw std::invalid_argument("graph: no such vertex");
    }

    int weight(int a, int b) const {
        auto it = adj.find(a);
        if (it == adj.end()) return 0;
        auto jt = it->second.find(b);
        return jt == it->second.end() ? 0 : jt->second;
    }

    // accumulate weight mod d; weight 0 is never stored
    void add_edge(int a, int b, long long w) {
        require_vertex(a);
        require_vertex(b);
        if (a == b) throw std::invalid_argument("graph: self loop");
        int nw = mod_d(weight(a, b) + w, dim.d);
        if (nw == 0) {
            adj[a].erase(b);
            adj[b].erase(a);
        } else {
            adj[a][b] = nw;
            adj[b][a] = nw;
        }
    }

    int degree(int v) const {
        require_vertex(v);
        return static_cast<int>(adj.at(v).size());
    }

    void remove_vertex(int v) {
        require_vertex(v);
        for (const auto& [nb, w] : adj.at(v)) adj.at(nb).erase(v);
        adj.erase(v);
        frame.erase(v);
    }

    std::vector<int> vertices() const {
        std::vector<int> out;
        out.reserve(adj.size());
        for (const auto& [v, nbs] : adj) out.push_back(v);
        return out;
    }

    std::size_t num_vertices() const { return adj.size(); }

    std::size_t num_edges() const {
        std::size_t e = 0;
        for (const auto& [v, nbs] : adj) e += nbs.size();
        return e / 2;
    }

    bool frames_trivial() const {
        for (const auto& [v, f] : frame)
            if (!f.is_identity()) return false;
        return true;
    }

    // Z measurement of v with outcome m
    void measure_z(int v, int m) {
        require_vertex(v);
        for (const auto& [x, w] : adj.at(v))
            frame.at(x).append_diag(dim.d, static_cast<long long>(m) * w, 0);
        remove_vertex(v);
    }

    // X measurements of a and b with outcomes m and n; b must have exactly
    // the neighbors {a, c}.  a's remaining edges re-attach to c.
    void measure_x_pair(int a, int b, int m, int n) {
        require_vertex(a);
        require_vertex(b);
        if (degree(b) != 2 || weight(a, b) == 0)
            throw std::invalid_argument("measure_x_pair: b must have exactly neighbors {a, c}");
        int c = -1;
        for (const auto& [nb, w] : adj.at(b))
            if (nb != a) c = nb;
        if (c < 0) throw std::invalid_argument("measure_x_pair: b must have a second neighbor");
        int p = weight(a, b);
        int q = weight(b, c);
        long long pinv = mod_inverse(p, dim.d);
        // substitution j_a = p^{-1}(n - q j_c)
        std::vector<std::pair<int, int>> others(adj.at(a).begin(), adj.at(a).end());
        for (const auto& [y, w] : others) {
            if (y == b) continue;
            if (y == c) {
                frame.at(c).append_diag(dim.d, w * pinv % dim.d * n, -(w * pinv % dim.d) * q);
            } else {
                add_edge(y, c, -(static_cast<long long>(w) * pinv % dim.d) * q);
                frame.at(y).append_diag(dim.d, static_cast<long long>(w) * pinv * n, 0);
            }
        }
        frame.at(c).append_diag(dim.d, static_cast<long long>(m) * pinv * q, 0,
                                -static_cast<long long>(m) * pinv * n);
        remove_vertex(a);
        remove_vertex(b);
    }

    // ZX^k measurement of v with outcome m (odd d, k nonzero)
    void measure_zxk(int v, int k, int m) {
        require_vertex(v);
        k = mod_d(k, dim.d);
        if (k == 0) throw std::invalid_argument("measure_zxk: k must be nonzero mod d");
        if (!dim.odd) throw std::invalid_argument("measure_zxk: requires odd d");
        long long h = half_times(k, dim);
        std::vector<std::pair<int, int>> nbs(adj.at(v).begin(), adj.at(v).end());
        for (std::size_t i = 0; i < nbs.size(); ++i)
            for (std::size_t j = i + 1; j < nbs.size(); ++j)
                add_edge(nbs[i].first, nbs[j].first,
                         -static_cast<long long>(k) * nbs[i].second % dim.d * nbs[j].second);
        for (const auto& [x, w] : nbs)
            frame.at(x).append_diag(dim.d, (m + h) * w, -(h * w % dim.d) * w);
        remove_vertex(v);
    }

    // sorted vertex ids; vertex order = site order in to_statevector
    std::vector<int> site_order() const { return vertices(); }

    StateVector to_statevector(std::size_t cap = kDefaultAmpCap) const {
        std::vector<int> order = site_order();
        std::map<int, int> site;
        for (std::size_t i = 0; i < order.size(); ++i) site[order[i]] = static_cast<int>(i);
        StateVector s = StateVector::plus_state(dim, static_cast<int>(order.size()), cap);
        for (const auto& [v, nbs] : adj)
            for (const auto& [u, w] : nbs)
                if (v < u) s.apply_cz_pow(site.at(v), site.at(u), w);
        for (const auto& [v, f] : frame) {
            if (f.is_identity()) continue;
            int st = site.at(v);
            if (f.lin || f.quad) s.apply_diag_poly(st, f.lin, f.quad);
            if (f.perm != 1) s.apply_perm(st, f.perm);
            if (f.x_pow) s.apply_x_pow(st, f.x_pow);
            if (f.z_pow) s.apply_z_pow(st, f.z_pow);
            if (f.phase) s.apply_global_phase(f.phase);
        }
        return s;
    }
};

// Check X_a^dagger (x)_b Z_b^{r_(a,b)} |psi> = |psi> for every vertex of g,
// and the Hermitian-conjugate stabilizer as well.  psi's site order must be
// g.site_order().
inline bool stabilizer_check_state(const GraphLikeState& g, const StateVector& psi,
                                   double tol = 1e-10, std::string* diagnostic = nullptr) {
    std::vector<int> order = g.site_order();
    std::map<int, int> site;
    for (std::size_t i = 0; i < order.size(); ++i) site[order[i]] = static_cast<int>(i);
    for (int v : order) {
        for (int sign : {+1, -1}) {
            StateVector t = psi;
            t.apply_x_pow(site.at(v), -sign);
            for (const auto& [u, w] : g.adj.at(v)) t.apply_z_pow(site.at(u), sign * w);
            Cx ip = psi.inner(t);
            if (std::abs(ip - Cx(1, 0)) > tol) {
                if (diagnostic)
                    *diagnostic = "stabilizer fails at vertex " + std::to_string(v) +
                                  (sign > 0 ? "" : " (conjugate)");
                return false;
            }
        }
    }
    return true;
}

// convenience form checking g against its own state vector; frames must be
// trivial so the stabilizer relation applies verbatim
inline bool stabilizer_check(const GraphLikeState& g, double tol = 1e-10,
                             std::string* diagnostic = nullptr,
                             std::size_t cap = kDefaultAmpCap) {
    if (!g.frames_trivial())
        throw std::invalid_argument("stabilizer_check: graph carries nontrivial frames");
    return stabilizer_check_state(g, g.to_statevector(cap), tol, diagnostic);
}

inline nlohmann::json frame_to_json(const LocalFrame& f) {
    return {{"z", f.z_pow}, {"x", f.x_pow},   {"perm", f.perm},
            {"lin", f.lin}, {"quad", f.quad}, {"phase", f.phase}};
}

inline LocalFrame frame_from_json(const nlohmann::json& j) {
    LocalFrame f;
    f.z_pow = j.at("z");
    f.x_pow = j.at("x");
    f.perm = j.at("perm");
    f.lin = j.at("lin");
    f.quad = j.at("quad");
    f.phase = j.at("phase");
    return f;
}

inline nlohmann::json graph_to_json(const GraphLikeState& g) {
    nlohmann::json j;
    j["schema"] = "quditmbc.graph/1";
    j["d"] = g.d();
    auto& vs = j["vertices"] = nlohmann::json::array();
    for (const auto& [v, f] : g.frame) vs.push_back({{"id", v}, {"frame", frame_to_json(f)}});
    auto& es = j["edges"] = nlohmann::json::array();
    for (const auto& [v, nbs] : g.adj)
        for (const auto& [u, w] : nbs)
            if (v < u) es.push_back({{"a", v}, {"b", u}, {"w", w}});
    return j;
}

inline GraphLikeState graph_from_json(const nlohmann::json& j) {
    GraphLikeState g{PrimeDim(j.at("d").get<int>())};
    for (const auto& v : j.at("vertices")) {
        g.add_vertex(v.at("id"));
        g.frame.at(v.at("id")) = frame_from_json(v.at("frame"));
    }
    for (const auto& e : j.at("edges")) g.add_edge(e.at("a"), e.at("b"), e.at("w").get<int>());
    return g;
}

inline bool same_graph(const GraphLikeState& a, const GraphLikeState& b) {
    return a.d() == b.d() && a.adj == b.adj && [&] {
        if (a.frame.size() != b.frame.size()) return false;
        for (const auto& [v, f] : a.frame) {
            auto it = b.frame.find(v);
            if (it == b.frame.end()) return false;
            const LocalFrame& h = it->second;
            if (f.z_pow != h.z_pow || f.x_pow != h.x_pow || f.perm != h.perm || f.lin != h.lin ||
                f.quad != h.quad || f.phase != h.phase)
                return false;
        }
        return true;
    }();
}

}  // namespace qmbc

#endif
