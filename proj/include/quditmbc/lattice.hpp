#ifndef QUDITMBC_LATTICE_HPP
#define QUDITMBC_LATTICE_HPP

/*
 * 3-colored triangulated lattices (triangular and Union-Jack), the CCZ^{+-k}
 * resource state built on them, the X^m sublattice symmetry check, and the
 * computational-basis measurement of the domain sublattice that leaves a
 * graph-like state on the residual lattice.
 *
 * Color 0 is the domain sublattice ("red" sites): one color class on the
 * triangular lattice, the square centers on the Union-Jack lattice.
 *
 * Periodic triangular lattices need lx = 0 mod 3 for the 3-coloring; the
 * vertical wrap is skewed by (ly mod 3) columns so any ly >= 2 colors
 * consistently.  Some small tori realize the same site triple as two
 * opposite-sign faces; those cancel and are rejected here as degenerate.
 */

#include <array>
#include <map>
#include <set>

#include "graphlike.hpp"
#include "statevector.hpp"

namespace qmbc {

enum class LatticeKind { Triangular, UnionJack };
enum class Boundary { Open, Periodic };

struct LatticeSite {
    double x = 0, y = 0;
    int color = 0;  // 0 = a (domain), 1 = b, 2 = c
};

struct LatticeTriangle {
    std::array<int, 3> sites;
    int sign;  // +1 / -1, opposite for edge-sharing triangles
};

struct ResidualFlank {
    int domain_site;
    int sign;
};

// edge of the residual (post-measurement) lattice between two non-domain
// sites, with the signed domain sites flanking it; parallel edges on tiny
// periodic lattices merge into one record with more than two flanks
struct ResidualEdge {
    int u, v;
    std::vector<ResidualFlank> flanks;
};

struct Lattice {
    LatticeKind kind = LatticeKind::Triangular;
    Boundary boundary = Boundary::Open;
    int lx = 0, ly = 0;
    std::vector<LatticeSite> sites;
    std::vector<LatticeTriangle> triangles;
    std::vector<int> domain_sites;      // ascending
    std::vector<ResidualEdge> residual;  // keyed by (min,max) site pair, ascending

    int num_sites() const { return static_cast<int>(sites.size()); }
};

namespace detail {

inline long long floor_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace detail

// fill domain_sites and residual from sites/triangles; usable on hand-built
// patches as well as the stock builders
inline void finalize_lattice(Lattice& lat) {
    lat.domain_sites.clear();
    for (int s = 0; s < lat.num_sites(); ++s)
        if (lat.sites[s].color == 0) lat.domain_sites.push_back(s);
    std::map<std::pair<int, int>, std::vector<ResidualFlank>> edges;
    for (const auto& t : lat.triangles) {
        int dom = -1;
        std::vector<int> rest;
        for (int s : t.sites) {
            if (lat.sites[s].color == 0)
                dom = s;
            else
                rest.push_back(s);
        }
        if (dom < 0 || rest.size() != 2)
            throw std::invalid_argument("finalize_lattice: triangle without exactly one domain site");
        auto key = std::minmax(rest[0], rest[1]);
        edges[{key.first, key.second}].push_back({dom, t.sign});
    }
    lat.residual.clear();
    for (auto& [key, flanks] : edges) lat.residual.push_back({key.first, key.second, flanks});
}

// structural invariants: proper 3-coloring per triangle, and edge-sharing
// triangles carry opposite signs (balanced counts on multigraph tori)
inline void validate_lattice(const Lattice& lat) {
    std::map<std::pair<int, int>, int> edge_sign_sum;
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : lat.triangles) {
        std::set<int> colors;
        std::set<int> ids;
        for (int s : t.sites) {
            if (s < 0 || s >= lat.num_sites())
                throw std::invalid_argument("validate_lattice: site out of range");
            colors.insert(lat.sites[s].color);
            ids.insert(s);
        }
        if (ids.size() != 3) throw std::invalid_argument("validate_lattice: degenerate triangle");
        if (colors != std::set<int>{0, 1, 2})
            throw std::invalid_argument("validate_lattice: triangle is not 3-colored");
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                auto key = std::minmax(t.sites[i], t.sites[j]);
                edge_sign_sum[key] += t.sign;
                edge_count[key] += 1;
            }
    }
    for (const auto& [key, cnt] : edge_count) {
        if (lat.boundary == Boundary::Periodic) {
            if (edge_sign_sum[key] != 0)
                throw std::invalid_argument("validate_lattice: unbalanced triangle signs on edge");
        } else {
            if (cnt > 2 || (cnt == 2 && edge_sign_sum[key] != 0))
                throw std::invalid_argument("validate_lattice: adjacent triangles with equal sign");
        }
    }
    // equal-site-set faces with opposite signs cancel in the state
    std::map<std::array<int, 3>, int> face_sets;
    for (const auto& t : lat.triangles) {
        std::array<int, 3> k = t.sites;
        std::sort(k.begin(), k.end());
        face_sets[k] += t.sign;
        if (face_sets[k] == 0)
            throw std::invalid_argument("validate_lattice: degenerate torus (cancelling faces)");
    }
}

namespace detail {

struct TriangularIndex {
    int lx, ly, skew;
    Boundary boundary;

    // canonical representative of (i,j) under the periodic identifications
    bool canon(long long i, long long j, int& out) const {
        if (boundary == Boundary::Periodic) {
            long long t = floor_div(j, ly);
            j -= t * ly;
            i -= t * skew;
            i %= lx;
            if (i < 0) i += lx;
        } else {
            if (i < 0 || i >= lx || j < 0 || j >= ly) return false;
        }
        out = static_cast<int>(i) * ly + static_cast<int>(j);
        return true;
    }
};

}  // namespace detail

inline Lattice build_lattice(LatticeKind kind, int lx, int ly, Boundary boundary) {
    Lattice lat;
    lat.kind = kind;
    lat.boundary = boundary;
    lat.lx = lx;
    lat.ly = ly;

    if (kind == LatticeKind::Triangular) {
        if (lx < 2 || ly < 2)
            throw std::invalid_argument("build_lattice: triangular patch needs lx, ly >= 2");
        if (boundary == Boundary::Periodic && lx % 3 != 0)
            throw std::invalid_argument(
                "build_lattice: periodic triangular lattice needs lx = 0 mod 3 for 3-coloring");
        detail::TriangularIndex idx{lx, ly, boundary == Boundary::Periodic ? ly % 3 : 0, boundary};
        lat.sites.resize(static_cast<size_t>(lx) * ly);
        for (int i = 0; i < lx; ++i)
            for (int j = 0; j < ly; ++j) {
                LatticeSite s;
                s.x = i + 0.5 * j;
                s.y = j * 0.8660254037844386;
                s.color = mod_d(i - j, 3);
                lat.sites[static_cast<size_t>(i) * ly + j] = s;
            }
        auto add_tri = [&](long long i0, long long j0, long long i1, long long j1, long long i2,
                           long long j2, int sign) {
            int a, b, c;
            if (idx.canon(i0, j0, a) && idx.canon(i1, j1, b) && idx.canon(i2, j2, c))
                lat.triangles.push_back({{a, b, c}, sign});
        };
        for (int i = 0; i < lx; ++i)
            for (int j = 0; j < ly; ++j) {
                if (boundary == Boundary::Open && (i + 1 >= lx || j + 1 >= ly)) continue;
                add_tri(i, j, i + 1, j, i, j + 1, +1);
                add_tri(i + 1, j, i, j + 1, i + 1, j + 1, -1);
            }
    } else {
        if (lx < 2 || ly < 2)
            throw std::invalid_argument("build_lattice: union-jack patch needs lx, ly >= 2");
        if (boundary == Boundary::Periodic && (lx % 2 != 0 || ly % 2 != 0))
            throw std::invalid_argument(
                "build_lattice: periodic union-jack lattice needs even lx, ly for 2-coloring");
        int cw = (boundary == Boundary::Open) ? lx + 1 : lx;  // corner columns
        int ch = (boundary == Boundary::Open) ? ly + 1 : ly;  // corner rows
        auto corner = [&](long long r, long long c) {
            if (boundary == Boundary::Periodic) {
                r = ((r % ch) + ch) % ch;
                c = ((c % cw) + cw) % cw;
            }
            return static_cast<int>(r) * cw + static_cast<int>(c);
        };
        lat.sites.resize(static_cast<size_t>(cw) * ch + static_cast<size_t>(lx) * ly);
        for (int r = 0; r < ch; ++r)
            for (int c = 0; c < cw; ++c) {
                LatticeSite s;
                s.x = c;
                s.y = r;
                s.color = 1 + mod_d(r + c, 2);
                lat.sites[corner(r, c)] = s;
            }
        int center0 = cw * ch;
        for (int r = 0; r < ly; ++r)
            for (int c = 0; c < lx; ++c) {
                LatticeSite s;
                s.x = c + 0.5;
                s.y = r + 0.5;
                s.color = 0;
                lat.sites[center0 + r * lx + c] = s;
            }
        for (int r = 0; r < ly; ++r)
            for (int c = 0; c < lx; ++c) {
                int ctr = center0 + r * lx + c;
                int tl = corner(r, c), tr = corner(r, c + 1);
                int bl = corner(r + 1, c), br = corner(r + 1, c + 1);
                int sgn = (mod_d(r + c, 2) == 0) ? +1 : -1;
                lat.triangles.push_back({{ctr, tl, tr}, sgn});        // north
                lat.triangles.push_back({{ctr, tr, br}, -sgn});       // east
                lat.triangles.push_back({{ctr, bl, br}, sgn});        // south
                lat.triangles.push_back({{ctr, tl, bl}, -sgn});       // west
            }
    }
    validate_lattice(lat);
    finalize_lattice(lat);
    return lat;
}

// two triangles sharing one residual edge: the smallest domain-measurement
// oracle patch (sites 0,1 domain; 2,3 residual)
inline Lattice build_two_plaquette_patch() {
    Lattice lat;
    lat.kind = LatticeKind::Triangular;
    lat.boundary = Boundary::Open;
    lat.lx = lat.ly = 2;
    lat.sites = {{0, 1, 0}, {1, -1, 0}, {0, 0, 1}, {1, 0, 2}};
    lat.triangles = {{{0, 2, 3}, +1}, {{1, 2, 3}, -1}};
    validate_lattice(lat);
    finalize_lattice(lat);
    return lat;
}

// three plaquettes around one junction vertex (7 sites, 3 domain): the
// minimal host where zero, two or three residual edges can appear
inline Lattice build_junction_patch() {
    Lattice lat;
    lat.kind = LatticeKind::Triangular;
    lat.boundary = Boundary::Open;
    lat.lx = lat.ly = 3;
    lat.sites = {{0, 0, 1},    {1, 0, 2},  {-0.5, 0.9, 2}, {-0.5, -0.9, 2},
                 {0.5, 0.9, 0}, {-1, 0, 0}, {0.5, -0.9, 0}};
    lat.triangles = {{{0, 1, 4}, +1}, {{0, 4, 2}, -1}, {{0, 2, 5}, +1},
                     {{0, 5, 3}, -1}, {{0, 3, 6}, +1}, {{0, 6, 1}, -1}};
    validate_lattice(lat);
    finalize_lattice(lat);
    return lat;
}

// |phi_k> = prod_up CCZ^k prod_down CCZ^{-k} |+...+>
inline StateVector build_spt_state(const Lattice& lat, const PrimeDim& dim, int k,
                                   std::size_t cap = kDefaultAmpCap) {
    if (mod_d(k, dim.d) == 0)
        throw std::invalid_argument("build_spt_state: k must be nonzero mod d (trivial class)");
    StateVector s = StateVector::plus_state(dim, lat.num_sites(), cap);
    for (const auto& t : lat.triangles)
        s.apply_ccz_pow(t.sites[0], t.sites[1], t.sites[2],
                        static_cast<long long>(t.sign) * mod_d(k, dim.d));
    return s;
}

// fidelity of X^m-on-one-color-class against the untouched state; the
// cancellation argument pairs the two triangles flanking each edge, so
// open boundaries are rejected rather than reported as low fidelity
inline double verify_symmetry(const StateVector& state, const Lattice& lat, const PrimeDim& dim,
                              int color, int m) {
    if (lat.boundary != Boundary::Periodic)
        throw std::invalid_argument("verify_symmetry: requires a periodic lattice");
    if (color < 0 || color > 2) throw std::invalid_argument("verify_symmetry: color in {0,1,2}");
    StateVector moved = state;
    for (int s = 0; s < lat.num_sites(); ++s)
        if (lat.sites[s].color == color) moved.apply_x_pow(s, m);
    return fidelity_up_to_phase(moved, state);
}

struct DomainMeasurement {
    GraphLikeState graph;          // predicted residual graph-like state
    StateVector residual;          // measured state on the residual sites
    double probability = 0;       // joint Born weight of the outcome set
    std::vector<int> residual_sites;
};

// measure every domain site in the computational basis with the given
// outcomes; the residual state should equal the graph-like state whose
// edge weights are r = k * sum_flanks sign * outcome
inline DomainMeasurement measure_domain_sublattice(const StateVector& spt, const Lattice& lat,
                                                   const PrimeDim& dim, int k,
                                                   const std::map<int, int>& outcomes) {
    for (int dsite : lat.domain_sites)
        if (!outcomes.count(dsite))
            throw std::invalid_argument("measure_domain_sublattice: outcome map incomplete");
    DomainMeasurement out{GraphLikeState(dim), spt, 1.0, {}};
    Basis comp = basis_computational(dim);
    // domain sites ascending; earlier removals shift later site indices down
    int removed = 0;
    for (int dsite : lat.domain_sites) {
        auto r = measure_remove(out.residual, dsite - removed, comp, outcomes.at(dsite));
        out.probability *= r.prob;
        ++removed;
    }
    for (int s = 0; s < lat.num_sites(); ++s)
        if (lat.sites[s].color != 0) {
            out.residual_sites.push_back(s);
            out.graph.add_vertex(s);
        }
    for (const auto& e : lat.residual) {
        long long w = 0;
        for (const auto& f : e.flanks) w += static_cast<long long>(f.sign) * outcomes.at(f.domain_site);
        out.graph.add_edge(e.u, e.v, w * mod_d(k, dim.d));
    }
    return out;
}

// sampled-outcome convenience wrapper
inline DomainMeasurement measure_domain_sublattice(const StateVector& spt, const Lattice& lat,
                                                   const PrimeDim& dim, int k, SplitMix64& rng) {
    std::map<int, int> outcomes;
    for (int dsite : lat.domain_sites) outcomes[dsite] = rng.next_below(dim.d);
    return measure_domain_sublattice(spt, lat, dim, k, outcomes);
}

inline nlohmann::json lattice_to_json(const Lattice& lat) {
    nlohmann::json j;
    j["schema"] = "quditmbc.lattice/1";
    j["kind"] = lat.kind == LatticeKind::Triangular ? "triangular" : "union_jack";
    j["boundary"] = lat.boundary == Boundary::Open ? "open" : "periodic";
    j["lx"] = lat.lx;
    j["ly"] = lat.ly;
    const char* color_names[3] = {"a", "b", "c"};
    auto& sites = j["sites"] = nlohmann::json::array();
    for (int s = 0; s < lat.num_sites(); ++s)
        sites.push_back({{"id", s},
                         {"x", lat.sites[s].x},
                         {"y", lat.sites[s].y},
                         {"color", color_names[lat.sites[s].color]}});
    auto& tris = j["triangles"] = nlohmann::json::array();
    for (const auto& t : lat.triangles)
        tris.push_back({{"sites", t.sites}, {"sign", t.sign}});
    j["domain_sites"] = lat.domain_sites;
    auto& res = j["residual_edges"] = nlohmann::json::array();
    for (const auto& e : lat.residual) {
        nlohmann::json flanks = nlohmann::json::array();
        for (const auto& f : e.flanks) flanks.push_back({{"domain", f.domain_site}, {"sign", f.sign}});
        res.push_back({{"u", e.u}, {"v", e.v}, {"flanks", flanks}});
    }
    return j;
}

}  // namespace qmbc

#endif
