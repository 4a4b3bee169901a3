#ifndef QUDITMBC_DDW_HPP
#define QUDITMBC_DDW_HPP

/*
 * Decorated-domain-wall consistency check on honeycomb patches.
 *
 * Qudits sit on faces (domains) and vertices (domain walls) of a honeycomb
 * patch.  The diagonal entangler U^k is built two independent ways:
 *
 *   route A  per face f, the controlled one-dimensional wall operator
 *            (sum_alpha |alpha><alpha|_f W^alpha_{boundary f})^k, where
 *            W^alpha places CZ^{+-alpha} between each boundary domain
 *            (black vertex) and its two walls (red vertices), signs taken
 *            from the traversal sense of the face against the global
 *            edge orientation (arrows point red -> black);
 *
 *   route B  one CCZ^{+-k} per (face, black, red) triangle, sign from the
 *            plane orientation of the triple.
 *
 * Both are diagonal, so each route is returned as a vector of phase
 * exponents over the computational basis; equality of the states they
 * create from |+...+> is the equivalence check.
 */

#include <algorithm>
#include <map>
#include <tuple>

#include "statevector.hpp"

namespace qmbc {

struct DdwPatch {
    struct Vertex {
        double x = 0, y = 0;
        bool black = false;  // true = up-triangle sublattice (1D domains)
    };
    std::vector<std::pair<int, int>> faces;      // axial coords of hexagon centers
    std::vector<std::pair<double, double>> face_pos;
    std::vector<Vertex> vertices;
    std::vector<std::vector<int>> boundary;      // per face: vertex ids, ccw order
    // qudit layout: faces first, then vertices
    int face_qudit(int f) const { return f; }
    int vertex_qudit(int v) const { return static_cast<int>(faces.size()) + v; }
    int n_qudits() const { return static_cast<int>(faces.size() + vertices.size()); }
};

namespace detail {

inline std::pair<double, double> axial_pos(int q, int r) {
    return {q + 0.5 * r, r * 0.8660254037844386};
}

}  // namespace detail

// build the patch for a set of hexagon faces given by axial coordinates;
// vertices are the up/down triangles of the face-center lattice
inline DdwPatch build_ddw_patch(const std::vector<std::pair<int, int>>& faces) {
    if (faces.empty()) throw std::invalid_argument("build_ddw_patch: no faces");
    DdwPatch patch;
    patch.faces = faces;
    std::map<std::tuple<int, int, int>, int> vertex_id;  // (type 0=up/1=down, q, r)
    auto vertex = [&](int type, int q, int r) {
        auto key = std::make_tuple(type, q, r);
        auto it = vertex_id.find(key);
        if (it != vertex_id.end()) return it->second;
        int id = static_cast<int>(patch.vertices.size());
        vertex_id[key] = id;
        DdwPatch::Vertex v;
        // centroid of the three surrounding centers
        auto p0 = detail::axial_pos(q, r);
        auto p1 = detail::axial_pos(q + 1, r);
        auto p2 = detail::axial_pos(q, r + 1);
        auto p3 = detail::axial_pos(q + 1, r + 1);
        if (type == 0) {
            v.x = (p0.first + p1.first + p2.first) / 3;
            v.y = (p0.second + p1.second + p2.second) / 3;
            v.black = true;
        } else {
            v.x = (p1.first + p2.first + p3.first) / 3;
            v.y = (p1.second + p2.second + p3.second) / 3;
            v.black = false;
        }
        patch.vertices.push_back(v);
        return id;
    };
    for (auto [q, r] : faces) {
        patch.face_pos.push_back(detail::axial_pos(q, r));
        // the six triangles of the center lattice that contain (q, r)
        std::vector<int> cycle = {vertex(0, q, r),         vertex(1, q, r - 1),
                                  vertex(0, q, r - 1),     vertex(1, q - 1, r - 1),
                                  vertex(0, q - 1, r),     vertex(1, q - 1, r)};
        // sort ccw around the face center
        auto fp = detail::axial_pos(q, r);
        std::sort(cycle.begin(), cycle.end(), [&](int a, int b) {
            const auto& va = patch.vertices[a];
            const auto& vb = patch.vertices[b];
            return std::atan2(va.y - fp.second, va.x - fp.first) <
                   std::atan2(vb.y - fp.second, vb.x - fp.first);
        });
        for (std::size_t i = 0; i < cycle.size(); ++i) {
            bool b0 = patch.vertices[cycle[i]].black;
            bool b1 = patch.vertices[cycle[(i + 1) % cycle.size()]].black;
            if (b0 == b1) throw std::logic_error("build_ddw_patch: boundary not alternating");
        }
        patch.boundary.push_back(cycle);
    }
    return patch;
}

// route A: per-face controlled wall operator, arrows point red -> black
inline std::vector<int> ddw_phases_from_faces(const DdwPatch& patch, const PrimeDim& dim, int k) {
    int d = dim.d;
    int nq = patch.n_qudits();
    std::size_t n = pow_size(d, nq);
    std::vector<int> phase(n, 0);
    for (std::size_t f = 0; f < patch.faces.size(); ++f) {
        const auto& cyc = patch.boundary[f];
        int L = static_cast<int>(cyc.size());
        for (int i = 0; i < L; ++i) {
            if (!patch.vertices[cyc[i]].black) continue;  // iterate 1D domains
            int b = cyc[i];
            // the two neighboring walls along the chain
            for (int dir : {-1, +1}) {
                int r = cyc[(i + dir + L) % L];
                // ccw traversal crosses (b,r) in arrow direction (red->black)
                // exactly when r precedes b, i.e. dir = -1
                int theta = (dir == -1) ? +1 : -1;
                int qb = patch.vertex_qudit(b), qr = patch.vertex_qudit(r);
                int qf = patch.face_qudit(static_cast<int>(f));
                std::size_t sb = pow_size(d, nq - 1 - qb);
                std::size_t sr = pow_size(d, nq - 1 - qr);
                std::size_t sf = pow_size(d, nq - 1 - qf);
                for (std::size_t idx = 0; idx < n; ++idx) {
                    int jb = static_cast<int>((idx / sb) % static_cast<std::size_t>(d));
                    int jr = static_cast<int>((idx / sr) % static_cast<std::size_t>(d));
                    int ja = static_cast<int>((idx / sf) % static_cast<std::size_t>(d));
                    phase[idx] = mod_d(phase[idx] + static_cast<long long>(k) * theta * ja * jb * jr, d);
                }
            }
        }
    }
    return phase;
}

// route B: CCZ^{+-k} per (face, black, red) triangle; a triangle whose ccw
// cycle runs ... -> red -> black -> ... around its face carries sign +1
inline std::vector<int> ddw_phases_from_triangles(const DdwPatch& patch, const PrimeDim& dim,
                                                  int k) {
    int d = dim.d;
    std::size_t n = pow_size(d, patch.n_qudits());
    std::vector<int> phase(n, 0);
    int nq = patch.n_qudits();
    for (std::size_t f = 0; f < patch.faces.size(); ++f) {
        const auto& cyc = patch.boundary[f];
        int L = static_cast<int>(cyc.size());
        auto fp = patch.face_pos[f];
        for (int i = 0; i < L; ++i) {
            int v0 = cyc[i], v1 = cyc[(i + 1) % L];
            int b = patch.vertices[v0].black ? v0 : v1;
            int r = patch.vertices[v0].black ? v1 : v0;
            double cross = (patch.vertices[b].x - fp.first) * (patch.vertices[r].y - fp.second) -
                           (patch.vertices[b].y - fp.second) * (patch.vertices[r].x - fp.first);
            int sign = cross < 0 ? +1 : -1;
            int qb = patch.vertex_qudit(b), qr = patch.vertex_qudit(r);
            int qf = patch.face_qudit(static_cast<int>(f));
            std::size_t sb = pow_size(d, nq - 1 - qb);
            std::size_t sr = pow_size(d, nq - 1 - qr);
            std::size_t sf = pow_size(d, nq - 1 - qf);
            for (std::size_t idx = 0; idx < n; ++idx) {
                int jb = static_cast<int>((idx / sb) % static_cast<std::size_t>(d));
                int jr = static_cast<int>((idx / sr) % static_cast<std::size_t>(d));
                int ja = static_cast<int>((idx / sf) % static_cast<std::size_t>(d));
                phase[idx] = mod_d(phase[idx] + static_cast<long long>(sign) * k * ja * jb * jr, d);
            }
        }
    }
    return phase;
}

// |<+| A^dagger B |+>| for the two diagonal routes
inline double ddw_equivalence(const DdwPatch& patch, const PrimeDim& dim, int k) {
    auto a = ddw_phases_from_faces(patch, dim, k);
    auto b = ddw_phases_from_triangles(patch, dim, k);
    PhaseTable w(dim.d);
    Cx acc(0, 0);
    for (std::size_t i = 0; i < a.size(); ++i) acc += w(b[i] - a[i]);
    return std::abs(acc) / static_cast<double>(a.size());
}

}  // namespace qmbc

#endif
