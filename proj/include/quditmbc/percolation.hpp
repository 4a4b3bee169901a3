#ifndef QUDITMBC_PERCOLATION_HPP
#define QUDITMBC_PERCOLATION_HPP

/*
 * Monte Carlo percolation on the residual lattices.
 *
 * Plaquettes of an L x L patch draw i.i.d. uniform outcomes in {0..d-1};
 * a junction-graph edge is occupied exactly when the two flanking
 * plaquette outcomes differ mod d.  Spanning means one union-find cluster
 * touches both the left and right boundary vertex sets and one cluster
 * (possibly another) touches both top and bottom.
 *
 * Boundaries are open; the boundary sets are the extreme plaquette
 * rows/columns' junction vertices.  Trials are independent streams of a
 * 64-bit-seeded splitmix64 generator, so results are bit-identical for
 * any thread count.
 */

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "rng.hpp"
#include "version.hpp"
#include "zd.hpp"

#include "json.hpp"

namespace qmbc {

enum class PercKind { Honeycomb, Square };

inline const char* perc_kind_name(PercKind k) {
    return k == PercKind::Honeycomb ? "honeycomb" : "square";
}

struct UnionFind {
    std::vector<int> parent;
    std::vector<int> size;
    int merges = 0;

    explicit UnionFind(int n) : parent(n), size(n, 1) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }

    int find(int x) {
        int root = x;
        while (parent[root] != root) root = parent[root];
        while (parent[x] != root) {
            int next = parent[x];
            parent[x] = root;
            x = next;
        }
        return root;
    }

    bool unite(int a, int b) {
        int ra = find(a), rb = find(b);
        if (ra == rb) return false;
        if (size[ra] < size[rb]) std::swap(ra, rb);
        parent[rb] = ra;
        size[ra] += size[rb];
        ++merges;
        return true;
    }

    int components() const { return static_cast<int>(parent.size()) - merges; }
};

struct PercLattice {
    PercKind kind = PercKind::Honeycomb;
    int L = 0;
    int n_vertices = 0;
    int n_plaquettes = 0;
    struct PEdge {
        int u, v;          // junction vertices
        int plaq_a, plaq_b;  // flanking plaquettes deciding occupation
    };
    std::vector<PEdge> edges;
    std::vector<int> left, right, top, bottom;
    std::vector<std::pair<double, double>> vertex_pos;  // for carving/corridors
    std::vector<std::pair<int, int>> vertex_cell;       // plaquette-scale (col,row) of each vertex
};

// honeycomb of L x L hexagonal plaquettes; junction vertices are the up/down
// triangles of the plaquette-center lattice
inline PercLattice build_perc_honeycomb(int L) {
    if (L < 2) throw std::invalid_argument("build_perc_honeycomb: L >= 2");
    PercLattice lat;
    lat.kind = PercKind::Honeycomb;
    lat.L = L;
    lat.n_plaquettes = L * L;
    int m = L - 1;
    lat.n_vertices = 2 * m * m;
    auto up = [m](int q, int r) { return 2 * (q * m + r); };
    auto down = [m](int q, int r) { return 2 * (q * m + r) + 1; };
    auto plaq = [L](int q, int r) { return q * L + r; };
    lat.vertex_pos.resize(lat.n_vertices);
    lat.vertex_cell.resize(lat.n_vertices);
    auto pos = [](double q, double r) {
        return std::pair<double, double>{q + 0.5 * r, r * 0.8660254037844386};
    };
    for (int q = 0; q < m; ++q)
        for (int r = 0; r < m; ++r) {
            auto pu = pos(q + 1.0 / 3, r + 1.0 / 3);
            auto pd = pos(q + 2.0 / 3, r + 2.0 / 3);
            lat.vertex_pos[up(q, r)] = pu;
            lat.vertex_pos[down(q, r)] = pd;
            lat.vertex_cell[up(q, r)] = {q, r};
            lat.vertex_cell[down(q, r)] = {q, r};
        }
    // one junction edge per internal plaquette adjacency
    for (int q = 0; q + 1 < L; ++q)
        for (int r = 0; r < L; ++r)
            if (r >= 1 && r <= L - 2)
                lat.edges.push_back({up(q, r), down(q, r - 1), plaq(q, r), plaq(q + 1, r)});
    for (int q = 0; q < L; ++q)
        for (int r = 0; r + 1 < L; ++r)
            if (q >= 1 && q <= L - 2)
                lat.edges.push_back({up(q, r), down(q - 1, r), plaq(q, r), plaq(q, r + 1)});
    for (int q = 0; q + 1 < L; ++q)
        for (int r = 0; r + 1 < L; ++r)
            lat.edges.push_back({up(q, r), down(q, r), plaq(q + 1, r), plaq(q, r + 1)});
    for (int r = 0; r < m; ++r) {
        lat.left.push_back(up(0, r));
        lat.left.push_back(down(0, r));
        lat.right.push_back(up(m - 1, r));
        lat.right.push_back(down(m - 1, r));
    }
    for (int q = 0; q < m; ++q) {
        lat.top.push_back(up(q, 0));
        lat.top.push_back(down(q, 0));
        lat.bottom.push_back(up(q, m - 1));
        lat.bottom.push_back(down(q, m - 1));
    }
    return lat;
}

// square lattice of L x L plaquettes; junction vertices are the corners
inline PercLattice build_perc_square(int L) {
    if (L < 2) throw std::invalid_argument("build_perc_square: L >= 2");
    PercLattice lat;
    lat.kind = PercKind::Square;
    lat.L = L;
    lat.n_plaquettes = L * L;
    int w = L + 1;
    lat.n_vertices = w * w;
    auto corner = [w](int r, int c) { return r * w + c; };
    auto plaq = [L](int r, int c) { return r * L + c; };
    lat.vertex_pos.resize(lat.n_vertices);
    lat.vertex_cell.resize(lat.n_vertices);
    for (int r = 0; r < w; ++r)
        for (int c = 0; c < w; ++c) {
            lat.vertex_pos[corner(r, c)] = {static_cast<double>(c), static_cast<double>(r)};
            lat.vertex_cell[corner(r, c)] = {std::min(c, L - 1), std::min(r, L - 1)};
        }
    for (int r = 1; r <= L - 1; ++r)
        for (int c = 0; c < L; ++c)
            lat.edges.push_back({corner(r, c), corner(r, c + 1), plaq(r - 1, c), plaq(r, c)});
    for (int c = 1; c <= L - 1; ++c)
        for (int r = 0; r < L; ++r)
            lat.edges.push_back({corner(r, c), corner(r + 1, c), plaq(r, c - 1), plaq(r, c)});
    for (int r = 0; r < w; ++r) {
        lat.left.push_back(corner(r, 0));
        lat.right.push_back(corner(r, L));
    }
    for (int c = 0; c < w; ++c) {
        lat.top.push_back(corner(0, c));
        lat.bottom.push_back(corner(L, c));
    }
    return lat;
}

inline PercLattice build_perc_lattice(PercKind kind, int L) {
    return kind == PercKind::Honeycomb ? build_perc_honeycomb(L) : build_perc_square(L);
}

struct EdgeConfig {
    std::vector<int> outcomes;   // per plaquette
    std::vector<char> occupied;  // per lattice edge
};

inline EdgeConfig sample_config(const PercLattice& lat, const PrimeDim& dim, SplitMix64& rng) {
    EdgeConfig cfg;
    cfg.outcomes.resize(lat.n_plaquettes);
    for (auto& o : cfg.outcomes) o = rng.next_below(dim.d);
    cfg.occupied.resize(lat.edges.size());
    for (std::size_t e = 0; e < lat.edges.size(); ++e)
        cfg.occupied[e] = cfg.outcomes[lat.edges[e].plaq_a] != cfg.outcomes[lat.edges[e].plaq_b];
    return cfg;
}

// true iff some cluster touches both left and right and some cluster
// touches both top and bottom
inline bool spans(const PercLattice& lat, const std::vector<char>& occupied) {
    UnionFind uf(lat.n_vertices);
    for (std::size_t e = 0; e < lat.edges.size(); ++e)
        if (occupied[e]) uf.unite(lat.edges[e].u, lat.edges[e].v);
    auto roots = [&uf](const std::vector<int>& side) {
        std::vector<int> r;
        r.reserve(side.size());
        for (int v : side) r.push_back(uf.find(v));
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        return r;
    };
    auto intersects = [](const std::vector<int>& a, const std::vector<int>& b) {
        std::size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i] == b[j]) return true;
            if (a[i] < b[j])
                ++i;
            else
                ++j;
        }
        return false;
    };
    bool lr = intersects(roots(lat.left), roots(lat.right));
    bool tb = intersects(roots(lat.top), roots(lat.bottom));
    return lr && tb;
}

inline bool spans(const PercLattice& lat, const EdgeConfig& cfg) {
    return spans(lat, cfg.occupied);
}

struct PercPoint {
    double delete_p = 0;
    double prob = 0;
    double se = 0;
};

inline int default_thread_count() {
    if (const char* env = std::getenv("QMBC_THREADS")) {
        int t = std::atoi(env);
        if (t >= 1) return t;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

namespace detail {

template <typename Fn>
void parallel_trials(int trials, int threads, Fn&& per_trial) {
    if (threads <= 1) {
        for (int t = 0; t < trials; ++t) per_trial(t);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (;;) {
                int t = next.fetch_add(1);
                if (t >= trials) return;
                per_trial(t);
            }
        });
    for (auto& th : pool) th.join();
}

}  // namespace detail

// spanning fraction over `trials` independently seeded outcome patterns
inline PercPoint percolation_probability(const PercLattice& lat, const PrimeDim& dim, int trials,
                                         uint64_t seed, int threads = 1) {
    if (trials < 1) throw std::invalid_argument("percolation_probability: trials >= 1");
    std::vector<char> hit(trials, 0);
    detail::parallel_trials(trials, threads, [&](int t) {
        SplitMix64 rng = make_stream(seed, static_cast<uint64_t>(t));
        EdgeConfig cfg = sample_config(lat, dim, rng);
        hit[t] = spans(lat, cfg) ? 1 : 0;
    });
    double p = 0;
    for (char h : hit) p += h;
    p /= trials;
    return {0.0, p, std::sqrt(p * (1 - p) / trials)};
}

// Deletion-stability protocol: `patterns` outcome patterns, `deletions`
// deletion instances per pattern, keeping each occupied edge with
// probability 1-p.  One uniform draw per (pattern, deletion, edge) is
// shared across the whole p grid, histogram style: each sample's spanning
// is then monotone in p, so the curve is monotone and finite differences
// are not swamped by independent-point noise.
inline std::vector<PercPoint> stability_curve(const PercLattice& lat, const PrimeDim& dim,
                                              const std::vector<double>& p_grid, int patterns,
                                              int deletions, uint64_t seed, int threads = 1) {
    for (double p : p_grid)
        if (p < 0 || p > 1) throw std::invalid_argument("stability_curve: p in [0,1]");
    int total = patterns * deletions;
    std::vector<std::vector<char>> hit(p_grid.size(), std::vector<char>(total, 0));
    detail::parallel_trials(patterns, threads, [&](int pat) {
        SplitMix64 rng = make_stream(seed, pat);
        EdgeConfig cfg = sample_config(lat, dim, rng);
        std::vector<double> u(cfg.occupied.size());
        std::vector<char> kept(cfg.occupied.size());
        for (int del = 0; del < deletions; ++del) {
            for (std::size_t e = 0; e < u.size(); ++e) u[e] = rng.next_double();
            for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
                for (std::size_t e = 0; e < u.size(); ++e)
                    kept[e] = cfg.occupied[e] && u[e] >= p_grid[pi];
                hit[pi][pat * deletions + del] = spans(lat, kept) ? 1 : 0;
            }
        }
    });
    std::vector<PercPoint> out;
    for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
        double frac = 0;
        for (char h : hit[pi]) frac += h;
        frac /= total;
        out.push_back({p_grid[pi], frac, std::sqrt(frac * (1 - frac) / total)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// output files

struct CsvRow {
    PercKind kind;
    int d, L, trials;
    uint64_t seed;
    double delete_p, prob, se;
};

inline void write_percolation_csv(std::ostream& f, const std::vector<CsvRow>& rows) {
    f << "# schema=quditmbc.perc-csv/1 version=" << QUDITMBC_VERSION << " rng=" << rng_name()
      << "\n";
    f << "kind,d,L,trials,seed,delete_p,prob,stderr\n";
    f.precision(9);
    for (const auto& r : rows)
        f << perc_kind_name(r.kind) << ',' << r.d << ',' << r.L << ',' << r.trials << ',' << r.seed
          << ',' << r.delete_p << ',' << r.prob << ',' << r.se << "\n";
}

inline void write_percolation_csv(const std::string& path, const std::vector<CsvRow>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    write_percolation_csv(f, rows);
}

inline nlohmann::json percolation_meta(const std::string& command, int d, uint64_t seed,
                                       int threads, double wall_ms) {
    return {{"schema", "quditmbc.perc-meta/1"}, {"command", command},
            {"d", d},                           {"seed", seed},
            {"rng", rng_name()},                {"version", QUDITMBC_VERSION},
            {"threads", threads},               {"wall_ms", wall_ms}};
}

}  // namespace qmbc

#endif
