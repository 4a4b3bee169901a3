#ifndef QUDITMBC_REDUCE_HPP
#define QUDITMBC_REDUCE_HPP

/*
 * Carve a w x w cluster-like grid out of a supercritical random graph-like
 * state on the honeycomb (or square) junction lattice.
 *
 * The 2x2 grid is a plain 4-cycle, so that case finds one chordless cycle
 * (shortest cycle through an edge), Z-measures everything else, and
 * contracts the four arcs.  For w >= 3 the pipeline routes w horizontal
 * wires, pulled toward separated lanes by a cost bias but kept apart by
 * hard non-adjacency, connects consecutive wires with vertical segments
 * per column, then
 *   1. Z-measures everything off the net,
 *   2. resolves irregular attachments (a segment end touching two
 *      adjacent wire qudits is cleaned by one disentangling ZX^k
 *      measurement; touching two separated qudits reroutes the wire
 *      through the segment end, Z-measuring the bypassed stretch),
 *   3. merges each middle-row entry/exit T-pair into a single
 *      degree-4 crossing (X-pair measurement through one interposed
 *      qudit),
 *   4. trims the wire stubs outside the outermost crossings,
 *   5. shortens every inter-crossing run to a direct edge (X-pair
 *      measurements two at a time, one ZX^k to fix parity).
 *
 * Everything is deterministic given the seed; sampled outcomes are
 * recorded in the schedule together with the operation and, for ZX^k
 * steps, the chosen k.
 */

#include <algorithm>
#include <optional>
#include <set>

#include "graphlike.hpp"
#include "percolation.hpp"

namespace qmbc {

struct ScheduleStep {
    enum class Op { Z, XPair, ZXk };
    Op op;
    std::vector<int> vertices;
    int k = 0;  // ZXk only
    std::vector<int> outcomes;
};

inline const char* schedule_op_name(ScheduleStep::Op op) {
    switch (op) {
        case ScheduleStep::Op::Z: return "Z";
        case ScheduleStep::Op::XPair: return "X_pair";
        default: return "ZX^k";
    }
}

struct ReduceResult {
    bool ok = false;
    std::string error;
    GraphLikeState final_graph{PrimeDim(2)};
    std::vector<std::vector<int>> crossings;  // [row][col]
    std::vector<ScheduleStep> schedule;
    GraphLikeState initial_graph{PrimeDim(2)};
};

// graph-like state carried by the residual lattice for one outcome pattern:
// edge weight k (m_a - m_b) on each occupied junction edge
inline GraphLikeState config_to_graph(const PercLattice& lat, const EdgeConfig& cfg,
                                      const PrimeDim& dim, int k_spt) {
    GraphLikeState g(dim);
    for (std::size_t e = 0; e < lat.edges.size(); ++e)
        if (cfg.occupied[e]) {
            g.add_vertex(lat.edges[e].u);
            g.add_vertex(lat.edges[e].v);
            g.add_edge(lat.edges[e].u, lat.edges[e].v,
                       static_cast<long long>(mod_d(k_spt, dim.d)) *
                           (cfg.outcomes[lat.edges[e].plaq_a] - cfg.outcomes[lat.edges[e].plaq_b]));
        }
    return g;
}

namespace detail {

struct ReduceEngine {
    const PercLattice& lat;
    PrimeDim dim;
    GraphLikeState g;
    SplitMix64 rng;
    std::vector<ScheduleStep>* schedule;
    std::string error;

    ReduceEngine(const PercLattice& l, const GraphLikeState& graph, const PrimeDim& d,
                 uint64_t seed, std::vector<ScheduleStep>* sched)
        : lat(l), dim(d), g(graph), rng(seed), schedule(sched) {}

    bool fail(const std::string& why) {
        error = why;
        return false;
    }

    // recorded rule applications with sampled outcomes
    void do_z(int v) {
        int m = rng.next_below(dim.d);
        g.measure_z(v, m);
        schedule->push_back({ScheduleStep::Op::Z, {v}, 0, {m}});
    }

    void do_x_pair(int a, int b) {
        int m = rng.next_below(dim.d), n = rng.next_below(dim.d);
        g.measure_x_pair(a, b, m, n);
        schedule->push_back({ScheduleStep::Op::XPair, {a, b}, 0, {m, n}});
    }

    void do_zxk(int v, int k) {
        int m = rng.next_below(dim.d);
        g.measure_zxk(v, k, m);
        schedule->push_back({ScheduleStep::Op::ZXk, {v}, k, {m}});
    }

    // sorted adjacency of the occupied graph (deterministic search)
    std::map<int, std::vector<int>> adj;

    void build_adjacency() {
        for (const auto& [v, nbs] : g.adj) {
            auto& row = adj[v];
            for (const auto& [u, wgt] : nbs) row.push_back(u);
        }
    }

    // min-cost path between vertex sets through `allowed` (targets exempt);
    // cost(v) >= 1 steers wires toward their lanes, ties break on vertex id
    std::vector<int> dijkstra_path(const std::vector<int>& sources, const std::set<int>& targets,
                                   const std::function<bool(int)>& allowed,
                                   const std::function<long long(int)>& cost) {
        std::map<int, long long> dist;
        std::map<int, int> parent;
        std::set<std::pair<long long, int>> heap;
        for (int s : sources) {
            if (dist.count(s)) continue;
            dist[s] = cost(s);
            parent[s] = -1;
            heap.insert({dist[s], s});
        }
        while (!heap.empty()) {
            auto [dv, v] = *heap.begin();
            heap.erase(heap.begin());
            if (dv != dist.at(v)) continue;
            if (targets.count(v)) {
                std::vector<int> path{v};
                for (int p = parent.at(v); p != -1; p = parent.at(p)) path.push_back(p);
                std::reverse(path.begin(), path.end());
                return path;
            }
            auto it = adj.find(v);
            if (it == adj.end()) continue;
            for (int u : it->second) {
                if (!targets.count(u) && !allowed(u)) continue;
                long long nd = dv + cost(u);
                auto old = dist.find(u);
                if (old != dist.end() && old->second <= nd) continue;
                if (old != dist.end()) heap.erase({old->second, u});
                dist[u] = nd;
                parent[u] = v;
                heap.insert({nd, u});
            }
        }
        return {};
    }
};

}  // namespace detail

class ClusterCarver {
   public:
    ClusterCarver(const PercLattice& lat, const EdgeConfig& cfg, const PrimeDim& dim, int k_spt,
                  int target_w, uint64_t seed)
        : lat_(lat),
          dim_(dim),
          w_(target_w),
          engine_(lat, config_to_graph(lat, cfg, dim, k_spt), dim, seed, &result_.schedule) {
        result_.initial_graph = engine_.g;
        occupied_ = cfg.occupied;
    }

    ReduceResult run() {
        if (w_ < 2) {
            result_.error = "target grid must be at least 2x2";
            return result_;
        }
        if (!spans(lat_, occupied_)) {
            result_.error = "subcritical instance";
            return result_;
        }
        engine_.build_adjacency();
        for (const auto& c : lat_.vertex_cell)
            extent_ = std::max(extent_, std::max(c.first, c.second) + 1);
        if (w_ == 2) {
            // the 2x2 grid is a plain 4-cycle; carve one chordless cycle
            // instead of routing boundary-spanning wires
            if (!carve_cycle()) {
                result_.error = engine_.error.empty() ? "reduction failed" : engine_.error;
                return result_;
            }
            result_.final_graph = engine_.g;
            result_.ok = true;
            return result_;
        }
        // greedy routing can paint itself into a corner; retry with
        // different lane pulls and routing orders before giving up
        struct PlanConfig {
            long long coef;
            bool flip;
            bool claimed;  // enforce monotone column claims while routing
        };
        const PlanConfig ladder[] = {{4, false, true},  {4, true, true},   {16, false, true},
                                     {16, true, true},  {4, false, false}, {4, true, false},
                                     {48, false, true}, {16, false, false}, {1, false, true},
                                     {1, false, false}};
        bool planned = false;
        for (const auto& cfg : ladder) {
            reset_plan();
            if (route_h_wires(cfg.coef, cfg.flip) &&
                route_v_segments(cfg.coef, cfg.flip, cfg.claimed) && normalize_order() &&
                check_net_induced()) {
                planned = true;
                break;
            }
        }
        if (!planned || !execute()) {
            result_.error = engine_.error.empty() ? "reduction failed" : engine_.error;
            return result_;
        }
        result_.final_graph = engine_.g;
        result_.ok = true;
        return result_;
    }

   private:
    const PercLattice& lat_;
    PrimeDim dim_;
    int w_;
    detail::ReduceEngine engine_;
    ReduceResult result_;
    std::vector<char> occupied_;

    int extent_ = 0;                                        // cell grid size
    std::vector<std::vector<int>> hwire_;                   // per row: ordered vertex list
    std::vector<std::vector<std::vector<int>>> vseg_;       // [col][gap i->i+1]: interior list
    std::vector<std::vector<int>> entry_, exit_;            // T vertices per [row][col]
    std::vector<std::pair<int, int>> cleanup_zxk_;          // (vertex, k) from 16c-style fixes
    std::set<std::pair<int, int>> allowed_edges_;           // net edges we planned

    int cell_row(int v) const { return lat_.vertex_cell[v].second; }
    int cell_col(int v) const { return lat_.vertex_cell[v].first; }

    void allow_edge(int a, int b) { allowed_edges_.insert(std::minmax(a, b)); }

    bool near_net(int v) const {
        auto it = engine_.adj.find(v);
        if (it == engine_.adj.end()) return false;
        for (int u : it->second)
            if (net_.count(u)) return true;
        return false;
    }

    // lane center for wire/column i in cell units
    double lane(int i) const { return (i + 0.5) * extent_ / w_; }

    void reset_plan() {
        net_.clear();
        tees_.clear();
        bypass_.clear();
        cleanup_zxk_.clear();
        allowed_edges_.clear();
        hwire_.clear();
        vseg_.clear();
        entry_.clear();
        exit_.clear();
        engine_.error.clear();
    }

    bool route_h_wires(long long coef, bool flip) {
        hwire_.resize(w_);
        for (int step = 0; step < w_; ++step) {
            int i = flip ? w_ - 1 - step : step;
            // stay clear of the already-routed wires and their neighbors;
            // the cost pulls the path toward its own lane
            auto allowed = [&](int v) { return !net_.count(v) && !near_net(v); };
            std::vector<int> sources;
            for (int v : lat_.left)
                if (engine_.g.has_vertex(v) && allowed(v)) sources.push_back(v);
            std::set<int> targets;
            for (int v : lat_.right)
                if (engine_.g.has_vertex(v) && allowed(v)) targets.insert(v);
            double t = lane(i);
            auto cost = [&](int v) {
                return 1 + coef * static_cast<long long>(std::llround(std::abs(cell_row(v) - t)));
            };
            auto path = engine_.dijkstra_path(sources, targets, allowed, cost);
            if (path.empty()) return engine_.fail("subcritical instance (h-wire " + std::to_string(i) + ")");
            hwire_[i] = path;
            for (std::size_t s = 0; s + 1 < path.size(); ++s) allow_edge(path[s], path[s + 1]);
            for (int v : path) net_.insert(v);
        }
        return true;
    }

    // attachment of a segment end vertex x to wire row i; updates the wire
    // and returns the junction vertex on the wire, or nullopt on failure
    std::optional<int> resolve_attach(int i, int x) {
        auto& wire = hwire_[i];
        std::vector<int> attach;  // wire positions adjacent to x
        for (std::size_t t = 0; t < wire.size(); ++t)
            if (engine_.g.weight(x, wire[t]) != 0) attach.push_back(static_cast<int>(t));
        if (attach.empty()) return std::nullopt;
        if (attach.size() == 1) {
            if (tees_.count(wire[attach[0]])) return std::nullopt;
            allow_edge(x, wire[attach[0]]);
            tees_.insert(wire[attach[0]]);
            return wire[attach[0]];
        }
        if (attach.size() == 2 && attach[1] == attach[0] + 1) {
            // two adjacent wire qudits: one ZX^k on the second disentangles
            // x from the first and re-hangs it on the next wire qudit
            int keep_pos, meas_pos;
            if (attach[1] + 1 < static_cast<int>(wire.size()) && !tees_.count(wire[attach[1]])) {
                keep_pos = attach[0];
                meas_pos = attach[1];
            } else if (attach[0] >= 1 && !tees_.count(wire[attach[0]])) {
                keep_pos = attach[1];
                meas_pos = attach[0];
            } else {
                return std::nullopt;
            }
            int u = wire[keep_pos];
            int uprime = wire[meas_pos];
            int usec = wire[meas_pos + (meas_pos > keep_pos ? 1 : -1)];
            if (tees_.count(usec)) return std::nullopt;
            int r = engine_.g.weight(u, x);
            int p = engine_.g.weight(uprime, u);
            int q = engine_.g.weight(uprime, x);
            int k = mod_d(static_cast<long long>(r) * mod_inverse(p, dim_.d) % dim_.d *
                              mod_inverse(q, dim_.d),
                          dim_.d);
            cleanup_zxk_.push_back({uprime, k});
            // structural effect after the cleanup runs: wire drops uprime,
            // x hangs on usec.  uprime stays a phantom net member so no
            // later segment routes next to it before it is measured.
            allow_edge(x, u);
            allow_edge(x, uprime);
            wire.erase(wire.begin() + meas_pos);
            tees_.insert(usec);
            return usec;
        }
        // separated attachments: reroute the wire through x, bypassed
        // stretch is Z-measured
        if (tees_.count(x)) return std::nullopt;  // x already serves another junction
        int first = attach.front(), last = attach.back();
        for (int t = first + 1; t < last; ++t) {
            if (tees_.count(wire[t])) return std::nullopt;  // would swallow a junction
        }
        for (int t = first + 1; t < last; ++t) {
            bypass_.push_back(wire[t]);
            net_.erase(wire[t]);
        }
        allow_edge(wire[first], x);
        allow_edge(x, wire[last]);
        for (int t = first + 1; t < last; ++t) allow_edge(x, wire[t]);  // consumed by the Z pass
        wire.erase(wire.begin() + first + 1, wire.begin() + last);
        wire.insert(wire.begin() + first + 1, x);
        tees_.insert(x);
        return x;
    }

    long wire_pos(int i, int v) const {
        return static_cast<long>(std::find(hwire_[i].begin(), hwire_[i].end(), v) -
                                 hwire_[i].begin());
    }

    bool route_v_segments(long long coef, bool flip, bool claimed) {
        vseg_.assign(w_, std::vector<std::vector<int>>(w_ - 1));
        entry_.assign(w_, std::vector<int>(w_, -1));
        exit_.assign(w_, std::vector<int>(w_, -1));
        // columns must land on every wire in routing order; track the
        // furthest junction per wire and only admit attachments beyond it
        int dir = flip ? -1 : +1;
        std::vector<int> last_tee(w_, -1);
        auto beyond_claim = [&](int i, int u) {
            if (!claimed || last_tee[i] < 0) return true;
            return (wire_pos(i, u) - wire_pos(i, last_tee[i])) * dir >= 2;
        };
        auto update_claim = [&](int i, int t) {
            if (last_tee[i] < 0 || (wire_pos(i, t) - wire_pos(i, last_tee[i])) * dir > 0)
                last_tee[i] = t;
        };
        for (int jstep = 0; jstep < w_; ++jstep) {
            int j = flip ? w_ - 1 - jstep : jstep;
            for (int i = 0; i + 1 < w_; ++i) {
                std::set<int> wire_i(hwire_[i].begin(), hwire_[i].end());
                std::set<int> wire_n(hwire_[i + 1].begin(), hwire_[i + 1].end());
                auto near_other_net = [&](int v) {
                    for (int u : engine_.adj.count(v) ? engine_.adj.at(v) : std::vector<int>{})
                        if (net_.count(u) && !wire_i.count(u) && !wire_n.count(u)) return true;
                    return false;
                };
                // on middle wires the exit junction must stay clear of the
                // entry junction, or the T pair cannot be merged
                std::set<int> too_close;
                if (i >= 1 && entry_[i][j] >= 0) {
                    const auto& wire = hwire_[i];
                    auto pe = std::find(wire.begin(), wire.end(), entry_[i][j]) - wire.begin();
                    for (long t = std::max<long>(0, pe - 2);
                         t < std::min<long>(wire.size(), pe + 3); ++t)
                        too_close.insert(wire[t]);
                }
                std::vector<int> sources;
                std::set<int> targets;
                for (int v : engine_.g.vertices()) {
                    if (net_.count(v) || near_other_net(v)) continue;
                    bool near_i = false, near_n = false;
                    for (int u : engine_.adj.at(v)) {
                        near_i |= wire_i.count(u) != 0 && !too_close.count(u) &&
                                  beyond_claim(i, u);
                        near_n |= wire_n.count(u) != 0 && beyond_claim(i + 1, u);
                    }
                    if (near_i && i >= 1 && entry_[i][j] >= 0) {
                        // keep x only if none of its wire contacts crowd the entry
                        for (int u : engine_.adj.at(v))
                            if (too_close.count(u)) near_i = false;
                    }
                    if (near_i) sources.push_back(v);
                    if (near_n) targets.insert(v);
                }
                auto mid_ok = [&](int v) {
                    if (net_.count(v) || near_other_net(v)) return false;
                    for (int u : engine_.adj.at(v))
                        if (wire_i.count(u) || wire_n.count(u)) return false;
                    return true;
                };
                double t = lane(j);
                auto cost = [&](int v) {
                    return 1 + coef * static_cast<long long>(
                                          std::llround(std::abs(cell_col(v) - t)));
                };
                auto path = engine_.dijkstra_path(sources, targets, mid_ok, cost);
                if (path.empty())
                    return engine_.fail("subcritical instance (segment " + std::to_string(i) +
                                        "," + std::to_string(j) + ")");
                auto exit_t = resolve_attach(i, path.front());
                if (!exit_t) return engine_.fail("attachment resolution failed");
                auto entry_t = resolve_attach(i + 1, path.back());
                if (!entry_t) return engine_.fail("attachment resolution failed");
                exit_[i][j] = *exit_t;
                entry_[i + 1][j] = *entry_t;
                update_claim(i, *exit_t);
                if (i >= 1 && entry_[i][j] >= 0) update_claim(i, entry_[i][j]);
                update_claim(i + 1, *entry_t);
                vseg_[j][i] = path;
                for (std::size_t t = 0; t + 1 < path.size(); ++t) allow_edge(path[t], path[t + 1]);
                for (int v : path) net_.insert(v);
                // entry and exit junctions on a middle wire must not collide
                if (i >= 1) {
                    int a = entry_[i][j], b = exit_[i][j];
                    auto pa = std::find(hwire_[i].begin(), hwire_[i].end(), a);
                    auto pb = std::find(hwire_[i].begin(), hwire_[i].end(), b);
                    if (pa == hwire_[i].end() || pb == hwire_[i].end())
                        return engine_.fail("junction fell off its wire");
                    if (std::abs(static_cast<int>(pa - pb)) < 2)
                        return engine_.fail("crossing too tight");
                }
            }
        }
        return true;
    }

    // the columns must appear in the same non-interleaving order along
    // every wire; a consistent permutation is just relabeled
    bool normalize_order() {
        std::vector<std::vector<std::pair<long, long>>> span(w_);  // per wire: (lo,hi) per column
        for (int i = 0; i < w_; ++i) {
            const auto& wire = hwire_[i];
            auto pos = [&](int v) {
                return static_cast<long>(std::find(wire.begin(), wire.end(), v) - wire.begin());
            };
            span[i].resize(w_);
            for (int j = 0; j < w_; ++j) {
                std::vector<long> ps;
                if (entry_[i][j] >= 0) ps.push_back(pos(entry_[i][j]));
                if (exit_[i][j] >= 0) ps.push_back(pos(exit_[i][j]));
                if (ps.empty()) return engine_.fail("missing junction");
                long lo = *std::min_element(ps.begin(), ps.end());
                long hi = *std::max_element(ps.begin(), ps.end());
                if (hi >= static_cast<long>(hwire_[i].size()))
                    return engine_.fail("junction fell off its wire");
                span[i][j] = {lo, hi};
            }
        }
        std::vector<int> order(w_);
        for (int j = 0; j < w_; ++j) order[j] = j;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return span[0][a].first < span[0][b].first; });
        for (int i = 0; i < w_; ++i) {
            long prev = -1;
            for (int jj = 0; jj < w_; ++jj) {
                int j = order[jj];
                if (span[i][j].first <= prev) return engine_.fail("column junctions interleave");
                prev = span[i][j].second;
            }
        }
        if (!std::is_sorted(order.begin(), order.end())) {
            auto entry_old = entry_;
            auto exit_old = exit_;
            auto vseg_old = vseg_;
            for (int j = 0; j < w_; ++j) {
                vseg_[j] = vseg_old[order[j]];
                for (int i = 0; i < w_; ++i) {
                    entry_[i][j] = entry_old[i][order[j]];
                    exit_[i][j] = exit_old[i][order[j]];
                }
            }
        }
        return true;
    }

    bool check_net_induced() {
        for (int v : engine_.g.vertices()) {
            if (!net_.count(v)) continue;
            for (const auto& [u, wgt] : engine_.g.adj.at(v)) {
                if (!net_.count(u)) continue;
                if (!allowed_edges_.count(std::minmax(v, u)))
                    return engine_.fail("excess edge inside the net");
            }
        }
        return true;
    }

    bool execute() {
        // replay on a fresh copy of the state so the provisional planning
        // measurements run in schedule order with sampled outcomes
        engine_.g = result_.initial_graph;
        result_.schedule.clear();

        // 1. clear everything off the net
        for (int v : engine_.g.vertices())
            if (!net_.count(v)) engine_.do_z(v);
        // bypassed wire stretches from reroutes
        for (int v : bypass_)
            if (engine_.g.has_vertex(v)) engine_.do_z(v);
        // 2. attachment cleanups
        for (auto [v, k] : cleanup_zxk_)
            if (engine_.g.has_vertex(v)) engine_.do_zxk(v, k);

        // 3. merge middle-row T pairs into crossings
        result_.crossings.assign(w_, std::vector<int>(w_, -1));
        for (int i = 0; i < w_; ++i)
            for (int j = 0; j < w_; ++j) {
                if (i == 0)
                    result_.crossings[i][j] = exit_[i][j];
                else if (i == w_ - 1)
                    result_.crossings[i][j] = entry_[i][j];
                else {
                    int a = entry_[i][j], b = exit_[i][j];
                    auto& wire = hwire_[i];
                    auto pa = std::find(wire.begin(), wire.end(), a) - wire.begin();
                    auto pb = std::find(wire.begin(), wire.end(), b) - wire.begin();
                    if (pa > pb) {
                        std::swap(a, b);
                        std::swap(pa, pb);
                    }
                    std::vector<int> run(wire.begin() + pa + 1, wire.begin() + pb);
                    if (run.empty()) return engine_.fail("crossing too tight");
                    for (int v : run)
                        if (engine_.g.degree(v) != 2)
                            return engine_.fail("run blocked by a junction");
                    if (run.size() % 2 == 0) {
                        // odd it up: one ZX^k removes the first interposed qudit
                        int k = pick_entangling_k(run[0]);
                        engine_.do_zxk(run[0], k);
                        run.erase(run.begin());
                    }
                    while (run.size() > 1) {
                        engine_.do_x_pair(run[0], run[1]);
                        run.erase(run.begin(), run.begin() + 2);
                    }
                    engine_.do_x_pair(a, run[0]);
                    // b survives and carries all four legs
                    wire.erase(wire.begin() + pa, wire.begin() + pb);
                    result_.crossings[i][j] = b;
                }
            }

        // 4. trim wire stubs outside the outermost crossings
        for (int i = 0; i < w_; ++i) {
            auto& wire = hwire_[i];
            auto pos = [&](int v) {
                return std::find(wire.begin(), wire.end(), v) - wire.begin();
            };
            long first = pos(result_.crossings[i][0]), last = pos(result_.crossings[i][w_ - 1]);
            if (first == static_cast<long>(wire.size()) || last == static_cast<long>(wire.size()))
                return engine_.fail("crossing fell off its wire");
            for (long t = 0; t < first; ++t) engine_.do_z(wire[t]);
            for (long t = last + 1; t < static_cast<long>(wire.size()); ++t)
                engine_.do_z(wire[t]);
            wire = std::vector<int>(wire.begin() + first, wire.begin() + last + 1);
        }

        // 5. shorten every inter-crossing run to a direct edge
        for (int i = 0; i < w_; ++i)
            for (int j = 0; j + 1 < w_; ++j) {
                auto& wire = hwire_[i];
                auto pa = std::find(wire.begin(), wire.end(), result_.crossings[i][j]) - wire.begin();
                auto pb = std::find(wire.begin(), wire.end(), result_.crossings[i][j + 1]) -
                          wire.begin();
                std::vector<int> run(wire.begin() + pa + 1, wire.begin() + pb);
                if (!shorten_run(run)) return false;
                wire.erase(wire.begin() + pa + 1, wire.begin() + pb);
            }
        for (int j = 0; j < w_; ++j)
            for (int i = 0; i + 1 < w_; ++i) {
                std::vector<int> run;
                for (int v : vseg_[j][i])
                    if (engine_.g.has_vertex(v) && v != result_.crossings[i][j] &&
                        v != result_.crossings[i + 1][j])
                        run.push_back(v);
                if (!shorten_run(run)) return false;
            }

        // the cluster-like grid should be all that is left
        return verify_grid();
    }

    // shortest cycle through an edge is chordless; scan for a reasonably
    // long one, measure everything else away, and contract the four arcs
    bool carve_cycle() {
        std::vector<int> best;
        for (const auto& [a, nbs] : engine_.g.adj) {
            for (const auto& [b, wgt] : nbs) {
                if (a >= b) continue;
                // BFS a -> b avoiding the direct edge
                std::map<int, int> parent;
                parent[a] = -1;
                std::vector<int> frontier{a};
                std::vector<int> path;
                while (!frontier.empty() && path.empty()) {
                    std::vector<int> next;
                    for (int v : frontier) {
                        for (int u : engine_.adj.at(v)) {
                            if (v == a && u == b) continue;
                            if (parent.count(u)) continue;
                            parent[u] = v;
                            if (u == b) {
                                for (int p = u; p != -1; p = parent.at(p)) path.push_back(p);
                                std::reverse(path.begin(), path.end());
                                break;
                            }
                            next.push_back(u);
                        }
                        if (!path.empty()) break;
                    }
                    std::sort(next.begin(), next.end());
                    frontier.swap(next);
                }
                if (path.size() >= 4 && path.size() > best.size()) best = path;
                if (best.size() >= 16) break;
            }
            if (best.size() >= 16) break;
        }
        if (best.size() < 4) return engine_.fail("no cycle to carve");

        std::set<int> keep(best.begin(), best.end());
        for (int v : engine_.g.vertices())
            if (!keep.count(v)) engine_.do_z(v);

        int len = static_cast<int>(best.size());
        std::array<int, 4> cut;
        for (int t = 0; t < 4; ++t) cut[t] = t * len / 4;
        result_.crossings = {{best[cut[0]], best[cut[1]]}, {best[cut[3]], best[cut[2]]}};
        for (int t = 0; t < 4; ++t) {
            int from = cut[t], to = cut[(t + 1) % 4];
            std::vector<int> run;
            for (int s = (from + 1) % len; s != to; s = (s + 1) % len) run.push_back(best[s]);
            if (!shorten_run(run)) return false;
        }
        return verify_grid();
    }

    int pick_entangling_k(int v) {
        // v has exactly two neighbors; choose k so the induced edge summed
        // with any existing one stays nonzero
        if (engine_.g.degree(v) != 2)
            throw std::logic_error("pick_entangling_k: run vertex is not degree 2");
        auto it = engine_.g.adj.at(v).begin();
        auto [x, p] = *it;
        ++it;
        auto [y, q] = *it;
        int r = engine_.g.weight(x, y);
        for (int k = 1; k < dim_.d; ++k)
            if (mod_d(r - static_cast<long long>(k) * p * q, dim_.d) != 0) return k;
        return 1;  // unreachable for prime d >= 3
    }

    bool shorten_run(std::vector<int> run) {
        for (int v : run)
            if (engine_.g.degree(v) != 2) return engine_.fail("run blocked by a junction");
        if (run.size() % 2 == 1) {
            int k = pick_entangling_k(run[0]);
            engine_.do_zxk(run[0], k);
            run.erase(run.begin());
        }
        while (run.size() >= 2) {
            engine_.do_x_pair(run[0], run[1]);
            run.erase(run.begin(), run.begin() + 2);
        }
        return true;
    }

    bool verify_grid() {
        std::set<int> want;
        for (int i = 0; i < w_; ++i)
            for (int j = 0; j < w_; ++j) want.insert(result_.crossings[i][j]);
        auto vs = engine_.g.vertices();
        if (std::set<int>(vs.begin(), vs.end()) != want)
            return engine_.fail("leftover qudits after reduction");
        for (int i = 0; i < w_; ++i)
            for (int j = 0; j < w_; ++j) {
                int expected_degree = (i > 0) + (i < w_ - 1) + (j > 0) + (j < w_ - 1);
                if (engine_.g.degree(result_.crossings[i][j]) != expected_degree)
                    return engine_.fail("grid adjacency wrong after reduction");
                if (j + 1 < w_ &&
                    engine_.g.weight(result_.crossings[i][j], result_.crossings[i][j + 1]) == 0)
                    return engine_.fail("missing horizontal grid edge");
                if (i + 1 < w_ &&
                    engine_.g.weight(result_.crossings[i][j], result_.crossings[i + 1][j]) == 0)
                    return engine_.fail("missing vertical grid edge");
            }
        return true;
    }

    std::set<int> net_;
    std::vector<int> bypass_;
    std::set<int> tees_;
};

inline ReduceResult reduce_to_cluster(const PercLattice& lat, const EdgeConfig& cfg,
                                      const PrimeDim& dim, int k_spt, int target_w,
                                      uint64_t seed) {
    ClusterCarver carver(lat, cfg, dim, k_spt, target_w, seed);
    return carver.run();
}

// ---------------------------------------------------------------------------
// schedule oracle: replay one step on its induced neighborhood (frames
// stripped) and compare the symbolic result to a forced-outcome
// state-vector measurement.  Returns nullopt if the excerpt exceeds the
// qudit limit.
inline std::optional<double> verify_step_excerpt(const GraphLikeState& host,
                                                 const ScheduleStep& step, int max_qudits = 10) {
    std::set<int> region;
    for (int v : step.vertices) {
        if (!host.has_vertex(v)) return std::nullopt;
        region.insert(v);
        for (const auto& [u, w] : host.adj.at(v)) region.insert(u);
    }
    if (static_cast<int>(region.size()) > max_qudits) return std::nullopt;

    GraphLikeState sub(host.dim);
    for (int v : region) sub.add_vertex(v);
    for (int v : region)
        for (const auto& [u, w] : host.adj.at(v))
            if (region.count(u) && v < u) sub.add_edge(v, u, w);

    GraphLikeState after = sub;
    std::vector<std::tuple<int, Basis, int>> plan;
    switch (step.op) {
        case ScheduleStep::Op::Z:
            after.measure_z(step.vertices[0], step.outcomes[0]);
            plan.push_back({step.vertices[0], basis_computational(host.dim), step.outcomes[0]});
            break;
        case ScheduleStep::Op::XPair:
            after.measure_x_pair(step.vertices[0], step.vertices[1], step.outcomes[0],
                                 step.outcomes[1]);
            plan.push_back({step.vertices[0], basis_fourier(host.dim), step.outcomes[0]});
            plan.push_back({step.vertices[1], basis_fourier(host.dim), step.outcomes[1]});
            break;
        case ScheduleStep::Op::ZXk:
            after.measure_zxk(step.vertices[0], step.k, step.outcomes[0]);
            plan.push_back({step.vertices[0], basis_zxk(host.dim, step.k), step.outcomes[0]});
            break;
    }

    StateVector truth = sub.to_statevector();
    std::vector<int> live = sub.site_order();
    for (const auto& [v, basis, outcome] : plan) {
        auto it = std::find(live.begin(), live.end(), v);
        int site = static_cast<int>(it - live.begin());
        measure_remove(truth, site, basis, outcome);
        live.erase(it);
    }
    return fidelity_up_to_phase(truth, after.to_statevector());
}

// replay a whole schedule from the initial graph, oracle-checking each
// step's excerpt; returns the minimum fidelity over checked steps
struct ScheduleAudit {
    int checked = 0;
    int skipped = 0;
    double min_fidelity = 1.0;
};

inline ScheduleAudit audit_schedule(const GraphLikeState& initial,
                                    const std::vector<ScheduleStep>& schedule,
                                    int max_qudits = 10) {
    ScheduleAudit audit;
    GraphLikeState g = initial;
    for (const auto& step : schedule) {
        GraphLikeState stripped(g.dim);
        for (int v : g.vertices()) stripped.add_vertex(v);
        for (const auto& [v, nbs] : g.adj)
            for (const auto& [u, w] : nbs)
                if (v < u) stripped.add_edge(v, u, w);
        auto f = verify_step_excerpt(stripped, step, max_qudits);
        if (f) {
            audit.checked += 1;
            audit.min_fidelity = std::min(audit.min_fidelity, *f);
        } else {
            audit.skipped += 1;
        }
        switch (step.op) {
            case ScheduleStep::Op::Z:
                g.measure_z(step.vertices[0], step.outcomes[0]);
                break;
            case ScheduleStep::Op::XPair:
                g.measure_x_pair(step.vertices[0], step.vertices[1], step.outcomes[0],
                                 step.outcomes[1]);
                break;
            case ScheduleStep::Op::ZXk:
                g.measure_zxk(step.vertices[0], step.k, step.outcomes[0]);
                break;
        }
    }
    return audit;
}

inline nlohmann::json schedule_to_json(const ReduceResult& r, const PrimeDim& dim, int k_spt,
                                       int L, const char* kind, uint64_t seed) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : r.schedule) {
        nlohmann::json js{{"op", schedule_op_name(s.op)},
                          {"vertices", s.vertices},
                          {"outcomes", s.outcomes}};
        if (s.op == ScheduleStep::Op::ZXk) js["k"] = s.k;
        steps.push_back(js);
    }
    return {{"schema", "quditmbc.schedule/1"},
            {"d", dim.d},
            {"k", k_spt},
            {"L", L},
            {"kind", kind},
            {"seed", seed},
            {"version", QUDITMBC_VERSION},
            {"rng", rng_name()},
            {"ok", r.ok},
            {"error", r.error},
            {"crossings", r.crossings},
            {"steps", steps},
            {"final_graph", r.ok ? graph_to_json(r.final_graph) : nlohmann::json()}};
}

}  // namespace qmbc

#endif
