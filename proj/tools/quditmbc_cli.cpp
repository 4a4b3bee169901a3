/*
 * quditmbc command-line front end.
 *
 *   percolate  spanning-probability sweeps over L (CSV, one row per L)
 *   stability  edge-deletion stability curves (CSV, one row per p)
 *   verify     rule / gate / symmetry / ddw oracle suites (JSON report)
 *   reduce     carve a w x w cluster-like grid from one sampled instance
 *              (JSON schedule + final graph)
 *
 * Exit codes: 0 success, 2 configuration error, 3 stochastic failure
 * (subcritical instance).  All randomness flows from --seed through the
 * splitmix64 stream generator, so identical invocations produce identical
 * files; CSV sidecar .meta.json files carry the RNG identity and timing.
 */

#include <chrono>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "quditmbc/percolation.hpp"
#include "quditmbc/reduce.hpp"
#include "quditmbc/verify.hpp"
#include "quditmbc/version.hpp"

using namespace qmbc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStochastic = 3;

// "12" | "5,10,15" | "5..40" | "5..40:5"
std::vector<int> parse_int_list(const std::string& text, int default_step = 5) {
    std::vector<int> out;
    auto range_pos = text.find("..");
    if (range_pos != std::string::npos) {
        int lo = std::stoi(text.substr(0, range_pos));
        std::string rest = text.substr(range_pos + 2);
        int step = default_step;
        auto colon = rest.find(':');
        if (colon != std::string::npos) {
            step = std::stoi(rest.substr(colon + 1));
            rest = rest.substr(0, colon);
        }
        int hi = std::stoi(rest);
        if (step <= 0 || hi < lo) throw CLI::ValidationError("bad range: " + text);
        for (int v = lo; v <= hi; v += step) out.push_back(v);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    if (out.empty()) throw CLI::ValidationError("empty list: " + text);
    return out;
}

// "0..0.5:0.02" | "0,0.1,0.2"
std::vector<double> parse_double_grid(const std::string& text) {
    std::vector<double> out;
    auto range_pos = text.find("..");
    if (range_pos != std::string::npos) {
        double lo = std::stod(text.substr(0, range_pos));
        std::string rest = text.substr(range_pos + 2);
        double step = 0.02;
        auto colon = rest.find(':');
        if (colon != std::string::npos) {
            step = std::stod(rest.substr(colon + 1));
            rest = rest.substr(0, colon);
        }
        double hi = std::stod(rest);
        if (step <= 0 || hi < lo) throw CLI::ValidationError("bad grid: " + text);
        for (double v = lo; v <= hi + 1e-12; v += step) out.push_back(v);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw CLI::ValidationError("empty grid: " + text);
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << text;
}

void emit_rows(const std::string& out_path, const std::string& format,
               const std::vector<CsvRow>& rows, const nlohmann::json& meta) {
    if (format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows)
            arr.push_back({{"kind", perc_kind_name(r.kind)},
                           {"d", r.d},
                           {"L", r.L},
                           {"trials", r.trials},
                           {"seed", r.seed},
                           {"delete_p", r.delete_p},
                           {"prob", r.prob},
                           {"stderr", r.se}});
        nlohmann::json doc{{"schema", "quditmbc.perc-json/1"}, {"meta", meta}, {"rows", arr}};
        std::string text = doc.dump(2) + "\n";
        if (out_path.empty())
            std::cout << text;
        else
            write_text(out_path, text);
        return;
    }
    if (format != "csv") throw std::invalid_argument("unknown format: " + format);
    if (out_path.empty()) {
        write_percolation_csv(std::cout, rows);
    } else {
        write_percolation_csv(out_path, rows);
        write_text(out_path + ".meta.json", meta.dump(2) + "\n");
        std::cerr << "wrote " << out_path << " and " << out_path << ".meta.json\n";
    }
}

double wall_ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qudit MBQC toolkit: percolation sweeps and oracle verification"};
    app.set_version_flag("--version", QUDITMBC_VERSION);
    app.require_subcommand(1);

    int d = 3, k_spt = 1, trials = 10000, threads = default_thread_count();
    int target_w = 2, reduce_L = 10, patterns = 50, deletions = 50;
    uint64_t seed = 1;
    std::string lattice = "honeycomb", l_text = "10", p_text = "0..0.5:0.02";
    std::string suite = "all", out_path, format = "csv";

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--d", d, "qudit dimension (prime)");
        cmd->add_option("--seed", seed, "64-bit RNG seed");
        cmd->add_option("--out", out_path, "output file (default: stdout)");
    };

    CLI::App* percolate = app.add_subcommand("percolate", "spanning probability vs system size");
    add_common(percolate);
    percolate->add_option("--lattice", lattice, "honeycomb | square");
    percolate->add_option("--L", l_text, "sizes: N | a,b,c | lo..hi[:step]");
    percolate->add_option("--trials", trials, "outcome patterns per point");
    percolate->add_option("--threads", threads, "worker threads (env QMBC_THREADS)");
    percolate->add_option("--format", format, "csv | json");

    CLI::App* stability = app.add_subcommand("stability", "spanning probability vs deletion p");
    add_common(stability);
    stability->add_option("--lattice", lattice, "honeycomb | square");
    stability->add_option("--L", l_text, "sizes: N | a,b,c | lo..hi[:step]");
    stability->add_option("--p", p_text, "deletion grid: lo..hi[:step] | comma list");
    stability->add_option("--patterns", patterns, "outcome patterns per point");
    stability->add_option("--deletions", deletions, "deletion instances per pattern");
    stability->add_option("--threads", threads, "worker threads");
    stability->add_option("--format", format, "csv | json");

    CLI::App* verify = app.add_subcommand("verify", "oracle verification suites");
    add_common(verify);
    verify->add_option("--suite", suite, "rules | gates | symmetry | ddw | all");
    verify->add_option("--k", k_spt, "resource-state class index");

    CLI::App* reduce = app.add_subcommand("reduce", "carve a cluster-like grid");
    add_common(reduce);
    reduce->add_option("--lattice", lattice, "honeycomb | square");
    reduce->add_option("--L", reduce_L, "linear system size");
    reduce->add_option("--target", target_w, "grid side w (w x w crossings)");
    reduce->add_option("--k", k_spt, "resource-state class index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    auto t0 = std::chrono::steady_clock::now();
    try {
        PrimeDim dim(d);  // throws on non-prime

        if (percolate->parsed() || stability->parsed()) {
            PercKind kind;
            if (lattice == "honeycomb")
                kind = PercKind::Honeycomb;
            else if (lattice == "square")
                kind = PercKind::Square;
            else
                throw std::invalid_argument("unknown lattice: " + lattice);
            auto sizes = parse_int_list(l_text);
            std::vector<CsvRow> rows;
            if (percolate->parsed()) {
                for (int L : sizes) {
                    auto lat = build_perc_lattice(kind, L);
                    uint64_t sub = make_stream(seed, 7777ULL + L).next();
                    auto pt = percolation_probability(lat, dim, trials, sub, threads);
                    rows.push_back({kind, d, L, trials, seed, 0.0, pt.prob, pt.se});
                }
                emit_rows(out_path, format, rows,
                          percolation_meta("percolate", d, seed, threads, wall_ms_since(t0)));
            } else {
                auto grid = parse_double_grid(p_text);
                for (int L : sizes) {
                    auto lat = build_perc_lattice(kind, L);
                    uint64_t sub = make_stream(seed, 8888ULL + L).next();
                    auto curve = stability_curve(lat, dim, grid, patterns, deletions, sub, threads);
                    for (const auto& pt : curve)
                        rows.push_back(
                            {kind, d, L, patterns * deletions, seed, pt.delete_p, pt.prob, pt.se});
                }
                emit_rows(out_path, format, rows,
                          percolation_meta("stability", d, seed, threads, wall_ms_since(t0)));
            }
            return kExitOk;
        }

        if (verify->parsed()) {
            bool needs_odd = suite == "rules" || suite == "gates" || suite == "all";
            if (needs_odd && !dim.odd) {
                std::cerr << "error: suite '" << suite << "' requires an odd prime d\n";
                return kExitConfig;
            }
            if (mod_d(k_spt, d) == 0) {
                std::cerr << "error: k must be nonzero mod d\n";
                return kExitConfig;
            }
            std::vector<SuiteResult> results;
            if (suite == "rules" || suite == "all") results.push_back(run_suite_rules(dim, seed));
            if (suite == "gates" || suite == "all") results.push_back(run_suite_gates(dim, seed));
            if (suite == "symmetry" || suite == "all")
                results.push_back(run_suite_symmetry(dim, k_spt));
            if (suite == "ddw" || suite == "all") results.push_back(run_suite_ddw(dim, k_spt));
            if (results.empty()) {
                std::cerr << "error: unknown suite '" << suite << "'\n";
                return kExitConfig;
            }
            bool pass = true;
            nlohmann::json arr = nlohmann::json::array();
            const SuiteCheck* first_fail = nullptr;
            for (const auto& r : results) {
                arr.push_back(r.to_json());
                if (!r.pass && !first_fail) first_fail = r.first_failure();
                pass = pass && r.pass;
            }
            nlohmann::json report{{"schema", "quditmbc.verify/1"},
                                  {"d", d},
                                  {"k", k_spt},
                                  {"seed", seed},
                                  {"rng", rng_name()},
                                  {"version", QUDITMBC_VERSION},
                                  {"suites", arr},
                                  {"pass", pass},
                                  {"wall_ms", wall_ms_since(t0)}};
            std::string text = report.dump(2) + "\n";
            if (out_path.empty())
                std::cout << text;
            else
                write_text(out_path, text);
            if (!pass) {
                std::cerr << "FAILED: " << (first_fail ? first_fail->name : "unknown check")
                          << "\n";
                return 1;
            }
            return kExitOk;
        }

        if (reduce->parsed()) {
            if (d < 3) {
                std::cerr << "error: reduce requires odd prime d >= 3\n";
                return kExitConfig;
            }
            if (mod_d(k_spt, d) == 0) {
                std::cerr << "error: k must be nonzero mod d\n";
                return kExitConfig;
            }
            PercKind kind = lattice == "square" ? PercKind::Square : PercKind::Honeycomb;
            auto lat = build_perc_lattice(kind, reduce_L);
            SplitMix64 rng = make_stream(seed, 0);
            auto cfg = sample_config(lat, dim, rng);
            auto result = reduce_to_cluster(lat, cfg, dim, k_spt, target_w, seed);
            // small instances are additionally checked against the
            // state-vector oracle, step by step
            nlohmann::json audit_json;
            if (result.ok) {
                auto audit = audit_schedule(result.initial_graph, result.schedule);
                audit_json = {{"steps_checked", audit.checked},
                              {"steps_skipped", audit.skipped},
                              {"min_fidelity", audit.min_fidelity}};
            }
            auto j = schedule_to_json(result, dim, k_spt, reduce_L, perc_kind_name(kind), seed);
            j["audit"] = audit_json;
            j["wall_ms"] = wall_ms_since(t0);
            std::string text = j.dump(2) + "\n";
            if (out_path.empty())
                std::cout << text;
            else
                write_text(out_path, text);
            if (!result.ok) {
                std::cerr << "reduction failed: " << result.error
                          << " (try another --seed or a larger --L)\n";
                return kExitStochastic;
            }
            return kExitOk;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitConfig;
}
