// immtool: generators, searches, and verifiers for graph immersion
// certificates. Exit codes: 0 success, 1 honest search failure, 2 bad
// input/preconditions, 3 internal invariant violation.

#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "imm/budget.hpp"
#include "imm/connectivity.hpp"
#include "imm/decomposition.hpp"
#include "imm/generators.hpp"
#include "imm/immersion.hpp"
#include "imm/json_io.hpp"
#include "imm/lifting.hpp"
#include "imm/linegraph.hpp"
#include "imm/oracle.hpp"
#include "imm/packing.hpp"

namespace {

using namespace imm;

constexpr int kExitOk = 0;
constexpr int kExitSearchFailed = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitInternal = 3;

MultiGraph load_graph(const std::string& path) {
    json j = read_json_file(path);
    if (j.contains("kind")) {
        auto [kind, payload] = read_envelope(j);
        if (kind != "graph") throw Error(ErrorCode::ParseError, "expected a graph artifact");
        return graph_from_json(payload);
    }
    return graph_from_json(j);
}

void maybe_write_dot(const std::string& path, const std::string& dot) {
    if (path.empty()) return;
    std::ofstream out(path);
    out << dot;
}

struct BudgetFlags {
    std::int64_t ms = 60000;
    std::int64_t nodes = 2000000;
    SearchBudget make() const { return SearchBudget(nodes, ms); }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph immersion toolbox"};
    app.require_subcommand(1);

    // ---- generate ----------------------------------------------------------
    auto* gen = app.add_subcommand("generate", "emit a deterministic instance");
    std::string gen_family = "grid", gen_out = "graph.json", gen_dot;
    int gen_g = 7, gen_t = 2, gen_r = 5, gen_n = 20, gen_k = 4, gen_maxdeg = 0;
    int gen_blocks = 6, gen_clique = 4, gen_sep = 2, gen_len = 10;
    std::uint64_t gen_seed = 1;
    gen->add_option("--family", gen_family, "grid | ctr | random-kec | caterpillar | ladder");
    gen->add_option("--g", gen_g, "grid side");
    gen->add_option("--t", gen_t);
    gen->add_option("--r", gen_r);
    gen->add_option("--n", gen_n);
    gen->add_option("--k", gen_k);
    gen->add_option("--max-degree", gen_maxdeg);
    gen->add_option("--blocks", gen_blocks);
    gen->add_option("--clique", gen_clique);
    gen->add_option("--sep", gen_sep);
    gen->add_option("--len", gen_len);
    gen->add_option("--seed", gen_seed);
    gen->add_option("--out", gen_out);
    gen->add_option("--dot", gen_dot);

    // ---- reduce -------------------------------------------------------------
    auto* red = app.add_subcommand("reduce", "degree reduction to {k, k+1} by liftings");
    std::string red_in, red_out = "reduced.json", red_script = "script.json";
    int red_k = 4;
    red->add_option("--in", red_in)->required();
    red->add_option("--k", red_k);
    red->add_option("--out", red_out);
    red->add_option("--script", red_script);

    // ---- connectivity -------------------------------------------------------
    auto* conn = app.add_subcommand("connectivity", "lambda and k-edge-connectivity checks");
    std::string conn_in;
    int conn_u = -1, conn_v = -1, conn_k = -1;
    std::vector<int> conn_set;
    conn->add_option("--in", conn_in)->required();
    conn->add_option("--u", conn_u);
    conn->add_option("--v", conn_v);
    conn->add_option("--k", conn_k);
    conn->add_option("--set", conn_set, "restrict the check to this vertex set");

    // ---- decompose ----------------------------------------------------------
    auto* dec = app.add_subcommand("decompose", "heuristic tree decomposition");
    std::string dec_in, dec_out = "td.json";
    dec->add_option("--in", dec_in)->required();
    dec->add_option("--out", dec_out);

    // ---- verify-td ----------------------------------------------------------
    auto* vtd = app.add_subcommand("verify-td", "check W1/W2/W4/W5 (and W3 with --linked)");
    std::string vtd_graph, vtd_td;
    bool vtd_linked = false;
    vtd->add_option("--graph", vtd_graph)->required();
    vtd->add_option("--td", vtd_td)->required();
    vtd->add_flag("--linked", vtd_linked);

    // ---- verify-ring --------------------------------------------------------
    auto* vring = app.add_subcommand("verify-ring", "check R1-R4");
    std::string vring_graph, vring_ring;
    vring->add_option("--graph", vring_graph)->required();
    vring->add_option("--ring", vring_ring)->required();

    // ---- find-c2r -----------------------------------------------------------
    auto* c2r = app.add_subcommand("find-c2r", "double cycle immersion search");
    std::string c2r_in, c2r_out = "cert.json", c2r_dot;
    int c2r_r = 4;
    BudgetFlags c2r_budget;
    c2r->add_option("--in", c2r_in)->required();
    c2r->add_option("--r", c2r_r);
    c2r->add_option("--budget-ms", c2r_budget.ms);
    c2r->add_option("--budget-nodes", c2r_budget.nodes);
    c2r->add_option("--out", c2r_out);
    c2r->add_option("--dot", c2r_dot);

    // ---- find-ctr -----------------------------------------------------------
    auto* ctr = app.add_subcommand("find-ctr", "C_{t,r} immersion pipeline");
    std::string ctr_in, ctr_out = "cert.json", ctr_rooted, ctr_dot;
    int ctr_t = 2, ctr_r = 4;
    BudgetFlags ctr_budget;
    ctr->add_option("--in", ctr_in)->required();
    ctr->add_option("--t", ctr_t);
    ctr->add_option("--r", ctr_r);
    ctr->add_option("--rooted", ctr_rooted, "json file with the allowed terminal set");
    ctr->add_option("--budget-ms", ctr_budget.ms);
    ctr->add_option("--budget-nodes", ctr_budget.nodes);
    ctr->add_option("--out", ctr_out);
    ctr->add_option("--dot", ctr_dot);

    // ---- linegraph ----------------------------------------------------------
    auto* lg = app.add_subcommand("linegraph", "analyze | transform | root");
    auto* lga = lg->add_subcommand("analyze", "L(C_{t,r}) minor pipeline");
    std::string lga_in, lga_out = "minor.json";
    int lga_t = 2, lga_r = 4;
    BudgetFlags lga_budget;
    lga->add_option("--in", lga_in)->required();
    lga->add_option("--t", lga_t);
    lga->add_option("--r", lga_r);
    lga->add_option("--budget-ms", lga_budget.ms);
    lga->add_option("--budget-nodes", lga_budget.nodes);
    lga->add_option("--out", lga_out);
    auto* lgt = lg->add_subcommand("transform", "immersion certificate to line-graph minor");
    std::string lgt_graph, lgt_cert, lgt_out = "minor.json";
    lgt->add_option("--graph", lgt_graph)->required();
    lgt->add_option("--cert", lgt_cert)->required();
    lgt->add_option("--out", lgt_out);
    auto* lgr = lg->add_subcommand("root", "Krausz root recovery");
    std::string lgr_in, lgr_out = "root.json";
    int lgr_ceiling = 60;
    lgr->add_option("--in", lgr_in)->required();
    lgr->add_option("--ceiling", lgr_ceiling);
    lgr->add_option("--out", lgr_out);

    // ---- oracle --------------------------------------------------------------
    auto* orc = app.add_subcommand("oracle", "exhaustive tiny-scale baselines");
    auto* orc_imm = orc->add_subcommand("immersion");
    std::string oi_graph, oi_pattern, oi_out;
    int orc_maxv = 8, orc_maxe = 16;
    std::int64_t orc_ms = 30000;
    orc_imm->add_option("--graph", oi_graph)->required();
    orc_imm->add_option("--pattern", oi_pattern)->required();
    orc_imm->add_option("--max-vertices", orc_maxv);
    orc_imm->add_option("--max-edges", orc_maxe);
    orc_imm->add_option("--max-ms", orc_ms);
    orc_imm->add_option("--out", oi_out);
    auto* orc_min = orc->add_subcommand("minor");
    std::string om_graph, om_pattern, om_out;
    orc_min->add_option("--graph", om_graph)->required();
    orc_min->add_option("--pattern", om_pattern)->required();
    orc_min->add_option("--max-vertices", orc_maxv);
    orc_min->add_option("--max-edges", orc_maxe);
    orc_min->add_option("--max-ms", orc_ms);
    orc_min->add_option("--out", om_out);
    auto* orc_cut = orc->add_subcommand("cut");
    std::string oc_graph;
    std::vector<int> oc_a, oc_b;
    orc_cut->add_option("--graph", oc_graph)->required();
    orc_cut->add_option("--a", oc_a)->required();
    orc_cut->add_option("--b", oc_b)->required();

    // ---- verify (one entry point over the envelope) --------------------------
    auto* ver = app.add_subcommand("verify", "re-verify any artifact envelope");
    std::string ver_host, ver_artifact;
    ver->add_option("--host", ver_host, "host graph (for certificates)");
    ver->add_option("--artifact", ver_artifact)->required();

    // ---- run ------------------------------------------------------------------
    auto* run = app.add_subcommand("run", "experiment harness from a config file");
    std::string run_config;
    run->add_option("--config", run_config)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            Rng rng(gen_seed);
            MultiGraph g;
            if (gen_family == "grid") g = gen_grid(gen_g);
            else if (gen_family == "ctr") g = gen_ctr(gen_t, gen_r);
            else if (gen_family == "random-kec")
                g = gen_random_k_edge_connected(gen_n, gen_k, gen_maxdeg, rng);
            else if (gen_family == "caterpillar")
                g = gen_caterpillar_of_cliques(gen_blocks, gen_clique, gen_sep);
            else if (gen_family == "ladder") g = gen_ladder(gen_len);
            else throw Error(ErrorCode::InvalidParams, "unknown family " + gen_family);
            write_envelope_file(gen_out, "graph", graph_to_json(g));
            maybe_write_dot(gen_dot, graph_to_dot(g));
            std::cout << "wrote " << gen_out << " (" << g.vertex_count() << " vertices, "
                      << g.edge_count() << " edges)\n";
            return kExitOk;
        }
        if (*red) {
            MultiGraph g = load_graph(red_in);
            ReductionResult res = reduce_degrees(g, red_k);
            write_envelope_file(red_out, "graph", graph_to_json(res.reduced));
            write_envelope_file(red_script, "script", script_to_json(res.script));
            std::cout << "reduced to degrees in {" << red_k << ", " << red_k + 1 << "} with "
                      << res.script.steps.size() << " lifts\n";
            return kExitOk;
        }
        if (*conn) {
            MultiGraph g = load_graph(conn_in);
            if (conn_u >= 0 && conn_v >= 0) {
                std::cout << "lambda(" << conn_u << "," << conn_v
                          << ") = " << local_edge_connectivity(g, conn_u, conn_v) << "\n";
                return kExitOk;
            }
            if (conn_k >= 0) {
                ConnectivityResult res;
                if (!conn_set.empty()) {
                    std::set<VertexId> s(conn_set.begin(), conn_set.end());
                    res = set_k_edge_connected(g, s, conn_k);
                } else {
                    res = is_k_edge_connected(g, conn_k);
                }
                if (res.ok) {
                    std::cout << "yes: " << conn_k << "-edge-connected\n";
                    return kExitOk;
                }
                std::cout << "no: witness cut of size " << res.witness->cut_edges.size() << "\n";
                return kExitSearchFailed;
            }
            throw Error(ErrorCode::InvalidParams, "give --u/--v or --k");
        }
        if (*dec) {
            MultiGraph g = load_graph(dec_in);
            TreeDecomposition td = heuristic_td(g);
            TdReport rep = verify_td(g, td);
            write_envelope_file(dec_out, "tree-decomposition", td_to_json(td));
            std::cout << "width " << td.width() << " (W1=" << rep.w1 << " W2=" << rep.w2
                      << " W4=" << rep.w4 << " W5=" << rep.w5 << ")\n";
            return kExitOk;
        }
        if (*vtd) {
            MultiGraph g = load_graph(vtd_graph);
            auto [kind, payload] = read_envelope(read_json_file(vtd_td));
            TreeDecomposition td = td_from_json(payload);
            TdReport rep = verify_td(g, td);
            std::cout << "W1=" << rep.w1 << " W2=" << rep.w2 << " W4=" << rep.w4
                      << " W5=" << rep.w5;
            bool ok = rep.w1 && rep.w2;
            if (vtd_linked) {
                LinkedResult lr = verify_linked(g, td);
                std::cout << " W3=" << lr.linked;
                ok = ok && lr.linked;
            }
            std::cout << (rep.detail.empty() ? "" : "  [" + rep.detail + "]") << "\n";
            return ok ? kExitOk : kExitSearchFailed;
        }
        if (*vring) {
            MultiGraph g = load_graph(vring_graph);
            auto [kind, payload] = read_envelope(read_json_file(vring_ring));
            RingDecomposition ring = ring_from_json(payload);
            RingReport rep = verify_ring(g, ring);
            std::cout << "R1=" << rep.r1 << " R2=" << rep.r2 << " R3=" << rep.r3
                      << " R4=" << rep.r4
                      << (rep.detail.empty() ? "" : "  [" + rep.detail + "]") << "\n";
            return rep.valid() ? kExitOk : kExitSearchFailed;
        }
        if (*c2r) {
            MultiGraph g = load_graph(c2r_in);
            SearchBudget budget = c2r_budget.make();
            auto cert = find_double_cycle(g, c2r_r, budget);
            if (!cert) {
                std::cout << "no certificate within budget (" << budget.nodes_used()
                          << " nodes, " << budget.elapsed_ms() << " ms)\n";
                return kExitSearchFailed;
            }
            VerifyResult vr = verify_immersion(g, *cert);
            if (!vr.ok) {
                std::cerr << "internal: produced certificate failed: " << vr.violation << "\n";
                return kExitInternal;
            }
            write_envelope_file(c2r_out, "immersion", immersion_to_json(*cert));
            maybe_write_dot(c2r_dot, immersion_to_dot(g, *cert));
            std::cout << "C_{2," << c2r_r << "} certificate -> " << c2r_out << "\n";
            return kExitOk;
        }
        if (*ctr) {
            MultiGraph g = load_graph(ctr_in);
            SearchBudget budget = ctr_budget.make();
            CtrSearchResult res;
            if (!ctr_rooted.empty()) {
                json sj = read_json_file(ctr_rooted);
                std::set<VertexId> s;
                for (const auto& v : (sj.contains("payload") ? sj["payload"] : sj))
                    s.insert(v.get<VertexId>());
                res = find_ctr_rooted(g, s, ctr_t, ctr_r, budget);
            } else {
                res = find_ctr(g, ctr_t, ctr_r, budget);
            }
            for (const std::string& st : res.stages) std::cout << "  " << st << "\n";
            if (!res.cert) return kExitSearchFailed;
            VerifyResult vr = verify_immersion(g, *res.cert);
            if (!vr.ok) {
                std::cerr << "internal: certificate failed: " << vr.violation << "\n";
                return kExitInternal;
            }
            write_envelope_file(ctr_out, "immersion", immersion_to_json(*res.cert));
            maybe_write_dot(ctr_dot, immersion_to_dot(g, *res.cert));
            std::cout << "C_{" << ctr_t << "," << ctr_r << "} certificate -> " << ctr_out << "\n";
            return kExitOk;
        }
        if (*lga) {
            MultiGraph g = load_graph(lga_in);
            SearchBudget budget = lga_budget.make();
            AnalyzeResult res = analyze_line_graph(g, lga_t, lga_r, budget);
            for (const std::string& d : res.diagnostics) std::cout << "  " << d << "\n";
            if (!res.minor) return kExitSearchFailed;
            write_envelope_file(lga_out, "minor", minor_to_json(*res.minor));
            std::cout << "L(C_{" << lga_t << "," << lga_r << "}) minor -> " << lga_out << "\n";
            return kExitOk;
        }
        if (*lgt) {
            MultiGraph g = load_graph(lgt_graph);
            auto [kind, payload] = read_envelope(read_json_file(lgt_cert));
            ImmersionCertificate cert = immersion_from_json(payload, g);
            ImmersionToMinorResult res = immersion_to_minor(g, cert);
            write_envelope_file(lgt_out, "minor", minor_to_json(res.minor));
            std::cout << "minor certificate in L(host) -> " << lgt_out << "\n";
            return kExitOk;
        }
        if (*lgr) {
            MultiGraph g = load_graph(lgr_in);
            RootGraphResult res = root_graph(g, lgr_ceiling);
            write_envelope_file(lgr_out, "graph", graph_to_json(res.root));
            std::cout << "root graph -> " << lgr_out << "\n";
            return kExitOk;
        }
        if (*orc_imm) {
            MultiGraph g = load_graph(oi_graph);
            MultiGraph h = load_graph(oi_pattern);
            OracleBudget ob{orc_maxv, orc_maxe, orc_ms};
            auto cert = brute_immersion(g, h, ob);
            if (!cert) {
                std::cout << "no immersion (definitive within ceiling)\n";
                return kExitSearchFailed;
            }
            if (!oi_out.empty()) write_envelope_file(oi_out, "immersion", immersion_to_json(*cert));
            std::cout << "immersion exists\n";
            return kExitOk;
        }
        if (*orc_min) {
            MultiGraph g = load_graph(om_graph);
            MultiGraph h = load_graph(om_pattern);
            OracleBudget ob{orc_maxv, orc_maxe, orc_ms};
            auto cert = brute_minor(g, h, ob);
            if (!cert) {
                std::cout << "no minor (definitive within ceiling)\n";
                return kExitSearchFailed;
            }
            if (!om_out.empty()) write_envelope_file(om_out, "minor", minor_to_json(*cert));
            std::cout << "minor exists\n";
            return kExitOk;
        }
        if (*orc_cut) {
            MultiGraph g = load_graph(oc_graph);
            EdgeCut cut = brute_min_cut(g, std::set<VertexId>(oc_a.begin(), oc_a.end()),
                                        std::set<VertexId>(oc_b.begin(), oc_b.end()));
            std::cout << "min cut size " << cut.cut_edges.size() << "\n";
            return kExitOk;
        }
        if (*ver) {
            auto [kind, payload] = read_envelope(read_json_file(ver_artifact));
            if (kind == "graph") {
                graph_from_json(payload);
                std::cout << "graph parses\n";
                return kExitOk;
            }
            MultiGraph host = load_graph(ver_host);
            if (kind == "immersion") {
                ImmersionCertificate cert = immersion_from_json(payload, host);
                VerifyResult vr = verify_immersion(host, cert);
                std::cout << (vr.ok ? "immersion certificate verifies"
                                    : "violation: " + vr.violation)
                          << "\n";
                return vr.ok ? kExitOk : kExitSearchFailed;
            }
            if (kind == "minor") {
                MinorCertificate cert = minor_from_json(payload);
                VerifyResult vr = verify_minor(host, cert);
                std::cout << (vr.ok ? "minor certificate verifies" : "violation: " + vr.violation)
                          << "\n";
                return vr.ok ? kExitOk : kExitSearchFailed;
            }
            if (kind == "tree-decomposition") {
                TdReport rep = verify_td(host, td_from_json(payload));
                std::cout << "W1=" << rep.w1 << " W2=" << rep.w2 << " W4=" << rep.w4
                          << " W5=" << rep.w5 << "\n";
                return rep.w1 && rep.w2 ? kExitOk : kExitSearchFailed;
            }
            if (kind == "ring-decomposition") {
                RingReport rep = verify_ring(host, ring_from_json(payload));
                std::cout << "R1-R4: " << rep.r1 << rep.r2 << rep.r3 << rep.r4 << "\n";
                return rep.valid() ? kExitOk : kExitSearchFailed;
            }
            if (kind == "packing") {
                TreePacking p = packing_from_json(payload);
                bool steiner = p.spanned != host.vertices();
                VerifyResult vr = verify_packing(host, p, steiner);
                std::cout << (vr.ok ? "packing verifies" : "violation: " + vr.violation) << "\n";
                return vr.ok ? kExitOk : kExitSearchFailed;
            }
            throw Error(ErrorCode::InvalidParams, "no verifier for kind " + kind);
        }
        if (*run) {
            json cfg = read_json_file(run_config);
            std::uint64_t seed = cfg.value("seed", 1);
            std::string family = cfg.value("family", "ctr");
            json params = cfg.value("params", json::object());
            int t = cfg.value("t", 2), r = cfg.value("r", 4);
            int trials = cfg.value("trials", 1);
            int jobs = std::max(1, cfg.value("jobs", 1));
            BudgetFlags bf;
            bf.ms = cfg.value("budgetMs", 60000);
            bf.nodes = cfg.value("budgetNodes", 2000000);
            std::string out = cfg.value("out", std::string("experiment-cert.json"));
            std::string dot = cfg.value("dot", std::string());

            auto generate_instance = [&](std::uint64_t trial_seed) {
                Rng rng(trial_seed);
                MultiGraph g;
                if (family == "grid") g = gen_grid(params.value("g", 7));
                else if (family == "ctr") g = gen_ctr(params.value("t", 3), params.value("r", 20));
                else if (family == "random-kec")
                    g = gen_random_k_edge_connected(params.value("n", 20), params.value("k", 4),
                                                    params.value("maxDegree", 0), rng);
                else if (family == "caterpillar")
                    g = gen_caterpillar_of_cliques(params.value("blocks", 6),
                                                   params.value("clique", 4),
                                                   params.value("sep", 2));
                else if (family == "ladder") g = gen_ladder(params.value("len", 10));
                else throw Error(ErrorCode::InvalidParams, "unknown family " + family);
                return g;
            };

            // per-trial state is isolated; trials fan out over a worker pool
            std::vector<json> trial_reports(trials);
            std::vector<int> trial_ok(trials, 0);
            std::mutex io_mutex;
            std::atomic<int> next_trial{0};
            auto worker = [&]() {
                for (;;) {
                    int i = next_trial.fetch_add(1);
                    if (i >= trials) break;
                    std::uint64_t trial_seed = seed + static_cast<std::uint64_t>(i);
                    json report;
                    report["seed"] = trial_seed;
                    try {
                        MultiGraph g = generate_instance(trial_seed);
                        SearchBudget budget = bf.make();
                        CtrSearchResult res = find_ctr(g, t, r, budget);
                        report["stages"] = res.stages;
                        report["nodesUsed"] = budget.nodes_used();
                        report["elapsedMs"] = budget.elapsed_ms();
                        report["success"] = res.cert.has_value();
                        if (res.cert) {
                            VerifyResult vr = verify_immersion(g, *res.cert);
                            if (!vr.ok) throw Error(ErrorCode::NotFound, vr.violation);
                            std::string path =
                                trials == 1 ? out : out + "." + std::to_string(i);
                            {
                                std::lock_guard<std::mutex> lock(io_mutex);
                                write_envelope_file(path, "immersion",
                                                    immersion_to_json(*res.cert));
                                if (!dot.empty() && i == 0)
                                    maybe_write_dot(dot, immersion_to_dot(g, *res.cert));
                            }
                            report["certPath"] = path;
                            trial_ok[i] = 1;
                        } else {
                            report["failedStage"] =
                                res.stages.empty() ? "search" : res.stages.back();
                        }
                    } catch (const Error& e) {
                        report["error"] = e.what();
                    }
                    trial_reports[i] = std::move(report);
                }
            };
            std::vector<std::thread> pool;
            for (int j = 0; j < std::min(jobs, trials); ++j) pool.emplace_back(worker);
            for (std::thread& th : pool) th.join();

            json report;
            report["family"] = family;
            report["t"] = t;
            report["r"] = r;
            report["trials"] = trial_reports.size() == 1 ? trial_reports[0] : json(trial_reports);
            int succeeded = 0;
            for (int ok : trial_ok) succeeded += ok;
            report["succeeded"] = succeeded;
            if (trial_reports.size() == 1) {
                for (auto& [k, v] : trial_reports[0].items()) report[k] = v;
                report.erase("trials");
            }
            std::cout << make_envelope("report", report).dump(2) << "\n";
            return succeeded == trials ? kExitOk : kExitSearchFailed;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
            case ErrorCode::NotFound:
                return kExitInternal;
            default:
                return kExitBadInput;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitBadInput;
}
