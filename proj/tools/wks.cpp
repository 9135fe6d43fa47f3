// Command-line front end: instance generation, optimal costs, online runs,
// the adaptive adversary, the recursive construction, request-list and
// bound queries, phase diagnostics and report conversion.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wks/harness.hpp"

using namespace wks;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw schema_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw schema_error("cannot write '" + path + "'");
    out << text;
}

WeightStyle parse_style(const std::string& s) {
    if (s == "uniform") return WeightStyle::uniform();
    auto colon = s.find(':');
    std::string head = s.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (head == "geometric") return WeightStyle::geometric(parse_rational(arg));
    if (head == "separated") return WeightStyle::separated(Int(arg));
    throw schema_error("unknown weight style '" + s + "'; use uniform, geometric:R, separated:NK");
}

std::size_t env_limit(std::size_t flag_value) {
    if (const char* e = std::getenv("WKS_LIMIT")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(e, &end, 10);
        if (end == e || *end != '\0' || v == 0) throw schema_error("bad WKS_LIMIT value");
        return static_cast<std::size_t>(v);
    }
    return flag_value;
}

std::vector<Point> parse_points(const std::string& s) {
    std::vector<Point> pts;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) pts.push_back(std::stoi(tok));
    return pts;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"weighted k-server laboratory on uniform metrics"};
    app.require_subcommand(1);
    std::size_t limit = kDefaultTableLimit;
    app.add_option("--limit", limit, "dense table size cap");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a random instance");
    int g_n = 4, g_k = 2, g_t = 10;
    std::string g_style = "uniform", g_out;
    std::uint64_t g_seed = 0;
    gen->add_option("--n", g_n);
    gen->add_option("--k", g_k);
    gen->add_option("--t", g_t);
    gen->add_option("--weights", g_style, "uniform | geometric:R | separated:NK");
    gen->add_option("--seed", g_seed);
    gen->add_option("--out", g_out);

    // opt
    auto* opt = app.add_subcommand("opt", "offline optimum of an instance");
    std::string o_in;
    opt->add_option("--in", o_in)->required();

    // run
    auto* run = app.add_subcommand("run", "run online algorithms over instances");
    std::vector<std::string> r_in, r_algos;
    std::string r_fmt = "csv", r_out;
    run->add_option("--in", r_in)->required();
    run->add_option("--algo", r_algos)->required();
    run->add_option("--format", r_fmt);
    run->add_option("--out", r_out);

    // adversary
    auto* adv = app.add_subcommand("adversary", "adaptive lower-bound run");
    int a_n = 5, a_k = 2, a_phases = 3, a_budget = 100000;
    std::uint64_t a_seed = 0;
    std::string a_algo = "wfa:lambda=1/2", a_fmt = "csv", a_out, a_transcript;
    adv->add_option("--n", a_n);
    adv->add_option("--k", a_k);
    adv->add_option("--phases", a_phases);
    adv->add_option("--budget", a_budget);
    adv->add_option("--seed", a_seed);
    adv->add_option("--algo", a_algo);
    adv->add_option("--format", a_fmt);
    adv->add_option("--out", a_out);
    adv->add_option("--transcript", a_transcript, "write per-step transcript here");

    // construct
    auto* con = app.add_subcommand("construct", "emit the recursive request tree");
    int c_level = 2;
    std::uint64_t c_seed = 0;
    std::string c_points, c_out, c_out_instance;
    con->add_option("--level", c_level);
    con->add_option("--seed", c_seed);
    con->add_option("--points", c_points, "comma-separated; default 1..n_{level+1}");
    con->add_option("--out", c_out, "pattern file");
    con->add_option("--out-instance", c_out_instance, "matching instance (uniform weights)");

    // lists
    auto* lst = app.add_subcommand("lists", "request lists of a pattern");
    std::string l_pattern, l_in;
    lst->add_option("--pattern", l_pattern)->required();
    lst->add_option("--in", l_in, "instance supplying weights and requests")->required();

    // bounds
    auto* bnd = app.add_subcommand("bounds", "list-size bound queries");
    int b_l = 1, b_t = 1, b_h = 0, b_k = 0;
    std::string b_class;
    bool b_dichotomy = false;
    // "--h" alone would collide with the built-in -h help short flag
    bnd->set_help_flag("--help", "print help");
    bnd->add_option("--l", b_l);
    bnd->add_option("--t", b_t);
    bnd->add_option("--h", b_h, "points already held by ancestors");
    bnd->add_option("--k", b_k, "tree depth (flat bounds)");
    bnd->add_option("--class", b_class, "comma-separated class counts");
    bnd->add_flag("--dichotomy", b_dichotomy, "overall bound for depth k");

    // diagnose
    auto* dia = app.add_subcommand("diagnose", "phase and lucky-point analysis");
    std::string d_in, d_algo = "wfa:lambda=1/2";
    int d_log2nk = 4;
    dia->add_option("--in", d_in)->required();
    dia->add_option("--algo", d_algo);
    dia->add_option("--log2nk", d_log2nk, "log2 of the phase constant n_k");

    // report
    auto* rep = app.add_subcommand("report", "convert a JSONL report");
    std::string p_in, p_fmt = "csv", p_out;
    rep->add_option("--in", p_in)->required();
    rep->add_option("--format", p_fmt);
    rep->add_option("--out", p_out);

    CLI11_PARSE(app, argc, argv);
    limit = env_limit(limit);

    if (*gen) {
        spill(g_out, emit_instance(gen_random(g_n, g_k, g_t, parse_style(g_style), g_seed)));
        return 0;
    }
    if (*opt) {
        Instance ins = parse_instance(slurp(o_in));
        std::cout << to_string(opt_cost(ins.u, ins.w, ins.c0, ins.sigma, limit)) << "\n";
        return 0;
    }
    if (*run) {
        ExperimentConfig cfg;
        cfg.algorithms = r_algos;
        cfg.limit = limit;
        for (const auto& f : r_in) cfg.instances.push_back(parse_instance(slurp(f)));
        spill(r_out, report(run_experiment(cfg), parse_format(r_fmt)));
        return 0;
    }
    if (*adv) {
        Universe u{a_n};
        WeightProfile w = separated_weights(a_k, n_seq(a_k));
        std::vector<Point> at(static_cast<std::size_t>(a_k), a_n);
        Configuration c0{at};
        auto alg = make_algorithm(a_algo, u, w, c0, limit);
        RunReport r = adversary_run(*alg, u, w, a_k, a_phases, a_budget, a_seed);
        if (!a_transcript.empty()) spill(a_transcript, emit_transcript(r));
        auto row = row_from_adversary(r, a_algo, a_n, a_seed);
        spill(a_out, report({row}, parse_format(a_fmt)));
        bool violated = !r.labeling_ok || !r.property_i_ok || !r.property_ii_ok || !r.eq2_ok ||
                        !r.eq3_ok;
        return violated ? 4 : 0;
    }
    if (*con) {
        std::vector<Point> pts = parse_points(c_points);
        if (pts.empty()) {
            Int n = c_level == 1 ? Int(2) : n_seq(c_level + 1);
            for (Point p = 1; Int(p) <= n; ++p) pts.push_back(p);
        }
        LowerBoundTree t = build_tree(c_level, pts, c_seed);
        spill(c_out, emit_pattern(t.pattern()));
        if (!c_out_instance.empty()) {
            Instance ins;
            Point n = *std::max_element(t.pts.begin(), t.pts.end());
            ins.u = Universe{n};
            ins.w = WeightProfile::flat(
                std::vector<Rat>(static_cast<std::size_t>(c_level + 1), Rat(1)));
            ins.c0.at.assign(static_cast<std::size_t>(c_level + 1), t.pts.front());
            ins.sigma = t.requests;
            ins.meta["generator"] = "construct";
            ins.meta["seed"] = std::to_string(c_seed);
            spill(c_out_instance, emit_instance(ins));
        }
        return 0;
    }
    if (*lst) {
        ServicePattern pat = parse_pattern(slurp(l_pattern)).first;
        Instance ins = parse_instance(slurp(l_in));
        RootLabels rl = root_labels(pat, ins.w, ins.sigma);
        if (rl.all_of_u) {
            std::cout << "all-of-universe\n";
        } else if (!rl.feasible) {
            std::cout << "infeasible\n";
        } else {
            for (const auto& tup : rl.tuples) {
                if (tup.empty()) {
                    std::cout << "{}\n";
                    continue;
                }
                for (std::size_t i = 0; i < tup.size(); ++i)
                    std::cout << (i ? "," : "") << tup[i];
                std::cout << "\n";
            }
        }
        return 0;
    }
    if (*bnd) {
        if (b_dichotomy) {
            BoundValue v = bound_dichotomy(b_k);
            std::cout << v.factor.str() << " * 2^" << v.exp.str() << "\n";
            return 0;
        }
        BoundValue v = b_class.empty()
                           ? bound_interval_tuples(b_l, b_t, b_h, b_k)
                           : bound_class_interval_tuples(b_l, b_t, b_h, [&] {
                                 std::vector<int> counts;
                                 for (Point p : parse_points(b_class)) counts.push_back(p);
                                 return counts;
                             }());
        std::cout << v.factor.str() << " * 2^" << v.exp.str() << "\n";
        return 0;
    }
    if (*dia) {
        Instance ins = parse_instance(slurp(d_in));
        auto alg = make_algorithm(d_algo, ins.u, ins.w, ins.c0, limit);
        std::vector<Configuration> transcript;
        for (Point p : ins.sigma) transcript.push_back(alg->serve(p));
        auto phases =
            phase_diagnostics(ins.u, ins.w, ins.c0, ins.sigma, transcript, Int(d_log2nk), limit);
        bool violated = false;
        for (const auto& ph : phases) {
            std::cout << "phase [" << ph.t1 << "," << ph.t2 << "] heavy=" << ph.heavy
                      << (ph.completed ? " completed" : " open")
                      << " dWF=" << to_string(ph.delta_wf()) << " dM=" << to_string(ph.delta_m())
                      << " lucky=";
            for (std::size_t i = 0; i < ph.lucky.size(); ++i)
                std::cout << (i ? "," : "") << ph.lucky[i];
            if (ph.lucky.empty()) std::cout << "-";
            for (const auto& v : ph.violations) {
                std::cout << " VIOLATION:" << v;
                violated = true;
            }
            std::cout << "\n";
        }
        return violated ? 4 : 0;
    }
    if (*rep) {
        std::vector<ReportRow> rows;
        std::istringstream in(slurp(p_in));
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded()) throw schema_error("bad JSONL row: " + line);
            ReportRow r;
            r.algo = j.at("algo").get<std::string>();
            r.k = j.at("k").get<int>();
            r.n = j.at("n").get<int>();
            r.T = j.at("T").get<int>();
            r.seed = j.at("seed").get<std::uint64_t>();
            r.alg_cost = parse_rational(j.at("alg_cost").get<std::string>());
            std::string oc = j.at("opt_cost").get<std::string>();
            if (oc != "-") {
                r.opt_cost = parse_rational(oc);
                r.opt_known = true;
            }
            r.phases = j.at("phases").get<int>();
            std::string viol = j.at("violations").get<std::string>();
            if (viol != "-") {
                std::istringstream vs(viol);
                std::string tok;
                while (std::getline(vs, tok, ';')) r.violations.push_back(tok);
            }
            rows.push_back(std::move(r));
        }
        spill(p_out, report(rows, parse_format(p_fmt)));
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const capacity_error& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 3;
    } catch (const invariant_error& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 4;
    } catch (const protocol_error& e) {
        std::cerr << "protocol violation: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
