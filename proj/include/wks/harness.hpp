#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "wks/algorithms.hpp"
#include "wks/lbgen.hpp"

// Experiment plumbing: instance documents, random generation, batch runs
// and CSV/JSONL reports with exact rational cost strings.

namespace wks {

struct Instance {
    Universe u;
    WeightProfile w;
    Configuration c0;
    RequestSequence sigma;
    std::map<std::string, std::string> meta;  // e.g. seed, generator

    void validate() const {
        if (c0.k() != w.k()) throw schema_error("initial configuration size != k");
        for (Point p : c0.at)
            if (!u.contains(p)) throw schema_error("initial position outside universe");
        for (std::size_t t = 0; t < sigma.size(); ++t)
            if (!u.contains(sigma[t]))
                throw schema_error("request " + std::to_string(t + 1) + " = " +
                                   std::to_string(sigma[t]) + " outside universe");
    }

    /// Groups the flat initial configuration into class sets. Requires the
    /// points of each class to be distinct.
    ClassConfiguration class_c0() const {
        if (!w.classes) throw schema_error("instance has no class structure");
        ClassConfiguration c;
        int at = 0;
        for (int cnt : w.classes->counts) {
            std::vector<Point> set(c0.at.begin() + at, c0.at.begin() + at + cnt);
            std::sort(set.begin(), set.end());
            if (std::adjacent_find(set.begin(), set.end()) != set.end())
                throw schema_error("class servers share a point in the initial configuration");
            c.sets.push_back(std::move(set));
            at += cnt;
        }
        return c;
    }
};

/// One self-describing document per instance:
///   wks-instance
///   n <int>
///   k <int>
///   weights <w_1> ... <w_k>            (flat)  -- or --
///   classes <k_1> ... <k_d> / <w_1> ... <w_d>
///   start <p_1> ... <p_k>
///   sigma <r_1> ... <r_T>              (line present even when T = 0)
///   meta <key> <value>                 (optional, repeated, sorted on emit)
inline std::string emit_instance(const Instance& ins) {
    std::ostringstream out;
    out << "wks-instance\n";
    out << "n " << ins.u.n << "\n";
    out << "k " << ins.w.k() << "\n";
    if (ins.w.classes) {
        out << "classes";
        for (int c : ins.w.classes->counts) out << " " << c;
        out << " /";
        for (const Rat& x : ins.w.classes->class_weights) out << " " << to_string(x);
        out << "\n";
    } else {
        out << "weights";
        for (const Rat& x : ins.w.weights) out << " " << to_string(x);
        out << "\n";
    }
    out << "start";
    for (Point p : ins.c0.at) out << " " << p;
    out << "\n";
    out << "sigma";
    for (Point p : ins.sigma) out << " " << p;
    out << "\n";
    for (const auto& [key, val] : ins.meta) out << "meta " << key << " " << val << "\n";
    return out.str();
}

inline Instance parse_instance(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> schema_error {
        return schema_error("instance line " + std::to_string(lineno) + ": " + msg);
    };
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty()) return true;
        }
        return false;
    };
    if (!next_line() || line != "wks-instance") throw fail("expected header 'wks-instance'");

    std::optional<int> n, k;
    std::optional<WeightProfile> w;
    std::optional<std::vector<Point>> start;
    std::optional<RequestSequence> sigma;
    std::map<std::string, std::string> meta;

    while (next_line()) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        auto ints_after = [&](const char* what) {
            std::vector<int> v;
            int x;
            while (ls >> x) v.push_back(x);
            if (!ls.eof()) throw fail(std::string("malformed ") + what);
            return v;
        };
        if (tag == "n" || tag == "k") {
            auto v = ints_after(tag.c_str());
            if (v.size() != 1 || v[0] < 1) throw fail("'" + tag + "' needs one positive integer");
            (tag == "n" ? n : k) = v[0];
        } else if (tag == "weights") {
            std::vector<Rat> ws;
            std::string tok;
            while (ls >> tok) {
                try {
                    ws.push_back(parse_rational(tok));
                } catch (const schema_error&) {
                    throw fail("bad rational '" + tok + "'");
                }
            }
            try {
                w = WeightProfile::flat(std::move(ws));
            } catch (const dimension_error& e) {
                throw fail(e.what());
            }
        } else if (tag == "classes") {
            std::vector<int> counts;
            std::vector<Rat> cw;
            std::string tok;
            bool after_slash = false;
            while (ls >> tok) {
                if (tok == "/") {
                    after_slash = true;
                    continue;
                }
                try {
                    if (after_slash)
                        cw.push_back(parse_rational(tok));
                    else
                        counts.push_back(std::stoi(tok));
                } catch (const std::exception&) {
                    throw fail("bad token '" + tok + "' in classes");
                }
            }
            if (!after_slash) throw fail("classes needs '/' between counts and weights");
            try {
                w = WeightProfile::classed(std::move(counts), std::move(cw));
            } catch (const dimension_error& e) {
                throw fail(e.what());
            }
        } else if (tag == "start") {
            start = ints_after("start");
        } else if (tag == "sigma") {
            sigma = ints_after("sigma");
        } else if (tag == "meta") {
            std::string key, val;
            if (!(ls >> key >> val)) throw fail("meta needs a key and a value");
            meta[key] = val;
        } else {
            throw fail("unknown tag '" + tag + "'");
        }
    }
    if (!n) throw fail("missing 'n'");
    if (!k) throw fail("missing 'k'");
    if (!w) throw fail("missing 'weights' or 'classes'");
    if (!start) throw fail("missing 'start'");
    if (!sigma) throw fail("missing 'sigma'");
    if (w->k() != *k) throw schema_error("instance: weights size != k");
    Instance ins{Universe{*n}, std::move(*w), Configuration{std::move(*start)},
                 std::move(*sigma), std::move(meta)};
    ins.validate();
    return ins;
}

struct WeightStyle {
    enum Kind { Uniform, Geometric, Separated } kind = Uniform;
    Rat ratio = 1;  // geometric
    Int n_k = 1;    // separated

    static WeightStyle uniform() { return {}; }
    static WeightStyle geometric(Rat r) {
        if (r < 1) throw schema_error("geometric weight ratio must be >= 1");
        return {Geometric, std::move(r), 1};
    }
    static WeightStyle separated(Int nk) { return {Separated, 1, std::move(nk)}; }

    std::string name() const {
        switch (kind) {
            case Uniform: return "uniform";
            case Geometric: return "geometric(" + to_string(ratio) + ")";
            default: return "separated(" + n_k.str() + ")";
        }
    }
};

inline Instance gen_random(int n, int k, int T, const WeightStyle& style, std::uint64_t seed) {
    if (n < 1 || k < 1 || T < 0) throw schema_error("gen_random needs n, k >= 1 and T >= 0");
    Rng rng(seed);
    WeightProfile w = [&] {
        switch (style.kind) {
            case WeightStyle::Uniform:
                return WeightProfile::flat(std::vector<Rat>(static_cast<std::size_t>(k), Rat(1)));
            case WeightStyle::Geometric: {
                std::vector<Rat> ws;
                Rat cur = 1;
                for (int i = 0; i < k; ++i) {
                    ws.push_back(cur);
                    cur *= style.ratio;
                }
                return WeightProfile::flat(std::move(ws));
            }
            default:
                return separated_weights(k, style.n_k);
        }
    }();
    Instance ins;
    ins.u = Universe{n};
    ins.w = std::move(w);
    for (int i = 0; i < k; ++i) ins.c0.at.push_back(rng.range(1, n));
    for (int t = 0; t < T; ++t) ins.sigma.push_back(rng.range(1, n));
    ins.meta["seed"] = std::to_string(seed);
    ins.meta["generator"] = style.name();
    ins.validate();
    return ins;
}

struct ReportRow {
    std::string algo;
    int k = 0, n = 0, T = 0;
    std::uint64_t seed = 0;
    Rat alg_cost, opt_cost;
    bool opt_known = false;
    int phases = 0;
    std::vector<std::string> violations;

    /// Exact ratio string; "inf" when OPT is zero and the algorithm paid.
    std::string ratio_str() const {
        if (!opt_known) return "-";
        if (opt_cost == 0) return alg_cost > 0 ? "inf" : "0";
        return to_string(alg_cost / opt_cost);
    }
    std::optional<Rat> ratio() const {
        if (!opt_known || opt_cost == 0) return std::nullopt;
        return alg_cost / opt_cost;
    }
};

/// Runs one algorithm over one instance and settles the row against the
/// offline optimum. Capacity overruns become a row flag, not a crash.
inline ReportRow run_one(const Instance& ins, const std::string& algo_spec,
                         std::size_t limit = kDefaultTableLimit) {
    ReportRow row;
    row.algo = algo_spec;
    row.k = ins.w.k();
    row.n = ins.u.n;
    row.T = static_cast<int>(ins.sigma.size());
    if (auto it = ins.meta.find("seed"); it != ins.meta.end())
        row.seed = std::stoull(it->second);
    try {
        auto alg = make_algorithm(algo_spec, ins.u, ins.w, ins.c0, limit);
        for (Point p : ins.sigma) alg->serve(p);
        row.alg_cost = alg->cost();
        row.opt_cost = opt_cost(ins.u, ins.w, ins.c0, ins.sigma, limit);
        row.opt_known = true;
    } catch (const capacity_error& e) {
        row.violations.push_back(std::string("capacity: ") + e.what());
    }
    return row;
}

struct ExperimentConfig {
    std::vector<std::string> algorithms;
    std::vector<Instance> instances;
    std::size_t limit = kDefaultTableLimit;
};

/// Rows ordered by (instance, algorithm); deterministic under the
/// instances' seeds.
inline std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg) {
    std::vector<ReportRow> rows;
    for (const Instance& ins : cfg.instances)
        for (const std::string& a : cfg.algorithms) rows.push_back(run_one(ins, a, cfg.limit));
    return rows;
}

inline ReportRow row_from_adversary(const RunReport& rep, const std::string& algo, int n,
                                    std::uint64_t seed) {
    ReportRow row;
    row.algo = algo;
    row.k = rep.k;
    row.n = n;
    row.T = static_cast<int>(rep.sigma.size());
    row.seed = seed;
    row.alg_cost = rep.alg_cost_prefix;
    row.opt_cost = rep.adv_cost_prefix;  // adversary cost upper-bounds OPT
    row.opt_known = true;
    row.phases = rep.completed_phases;
    if (!rep.labeling_ok) row.violations.push_back("labeling");
    if (!rep.property_i_ok) row.violations.push_back("adv-moved-without-heavier-alg-move");
    if (!rep.property_ii_ok) row.violations.push_back("phase-heavy-moves-below-n_k");
    if (!rep.eq2_ok) row.violations.push_back("light-cost-ledger");
    if (!rep.eq3_ok) row.violations.push_back("heavy-cost-ledger");
    if (rep.degenerate_unbounded) row.violations.push_back("unbounded-ratio-regime");
    return row;
}

inline std::string violations_str(const ReportRow& r) {
    if (r.violations.empty()) return "-";
    std::string s;
    for (std::size_t i = 0; i < r.violations.size(); ++i) s += (i ? ";" : "") + r.violations[i];
    return s;
}

enum class ReportFormat { Csv, Jsonl };

inline ReportFormat parse_format(const std::string& s) {
    if (s == "csv") return ReportFormat::Csv;
    if (s == "jsonl") return ReportFormat::Jsonl;
    throw schema_error("unknown report format '" + s + "'");
}

inline std::string report(const std::vector<ReportRow>& rows, ReportFormat fmt) {
    std::ostringstream out;
    if (fmt == ReportFormat::Csv) {
        out << "algo,k,n,T,seed,alg_cost,opt_cost,ratio,phases,violations\n";
        for (const ReportRow& r : rows)
            out << r.algo << "," << r.k << "," << r.n << "," << r.T << "," << r.seed << ","
                << to_string(r.alg_cost) << "," << (r.opt_known ? to_string(r.opt_cost) : "-")
                << "," << r.ratio_str() << "," << r.phases << "," << violations_str(r) << "\n";
        return out.str();
    }
    for (const ReportRow& r : rows) {
        out << "{\"algo\":\"" << r.algo << "\",\"k\":" << r.k << ",\"n\":" << r.n
            << ",\"T\":" << r.T << ",\"seed\":" << r.seed << ",\"alg_cost\":\""
            << to_string(r.alg_cost) << "\",\"opt_cost\":\""
            << (r.opt_known ? to_string(r.opt_cost) : "-") << "\",\"ratio\":\"" << r.ratio_str()
            << "\",\"phases\":" << r.phases << ",\"violations\":\"" << violations_str(r)
            << "\"}\n";
    }
    return out.str();
}

}  // namespace wks
