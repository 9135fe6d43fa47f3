#pragma once

#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wks/algorithms.hpp"
#include "wks/patterns.hpp"

// The recursive lower-bound construction, the adaptive adversary built from
// strategies S_1..S_k, and the multi-adversary harness for general metrics.

namespace wks {

/// n_2 = 2, n_{i+1} = (ceil(n_i/2)+1)(floor(n_i/2)+1).
inline Int n_seq(int i) {
    if (i < 2) throw dimension_error("n_seq needs level >= 2");
    Int n = 2;
    for (int j = 2; j < i; ++j) n = ((n + 1) / 2 + 1) * (n / 2 + 1);
    return n;
}

inline int n_seq_int(int i) {
    Int n = n_seq(i);
    if (n > 1'000'000) throw capacity_error("construction size n_" + std::to_string(i) +
                                            " too large to enumerate");
    return n.convert_to<int>();
}

/// Split of a point set P' (|P'| = n_{i+1}) into a mask M of size
/// ceil(n_i/2)+1 and per-q satellite sets Q_q of size floor(n_i/2);
/// P_q = (M \ {q}) u Q_q has size n_i. Every point is avoided by some P_q
/// and has a partner pbar such that each P_q contains p or pbar.
struct MaskDecomposition {
    std::vector<Point> input;  // sorted
    std::vector<Point> mask;   // sorted
    std::map<Point, std::vector<Point>> q_sets;
    int n_i = 0;

    std::vector<Point> p_set(Point q) const {
        auto it = q_sets.find(q);
        if (it == q_sets.end()) throw dimension_error("p_set: point not in mask");
        std::vector<Point> out;
        for (Point m : mask)
            if (m != q) out.push_back(m);
        out.insert(out.end(), it->second.begin(), it->second.end());
        std::sort(out.begin(), out.end());
        return out;
    }

    bool in_p_set(Point p, Point q) const {
        auto it = q_sets.find(q);
        if (it == q_sets.end()) throw dimension_error("in_p_set: point not in mask");
        if (std::binary_search(it->second.begin(), it->second.end(), p)) return true;
        return p != q && std::binary_search(mask.begin(), mask.end(), p);
    }

    /// Lowest q in M with p not in P_q. Points outside P' avoid every set.
    Point avoid(Point p) const {
        for (Point q : mask)
            if (!in_p_set(p, q)) return q;
        throw invariant_error("no avoiding set for point " + std::to_string(p));
    }

    /// pbar: the mask owner of p's satellite set, or (for p in M) the lowest
    /// member of Q_p.
    Point partner(Point p) const {
        if (std::binary_search(mask.begin(), mask.end(), p)) return q_sets.at(p).front();
        for (const auto& [q, set] : q_sets)
            if (std::binary_search(set.begin(), set.end(), p)) return q;
        throw dimension_error("partner: point not in the decomposed set");
    }

    void verify() const {
        int m = n_i / 2 + (n_i % 2) + 1;  // ceil(n_i/2)+1
        int qs = n_i / 2;
        if (static_cast<int>(mask.size()) != m)
            throw invariant_error("mask size != ceil(n_i/2)+1");
        std::vector<Point> all = mask;
        for (const auto& [q, set] : q_sets) {
            if (static_cast<int>(set.size()) != qs)
                throw invariant_error("satellite set size != floor(n_i/2)");
            all.insert(all.end(), set.begin(), set.end());
        }
        std::sort(all.begin(), all.end());
        if (all != input || static_cast<int>(q_sets.size()) != m)
            throw invariant_error("mask and satellite sets do not partition the input");
        for (Point q : mask)
            if (static_cast<int>(p_set(q).size()) != n_i)
                throw invariant_error("|P_q| != n_i");
        for (Point p : input) {
            avoid(p);
            Point pb = partner(p);
            for (Point q : mask)
                if (!in_p_set(p, q) && !in_p_set(pb, q))
                    throw invariant_error("partner property violated");
        }
    }
};

inline MaskDecomposition decompose(std::vector<Point> pts, int n_i, Rng& rng) {
    std::sort(pts.begin(), pts.end());
    int m = n_i / 2 + (n_i % 2) + 1;
    int qs = n_i / 2;
    if (static_cast<int>(pts.size()) != m * (qs + 1))
        throw dimension_error("decompose: |P'| = " + std::to_string(pts.size()) +
                              " != (ceil(n_i/2)+1)(floor(n_i/2)+1)");
    MaskDecomposition d;
    d.input = pts;
    d.n_i = n_i;
    std::vector<Point> shuffled = pts;
    rng.shuffle(shuffled);
    d.mask.assign(shuffled.begin(), shuffled.begin() + m);
    std::sort(d.mask.begin(), d.mask.end());
    std::size_t at = static_cast<std::size_t>(m);
    for (Point q : d.mask) {
        std::vector<Point> set(shuffled.begin() + at, shuffled.begin() + at + qs);
        std::sort(set.begin(), set.end());
        d.q_sets[q] = std::move(set);
        at += static_cast<std::size_t>(qs);
    }
    d.verify();
    return d;
}

inline MaskDecomposition decompose(std::vector<Point> pts, int n_i, std::uint64_t seed) {
    Rng rng(seed);
    return decompose(std::move(pts), n_i, rng);
}

/// T_l(P): a tree whose single level-l root interval has every point of P
/// in its request list as a singleton. |P| = n_{l+1}.
struct LowerBoundTree {
    int level = 0;
    std::vector<Point> pts;  // sorted
    std::vector<LowerBoundTree> children;
    RequestSequence requests;  // flattened subtree sequence

    /// Associated pattern: levels 1..level plus a single root interval one
    /// level above.
    ServicePattern pattern() const {
        int T = static_cast<int>(requests.size());
        std::vector<std::vector<int>> starts(static_cast<std::size_t>(level));
        std::function<void(const LowerBoundTree&, int)> walk = [&](const LowerBoundTree& n,
                                                                   int off) {
            starts[static_cast<std::size_t>(n.level - 1)].push_back(off);
            int o = off;
            for (const auto& c : n.children) {
                walk(c, o);
                o += static_cast<int>(c.requests.size());
            }
        };
        walk(*this, 0);
        ServicePattern p;
        p.horizon = T;
        for (int lvl = 1; lvl <= level; ++lvl) {
            std::vector<int> bp{0};
            const auto& ss = starts[static_cast<std::size_t>(lvl - 1)];
            for (std::size_t i = 1; i < ss.size(); ++i) bp.push_back(ss[i] + 1);
            bp.push_back(T + 1);
            p.levels.push_back(std::move(bp));
        }
        p.levels.push_back({0, T + 1});
        p.validate();
        return p;
    }
};

inline LowerBoundTree build_tree_impl(int level, std::vector<Point> pts, Rng& rng) {
    std::sort(pts.begin(), pts.end());
    LowerBoundTree t;
    t.level = level;
    t.pts = pts;
    if (level == 1) {
        if (pts.size() != 2) throw dimension_error("level-1 tree needs exactly 2 points");
        t.requests = {pts[0], pts[1]};
        return t;
    }
    int ni = n_seq_int(level);
    MaskDecomposition dec = decompose(pts, ni, rng);
    for (Point q : dec.mask) {
        t.children.push_back(build_tree_impl(level - 1, dec.p_set(q), rng));
        const auto& r = t.children.back().requests;
        t.requests.insert(t.requests.end(), r.begin(), r.end());
    }
    return t;
}

inline LowerBoundTree build_tree(int level, std::vector<Point> pts, std::uint64_t seed = 0) {
    if (level < 1) throw dimension_error("build_tree needs level >= 1");
    Int want = level == 1 ? Int(2) : n_seq(level + 1);
    if (Int(pts.size()) != want)
        throw dimension_error("build_tree: |P| must be n_" + std::to_string(level + 1));
    Rng rng(seed);
    return build_tree_impl(level, std::move(pts), rng);
}

/// One adaptive strategy execution: its level, argument set, and the time
/// span of the requests it issued.
struct ExecNode {
    int level = 0;
    int start = 0;  // requests issued before the execution began
    int end = -1;   // requests issued when it closed
    std::vector<Point> pts;
    std::optional<MaskDecomposition> dec;  // levels 2..k-1
    Point label = 0;                       // assigned by the labeling pass
    int parent = -1;
    std::vector<int> kids;
};

/// The adversary engine. Main mode plays phases of S_k (sets T, B, B');
/// appendix mode plays one S_{k-1}(P \ {p}) per location p of the
/// algorithm's heaviest server, over a fixed set P of n_k + 1 points.
class AdversaryState {
public:
    AdversaryState(Universe u, int k, std::uint64_t seed)
        : u_(u), k_(k), nk_(n_seq_int(k)), rng_(seed) {
        if (k < 2) throw dimension_error("adversary needs k >= 2");
        if (u_.n < 2 * nk_ + 1)
            throw dimension_error("adversary needs n >= 2 n_k + 1 = " +
                                  std::to_string(2 * nk_ + 1));
    }

    /// Appendix mode over the fixed point set `pts` (|pts| = n_k + 1).
    AdversaryState(Universe u, int k, std::uint64_t seed, std::vector<Point> pts)
        : u_(u), k_(k), nk_(n_seq_int(k)), rng_(seed), appendix_(true),
          fixed_pts_(std::move(pts)) {
        if (k < 2) throw dimension_error("adversary needs k >= 2");
        std::sort(fixed_pts_.begin(), fixed_pts_.end());
        if (static_cast<int>(fixed_pts_.size()) != nk_ + 1)
            throw dimension_error("appendix mode needs exactly n_k + 1 points");
    }

    int k() const { return k_; }
    int n_k() const { return nk_; }
    int completed_phases() const { return completed_; }
    const RequestSequence& sigma() const { return issued_; }
    const std::vector<ExecNode>& nodes() const { return nodes_; }
    std::vector<ExecNode>& nodes() { return nodes_; }

    /// Processes the algorithm's reaction to the last request: pops finished
    /// executions and settles S_k bookkeeping. Returns true if a phase
    /// completed.
    bool observe(const Configuration& alg) {
        if (alg.k() != k_) throw dimension_error("algorithm configuration size != k");
        int moved = 0;
        if (last_alg_) {
            if (pending_ && !serves(alg, issued_.back()))
                throw protocol_error("algorithm did not serve request " +
                                     std::to_string(issued_.back()));
            for (int i = k_; i >= 1; --i)
                if (alg.pos(i) != last_alg_->pos(i)) {
                    moved = i;
                    break;
                }
        }
        last_alg_ = alg;
        pending_ = false;
        int t = static_cast<int>(issued_.size());

        if (stack_.empty() || moved < 2) return false;
        while (!stack_.empty() &&
               nodes_[static_cast<std::size_t>(stack_.back())].level < std::min(moved, k_)) {
            close(stack_.back(), t);
            stack_.pop_back();
        }
        if (moved < k_) return false;
        Point p = alg.pos(k_);
        if (appendix_) {
            close(stack_.back(), t);
            stack_.pop_back();
            ++completed_;
            return true;
        }
        auto it = std::find(T_.begin(), T_.end(), p);
        if (it != T_.end()) T_.erase(it);
        if (T_.empty()) {
            nodes_[static_cast<std::size_t>(stack_.back())].label = p;
            close(stack_.back(), t);
            stack_.pop_back();
            ++completed_;
            return true;
        }
        Bp_.clear();
        for (Point b : B_)
            if (b != p && static_cast<int>(Bp_.size()) < nk_ - static_cast<int>(T_.size()))
                Bp_.push_back(b);
        return false;
    }

    /// Issues the next request, starting a new phase and rebuilding the
    /// strategy chain as needed.
    Point request(const Configuration& alg) {
        if (stack_.empty()) start_phase(alg);
        build_chain(alg);
        Point r = emit(alg);
        pending_ = true;
        return r;
    }

    /// Closes all open executions; a truncated phase gets the lowest point
    /// still in T as its label.
    void finish() {
        int t = static_cast<int>(issued_.size());
        while (!stack_.empty()) {
            ExecNode& n = nodes_[static_cast<std::size_t>(stack_.back())];
            if (!appendix_ && n.level == k_ && !T_.empty()) n.label = T_.front();
            close(stack_.back(), t);
            stack_.pop_back();
        }
    }

    std::vector<std::vector<int>> level_nodes() const {
        std::vector<std::vector<int>> per(static_cast<std::size_t>(k_));
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            per[static_cast<std::size_t>(nodes_[i].level - 1)].push_back(static_cast<int>(i));
        return per;
    }

    ServicePattern pattern() const {
        ServicePattern p;
        p.horizon = static_cast<int>(issued_.size());
        auto per = level_nodes();
        for (int lvl = 1; lvl <= k_; ++lvl) {
            std::vector<int> bp{0};
            const auto& ns = per[static_cast<std::size_t>(lvl - 1)];
            for (std::size_t i = 1; i < ns.size(); ++i)
                bp.push_back(nodes_[static_cast<std::size_t>(ns[i])].start + 1);
            bp.push_back(p.horizon + 1);
            p.levels.push_back(std::move(bp));
        }
        p.validate();
        return p;
    }

    /// Assigns labels down one phase subtree from its root anchor and
    /// writes them into `alpha`. Node labels are stored for move accounting.
    void descend(int idx, Point anchor, Labeling& alpha,
                 const std::map<int, std::pair<int, int>>& where) {
        ExecNode& n = nodes_[static_cast<std::size_t>(idx)];
        auto key = where.at(idx);
        if (n.level == 1) {
            if (n.pts.size() != 2 ||
                (anchor != n.pts[0] && anchor != n.pts[1]))
                throw invariant_error("labeling anchor outside the level-1 pair");
            n.label = anchor == n.pts[0] ? n.pts[1] : n.pts[0];
            alpha.labels[key] = {n.label};
            return;
        }
        if (!n.dec) {  // phase root
            n.label = anchor;
            alpha.labels[key] = {anchor};
            for (int kid : n.kids) descend(kid, anchor, alpha, where);
            return;
        }
        Point bar = n.dec->partner(anchor);
        n.label = bar;
        alpha.labels[key] = {bar};
        for (int kid : n.kids) {
            const auto& kp = nodes_[static_cast<std::size_t>(kid)].pts;
            Point a = std::binary_search(kp.begin(), kp.end(), anchor) ? anchor : bar;
            if (!std::binary_search(kp.begin(), kp.end(), a))
                throw invariant_error("neither anchor nor partner in child set");
            descend(kid, a, alpha, where);
        }
    }

    /// (level, interval index) key per node.
    std::map<int, std::pair<int, int>> node_keys() const {
        std::map<int, std::pair<int, int>> where;
        auto per = level_nodes();
        for (int lvl = 1; lvl <= k_; ++lvl) {
            const auto& ns = per[static_cast<std::size_t>(lvl - 1)];
            for (std::size_t i = 0; i < ns.size(); ++i) where[ns[i]] = {lvl, static_cast<int>(i)};
        }
        return where;
    }

    /// Main mode: full labeling from each phase root's stored label.
    Labeling labeling() {
        Labeling alpha;
        auto where = node_keys();
        auto per = level_nodes();
        for (int r : per[static_cast<std::size_t>(k_ - 1)])
            descend(r, nodes_[static_cast<std::size_t>(r)].label, alpha, where);
        return alpha;
    }

    /// The phase's excluded point (location of the algorithm's s_k), for a
    /// phase-root node in appendix mode.
    Point excluded_point(int root_idx) const {
        const ExecNode& n = nodes_[static_cast<std::size_t>(root_idx)];
        for (Point p : fixed_pts_)
            if (!std::binary_search(n.pts.begin(), n.pts.end(), p)) return p;
        throw invariant_error("phase set does not exclude any point");
    }

    const std::vector<Point>& fixed_points() const { return fixed_pts_; }

private:
    void close(int idx, int t) { nodes_[static_cast<std::size_t>(idx)].end = t; }

    int push_node(int level, std::vector<Point> arg) {
        ExecNode n;
        n.level = level;
        n.start = static_cast<int>(issued_.size());
        std::sort(arg.begin(), arg.end());
        n.pts = std::move(arg);
        n.parent = stack_.empty() ? -1 : stack_.back();
        if (level >= 2 && level < k_) n.dec = decompose(n.pts, n_seq_int(level), rng_);
        int idx = static_cast<int>(nodes_.size());
        if (n.parent >= 0) nodes_[static_cast<std::size_t>(n.parent)].kids.push_back(idx);
        nodes_.push_back(std::move(n));
        stack_.push_back(idx);
        return idx;
    }

    void start_phase(const Configuration& alg) {
        Point p = alg.pos(k_);
        if (appendix_) {
            std::vector<Point> arg;
            for (Point x : fixed_pts_)
                if (x != p) arg.push_back(x);
            if (static_cast<int>(arg.size()) != nk_)
                throw invariant_error("heaviest server left the fixed point set");
            push_node(k_, std::move(arg));
            return;
        }
        std::vector<Point> P;
        for (Point x = 1; x <= u_.n && static_cast<int>(P.size()) < 2 * nk_; ++x)
            if (x != p) P.push_back(x);
        std::vector<Point> shuffled = P;
        rng_.shuffle(shuffled);
        T_.assign(shuffled.begin(), shuffled.begin() + nk_);
        B_.assign(shuffled.begin() + nk_, shuffled.end());
        std::sort(T_.begin(), T_.end());
        std::sort(B_.begin(), B_.end());
        Bp_.clear();
        push_node(k_, std::move(P));
    }

    void build_chain(const Configuration& alg) {
        while (nodes_[static_cast<std::size_t>(stack_.back())].level > 1) {
            const ExecNode& top = nodes_[static_cast<std::size_t>(stack_.back())];
            std::vector<Point> arg;
            if (top.level == k_) {
                if (appendix_) {
                    arg = top.pts;
                } else {
                    arg = T_;
                    arg.insert(arg.end(), Bp_.begin(), Bp_.end());
                }
            } else {
                Point q = top.dec->avoid(alg.pos(top.level));
                arg = top.dec->p_set(q);
            }
            push_node(top.level - 1, std::move(arg));
        }
    }

    Point emit(const Configuration& alg) {
        const ExecNode& leaf = nodes_[static_cast<std::size_t>(stack_.back())];
        Point p = leaf.pts[0], q = leaf.pts[1];
        Point r = (alg.pos(1) == q) ? p : q;
        issued_.push_back(r);
        return r;
    }

    Universe u_;
    int k_;
    int nk_;
    Rng rng_;
    bool appendix_ = false;
    std::vector<Point> fixed_pts_;
    std::vector<ExecNode> nodes_;
    std::vector<int> stack_;
    RequestSequence issued_;
    std::optional<Configuration> last_alg_;
    bool pending_ = false;
    std::vector<Point> T_, B_, Bp_;
    int completed_ = 0;
};

struct StepRecord {
    int t = 0;
    Point request = 0;
    std::vector<int> alg_moved;
    std::vector<int> adv_moved;
    Rat alg_cost;  // cumulative
    Rat adv_cost;  // cumulative
    std::string flags;
};

struct RunReport {
    int k = 0;
    int n_k = 0;
    RequestSequence sigma;
    std::vector<StepRecord> steps;
    ServicePattern pattern;
    Labeling labeling;
    std::vector<Rat> alg_server_cost, adv_server_cost;
    int completed_phases = 0;
    bool truncated = false;
    bool degenerate_unbounded = false;  // no server above level 1 ever moved
    bool labeling_ok = false;
    bool property_i_ok = true;   // ADV moves s_i only when ALG moves heavier
    bool property_ii_ok = true;  // per phase, ALG moved s_k >= n_k times
    bool eq2_ok = true;          // light ADV cost <= heavy ALG cost / n_k
    bool eq3_ok = true;          // heavy ADV cost <= heavy ALG cost / n_k
    int prefix_end = 0;          // last completed-phase step
    std::vector<int> phase_heavy_moves;
    Rat alg_cost_prefix, adv_cost_prefix;
    std::optional<Rat> ratio_prefix;

    Rat alg_cost_total() const {
        Rat s = 0;
        for (const Rat& c : alg_server_cost) s += c;
        return s;
    }
    Rat adv_cost_total() const {
        Rat s = 0;
        for (const Rat& c : adv_server_cost) s += c;
        return s;
    }
};

/// `t request alg_moves adv_moves alg_cost adv_cost flags` per step.
inline std::string emit_transcript(const RunReport& r) {
    std::ostringstream out;
    auto joined = [](const std::vector<int>& v) {
        if (v.empty()) return std::string("-");
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s;
    };
    for (const StepRecord& s : r.steps)
        out << s.t << " " << s.request << " " << joined(s.alg_moved) << " "
            << joined(s.adv_moved) << " " << to_string(s.alg_cost) << " "
            << to_string(s.adv_cost) << " " << (s.flags.empty() ? "-" : s.flags) << "\n";
    return out.str();
}

/// Plays the adversary against `alg` until `phases` phases complete or
/// `step_budget` requests have been issued, then settles the cost ledger.
/// The algorithm must use separated weights w_1=1, w_{i+1} = n_k sum w_j.
inline RunReport adversary_run(OnlineAlgorithm& alg, const Universe& u, const WeightProfile& w,
                               int k, int phases, int step_budget, std::uint64_t seed) {
    WeightProfile expect = separated_weights(k, n_seq(k));
    if (w.weights != expect.weights)
        throw dimension_error("adversary_run requires separated weights for this k");
    AdversaryState st(u, k, seed);

    RunReport rep;
    rep.k = k;
    rep.n_k = st.n_k();
    Rat alg_cum = 0;
    while (true) {
        if (st.observe(alg.config()) && !rep.steps.empty())
            rep.steps.back().flags = "phase-end";
        if (st.completed_phases() >= phases) break;
        if (static_cast<int>(st.sigma().size()) >= step_budget) break;
        Point r = st.request(alg.config());
        Configuration before = alg.config();
        const Configuration& after = alg.serve(r);
        StepRecord s;
        s.t = static_cast<int>(st.sigma().size());
        s.request = r;
        for (int i = 1; i <= k; ++i)
            if (before.pos(i) != after.pos(i)) {
                s.alg_moved.push_back(i);
                alg_cum += w.weight(i);
            }
        s.alg_cost = alg_cum;
        rep.steps.push_back(std::move(s));
    }
    st.finish();

    rep.sigma = st.sigma();
    rep.completed_phases = st.completed_phases();
    rep.truncated = rep.completed_phases < phases;
    rep.pattern = st.pattern();
    rep.labeling = st.labeling();
    rep.labeling_ok = check_labeling(rep.pattern, rep.labeling, rep.sigma);

    rep.alg_server_cost.assign(static_cast<std::size_t>(k), Rat(0));
    for (const StepRecord& s : rep.steps)
        for (int i : s.alg_moved)
            rep.alg_server_cost[static_cast<std::size_t>(i - 1)] += w.weight(i);

    // ADV moves: label changes between consecutive intervals of a level,
    // charged at the step that closed the earlier interval.
    rep.adv_server_cost.assign(static_cast<std::size_t>(k), Rat(0));
    std::map<int, std::vector<int>> adv_moves_at;  // step -> levels moved
    auto per = st.level_nodes();
    const auto& nodes = st.nodes();
    for (int lvl = 1; lvl <= k; ++lvl) {
        const auto& ns = per[static_cast<std::size_t>(lvl - 1)];
        for (std::size_t i = 1; i < ns.size(); ++i) {
            const ExecNode& a = nodes[static_cast<std::size_t>(ns[i - 1])];
            const ExecNode& b = nodes[static_cast<std::size_t>(ns[i])];
            if (a.label != b.label) adv_moves_at[a.end].push_back(lvl);
        }
    }
    for (StepRecord& s : rep.steps) {
        auto it = adv_moves_at.find(s.t);
        if (it != adv_moves_at.end()) s.adv_moved = it->second;
        std::sort(s.adv_moved.begin(), s.adv_moved.end());
    }
    Rat adv_cum = 0;
    for (StepRecord& s : rep.steps) {
        for (int lvl : s.adv_moved) {
            adv_cum += w.weight(lvl);
            rep.adv_server_cost[static_cast<std::size_t>(lvl - 1)] += w.weight(lvl);
        }
        s.adv_cost = adv_cum;
    }

    // property (i): an ADV move below level k needs a heavier ALG move at
    // the same step
    for (const StepRecord& s : rep.steps)
        for (int lvl : s.adv_moved)
            if (lvl < k) {
                bool heavier = false;
                for (int j : s.alg_moved)
                    if (j > lvl) heavier = true;
                if (!heavier) rep.property_i_ok = false;
            }

    // property (ii) and the prefix ledger over completed phases
    rep.prefix_end = 0;
    for (int r : per[static_cast<std::size_t>(k - 1)]) {
        const ExecNode& n = nodes[static_cast<std::size_t>(r)];
        int moves = 0;
        for (const StepRecord& s : rep.steps)
            if (s.t > n.start && s.t <= n.end)
                for (int j : s.alg_moved)
                    if (j == k) ++moves;
        bool is_completed = false;
        // a phase is completed iff it drained T; equivalently its close step
        // carries the phase-end flag
        for (const StepRecord& s : rep.steps)
            if (s.t == n.end && s.flags == "phase-end") is_completed = true;
        if (is_completed) {
            rep.phase_heavy_moves.push_back(moves);
            if (moves < st.n_k()) rep.property_ii_ok = false;
            rep.prefix_end = n.end;
        }
    }

    Rat alg_heavy_prefix = 0, alg_upper_prefix = 0, adv_light_prefix = 0, adv_heavy_prefix = 0;
    rep.alg_cost_prefix = 0;
    rep.adv_cost_prefix = 0;
    for (const StepRecord& s : rep.steps) {
        if (s.t > rep.prefix_end) break;
        for (int i : s.alg_moved) {
            rep.alg_cost_prefix += w.weight(i);
            if (i >= 2) alg_upper_prefix += w.weight(i);
            if (i == k) alg_heavy_prefix += w.weight(i);
        }
        for (int lvl : s.adv_moved) {
            rep.adv_cost_prefix += w.weight(lvl);
            if (lvl < k) adv_light_prefix += w.weight(lvl);
            if (lvl == k) adv_heavy_prefix += w.weight(lvl);
        }
    }
    rep.eq2_ok = adv_light_prefix * Rat(st.n_k()) <= alg_upper_prefix;
    rep.eq3_ok = adv_heavy_prefix * Rat(st.n_k()) <= alg_heavy_prefix;
    if (rep.adv_cost_prefix > 0) rep.ratio_prefix = rep.alg_cost_prefix / rep.adv_cost_prefix;

    bool above_one = false;
    for (const StepRecord& s : rep.steps)
        for (int i : s.alg_moved)
            if (i > 1) above_one = true;
    rep.degenerate_unbounded = rep.truncated && rep.completed_phases == 0 && !above_one;
    return rep;
}

struct GeneralMetricReport {
    int k = 0;
    int n_k = 0;
    int phases = 0;
    bool truncated = false;
    RequestSequence sigma;
    Rat alg_cost;
    Rat alg_heavy_cost;
    std::vector<Rat> adv_cost;  // per adversary, initial placement excluded
    Rat sum_adv_heavy;
    bool eq6_ok = false;             // sum of ADV heavy costs == ALG heavy cost
    bool sum_le_twice_ok = false;    // sum of ADV costs <= 2 ALG cost
    bool labelings_ok = false;       // every adversary's labeling is feasible
    bool degenerate_unbounded = false;

    Rat adv_cost_total() const {
        Rat s = 0;
        for (const Rat& c : adv_cost) s += c;
        return s;
    }
};

/// Appendix-style lower bound on an arbitrary metric: n_k adversaries hold
/// their heaviest servers on distinct points; whenever the algorithm moves
/// its heaviest server from p to q, the adversary at q moves to p. Runs on
/// the first n_k + 1 points of the metric; distances are normalized so the
/// minimum pairwise distance is 1.
inline GeneralMetricReport general_metric_run(const std::vector<std::vector<Rat>>& metric,
                                              const std::string& alg_spec, int k, int horizon,
                                              std::uint64_t seed,
                                              std::size_t limit = kDefaultTableLimit) {
    int npts = static_cast<int>(metric.size());
    int nk = n_seq_int(k);
    if (npts < nk + 1) throw dimension_error("metric needs at least n_k + 1 points");
    for (int i = 0; i < npts; ++i) {
        if (static_cast<int>(metric[static_cast<std::size_t>(i)].size()) != npts)
            throw dimension_error("metric table must be square");
        for (int j = 0; j < npts; ++j) {
            const Rat& d = metric[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (i == j ? d != 0 : d <= 0)
                throw dimension_error("metric needs zero diagonal and positive distances");
            if (d != metric[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])
                throw dimension_error("metric must be symmetric");
        }
    }
    std::vector<Point> P;
    for (Point x = 1; x <= nk + 1; ++x) P.push_back(x);
    Rat dmin, dmax;
    bool first = true;
    for (Point x : P)
        for (Point y : P)
            if (x < y) {
                const Rat& d = metric[static_cast<std::size_t>(x - 1)][static_cast<std::size_t>(y - 1)];
                if (first || d < dmin) dmin = d;
                if (first || d > dmax) dmax = d;
                first = false;
            }
    auto dist = [&](Point x, Point y) {
        return metric[static_cast<std::size_t>(x - 1)][static_cast<std::size_t>(y - 1)] / dmin;
    };
    Rat D = dmax / dmin;

    // w_1 = 1, w_i = n_k * D * (w_1 + ... + w_{i-1})
    std::vector<Rat> weights{Rat(1)};
    Rat sum = 1;
    for (int i = 2; i <= k; ++i) {
        weights.push_back(Rat(nk) * D * sum);
        sum += weights.back();
    }
    WeightProfile w = WeightProfile::flat(weights);

    Universe u{nk + 1};
    Configuration c0{std::vector<Point>(static_cast<std::size_t>(k), P[0])};
    auto alg = make_algorithm(alg_spec, u, w, c0, limit);
    AdversaryState st(u, k, seed, P);

    GeneralMetricReport rep;
    rep.k = k;
    rep.n_k = nk;
    rep.adv_cost.assign(static_cast<std::size_t>(nk), Rat(0));

    // adversary i holds its heaviest server at heavy[i]
    std::vector<Point> heavy(P.begin() + 1, P.end());
    std::vector<std::vector<Point>> heavy_per_phase;  // snapshot at each phase start
    std::vector<int> phase_roots;

    Rat alg_cost = 0, alg_heavy = 0, sum_adv_heavy = 0;
    bool above_one = false;
    while (true) {
        st.observe(alg->config());
        if (static_cast<int>(st.sigma().size()) >= horizon) break;
        Point r = st.request(alg->config());
        // snapshot adversary heavy positions when a new phase root appears
        int idx = static_cast<int>(st.nodes().size()) - 1;
        while (st.nodes()[static_cast<std::size_t>(idx)].parent >= 0)
            idx = st.nodes()[static_cast<std::size_t>(idx)].parent;
        if (phase_roots.empty() || phase_roots.back() != idx) {
            phase_roots.push_back(idx);
            heavy_per_phase.push_back(heavy);
        }
        Configuration before = alg->config();
        const Configuration& after = alg->serve(r);
        for (int i = 1; i <= k; ++i) {
            if (before.pos(i) != after.pos(i)) {
                Rat c = w.weight(i) * dist(before.pos(i), after.pos(i));
                alg_cost += c;
                if (i > 1) above_one = true;
                if (i == k) {
                    alg_heavy += c;
                    // the adversary at the new location swaps to the old one
                    Point p = before.pos(k), q = after.pos(k);
                    for (std::size_t a = 0; a < heavy.size(); ++a) {
                        if (heavy[a] == q) {
                            heavy[a] = p;
                            Rat hc = w.weight(k) * dist(q, p);
                            rep.adv_cost[a] += hc;
                            sum_adv_heavy += hc;
                            break;
                        }
                    }
                }
            }
        }
    }
    st.finish();

    rep.sigma = st.sigma();
    rep.phases = st.completed_phases();
    rep.truncated = true;  // horizon-bounded by definition
    rep.alg_cost = alg_cost;
    rep.alg_heavy_cost = alg_heavy;
    rep.sum_adv_heavy = sum_adv_heavy;
    rep.eq6_ok = sum_adv_heavy == alg_heavy;
    rep.degenerate_unbounded = !above_one;

    // per-adversary labelings: each phase subtree anchored at the
    // adversary's heavy point during that phase
    ServicePattern pat = st.pattern();
    auto where = st.node_keys();
    rep.labelings_ok = true;
    for (std::size_t a = 0; a < rep.adv_cost.size(); ++a) {
        Labeling alpha;
        for (std::size_t ph = 0; ph < phase_roots.size(); ++ph)
            st.descend(phase_roots[ph], heavy_per_phase[ph][a], alpha, where);
        if (!check_labeling(pat, alpha, rep.sigma)) rep.labelings_ok = false;
        // lighter-server movement: label changes between consecutive
        // intervals per level, charged by metric distance
        auto per = st.level_nodes();
        for (int lvl = 1; lvl < k; ++lvl) {
            const auto& ns = per[static_cast<std::size_t>(lvl - 1)];
            Point prev = 0;
            for (int nidx : ns) {
                auto it = alpha.labels.find(where.at(nidx));
                if (it == alpha.labels.end()) continue;
                Point cur = it->second[0];
                if (prev != 0 && cur != prev)
                    rep.adv_cost[a] += w.weight(lvl) * dist(prev, cur);
                prev = cur;
            }
        }
    }
    rep.sum_le_twice_ok = rep.adv_cost_total() <= 2 * rep.alg_cost;
    return rep;
}

}  // namespace wks
