#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wks/core.hpp"

// Service patterns, feasible labelings, the request-list algebra
// (leaf/joint/lift with its brute-force oracle) and the dichotomy bound
// calculators.

namespace wks {

/// Per-level partition of [0, T+1) into half-open intervals. Level i's
/// breakpoint list includes both endpoints 0 and T+1; interval j at a level
/// is [b_j, b_{j+1}). Levels are 1..k, heaviest last.
struct ServicePattern {
    int horizon = 0;  // T
    bool class_mode = false;
    std::vector<std::vector<int>> levels;  // breakpoints per level, ascending

    int level_count() const { return static_cast<int>(levels.size()); }

    int intervals_at(int level) const {
        return static_cast<int>(levels.at(static_cast<std::size_t>(level - 1)).size()) - 1;
    }

    std::pair<int, int> interval(int level, int index) const {
        const auto& bp = levels.at(static_cast<std::size_t>(level - 1));
        return {bp.at(static_cast<std::size_t>(index)), bp.at(static_cast<std::size_t>(index) + 1)};
    }

    /// Index of the level interval containing time t.
    int interval_index_at(int level, int t) const {
        const auto& bp = levels.at(static_cast<std::size_t>(level - 1));
        auto it = std::upper_bound(bp.begin(), bp.end(), t);
        if (it == bp.begin() || it == bp.end())
            throw dimension_error("time " + std::to_string(t) + " outside pattern horizon");
        return static_cast<int>(it - bp.begin()) - 1;
    }

    void validate() const {
        if (horizon < 0) throw schema_error("pattern horizon must be >= 0");
        if (levels.empty()) throw schema_error("pattern needs at least one level");
        for (const auto& bp : levels) {
            if (bp.size() < 2 || bp.front() != 0 || bp.back() != horizon + 1)
                throw schema_error("level breakpoints must span [0, T+1)");
            for (std::size_t i = 1; i < bp.size(); ++i)
                if (bp[i] <= bp[i - 1]) throw schema_error("breakpoints must be strictly increasing");
        }
    }

    /// Every breakpoint of level i+1 is also one of level i.
    bool hierarchical() const {
        for (std::size_t i = 1; i < levels.size(); ++i)
            if (!std::includes(levels[i - 1].begin(), levels[i - 1].end(), levels[i].begin(),
                               levels[i].end()))
                return false;
        return true;
    }

    bool operator==(const ServicePattern&) const = default;
};

/// Partial map (level, interval index) -> label points. Flat mode uses
/// single-point labels; class mode allows up to k_i points per interval.
struct Labeling {
    std::map<std::pair<int, int>, std::vector<Point>> labels;

    bool operator==(const Labeling&) const = default;
};

/// Antichain of inclusion-wise minimal tuples, each a sorted point set.
/// No tuples at all means "infeasible"; the single empty tuple means
/// "needs no help from ancestors".
struct RequestList {
    std::vector<std::vector<Point>> tuples;

    bool infeasible() const { return tuples.empty(); }
    bool no_help_needed() const { return tuples.size() == 1 && tuples[0].empty(); }

    bool operator==(const RequestList&) const = default;
};

inline bool is_antichain(const std::vector<std::vector<Point>>& tuples) {
    for (std::size_t i = 0; i < tuples.size(); ++i)
        for (std::size_t j = 0; j < tuples.size(); ++j)
            if (i != j &&
                std::includes(tuples[j].begin(), tuples[j].end(), tuples[i].begin(),
                              tuples[i].end()))
                return false;
    return true;
}

/// Keeps only inclusion-wise minimal tuples (and deduplicates).
inline std::vector<std::vector<Point>> antichain_reduce(std::vector<std::vector<Point>> tuples) {
    std::sort(tuples.begin(), tuples.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
    std::vector<std::vector<Point>> out;
    for (const auto& t : tuples) {
        bool dominated = false;
        for (const auto& kept : out) {
            if (kept.size() >= t.size()) break;
            if (std::includes(t.begin(), t.end(), kept.begin(), kept.end())) {
                dominated = true;
                break;
            }
        }
        if (!dominated) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace detail {

inline void for_each_subset(const std::vector<Point>& set, int size,
                            const std::function<void(const std::vector<Point>&)>& fn) {
    std::vector<Point> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        if (static_cast<int>(cur.size()) == size) {
            fn(cur);
            return;
        }
        for (std::size_t i = from; i < set.size(); ++i) {
            cur.push_back(set[i]);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
}

}  // namespace detail

/// Leaf list for an interval whose own label covers `own_capacity` points:
/// all minimal P \ C with C a size-min(own_capacity, |P|) subset of the
/// distinct requested points P, filtered to the size cap.
inline RequestList leaf_list_raw(std::vector<Point> distinct, int own_capacity, int cap) {
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    int j = static_cast<int>(distinct.size());
    RequestList out;
    if (j <= own_capacity) {
        out.tuples.push_back({});
        return out;
    }
    if (j - own_capacity > cap) return out;  // infeasible
    detail::for_each_subset(distinct, own_capacity, [&](const std::vector<Point>& c) {
        std::vector<Point> rest;
        std::set_difference(distinct.begin(), distinct.end(), c.begin(), c.end(),
                            std::back_inserter(rest));
        out.tuples.push_back(std::move(rest));
    });
    out.tuples = antichain_reduce(std::move(out.tuples));
    return out;
}

/// Flat leaf list: { P\{p_1}, ..., P\{p_j} }, or the empty tuple when only
/// one point is requested. The j distinct points must fit k-1 helpers.
inline RequestList leaf_list(const std::vector<Point>& requested, int k) {
    std::vector<Point> distinct = requested;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (static_cast<int>(distinct.size()) >= k)
        throw dimension_error("leaf requests " + std::to_string(distinct.size()) +
                              " distinct points; needs at most k-1 = " + std::to_string(k - 1));
    return leaf_list_raw(distinct, 1, k - 1);
}

/// Joint list of sibling lists: minimal tuples S with |S| <= cap such that
/// every sibling list contains a subset of S. Folds the children
/// left-to-right, extending the running antichain.
inline RequestList joint_list_capped(const std::vector<RequestList>& children, int cap) {
    RequestList cur;
    cur.tuples.push_back({});
    for (const RequestList& child : children) {
        if (child.infeasible()) return RequestList{};
        std::vector<std::vector<Point>> next;
        for (const auto& s : cur.tuples) {
            for (const auto& a : child.tuples) {
                std::vector<Point> u;
                std::set_union(s.begin(), s.end(), a.begin(), a.end(), std::back_inserter(u));
                if (static_cast<int>(u.size()) <= cap) next.push_back(std::move(u));
            }
        }
        cur.tuples = antichain_reduce(std::move(next));
        if (cur.tuples.empty()) return cur;
    }
    return cur;
}

/// Flat joint list at parent level l: cap k-(l-1).
inline RequestList joint_list(const std::vector<RequestList>& children, int level, int k) {
    if (level < 2 || level > k) throw dimension_error("joint_list needs 2 <= level <= k");
    return joint_list_capped(children, k - (level - 1));
}

/// Lifts a joint list through the owning interval's own label: every
/// S \ D with D a size-min(remove, |S|) subset, antichain-reduced.
inline RequestList lift_list_capped(const RequestList& joint, int remove, int cap) {
    if (joint.infeasible()) return RequestList{};
    RequestList out;
    for (const auto& s : joint.tuples) {
        int r = std::min<int>(remove, static_cast<int>(s.size()));
        detail::for_each_subset(s, r, [&](const std::vector<Point>& d) {
            std::vector<Point> rest;
            std::set_difference(s.begin(), s.end(), d.begin(), d.end(), std::back_inserter(rest));
            if (static_cast<int>(rest.size()) <= cap) out.tuples.push_back(std::move(rest));
        });
    }
    out.tuples = antichain_reduce(std::move(out.tuples));
    return out;
}

/// Flat lift at level l: remove one point per tuple, cap k-l.
inline RequestList lift_list(const RequestList& joint, int level, int k) {
    if (level < 1 || level > k) throw dimension_error("lift_list needs 1 <= level <= k");
    return lift_list_capped(joint, 1, k - level);
}

namespace detail {

/// Per-level class sizes: entry [i-1] is the label capacity of level i.
/// Flat patterns use all ones.
inline std::vector<int> level_counts(const ServicePattern& p, const WeightProfile& w) {
    if (p.class_mode) {
        if (!w.classes || static_cast<int>(w.classes->counts.size()) != p.level_count())
            throw dimension_error("class pattern needs a matching class structure");
        return w.classes->counts;
    }
    if (w.k() != p.level_count())
        throw dimension_error("pattern level count != k");
    return std::vector<int>(static_cast<std::size_t>(p.level_count()), 1);
}

inline int cap_after(const std::vector<int>& counts, int level) {
    int c = 0;
    for (int i = level; i < static_cast<int>(counts.size()); ++i)
        c += counts[static_cast<std::size_t>(i)];
    return c;  // sum of k_i for i > level
}

inline std::vector<Point> requested_in(const RequestSequence& reqs, int a, int b) {
    std::vector<Point> out;
    for (int t = std::max(a, 1); t < b && t <= static_cast<int>(reqs.size()); ++t)
        out.push_back(reqs[static_cast<std::size_t>(t - 1)]);
    return out;
}

}  // namespace detail

/// L(I) by the bottom-up pipeline (leaf list, then joint+lift per level).
/// Requires a hierarchical pattern.
inline RequestList interval_list(const ServicePattern& p, const WeightProfile& w,
                                 const RequestSequence& reqs, int level, int index) {
    p.validate();
    if (!p.hierarchical()) throw dimension_error("request lists need a hierarchical pattern");
    std::vector<int> counts = detail::level_counts(p, w);
    auto [a, b] = p.interval(level, index);
    if (level == 1)
        return leaf_list_raw(detail::requested_in(reqs, a, b),
                             counts[0], detail::cap_after(counts, 1));
    std::vector<RequestList> kids;
    const auto& bp = p.levels[static_cast<std::size_t>(level - 2)];
    for (std::size_t j = 0; j + 1 < bp.size(); ++j)
        if (bp[j] >= a && bp[j + 1] <= b)
            kids.push_back(interval_list(p, w, reqs, level - 1, static_cast<int>(j)));
    RequestList joint = joint_list_capped(
        kids, counts[static_cast<std::size_t>(level - 1)] + detail::cap_after(counts, level));
    return lift_list_capped(joint, counts[static_cast<std::size_t>(level - 1)],
                            detail::cap_after(counts, level));
}

/// Joint request list of the children of interval (level, index).
inline RequestList interval_joint_list(const ServicePattern& p, const WeightProfile& w,
                                       const RequestSequence& reqs, int level, int index) {
    p.validate();
    if (level < 2) throw dimension_error("joint list needs level >= 2");
    if (!p.hierarchical()) throw dimension_error("request lists need a hierarchical pattern");
    std::vector<int> counts = detail::level_counts(p, w);
    auto [a, b] = p.interval(level, index);
    std::vector<RequestList> kids;
    const auto& bp = p.levels[static_cast<std::size_t>(level - 2)];
    for (std::size_t j = 0; j + 1 < bp.size(); ++j)
        if (bp[j] >= a && bp[j + 1] <= b)
            kids.push_back(interval_list(p, w, reqs, level - 1, static_cast<int>(j)));
    return joint_list_capped(
        kids, counts[static_cast<std::size_t>(level - 1)] + detail::cap_after(counts, level));
}

/// Feasible-label summary of the single top-level interval: either every
/// point of U works (the children's joint list is the empty tuple), or the
/// explicit antichain of the joint list (size-1 members are the feasible
/// single labels).
struct RootLabels {
    bool feasible = false;
    bool all_of_u = false;
    std::vector<std::vector<Point>> tuples;

    std::vector<Point> flat_labels() const {
        std::vector<Point> out;
        for (const auto& t : tuples)
            if (t.size() == 1) out.push_back(t[0]);
        return out;
    }
};

inline RootLabels root_labels(const ServicePattern& p, const WeightProfile& w,
                              const RequestSequence& reqs) {
    p.validate();
    int k = p.level_count();
    if (p.intervals_at(k) != 1)
        throw dimension_error("root_labels needs a single top-level interval");
    RootLabels out;
    if (k == 1) {
        std::vector<Point> distinct = reqs;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        int cap = detail::level_counts(p, w)[0];
        if (distinct.empty()) {
            out.feasible = out.all_of_u = true;
        } else if (static_cast<int>(distinct.size()) <= cap) {
            out.feasible = true;
            out.tuples.push_back(distinct);
        }
        return out;
    }
    RequestList joint = interval_joint_list(p, w, reqs, k, 0);
    if (joint.infeasible()) return out;
    out.feasible = true;
    if (joint.no_help_needed()) {
        out.all_of_u = true;
        return out;
    }
    out.tuples = joint.tuples;
    return out;
}

/// Oracle: L(I) by direct search. feasible(I, S) asks whether the subtree
/// of I can cover its requests when the ancestors additionally hold S;
/// the list is the antichain of minimal feasible S within the size cap.
/// Exponential; test-scale only.
inline RequestList brute_force_list(const Universe& u, const ServicePattern& p,
                                    const WeightProfile& w, const RequestSequence& reqs,
                                    int level, int index,
                                    std::size_t limit = kDefaultTableLimit) {
    p.validate();
    if (!p.hierarchical()) throw dimension_error("request lists need a hierarchical pattern");
    std::vector<int> counts = detail::level_counts(p, w);

    std::function<bool(int, int, std::vector<Point>)> feasible =
        [&](int lvl, int idx, std::vector<Point> help) -> bool {
        auto [a, b] = p.interval(lvl, idx);
        std::vector<Point> req = detail::requested_in(reqs, a, b);
        std::sort(req.begin(), req.end());
        req.erase(std::unique(req.begin(), req.end()), req.end());
        // own label: only requested points matter, plus the option of none
        std::vector<Point> uncovered;
        std::set_difference(req.begin(), req.end(), help.begin(), help.end(),
                            std::back_inserter(uncovered));
        int own = counts[static_cast<std::size_t>(lvl - 1)];
        if (lvl == 1) return static_cast<int>(uncovered.size()) <= own;
        const auto& bp = p.levels[static_cast<std::size_t>(lvl - 2)];
        std::vector<int> kids;
        for (std::size_t j = 0; j + 1 < bp.size(); ++j)
            if (bp[j] >= a && bp[j + 1] <= b) kids.push_back(static_cast<int>(j));
        bool ok = false;
        int pick = std::min<int>(own, static_cast<int>(uncovered.size()));
        detail::for_each_subset(uncovered, pick, [&](const std::vector<Point>& lbl) {
            if (ok) return;
            std::vector<Point> h2;
            std::set_union(help.begin(), help.end(), lbl.begin(), lbl.end(),
                           std::back_inserter(h2));
            bool all = true;
            for (int j : kids)
                if (!feasible(lvl - 1, j, h2)) {
                    all = false;
                    break;
                }
            if (all) ok = true;
        });
        return ok;
    };

    int cap = detail::cap_after(counts, level);
    std::vector<Point> pts;
    for (Point q = 1; q <= u.n; ++q) pts.push_back(q);
    std::size_t candidates = 1, binom = 1;
    for (int s = 1; s <= cap; ++s) {
        binom = binom * static_cast<std::size_t>(u.n - s + 1) / static_cast<std::size_t>(s);
        candidates += binom;
    }
    if (candidates > limit) throw capacity_error("brute-force candidate set exceeds limit");

    RequestList out;
    for (int size = 0; size <= cap; ++size) {
        detail::for_each_subset(pts, size, [&](const std::vector<Point>& s) {
            for (const auto& kept : out.tuples)
                if (std::includes(s.begin(), s.end(), kept.begin(), kept.end())) return;
            if (feasible(level, index, s)) out.tuples.push_back(s);
        });
    }
    out.tuples = antichain_reduce(std::move(out.tuples));
    return out;
}

/// Oracle counterpart of root_labels.
inline RootLabels brute_force_root_labels(const Universe& u, const ServicePattern& p,
                                          const WeightProfile& w, const RequestSequence& reqs,
                                          std::size_t limit = kDefaultTableLimit) {
    RootLabels out;
    int k = p.level_count();
    if (p.intervals_at(k) != 1)
        throw dimension_error("root_labels needs a single top-level interval");
    if (k == 1) return root_labels(p, w, reqs);
    RequestList joint;
    {
        // minimal S such that the whole pattern is feasible with root+ancestors = S
        std::vector<int> counts = detail::level_counts(p, w);
        int cap = counts[static_cast<std::size_t>(k - 1)] + detail::cap_after(counts, k);
        std::vector<Point> pts;
        for (Point q = 1; q <= u.n; ++q) pts.push_back(q);
        std::vector<RequestList> children;
        const auto& bp = p.levels[static_cast<std::size_t>(k - 2)];
        for (std::size_t j = 0; j + 1 < bp.size(); ++j)
            children.push_back(brute_force_list(u, p, w, reqs, k - 1, static_cast<int>(j), limit));
        for (int size = 0; size <= cap; ++size) {
            detail::for_each_subset(pts, size, [&](const std::vector<Point>& s) {
                for (const auto& kept : joint.tuples)
                    if (std::includes(s.begin(), s.end(), kept.begin(), kept.end())) return;
                bool all = true;
                for (const RequestList& child : children) {
                    bool some = false;
                    for (const auto& t : child.tuples)
                        if (std::includes(s.begin(), s.end(), t.begin(), t.end())) some = true;
                    if (!some) {
                        all = false;
                        break;
                    }
                }
                if (all) joint.tuples.push_back(s);
            });
        }
        joint.tuples = antichain_reduce(std::move(joint.tuples));
    }
    if (joint.infeasible()) return out;
    out.feasible = true;
    if (joint.no_help_needed()) {
        out.all_of_u = true;
        return out;
    }
    out.tuples = joint.tuples;
    return out;
}

/// Propagates breakpoints downward so that every level-(i+1) breakpoint also
/// ends a level-i interval. Cost grows by a factor of at most k.
inline ServicePattern hierarchicalize(const ServicePattern& p) {
    p.validate();
    ServicePattern out = p;
    for (int i = out.level_count() - 2; i >= 0; --i) {
        std::vector<int> merged;
        std::set_union(out.levels[static_cast<std::size_t>(i)].begin(),
                       out.levels[static_cast<std::size_t>(i)].end(),
                       out.levels[static_cast<std::size_t>(i) + 1].begin(),
                       out.levels[static_cast<std::size_t>(i) + 1].end(),
                       std::back_inserter(merged));
        out.levels[static_cast<std::size_t>(i)] = std::move(merged);
    }
    return out;
}

/// Flat: sum of w_i (|I_i| - 1); class: sum of k_i w_i (|I_i| - 1).
inline Rat pattern_cost(const ServicePattern& p, const WeightProfile& w) {
    p.validate();
    Rat c = 0;
    if (p.class_mode) {
        if (!w.classes || static_cast<int>(w.classes->counts.size()) != p.level_count())
            throw dimension_error("class pattern needs a matching class structure");
        for (int i = 1; i <= p.level_count(); ++i)
            c += Rat(w.classes->counts[static_cast<std::size_t>(i - 1)]) *
                 w.classes->class_weights[static_cast<std::size_t>(i - 1)] *
                 Rat(p.intervals_at(i) - 1);
    } else {
        if (w.k() != p.level_count()) throw dimension_error("pattern level count != k");
        for (int i = 1; i <= p.level_count(); ++i)
            c += w.weight(i) * Rat(p.intervals_at(i) - 1);
    }
    return c;
}

/// True iff every request time is covered by some interval labeled with
/// the requested point.
inline bool check_labeling(const ServicePattern& p, const Labeling& alpha,
                           const RequestSequence& reqs) {
    p.validate();
    if (static_cast<int>(reqs.size()) > p.horizon)
        throw dimension_error("request sequence longer than pattern horizon");
    for (int t = 1; t <= static_cast<int>(reqs.size()); ++t) {
        Point want = reqs[static_cast<std::size_t>(t - 1)];
        bool covered = false;
        for (int lvl = 1; lvl <= p.level_count() && !covered; ++lvl) {
            int idx = p.interval_index_at(lvl, t);
            auto it = alpha.labels.find({lvl, idx});
            if (it != alpha.labels.end() &&
                std::find(it->second.begin(), it->second.end(), want) != it->second.end())
                covered = true;
        }
        if (!covered) return false;
    }
    return true;
}

/// Common refinement: per level, the union of all inputs' breakpoints.
inline ServicePattern refine(const std::vector<ServicePattern>& ps) {
    if (ps.empty()) throw dimension_error("refine needs at least one pattern");
    ServicePattern out = ps[0];
    out.validate();
    for (std::size_t i = 1; i < ps.size(); ++i) {
        ps[i].validate();
        if (ps[i].horizon != out.horizon || ps[i].level_count() != out.level_count() ||
            ps[i].class_mode != out.class_mode)
            throw dimension_error("refine inputs must share horizon, levels and mode");
        for (std::size_t l = 0; l < out.levels.size(); ++l) {
            std::vector<int> merged;
            std::set_union(out.levels[l].begin(), out.levels[l].end(), ps[i].levels[l].begin(),
                           ps[i].levels[l].end(), std::back_inserter(merged));
            out.levels[l] = std::move(merged);
        }
    }
    return out;
}

/// Copies each labeled input interval's label onto every refined
/// sub-interval it contains.
inline Labeling extend_labeling(const ServicePattern& original, const Labeling& alpha,
                                const ServicePattern& refined) {
    Labeling out;
    for (const auto& [key, label] : alpha.labels) {
        auto [lvl, idx] = key;
        auto [a, b] = original.interval(lvl, idx);
        const auto& bp = refined.levels.at(static_cast<std::size_t>(lvl - 1));
        for (std::size_t j = 0; j + 1 < bp.size(); ++j)
            if (bp[j] >= a && bp[j + 1] <= b) out.labels[{lvl, static_cast<int>(j)}] = label;
    }
    return out;
}

/// Upper bound in the exact form factor * 2^exp; the power is never
/// materialized.
struct BoundValue {
    Int factor = 1;  // >= 1
    Int exp = 0;     // >= 0

    /// count <= factor * 2^exp, exactly.
    bool bounds_count(const Int& count) const {
        if (count <= factor) return true;
        Int q = (count + factor - 1) / factor;  // ceil; count <= factor*2^exp iff q <= 2^exp
        return le_pow2(q, exp);
    }
};

inline Int binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    Int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

namespace detail {

inline void check_lth(int l, int t, int h, int k) {
    if (l < 2 || h < 0 || h > t || t > k)
        throw dimension_error("bound parameters need l >= 2, 0 <= h <= t <= k");
}

}  // namespace detail

/// n(l,t,h) <= 2^((l-1)(l-1+t)^2 2^(l-1+t-h)): max t-tuples containing h
/// fixed points in a joint list under an l-th level interval.
inline BoundValue bound_joint_tuples(int l, int t, int h, int k) {
    detail::check_lth(l, t, h, k);
    int e = l - 1 + t - h;
    return BoundValue{1, Int(l - 1) * Int(l - 1 + t) * Int(l - 1 + t) * (Int(1) << e)};
}

/// f(l,t,h) <= (t-h+1) n(l,t+1,h): the same for an interval's own list.
inline BoundValue bound_interval_tuples(int l, int t, int h, int k) {
    detail::check_lth(l, t, h, k);
    BoundValue n = bound_joint_tuples(l, t + 1, h, k + 1);
    return BoundValue{Int(t - h + 1), n.exp};
}

/// n(k,1) <= 2^(2^(k + ceil(3 log2 k))): the dichotomy constant.
inline BoundValue bound_dichotomy(int k) {
    if (k < 2) throw dimension_error("dichotomy bound needs k >= 2");
    Int kcubed = Int(k) * k * k;
    int e = k + static_cast<int>(bit_length(kcubed - 1));  // k + ceil(log2 k^3)
    return BoundValue{1, Int(1) << e};
}

/// Class mode: n(l,t,h) <= 2^(l 4k^2 (t-h) prod_{i<l}(k_i+1)).
inline BoundValue bound_class_joint_tuples(int l, int t, int h, const std::vector<int>& counts) {
    int k = 0;
    for (int c : counts) k += c;
    detail::check_lth(l, t, h, k);
    if (l > static_cast<int>(counts.size())) throw dimension_error("level exceeds class count");
    Int prod = 1;
    for (int i = 0; i < l - 1; ++i) prod *= Int(counts[static_cast<std::size_t>(i)] + 1);
    return BoundValue{1, Int(l) * 4 * Int(k) * Int(k) * Int(t - h) * prod};
}

/// Class mode: f(l,t,h) <= C(t+k_l-h, k_l) n(l,t+1,h).
inline BoundValue bound_class_interval_tuples(int l, int t, int h, const std::vector<int>& counts) {
    int k = 0;
    for (int c : counts) k += c;
    detail::check_lth(l, t, h, k);
    int kl = counts.at(static_cast<std::size_t>(l - 1));
    BoundValue n = bound_class_joint_tuples(l, t + 1, h, counts);
    return BoundValue{binomial(t + kl - h, kl), n.exp};
}

/// Pattern file: line 1 "T k mode", then k breakpoint lines, then optional
/// "level index label[,label...]" lines.
inline std::string emit_pattern(const ServicePattern& p, const Labeling& alpha = {}) {
    p.validate();
    std::ostringstream out;
    out << p.horizon << " " << p.level_count() << " " << (p.class_mode ? "class" : "flat") << "\n";
    for (const auto& bp : p.levels) {
        for (std::size_t i = 0; i < bp.size(); ++i) out << (i ? " " : "") << bp[i];
        out << "\n";
    }
    for (const auto& [key, label] : alpha.labels) {
        out << key.first << " " << key.second << " ";
        for (std::size_t i = 0; i < label.size(); ++i) out << (i ? "," : "") << label[i];
        out << "\n";
    }
    return out.str();
}

inline std::pair<ServicePattern, Labeling> parse_pattern(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw schema_error("empty pattern document");
    std::istringstream head(line);
    ServicePattern p;
    int k = 0;
    std::string mode;
    if (!(head >> p.horizon >> k >> mode) || k < 1)
        throw schema_error("pattern header must be 'T k mode'");
    if (mode == "class")
        p.class_mode = true;
    else if (mode != "flat")
        throw schema_error("pattern mode must be 'flat' or 'class'");
    for (int i = 0; i < k; ++i) {
        if (!std::getline(in, line))
            throw schema_error("pattern needs " + std::to_string(k) + " breakpoint lines");
        std::istringstream ls(line);
        std::vector<int> bp;
        int b;
        while (ls >> b) bp.push_back(b);
        p.levels.push_back(std::move(bp));
    }
    p.validate();
    Labeling alpha;
    int lineno = k + 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        int lvl, idx;
        std::string labels;
        if (!(ls >> lvl >> idx >> labels))
            throw schema_error("bad labeling line " + std::to_string(lineno));
        if (lvl < 1 || lvl > k || idx < 0 || idx >= p.intervals_at(lvl))
            throw schema_error("labeling line " + std::to_string(lineno) +
                               " references a missing interval");
        std::vector<Point> pts;
        std::size_t pos = 0;
        while (pos <= labels.size()) {
            auto comma = labels.find(',', pos);
            std::string tok = labels.substr(pos, comma == std::string::npos ? std::string::npos
                                                                            : comma - pos);
            try {
                pts.push_back(std::stoi(tok));
            } catch (const std::exception&) {
                throw schema_error("bad label '" + tok + "' on line " + std::to_string(lineno));
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        alpha.labels[{lvl, idx}] = std::move(pts);
    }
    return {std::move(p), std::move(alpha)};
}

}  // namespace wks
