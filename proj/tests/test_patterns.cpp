#include <catch_amalgamated.hpp>

#include "wks/patterns.hpp"
#include "wks/rng.hpp"

using namespace wks;

namespace {

ServicePattern flat_pattern(int horizon, std::vector<std::vector<int>> levels) {
    ServicePattern p;
    p.horizon = horizon;
    p.levels = std::move(levels);
    return p;
}

}  // namespace

TEST_CASE("pattern validation and interval lookup") {
    ServicePattern p = flat_pattern(10, {{0, 3, 5, 8, 11}, {0, 5, 11}});
    p.validate();
    CHECK(p.level_count() == 2);
    CHECK(p.intervals_at(1) == 4);
    CHECK(p.interval(1, 1) == std::pair<int, int>{3, 5});
    CHECK(p.interval_index_at(1, 4) == 1);
    CHECK(p.interval_index_at(2, 4) == 0);
    CHECK(p.interval_index_at(2, 5) == 1);
    CHECK_THROWS_AS(p.interval_index_at(1, 11), dimension_error);
    CHECK(p.hierarchical());

    CHECK_THROWS_AS(flat_pattern(10, {{0, 11}, {1, 11}}).validate(), schema_error);
    CHECK_THROWS_AS(flat_pattern(10, {{0, 5, 5, 11}}).validate(), schema_error);
    CHECK_THROWS_AS(flat_pattern(10, {}).validate(), schema_error);
    CHECK_FALSE(flat_pattern(10, {{0, 5, 11}, {0, 3, 11}}).hierarchical());
}

TEST_CASE("hierarchicalize pushes breakpoints down") {
    ServicePattern p = flat_pattern(10, {{0, 5, 11}, {0, 3, 11}});
    ServicePattern h = hierarchicalize(p);
    CHECK(h.levels[0] == std::vector<int>{0, 3, 5, 11});
    CHECK(h.levels[1] == std::vector<int>{0, 3, 11});
    CHECK(h.hierarchical());

    // cost grows by at most a factor of k
    WeightProfile w = WeightProfile::flat({Rat(1), Rat(10)});
    CHECK(pattern_cost(h, w) <= Rat(2) * pattern_cost(p, w));

    Rng rng(3);
    for (int it = 0; it < 20; ++it) {
        int T = 8;
        ServicePattern q;
        q.horizon = T;
        for (int lvl = 0; lvl < 3; ++lvl) {
            std::vector<int> bp{0, T + 1};
            for (int b = 1; b <= T; ++b)
                if (rng.below(3) == 0) bp.insert(bp.end() - 1, b);
            std::sort(bp.begin(), bp.end());
            q.levels.push_back(std::move(bp));
        }
        ServicePattern qh = hierarchicalize(q);
        CHECK(qh.hierarchical());
        WeightProfile w3 = WeightProfile::flat({Rat(1), Rat(2), Rat(4)});
        CHECK(pattern_cost(qh, w3) <= Rat(3) * pattern_cost(q, w3));
    }
}

TEST_CASE("pattern cost sums weighted interval counts") {
    WeightProfile w = WeightProfile::flat({Rat(1), Rat(10)});
    CHECK(pattern_cost(flat_pattern(10, {{0, 3, 5, 8, 11}, {0, 5, 11}}), w) == 13);
    CHECK(pattern_cost(flat_pattern(10, {{0, 11}, {0, 11}}), w) == 0);

    ServicePattern cp;
    cp.horizon = 10;
    cp.class_mode = true;
    cp.levels = {{0, 5, 11}};
    WeightProfile cw = WeightProfile::classed({2}, {Rat(2)});
    CHECK(pattern_cost(cp, cw) == 4);  // lump 2*2 for one extra interval
    CHECK_THROWS_AS(pattern_cost(cp, w), dimension_error);
}

TEST_CASE("labeling check covers every request time") {
    ServicePattern p = flat_pattern(4, {{0, 3, 5}, {0, 5}});
    Labeling alpha;
    alpha.labels[{1, 0}] = {1};
    alpha.labels[{1, 1}] = {3};
    alpha.labels[{2, 0}] = {2};
    CHECK(check_labeling(p, alpha, {1, 2, 3, 2}));
    CHECK(check_labeling(p, alpha, {2, 1, 2, 3}));
    CHECK_FALSE(check_labeling(p, alpha, {3, 2, 3, 2}));  // 3 at t=1 uncovered
    CHECK_THROWS_AS(check_labeling(p, alpha, {1, 1, 1, 1, 1}), dimension_error);
}

TEST_CASE("antichain reduction keeps inclusion-minimal tuples") {
    auto r = antichain_reduce({{1, 2}, {1}, {2, 3}, {1, 3, 4}, {2, 3}});
    CHECK(r == std::vector<std::vector<Point>>{{1}, {2, 3}});
    CHECK(is_antichain(r));
    CHECK(antichain_reduce({{}}).size() == 1);
    CHECK(antichain_reduce({{}, {1}}) == std::vector<std::vector<Point>>{{}});

    Rng rng(8);
    for (int it = 0; it < 50; ++it) {
        std::vector<std::vector<Point>> in;
        for (int t = 0; t < 8; ++t) {
            std::vector<Point> s;
            for (Point q = 1; q <= 5; ++q)
                if (rng.below(2)) s.push_back(q);
            in.push_back(std::move(s));
        }
        auto out = antichain_reduce(in);
        CHECK(is_antichain(out));
        // every input tuple is dominated by some kept tuple
        for (const auto& s : in) {
            bool dom = false;
            for (const auto& kept : out)
                if (std::includes(s.begin(), s.end(), kept.begin(), kept.end())) dom = true;
            CHECK(dom);
        }
    }
}

TEST_CASE("leaf lists") {
    CHECK(leaf_list({5}, 2).no_help_needed());
    CHECK(leaf_list({5, 5, 5}, 2).no_help_needed());
    CHECK(leaf_list({1, 2}, 3).tuples == std::vector<std::vector<Point>>{{1}, {2}});
    CHECK(leaf_list({1, 2, 3}, 4).tuples ==
          std::vector<std::vector<Point>>{{1, 2}, {1, 3}, {2, 3}});
    CHECK_THROWS_AS(leaf_list({1, 2}, 2), dimension_error);
    CHECK_THROWS_AS(leaf_list({1, 2, 3, 4}, 4), dimension_error);
    // raw variant: an interval owning 2 labels needs only singletons
    CHECK(leaf_list_raw({1, 2, 3}, 2, 1).tuples ==
          std::vector<std::vector<Point>>{{1}, {2}, {3}});
    CHECK(leaf_list_raw({1, 2, 3}, 1, 1).infeasible());
}

TEST_CASE("joint lists fold sibling antichains") {
    RequestList a{{{1}, {2}}};
    RequestList b{{{2}, {3}}};
    // unions {1,2},{1,3},{2},{2,3} reduce: {2} dominates {1,2} and {2,3}
    CHECK(joint_list({a, b}, 2, 4).tuples ==
          std::vector<std::vector<Point>>{{1, 3}, {2}});

    RequestList none;
    none.tuples.push_back({});
    CHECK(joint_list({a, none}, 2, 4) == a);
    CHECK(joint_list({a, a}, 2, 4) == a);
    CHECK(joint_list({a, RequestList{}}, 2, 4).infeasible());
    // cap k-(l-1): pairs of disjoint singletons don't fit a cap of 1
    RequestList c{{{3}, {4}}};
    CHECK(joint_list({RequestList{{{1}}}, c}, 4, 4).infeasible());
    CHECK_THROWS_AS(joint_list({a}, 1, 4), dimension_error);
}

TEST_CASE("lift lists drop one point per tuple") {
    RequestList j{{{1, 2}, {1, 3}}};
    CHECK(lift_list(j, 2, 4).tuples == std::vector<std::vector<Point>>{{1}, {2}, {3}});
    CHECK(lift_list(RequestList{{{5}}}, 2, 4).no_help_needed());
    CHECK(lift_list(RequestList{}, 2, 4).infeasible());
    // cap k-l: at level k the lifted tuples must be empty or vanish
    CHECK(lift_list(RequestList{{{1}}}, 4, 4).no_help_needed());
    CHECK(lift_list(RequestList{{{1, 2}}}, 4, 4).infeasible());
}

TEST_CASE("interval lists match the brute-force oracle") {
    Universe u{4};
    Rng rng(19);
    for (int it = 0; it < 15; ++it) {
        int k = 2 + static_cast<int>(rng.below(2));
        std::vector<Rat> ws;
        for (int i = 0; i < k; ++i) ws.push_back(Rat(1 << i));
        WeightProfile w = WeightProfile::flat(ws);
        const int T = 6;
        // random hierarchical pattern: one top interval, every lower level
        // adds random breakpoints to its parent's
        std::vector<std::vector<int>> rev{{0, T + 1}};  // level k first
        for (int lvl = k - 1; lvl >= 1; --lvl) {
            std::vector<int> cur = rev.back();
            for (int b = 1; b <= T; ++b)
                if (rng.below(3) == 0 && std::find(cur.begin(), cur.end(), b) == cur.end())
                    cur.push_back(b);
            std::sort(cur.begin(), cur.end());
            rev.push_back(std::move(cur));
        }
        ServicePattern p;
        p.horizon = T;
        p.levels.assign(rev.rbegin(), rev.rend());
        REQUIRE(p.hierarchical());

        RequestSequence reqs;
        for (int t = 0; t < T; ++t) reqs.push_back(rng.range(1, 4));

        for (int lvl = 1; lvl <= k; ++lvl)
            for (int idx = 0; idx < p.intervals_at(lvl); ++idx)
                CHECK(interval_list(p, w, reqs, lvl, idx) ==
                      brute_force_list(u, p, w, reqs, lvl, idx));
        RootLabels fast = root_labels(p, w, reqs);
        RootLabels slow = brute_force_root_labels(u, p, w, reqs);
        CHECK(fast.feasible == slow.feasible);
        CHECK(fast.all_of_u == slow.all_of_u);
        CHECK(fast.tuples == slow.tuples);
    }
}

TEST_CASE("root labels of a one-interval pattern") {
    Universe u{4};
    WeightProfile w = WeightProfile::flat({Rat(1), Rat(2)});
    ServicePattern p = flat_pattern(3, {{0, 4}, {0, 4}});
    RootLabels con = root_labels(p, w, {2, 2, 2});
    CHECK(con.feasible);
    CHECK(con.all_of_u);

    RootLabels two = root_labels(p, w, {1, 2, 1});
    CHECK(two.feasible);
    CHECK_FALSE(two.all_of_u);
    CHECK(two.flat_labels() == std::vector<Point>{1, 2});

    CHECK_FALSE(root_labels(p, w, {1, 2, 3}).feasible);

    // k = 1: the single label must cover everything
    ServicePattern p1 = flat_pattern(3, {{0, 4}});
    WeightProfile w1 = WeightProfile::flat({Rat(1)});
    CHECK(root_labels(p1, w1, {2, 2, 2}).tuples ==
          std::vector<std::vector<Point>>{{2}});
    CHECK_FALSE(root_labels(p1, w1, {1, 2}).feasible);
    CHECK(root_labels(p1, w1, {}).all_of_u);
}

TEST_CASE("refine and extend_labeling preserve feasibility") {
    ServicePattern a = flat_pattern(6, {{0, 4, 7}, {0, 7}});
    ServicePattern b = flat_pattern(6, {{0, 3, 7}, {0, 7}});
    ServicePattern r = refine({a, b});
    CHECK(r.levels[0] == std::vector<int>{0, 3, 4, 7});
    CHECK(r.levels[1] == std::vector<int>{0, 7});

    Labeling alpha;
    alpha.labels[{1, 0}] = {1};
    alpha.labels[{1, 1}] = {2};
    alpha.labels[{2, 0}] = {3};
    RequestSequence reqs{1, 3, 1, 2, 3, 2};
    REQUIRE(check_labeling(a, alpha, reqs));
    Labeling beta = extend_labeling(a, alpha, r);
    CHECK(check_labeling(r, beta, reqs));
    CHECK(beta.labels.at({1, 0}) == std::vector<Point>{1});
    CHECK(beta.labels.at({1, 1}) == std::vector<Point>{1});
    CHECK(beta.labels.at({1, 2}) == std::vector<Point>{2});

    CHECK_THROWS_AS(refine({a, flat_pattern(5, {{0, 6}, {0, 6}})}), dimension_error);
    CHECK_THROWS_AS(refine({}), dimension_error);
}

TEST_CASE("tuple-count bounds") {
    BoundValue n = bound_joint_tuples(2, 1, 0, 2);
    CHECK(n.factor == 1);
    CHECK(n.exp == 16);
    CHECK(n.bounds_count(65536));
    CHECK_FALSE(n.bounds_count(Int(65537)));

    BoundValue f = bound_interval_tuples(2, 1, 1, 2);
    CHECK(f.factor == 1);  // t = h: one tuple shape
    CHECK(f.bounds_count(1));

    BoundValue d = bound_dichotomy(2);
    CHECK(d.exp == 32);
    CHECK_THROWS_AS(bound_dichotomy(1), dimension_error);

    BoundValue cj = bound_class_joint_tuples(2, 1, 0, {1, 1});
    CHECK(cj.exp == 64);  // l * 4k^2 (t-h) * prod(k_i + 1) = 2*16*1*2

    BoundValue ci = bound_class_interval_tuples(2, 2, 0, {1, 2});
    CHECK(ci.factor == binomial(4, 2));

    CHECK_THROWS_AS(bound_joint_tuples(1, 1, 0, 2), dimension_error);
    CHECK_THROWS_AS(bound_joint_tuples(2, 3, 0, 2), dimension_error);

    BoundValue bv{3, 4};
    CHECK(bv.bounds_count(48));
    CHECK_FALSE(bv.bounds_count(49));
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(5, 6) == 0);
}

TEST_CASE("pattern documents round-trip") {
    ServicePattern p = flat_pattern(10, {{0, 3, 5, 8, 11}, {0, 5, 11}});
    Labeling alpha;
    alpha.labels[{1, 0}] = {4};
    alpha.labels[{2, 1}] = {1, 2};
    std::string doc = emit_pattern(p, alpha);
    auto [q, beta] = parse_pattern(doc);
    CHECK(q == p);
    CHECK(beta == alpha);
    CHECK(emit_pattern(q, beta) == doc);

    CHECK_THROWS_AS(parse_pattern(""), schema_error);
    CHECK_THROWS_AS(parse_pattern("10 2 weird\n0 11\n0 11\n"), schema_error);
    CHECK_THROWS_AS(parse_pattern("10 2 flat\n0 11\n"), schema_error);
    CHECK_THROWS_AS(parse_pattern("10 1 flat\n0 11\n1 5 3\n"), schema_error);
    CHECK_THROWS_AS(parse_pattern("10 1 flat\n0 11\n1 0 x\n"), schema_error);
}
