#include <catch_amalgamated.hpp>

#include "wks/lbgen.hpp"

using namespace wks;

TEST_CASE("construction sizes follow the recurrence") {
    CHECK(n_seq(2) == 2);
    CHECK(n_seq(3) == 4);
    CHECK(n_seq(4) == 9);
    CHECK(n_seq(5) == 30);
    CHECK(n_seq(6) == 256);
    CHECK(n_seq(7) == 16641);
    CHECK(n_seq(8) == Int(8322) * 8321);
    CHECK_THROWS_AS(n_seq(1), dimension_error);
    CHECK(n_seq_int(7) == 16641);
    CHECK_THROWS_AS(n_seq_int(8), capacity_error);
    // doubly exponential growth: n_k >= 2^(2^(k-4)) for k >= 4
    for (int k = 4; k <= 8; ++k) {
        Int bound = Int(1) << (1u << (k - 4));
        CHECK(n_seq(k) >= bound);
    }
}

TEST_CASE("mask decomposition splits and partners correctly") {
    std::vector<Point> pts{1, 2, 3, 4, 5, 6, 7, 8, 9};
    MaskDecomposition d = decompose(pts, 4, 11);
    CHECK(d.mask.size() == 3);       // ceil(4/2)+1
    CHECK(d.q_sets.size() == 3);
    for (Point q : d.mask) {
        CHECK(d.q_sets.at(q).size() == 2);  // floor(4/2)
        CHECK(d.p_set(q).size() == 4);
        CHECK_FALSE(d.in_p_set(q, q));  // P_q avoids its owner
    }
    for (Point p : pts) {
        Point q = d.avoid(p);
        CHECK_FALSE(d.in_p_set(p, q));
        Point pb = d.partner(p);
        CHECK(pb != p);
        for (Point m : d.mask) CHECK((d.in_p_set(p, m) || d.in_p_set(pb, m)));
    }
    // deterministic under the seed
    MaskDecomposition e = decompose(pts, 4, 11);
    CHECK(e.mask == d.mask);
    CHECK(e.q_sets == d.q_sets);

    CHECK_THROWS_AS(decompose({1, 2, 3}, 4, 1), dimension_error);
    CHECK_THROWS_AS(d.p_set(99), dimension_error);
    CHECK_THROWS_AS(d.partner(99), dimension_error);
}

TEST_CASE("lower-bound trees request every point") {
    LowerBoundTree t1 = build_tree(1, {4, 2});
    CHECK(t1.requests == RequestSequence{2, 4});

    LowerBoundTree t2 = build_tree(2, {1, 2, 3, 4}, 7);
    CHECK(t2.children.size() == 2);
    CHECK(t2.requests.size() == 4);
    ServicePattern p = t2.pattern();
    CHECK(p.level_count() == 3);  // levels 1..2 plus the root interval
    CHECK(p.hierarchical());
    CHECK(p.intervals_at(3) == 1);
    CHECK(p.intervals_at(1) == 2);

    // the root's request list carries every point of P as a singleton
    WeightProfile w = WeightProfile::flat({Rat(1), Rat(2), Rat(4)});
    Universe u{4};
    RootLabels rl = root_labels(p, w, t2.requests);
    CHECK(rl.feasible);
    CHECK(rl.flat_labels() == std::vector<Point>{1, 2, 3, 4});
    RootLabels oracle = brute_force_root_labels(u, p, w, t2.requests);
    CHECK(rl.tuples == oracle.tuples);

    CHECK_THROWS_AS(build_tree(1, {1, 2, 3}), dimension_error);
    CHECK_THROWS_AS(build_tree(2, {1, 2, 3}), dimension_error);

    // level 3 over n_4 = 9 points, same singleton property
    LowerBoundTree t3 = build_tree(3, {1, 2, 3, 4, 5, 6, 7, 8, 9}, 5);
    ServicePattern p3 = t3.pattern();
    WeightProfile w4 = WeightProfile::flat({Rat(1), Rat(2), Rat(4), Rat(8)});
    RootLabels rl3 = root_labels(p3, w4, t3.requests);
    CHECK(rl3.flat_labels() == std::vector<Point>{1, 2, 3, 4, 5, 6, 7, 8, 9});
}

TEST_CASE("greedy transcripts are frozen") {
    // greedy never moves a heavy server: one truncated degenerate phase
    Universe u2{5};
    WeightProfile w2 = separated_weights(2, 2);
    Greedy g2(u2, w2, Configuration{{5, 5}});
    RunReport r2 = adversary_run(g2, u2, w2, 2, 1000, 12, 7);
    CHECK(emit_transcript(r2) ==
          "1 3 1 - 1 0 -\n"
          "2 2 1 - 2 0 -\n"
          "3 3 1 - 3 0 -\n"
          "4 2 1 - 4 0 -\n"
          "5 3 1 - 5 0 -\n"
          "6 2 1 - 6 0 -\n"
          "7 3 1 - 7 0 -\n"
          "8 2 1 - 8 0 -\n"
          "9 3 1 - 9 0 -\n"
          "10 2 1 - 10 0 -\n"
          "11 3 1 - 11 0 -\n"
          "12 2 1 - 12 0 -\n");
    CHECK(r2.completed_phases == 0);
    CHECK(r2.truncated);
    CHECK(r2.degenerate_unbounded);
    CHECK(r2.labeling_ok);

    Universe u3{9};
    WeightProfile w3 = separated_weights(3, 4);
    Greedy g3(u3, w3, Configuration{{9, 9, 9}});
    RunReport r3 = adversary_run(g3, u3, w3, 3, 1000, 12, 7);
    CHECK(emit_transcript(r3) ==
          "1 6 1 - 1 0 -\n"
          "2 3 1 - 2 0 -\n"
          "3 6 1 - 3 0 -\n"
          "4 3 1 - 4 0 -\n"
          "5 6 1 - 5 0 -\n"
          "6 3 1 - 6 0 -\n"
          "7 6 1 - 7 0 -\n"
          "8 3 1 - 8 0 -\n"
          "9 6 1 - 9 0 -\n"
          "10 3 1 - 10 0 -\n"
          "11 6 1 - 11 0 -\n"
          "12 3 1 - 12 0 -\n");
    CHECK(r3.degenerate_unbounded);
}

TEST_CASE("adversary ledger against the work-function algorithm") {
    Universe u{5};
    WeightProfile w = separated_weights(2, 2);
    Wfa alg(u, w, Configuration{{5, 5}}, Rat(1, 2));
    RunReport r = adversary_run(alg, u, w, 2, 1000, 500, 42);
    CHECK(r.steps.size() == 500);
    CHECK(r.completed_phases == 78);
    CHECK(r.truncated);  // phase target not reached inside the budget
    CHECK_FALSE(r.degenerate_unbounded);
    CHECK(r.labeling_ok);
    CHECK(r.property_i_ok);
    CHECK(r.property_ii_ok);
    CHECK(r.eq2_ok);
    CHECK(r.eq3_ok);
    CHECK(r.prefix_end == 495);
    CHECK(r.alg_cost_prefix == 677);
    CHECK(r.adv_cost_prefix == 338);
    REQUIRE(r.ratio_prefix.has_value());
    CHECK(*r.ratio_prefix == Rat(677, 338));
    CHECK(*r.ratio_prefix >= Rat(r.n_k, 2));  // at least n_k / 2 competitive
    REQUIRE(r.phase_heavy_moves.size() == 78);
    for (int m : r.phase_heavy_moves) CHECK(m >= r.n_k);

    // pattern and transcript are mutually consistent
    CHECK(r.pattern.horizon == 500);
    CHECK(check_labeling(r.pattern, r.labeling, r.sigma));
    CHECK(r.alg_cost_total() == r.steps.back().alg_cost);
    CHECK(r.adv_cost_total() == r.steps.back().adv_cost);
}

TEST_CASE("adversary run validates weights and phase targets") {
    Universe u{5};
    WeightProfile wrong = WeightProfile::flat({Rat(1), Rat(3)});
    Greedy g(u, wrong, Configuration{{5, 5}});
    CHECK_THROWS_AS(adversary_run(g, u, wrong, 2, 1, 10, 0), dimension_error);
    CHECK_THROWS_AS(AdversaryState(u, 1, 0), dimension_error);
    CHECK_THROWS_AS(AdversaryState(Universe{4}, 2, 0), dimension_error);
}

TEST_CASE("adversary rejects a non-serving algorithm") {
    Universe u{5};
    AdversaryState st(u, 2, 3);
    Configuration c{{5, 5}};
    CHECK_FALSE(st.observe(c));
    Point r = st.request(c);
    CHECK(r != 5);
    // the algorithm "responds" without serving r
    CHECK_THROWS_AS(st.observe(c), protocol_error);
}

TEST_CASE("requests never land on the algorithm's heavier servers") {
    Universe u{5};
    WeightProfile w = separated_weights(2, 2);
    Wfa alg(u, w, Configuration{{5, 5}}, Rat(1, 2));
    AdversaryState st(u, 2, 9);
    for (int t = 0; t < 300; ++t) {
        st.observe(alg.config());
        Point r = st.request(alg.config());
        CHECK(alg.config().pos(2) != r);
        alg.serve(r);
    }
    st.finish();
    CHECK(st.completed_phases() > 0);

    Universe u3{9};
    WeightProfile w3 = separated_weights(3, 4);
    Memoryless m(u3, w3, Configuration{{9, 9, 9}},
                 {Rat(1, 2), Rat(1, 4), Rat(1, 4)}, 4);
    AdversaryState st3(u3, 3, 9);
    for (int t = 0; t < 300; ++t) {
        st3.observe(m.config());
        Point r = st3.request(m.config());
        CHECK(m.config().pos(2) != r);
        CHECK(m.config().pos(3) != r);
        m.serve(r);
    }
}

TEST_CASE("general metrics validate and satisfy the swap ledger") {
    auto line = [](int n) {
        std::vector<std::vector<Rat>> m(n, std::vector<Rat>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m[i][j] = Rat(std::abs(i - j));
        return m;
    };
    CHECK_THROWS_AS(general_metric_run(line(2), "wfa", 2, 10, 0), dimension_error);
    auto bad = line(3);
    bad[0][1] = Rat(5);  // asymmetric
    CHECK_THROWS_AS(general_metric_run(bad, "wfa", 2, 10, 0), dimension_error);
    bad = line(3);
    bad[1][1] = Rat(1);  // nonzero diagonal
    CHECK_THROWS_AS(general_metric_run(bad, "wfa", 2, 10, 0), dimension_error);
    bad = line(3);
    bad[0][2] = bad[2][0] = Rat(0);  // zero off-diagonal
    CHECK_THROWS_AS(general_metric_run(bad, "wfa", 2, 10, 0), dimension_error);

    GeneralMetricReport rep = general_metric_run(line(3), "wfa:lambda=1/2", 2, 200, 1);
    CHECK(rep.k == 2);
    CHECK(rep.n_k == 2);
    CHECK(rep.sigma.size() == 200);
    CHECK(rep.eq6_ok);
    CHECK(rep.sum_le_twice_ok);
    CHECK(rep.labelings_ok);
    CHECK(rep.phases > 0);
    CHECK_FALSE(rep.degenerate_unbounded);
    CHECK(rep.adv_cost.size() == 2);

    GeneralMetricReport greedy = general_metric_run(line(3), "greedy", 2, 50, 1);
    CHECK(greedy.degenerate_unbounded);
    CHECK(greedy.sum_adv_heavy == 0);
}
