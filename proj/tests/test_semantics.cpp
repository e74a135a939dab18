#include "rpn/semantics.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace rpn;
using rpnt::NB;

namespace {

ElementSet es(std::initializer_list<std::string> bases,
              std::initializer_list<std::pair<std::string, std::string>> bonds = {}) {
    ElementSet s;
    for (const auto& b : bases) s.bases.insert(b);
    for (const auto& [a, b] : bonds) s.bonds.insert(Bond(a, b));
    return s;
}

// The swap net of the worked two-antenna example, built by hand.
Net swap_net() {
    NB nb;
    nb.bases({"p", "m", "ai", "aj"})
        .places({"Ai", "Aj", "Mk"})
        .put("p", "Ai")
        .put("aj", "Aj")
        .put("m", "Mk")
        .put("ai", "Mk")
        .bond("ai", "m", "Mk")
        .trans("t",
               {{"Ai", {"p"}}, {"Aj", {"aj"}}, {"Mk", {"(ai,m)"}}},
               {{"Ai", {"ai"}}, {"Aj", {"p"}}, {"Mk", {"(aj,m)"}}},
               "in(ai, Mk)");
    return nb.net;
}

}  // namespace

TEST_CASE("con walks bond-connected components") {
    ElementSet c = es({"ai", "m"}, {{"ai", "m"}});
    CHECK(con("ai", c) == c);
    CHECK(con("m", c) == c);

    ElementSet no_bond = es({"ai", "m"});
    CHECK(con("ai", no_bond) == es({"ai"}));
    CHECK(con("other", no_bond) == ElementSet{});

    // A bond's endpoints are nodes even when not listed as bases.
    ElementSet only_bond = es({}, {{"a", "b"}});
    CHECK(con("a", only_bond) == es({"a", "b"}, {{"a", "b"}}));

    ElementSet chain = es({"a", "b", "c", "d"}, {{"a", "b"}, {"b", "c"}});
    CHECK(con("a", chain) == es({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}));
    CHECK(con("d", chain) == es({"d"}));
}

TEST_CASE("the worked swap example fires and reverses exactly") {
    Net net = swap_net();
    REQUIRE(validate(net).empty());
    const Transition& t = net.transition("t");
    State s0 = initial_state(net);

    REQUIRE(forward_enabled(net, s0, t));
    State s1 = fire(net, s0, t);

    CHECK(s1.marking.at("Ai") == es({"ai"}));
    CHECK(s1.marking.at("Aj") == es({"p"}));
    CHECK(s1.marking.at("Mk") == es({"m", "aj"}, {{"aj", "m"}}));
    CHECK(s1.history.of("t") == std::set<std::uint64_t>{1});

    CHECK(!forward_enabled(net, s1, t));  // guard now false
    REQUIRE(reverse_enabled(net, s1, t));
    State s2 = reverse(net, s1, t);
    CHECK(s2 == s0);
}

TEST_CASE("negative in-arc elements require absence") {
    NB nb;
    nb.bases({"a", "b"})
        .places({"P", "Q"})
        .put("a", "P")
        .put("b", "Q")
        .trans("t", {{"P", {"a", "!b"}}}, {{"Q", {"a"}}});
    Net& net = nb.net;
    State s0 = initial_state(net);
    CHECK(forward_enabled(net, s0, net.transition("t")));

    // With b alongside a in P, the negative element blocks the step.
    NB blocked;
    blocked.bases({"a", "b"})
        .places({"P", "Q"})
        .put("a", "P")
        .put("b", "P")
        .trans("t", {{"P", {"a", "!b"}}}, {{"Q", {"a"}}});
    State b0 = initial_state(blocked.net);
    CHECK(!forward_enabled(blocked.net, b0, blocked.net.transition("t")));
    CHECK_THROWS_AS((void)fire(blocked.net, b0, blocked.net.transition("t")), NotEnabled);
}

TEST_CASE("an asserted bond that already exists must be consumed") {
    // (a,b) sits in P; t claims to assert it in Q without consuming it.
    NB nb;
    nb.bases({"a", "b"})
        .places({"P", "Q"})
        .put("a", "P")
        .put("b", "P")
        .bond("a", "b", "P")
        .trans("t", {{"P", {"a", "b"}}}, {{"Q", {"(a,b)"}}});
    State s0 = initial_state(nb.net);
    CHECK(!forward_enabled(nb.net, s0, nb.net.transition("t")));

    // Naming the bond on the in-arc makes the same move legal.
    NB ok;
    ok.bases({"a", "b"})
        .places({"P", "Q"})
        .put("a", "P")
        .put("b", "P")
        .bond("a", "b", "P")
        .trans("t", {{"P", {"(a,b)"}}}, {{"Q", {"(a,b)"}}});
    State k0 = initial_state(ok.net);
    REQUIRE(forward_enabled(ok.net, k0, ok.net.transition("t")));
    State k1 = fire(ok.net, k0, ok.net.transition("t"));
    CHECK(k1.marking.at("P") == ElementSet{});
    CHECK(k1.marking.at("Q") == es({"a", "b"}, {{"a", "b"}}));
}

TEST_CASE("firing can create a bond that did not exist") {
    NB nb;
    nb.bases({"a", "b"})
        .places({"P", "Q"})
        .put("a", "P")
        .put("b", "P")
        .trans("t", {{"P", {"a", "b"}}}, {{"Q", {"(a,b)"}}});
    Net& net = nb.net;
    State s0 = initial_state(net);
    State s1 = fire(net, s0, net.transition("t"));
    CHECK(s1.marking.at("P") == ElementSet{});
    CHECK(s1.marking.at("Q") == es({"a", "b"}, {{"a", "b"}}));

    // And reversing destroys it again (guard true, so forced).
    State s2 = force_reverse(net, s1, net.transition("t"));
    CHECK(s2 == s0);
}

TEST_CASE("firing can break a bond by splitting its endpoints") {
    NB nb;
    nb.bases({"a", "b"})
        .places({"P", "Q", "R"})
        .put("a", "P")
        .put("b", "P")
        .bond("a", "b", "P")
        .trans("t", {{"P", {"(a,b)"}}}, {{"Q", {"a"}}, {"R", {"b"}}});
    Net& net = nb.net;
    State s0 = initial_state(net);
    State s1 = fire(net, s0, net.transition("t"));
    CHECK(s1.marking.at("P") == ElementSet{});
    CHECK(s1.marking.at("Q") == es({"a"}));
    CHECK(s1.marking.at("R") == es({"b"}));

    State s2 = force_reverse(net, s1, net.transition("t"));
    CHECK(s2 == s0);
}

TEST_CASE("splitting bonded tokens without consuming the bond trips the invariant check") {
    // The movement rule would duplicate the pair: both out-arcs drag the whole
    // bonded component along. Net generators must consume crossing bonds; the
    // engine's debug invariant check reports the violation at fire time.
    NB nb;
    nb.bases({"a", "b"})
        .places({"P", "Q", "R"})
        .put("a", "P")
        .put("b", "P")
        .bond("a", "b", "P")
        .trans("t", {{"P", {"a", "b"}}}, {{"Q", {"a"}}, {"R", {"b"}}});
    State s0 = initial_state(nb.net);
    CHECK_THROWS_AS((void)fire(nb.net, s0, nb.net.transition("t")), InvariantViolation);
}

TEST_CASE("occurrence keys keep growing past reversed ones") {
    NB nb;
    nb.bases({"x1", "x2", "x3"}).places({"P1", "Q1", "P2", "Q2", "P3", "Q3"});
    nb.put("x1", "P1").put("x2", "P2").put("x3", "P3");
    nb.trans("t1", {{"P1", {"x1"}}}, {{"Q1", {"x1"}}}, "in(x1, P1)")
        .trans("t2", {{"P2", {"x2"}}}, {{"Q2", {"x2"}}}, "in(x2, P2)")
        .trans("t3", {{"P3", {"x3"}}}, {{"Q3", {"x3"}}}, "in(x3, P3)");
    Net& net = nb.net;
    REQUIRE(validate(net).empty());

    State s = initial_state(net);
    s = fire(net, s, net.transition("t1"));   // key 1
    s = fire(net, s, net.transition("t2"));   // key 2
    s = reverse(net, s, net.transition("t1"));  // retires key 1
    s = fire(net, s, net.transition("t3"));   // next key is 3, not 1

    CHECK(s.history.of("t1").empty());
    CHECK(s.history.of("t2") == std::set<std::uint64_t>{2});
    CHECK(s.history.of("t3") == std::set<std::uint64_t>{3});
}

TEST_CASE("a later occurrence on the same component blocks reversal") {
    NB nb;
    nb.bases({"a", "b"}).places({"P", "Q", "R"});
    nb.put("a", "P").put("b", "R");
    nb.trans("t1", {{"P", {"a"}}}, {{"Q", {"a"}}}, "in(a, P)")
        .trans("t2", {{"Q", {"a"}}, {"R", {"b"}}}, {{"Q", {"(a,b)"}}},
               "not bonded(a, b, Q)");
    Net& net = nb.net;
    REQUIRE(validate(net).empty());
    const Transition& t1 = net.transition("t1");
    const Transition& t2 = net.transition("t2");

    State s0 = initial_state(net);
    auto steps0 = enabled_steps(net, s0);
    REQUIRE(steps0.size() == 1);
    CHECK(steps0[0].first->id == "t1");
    CHECK(steps0[0].second == Direction::Forward);

    State s1 = fire(net, s0, t1);
    auto steps1 = enabled_steps(net, s1);
    REQUIRE(steps1.size() == 2);  // t1 reversible, t2 fireable
    CHECK(steps1[0].first->id == "t1");
    CHECK(steps1[0].second == Direction::Reverse);
    CHECK(steps1[1].first->id == "t2");
    CHECK(steps1[1].second == Direction::Forward);

    State s2 = fire(net, s1, t2);
    CHECK(s2.marking.at("Q") == es({"a", "b"}, {{"a", "b"}}));

    // t1's token is still in place, but t2's newer occurrence touches its
    // component, so only t2 may be undone.
    CHECK(!reverse_enabled(net, s2, t1));
    CHECK_THROWS_AS((void)reverse(net, s2, t1), NotReversible);
    auto steps2 = enabled_steps(net, s2);
    REQUIRE(steps2.size() == 1);
    CHECK(steps2[0].first->id == "t2");
    CHECK(steps2[0].second == Direction::Reverse);

    State s3 = reverse(net, s2, t2);
    CHECK(s3 == s1);
    State s4 = reverse(net, s3, t1);
    CHECK(s4 == s0);
}

TEST_CASE("force_reverse ignores only the guard") {
    NB nb;
    nb.bases({"x"}).places({"P", "Q"}).put("x", "P");
    nb.trans("t", {{"P", {"x"}}}, {{"Q", {"x"}}}, "true");
    Net& net = nb.net;
    State s0 = initial_state(net);
    State s1 = fire(net, s0, net.transition("t"));

    // Guard stays true, so plain reversal is not allowed...
    CHECK(!reverse_enabled(net, s1, net.transition("t")));
    CHECK_THROWS_AS((void)reverse(net, s1, net.transition("t")), NotReversible);
    // ...but the forced variant undoes the step.
    State s2 = force_reverse(net, s1, net.transition("t"));
    CHECK(s2 == s0);

    // Without any occurrence there is nothing to force.
    CHECK_THROWS_AS((void)force_reverse(net, s0, net.transition("t")), NotReversible);
}

TEST_CASE("fixed schedules execute in order and stop when blocked") {
    Net net = swap_net();
    State s0 = initial_state(net);

    FixedPolicy both{{{"t", Direction::Forward}, {"t", Direction::Reverse}}};
    RunResult r = run(net, s0, both, 100);
    CHECK(!r.stuck);
    CHECK(r.steps.size() == 2);
    CHECK(r.steps[0].transition == "t");
    CHECK(r.steps[0].direction == Direction::Forward);
    CHECK(r.steps[0].key == 1);
    CHECK(r.steps[0].index == 0);
    CHECK(r.steps[1].direction == Direction::Reverse);
    CHECK(r.steps[1].key == 1);
    CHECK(r.final_state == s0);

    FixedPolicy blocked{{{"t", Direction::Reverse}}};
    RunResult rb = run(net, s0, blocked, 100);
    CHECK(rb.stuck);
    CHECK(rb.steps.empty());
    CHECK(rb.final_state == s0);

    // The step budget also caps fixed schedules.
    RunResult rc = run(net, s0, both, 1);
    CHECK(rc.steps.size() == 1);
}

TEST_CASE("random scheduling is reproducible per seed") {
    Net net = swap_net();
    State s0 = initial_state(net);
    RunResult a = run(net, s0, RandomPolicy{42}, 25);
    RunResult b = run(net, s0, RandomPolicy{42}, 25);
    CHECK(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].transition == b.steps[i].transition);
        CHECK(a.steps[i].direction == b.steps[i].direction);
        CHECK(a.steps[i].key == b.steps[i].key);
    }
    CHECK(a.final_state == b.final_state);
    // The swap net livelocks (fire/reverse), so the budget is always spent.
    CHECK(a.steps.size() == 25);
    CHECK(!a.stuck);
}

TEST_CASE("forward-first scheduling prefers any forward step") {
    NB nb;
    nb.bases({"a", "b"}).places({"P", "Q", "R"});
    nb.put("a", "P").put("b", "R");
    nb.trans("t1", {{"P", {"a"}}}, {{"Q", {"a"}}}, "in(a, P)")
        .trans("t2", {{"Q", {"a"}}, {"R", {"b"}}}, {{"Q", {"(a,b)"}}},
               "not bonded(a, b, Q)");
    Net& net = nb.net;
    State s1 = fire(net, initial_state(net), net.transition("t1"));

    // Both (t1, reverse) and (t2, forward) are enabled here; forward wins.
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        RunResult r = run(net, s1, ForwardFirstPolicy{seed}, 1);
        REQUIRE(r.steps.size() == 1);
        CHECK(r.steps[0].transition == "t2");
        CHECK(r.steps[0].direction == Direction::Forward);
    }
}
