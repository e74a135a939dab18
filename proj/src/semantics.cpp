#include "rpn/semantics.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <random>

namespace rpn {

std::string to_string(Direction d) {
    return d == Direction::Forward ? "forward" : "reverse";
}

ElementSet con(const BaseId& a, const ElementSet& c) {
    ElementSet out;
    bool node = c.bases.count(a) != 0;
    if (!node)
        for (const Bond& b : c.bonds)
            if (b.touches(a)) { node = true; break; }
    if (!node) return out;

    out.bases.insert(a);
    std::deque<BaseId> frontier{a};
    while (!frontier.empty()) {
        BaseId cur = std::move(frontier.front());
        frontier.pop_front();
        for (const Bond& b : c.bonds) {
            if (!b.touches(cur)) continue;
            out.bonds.insert(b);
            const BaseId& next = b.first == cur ? b.second : b.first;
            if (out.bases.insert(next).second) frontier.push_back(next);
        }
    }
    return out;
}

namespace {

ElementSet arcs_positive_union(const std::map<PlaceId, ArcLabel>& arcs) {
    ElementSet out;
    for (const auto& [p, label] : arcs) out.merge(positive_elements(label));
    return out;
}

// Does any positive element of the transition's out-arcs belong to `set`?
// (No allocation: this sits on the hot path of reversal checks.)
bool out_arcs_intersect(const Transition& t, const ElementSet& set) {
    for (const auto& [p, label] : t.out) {
        for (const ArcElement& e : label) {
            if (e.negated) continue;
            if (e.sort == ArcElement::Sort::Base) {
                if (set.bases.count(e.base)) return true;
            } else if (set.bonds.count(e.bond)) {
                return true;
            }
        }
    }
    return false;
}

// Marking-side clauses of forward enabledness (everything but the guard).
bool forward_structure(const State& s, const Transition& t) {
    for (const auto& [x, label] : t.in) {
        const ElementSet& m = s.marking.at(x);
        for (const ArcElement& e : label) {
            bool present = e.sort == ArcElement::Sort::Base ? m.contains(e.base)
                                                            : m.contains(e.bond);
            if (e.negated ? present : !present) return false;
        }
    }
    // A bond this firing would assert that already exists in an input place
    // must be consumed from that place, not silently duplicated.
    for (const auto& [x, label] : t.out) {
        for (const ArcElement& e : label) {
            if (e.sort != ArcElement::Sort::Bond || e.negated) continue;
            for (const auto& [y, ylabel] : t.in) {
                if (!s.marking.at(y).contains(e.bond)) continue;
                if (!ylabel.count(bond_elem(e.bond))) return false;
            }
        }
    }
    return true;
}

// Transitions with recorded occurrences, paired with their newest key.
using LiveList = std::vector<std::pair<const Transition*, std::uint64_t>>;

LiveList live_occurrences(const Net& net, const State& s) {
    LiveList live;
    live.reserve(s.history.keys.size());
    for (const Transition& t : net.transitions) {
        auto it = s.history.keys.find(t.id);
        if (it != s.history.keys.end() && !it->second.empty())
            live.emplace_back(&t, *it->second.rbegin());
    }
    return live;
}

// Structural clause of reversibility: the transition has a recorded
// occurrence, every token it produced is still where it was put, and no
// occurrence newer than this transition's latest still touches the connected
// components of those tokens.
bool reversal_structure(const State& s, const Transition& t, const LiveList& live) {
    const auto& hist = s.history.of(t.id);
    if (hist.empty()) return false;
    std::uint64_t k = *hist.rbegin();
    for (const auto& [y, label] : t.out) {
        const ElementSet& m = s.marking.at(y);
        for (const BaseId& a : tokens_of(label)) {
            if (!m.contains(a)) return false;
            ElementSet component = con(a, m);
            for (const auto& [other, newest] : live) {
                if (newest <= k) continue;
                if (out_arcs_intersect(*other, component)) return false;
            }
        }
    }
    return true;
}

bool guard_value(const Net& net, const State& s, const Transition& t) {
    return cond::eval_bool(t.guard, cond::EvalContext{net, s.marking});
}

// Common movement rule for both directions. The consumed side loses the
// connected components of the tokens its arcs name; the produced side
// receives, for each of its arcs, the components those tokens form once the
// consumed elements are carved out of the source places and the produced
// label is asserted.
State apply_step(const Net& net, const State& s, const Transition& t,
                 Direction dir, std::uint64_t& key) {
    const auto& consumed = dir == Direction::Forward ? t.in : t.out;
    const auto& produced = dir == Direction::Forward ? t.out : t.in;
    const ElementSet removed_elements = arcs_positive_union(consumed);

    // Removals, per consumed-side place, against the pre-step marking.
    std::map<PlaceId, ElementSet> minus;
    for (const auto& [x, label] : consumed) {
        const ElementSet& m = s.marking.at(x);
        ElementSet& gone = minus[x];
        for (const BaseId& a : tokens_of(label)) gone.merge(con(a, m));
    }

    // Additions, per produced-side place, also against the pre-step marking.
    std::map<PlaceId, ElementSet> plus;
    for (const auto& [x, label] : produced) {
        ElementSet& incoming = plus[x];
        ElementSet asserted = positive_elements(label);
        for (const auto& [y, ylabel] : consumed) {
            (void)ylabel;
            ElementSet ctx = s.marking.at(y);
            ctx.subtract(removed_elements);
            ctx.merge(asserted);
            for (const BaseId& a : tokens_of(label)) incoming.merge(con(a, ctx));
        }
    }

    State out = s;
    for (const auto& [x, gone] : minus) out.marking.at(x).subtract(gone);
    for (const auto& [x, incoming] : plus) out.marking.at(x).merge(incoming);

    if (dir == Direction::Forward) {
        key = out.history.global_max() + 1;
        out.history.keys[t.id].insert(key);
    } else {
        auto it = out.history.keys.find(t.id);
        key = *it->second.rbegin();
        it->second.erase(key);
        if (it->second.empty()) out.history.keys.erase(it);
    }

#ifndef NDEBUG
    check_state(net, out);
#endif
    (void)net;
    return out;
}

}  // namespace

bool forward_enabled(const Net& net, const State& s, const Transition& t) {
    return forward_structure(s, t) && guard_value(net, s, t);
}

bool reverse_enabled(const Net& net, const State& s, const Transition& t) {
    return reversal_structure(s, t, live_occurrences(net, s)) &&
           !guard_value(net, s, t);
}

State fire(const Net& net, const State& s, const Transition& t) {
    if (!forward_enabled(net, s, t))
        throw NotEnabled("transition '" + t.id + "' is not enabled");
    std::uint64_t key = 0;
    return apply_step(net, s, t, Direction::Forward, key);
}

State reverse(const Net& net, const State& s, const Transition& t) {
    if (!reverse_enabled(net, s, t))
        throw NotReversible("transition '" + t.id + "' is not reversible here");
    std::uint64_t key = 0;
    return apply_step(net, s, t, Direction::Reverse, key);
}

State force_reverse(const Net& net, const State& s, const Transition& t) {
    if (!reversal_structure(s, t, live_occurrences(net, s)))
        throw NotReversible("transition '" + t.id +
                            "' has no undoable occurrence in this state");
    std::uint64_t key = 0;
    return apply_step(net, s, t, Direction::Reverse, key);
}

std::vector<std::pair<const Transition*, Direction>> enabled_steps(const Net& net,
                                                                   const State& s) {
    std::vector<std::pair<const Transition*, Direction>> out;
    const LiveList live = live_occurrences(net, s);
    for (const Transition& t : net.transitions) {
        bool fwd = forward_structure(s, t);
        bool rev = reversal_structure(s, t, live);
        if (!fwd && !rev) continue;
        // One guard evaluation decides the direction; it cannot enable both.
        bool g = guard_value(net, s, t);
        if (fwd && g)
            out.emplace_back(&t, Direction::Forward);
        else if (rev && !g)
            out.emplace_back(&t, Direction::Reverse);
    }
    return out;
}

namespace {

struct StepChoice {
    const Transition* transition = nullptr;
    Direction direction = Direction::Forward;
    bool stop = false;
};

}  // namespace

RunResult run(const Net& net, const State& s0, const SchedulerPolicy& policy,
              std::size_t max_steps) {
    RunResult result;
    State s = s0;

    std::mt19937_64 rng(std::holds_alternative<RandomPolicy>(policy)
                            ? std::get<RandomPolicy>(policy).seed
                        : std::holds_alternative<ForwardFirstPolicy>(policy)
                            ? std::get<ForwardFirstPolicy>(policy).seed
                            : 0);

    const FixedPolicy* fixed = std::get_if<FixedPolicy>(&policy);
    std::size_t fixed_pos = 0;

    for (std::size_t i = 0; i < max_steps; ++i) {
        StepChoice choice;
        if (fixed) {
            if (fixed_pos >= fixed->steps.size()) {
                break;  // sequence completed; not a dead end
            } else {
                const auto& [tid, dir] = fixed->steps[fixed_pos];
                const Transition& t = net.transition(tid);
                bool ok = dir == Direction::Forward ? forward_enabled(net, s, t)
                                                    : reverse_enabled(net, s, t);
                if (!ok) {
                    choice.stop = true;
                } else {
                    choice.transition = &t;
                    choice.direction = dir;
                    ++fixed_pos;
                }
            }
        } else {
            auto steps = enabled_steps(net, s);
            if (steps.empty()) {
                choice.stop = true;
            } else {
                std::size_t pick = 0;
                if (std::holds_alternative<ForwardFirstPolicy>(policy)) {
                    std::vector<std::size_t> forwards;
                    for (std::size_t j = 0; j < steps.size(); ++j)
                        if (steps[j].second == Direction::Forward) forwards.push_back(j);
                    if (!forwards.empty()) {
                        std::uniform_int_distribution<std::size_t> d(0, forwards.size() - 1);
                        pick = forwards[d(rng)];
                    } else {
                        std::uniform_int_distribution<std::size_t> d(0, steps.size() - 1);
                        pick = d(rng);
                    }
                } else {
                    std::uniform_int_distribution<std::size_t> d(0, steps.size() - 1);
                    pick = d(rng);
                }
                choice.transition = steps[pick].first;
                choice.direction = steps[pick].second;
            }
        }

        if (choice.stop) {
            result.stuck = true;
            break;
        }
        std::uint64_t key = 0;
        s = apply_step(net, s, *choice.transition, choice.direction, key);
        result.steps.push_back({result.steps.size(), choice.transition->id,
                                choice.direction, key});
    }

    result.final_state = std::move(s);
    return result;
}

}  // namespace rpn
