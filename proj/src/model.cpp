#include "rpn/model.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace rpn {

Bond::Bond(BaseId a, BaseId b) {
    if (a == b) throw ModelError("bond endpoints must be distinct, got '" + a + "' twice");
    if (b < a) std::swap(a, b);
    first = std::move(a);
    second = std::move(b);
}

std::string to_string(const Bond& b) { return "(" + b.first + "," + b.second + ")"; }

std::set<BaseId> tokens_of(const ArcLabel& label) {
    std::set<BaseId> out;
    for (const ArcElement& e : label) {
        if (e.negated) continue;
        if (e.sort == ArcElement::Sort::Base) {
            out.insert(e.base);
        } else {
            out.insert(e.bond.first);
            out.insert(e.bond.second);
        }
    }
    return out;
}

ElementSet positive_elements(const ArcLabel& label) {
    ElementSet out;
    for (const ArcElement& e : label) {
        if (e.negated) continue;
        if (e.sort == ArcElement::Sort::Base)
            out.bases.insert(e.base);
        else
            out.bonds.insert(e.bond);
    }
    return out;
}

void ElementSet::merge(const ElementSet& other) {
    bases.insert(other.bases.begin(), other.bases.end());
    bonds.insert(other.bonds.begin(), other.bonds.end());
}

void ElementSet::subtract(const ElementSet& other) {
    for (const BaseId& b : other.bases) bases.erase(b);
    for (const Bond& b : other.bonds) bonds.erase(b);
}

const ElementSet& Marking::at(const PlaceId& p) const {
    auto it = places.find(p);
    if (it == places.end()) throw UnknownIdentifier("no place '" + p + "' in marking");
    return it->second;
}

ElementSet& Marking::at(const PlaceId& p) {
    auto it = places.find(p);
    if (it == places.end()) throw UnknownIdentifier("no place '" + p + "' in marking");
    return it->second;
}

const std::set<std::uint64_t>& History::of(const TransitionId& t) const {
    static const std::set<std::uint64_t> none;
    auto it = keys.find(t);
    return it == keys.end() ? none : it->second;
}

std::uint64_t History::global_max() const {
    std::uint64_t m = 0;
    for (const auto& [t, ks] : keys)
        if (!ks.empty()) m = std::max(m, *ks.rbegin());
    return m;
}

bool Net::has_place(const PlaceId& p) const {
    return std::find(places.begin(), places.end(), p) != places.end();
}

bool Net::has_type(const TypeId& t) const {
    for (const auto& ty : types)
        if (ty.id == t) return true;
    return false;
}

const TokenType& Net::type(const TypeId& t) const {
    for (const auto& ty : types)
        if (ty.id == t) return ty;
    throw UnknownIdentifier("unknown token type '" + t + "'");
}

const Base& Net::base(const BaseId& b) const {
    for (const auto& x : bases)
        if (x.id == b) return x;
    throw UnknownIdentifier("unknown base '" + b + "'");
}

const Transition& Net::transition(const TransitionId& t) const {
    if (const Transition* p = find_transition(t)) return *p;
    throw UnknownIdentifier("unknown transition '" + t + "'");
}

const Transition* Net::find_transition(const TransitionId& t) const {
    for (const auto& x : transitions)
        if (x.id == t) return &x;
    return nullptr;
}

const cond::Value& Net::value_of(const BaseId& b) const {
    auto it = values.find(b);
    if (it == values.end())
        throw UnknownIdentifier("no value assigned to base '" + b + "'");
    return it->second;
}

std::size_t Net::base_index(const BaseId& b) const {
    for (std::size_t i = 0; i < bases.size(); ++i)
        if (bases[i].id == b) return i;
    throw UnknownIdentifier("unknown base '" + b + "'");
}

std::string to_string(Violation::Code code) {
    switch (code) {
        case Violation::Code::TokenPreservation: return "token-preservation";
        case Violation::Code::OutArcOverlap: return "out-arc-overlap";
        case Violation::Code::InitialPlacement: return "initial-placement";
        case Violation::Code::BondClosure: return "bond-closure";
        case Violation::Code::GuardType: return "guard-type";
        case Violation::Code::NegativeOutArc: return "negative-out-arc";
        case Violation::Code::DeadBondAssertion: return "dead-bond-assertion";
    }
    return "?";
}

namespace {

// Dangling references make the structural checks meaningless, so they are
// hard errors rather than violations.
void check_references(const Net& net) {
    auto known_base = [&](const BaseId& b) {
        for (const auto& x : net.bases)
            if (x.id == b) return true;
        return false;
    };
    for (const auto& b : net.bases)
        if (!net.has_type(b.type))
            throw UnknownIdentifier("base '" + b.id + "' has unknown type '" + b.type + "'");
    auto check_label = [&](const TransitionId& t, const PlaceId& p, const ArcLabel& label) {
        if (!net.has_place(p))
            throw UnknownIdentifier("transition '" + t + "' references unknown place '" + p + "'");
        for (const ArcElement& e : label) {
            if (e.sort == ArcElement::Sort::Base) {
                if (!known_base(e.base))
                    throw UnknownIdentifier("transition '" + t + "' references unknown base '" + e.base + "'");
            } else {
                if (!known_base(e.bond.first) || !known_base(e.bond.second))
                    throw UnknownIdentifier("transition '" + t + "' references a bond over unknown bases " + to_string(e.bond));
            }
        }
    };
    for (const auto& t : net.transitions) {
        for (const auto& [p, label] : t.in) check_label(t.id, p, label);
        for (const auto& [p, label] : t.out) check_label(t.id, p, label);
    }
    for (const auto& [p, content] : net.initial_marking.places) {
        if (!net.has_place(p))
            throw UnknownIdentifier("initial marking references unknown place '" + p + "'");
        for (const BaseId& b : content.bases)
            if (!known_base(b))
                throw UnknownIdentifier("initial marking references unknown base '" + b + "'");
        for (const Bond& b : content.bonds)
            if (!known_base(b.first) || !known_base(b.second))
                throw UnknownIdentifier("initial marking references a bond over unknown bases " + to_string(b));
    }
}

std::set<BaseId> label_union_bases(const std::map<PlaceId, ArcLabel>& arcs) {
    std::set<BaseId> out;
    for (const auto& [p, label] : arcs) {
        auto t = tokens_of(label);
        out.insert(t.begin(), t.end());
    }
    return out;
}

}  // namespace

std::vector<Violation> validate(const Net& net) {
    check_references(net);
    std::vector<Violation> out;
    auto report = [&](Violation::Code code, const TransitionId& t, std::string msg) {
        out.push_back({code, t, std::move(msg)});
    };

    for (const auto& t : net.transitions) {
        // Bases are conserved: whatever the out-arcs mention (directly or as
        // bond endpoints) must come in, and vice versa.
        std::set<BaseId> pre = label_union_bases(t.in);
        std::set<BaseId> post = label_union_bases(t.out);
        if (pre != post) {
            std::string diff;
            for (const BaseId& b : post)
                if (!pre.count(b)) diff += " +" + b;
            for (const BaseId& b : pre)
                if (!post.count(b)) diff += " -" + b;
            report(Violation::Code::TokenPreservation, t.id,
                   "bases are not conserved:" + diff);
        }

        // No base or bond may be produced into two places at once.
        for (auto i = t.out.begin(); i != t.out.end(); ++i) {
            for (auto j = std::next(i); j != t.out.end(); ++j) {
                std::set<BaseId> a = tokens_of(i->second);
                std::set<BaseId> b = tokens_of(j->second);
                for (const BaseId& x : a)
                    if (b.count(x))
                        report(Violation::Code::OutArcOverlap, t.id,
                               "base '" + x + "' is produced into both '" +
                                   i->first + "' and '" + j->first + "'");
            }
        }

        for (const auto& [p, label] : t.out)
            for (const ArcElement& e : label)
                if (e.negated)
                    report(Violation::Code::NegativeOutArc, t.id,
                           "negated element on the out-arc to '" + p + "'");

        if (!t.guard) {
            report(Violation::Code::GuardType, t.id, "missing guard expression");
        } else {
            try {
                cond::ValueKind k = cond::typecheck(t.guard, net);
                if (k != cond::bool_kind())
                    report(Violation::Code::GuardType, t.id,
                           "guard has kind " + cond::to_string(k) + ", expected bool");
            } catch (const cond::TypeError& e) {
                report(Violation::Code::GuardType, t.id, e.what());
            }
        }
    }

    // Initial marking: every declared base exactly once.
    std::map<BaseId, int> occurrences;
    for (const auto& b : net.bases) occurrences[b.id] = 0;
    for (const auto& [p, content] : net.initial_marking.places)
        for (const BaseId& b : content.bases) occurrences[b] += 1;
    for (const auto& [b, n] : occurrences)
        if (n != 1)
            report(Violation::Code::InitialPlacement, {},
                   "base '" + b + "' occurs " + std::to_string(n) +
                       " times in the initial marking");

    // Initial bonds: endpoints together in the same place, bond in one place.
    std::map<Bond, int> bond_places;
    for (const auto& [p, content] : net.initial_marking.places) {
        for (const Bond& b : content.bonds) {
            bond_places[b] += 1;
            if (!content.contains(b.first) || !content.contains(b.second))
                report(Violation::Code::BondClosure, {},
                       "bond " + to_string(b) + " in '" + p +
                           "' lacks an endpoint there");
        }
    }
    for (const auto& [b, n] : bond_places)
        if (n > 1)
            report(Violation::Code::BondClosure, {},
                   "bond " + to_string(b) + " is marked in " + std::to_string(n) +
                       " places");

    // An asserted out-arc bond that is not consumed, already present in an
    // input place initially, and whose endpoints nothing else can ever move,
    // blocks its transition forever.
    for (const auto& t : net.transitions) {
        std::set<Bond> consumed;
        for (const auto& [p, label] : t.in)
            for (const ArcElement& e : label)
                if (e.sort == ArcElement::Sort::Bond && !e.negated)
                    consumed.insert(e.bond);
        for (const auto& [p, label] : t.out) {
            for (const ArcElement& e : label) {
                if (e.sort != ArcElement::Sort::Bond || e.negated) continue;
                if (consumed.count(e.bond)) continue;
                bool blocking_initially = false;
                for (const auto& [y, ylabel] : t.in) {
                    (void)ylabel;
                    auto it = net.initial_marking.places.find(y);
                    if (it != net.initial_marking.places.end() &&
                        it->second.contains(e.bond))
                        blocking_initially = true;
                }
                if (!blocking_initially) continue;
                bool someone_moves_endpoints = false;
                for (const auto& other : net.transitions) {
                    if (other.id == t.id) continue;
                    std::set<BaseId> moved = label_union_bases(other.in);
                    if (moved.count(e.bond.first) || moved.count(e.bond.second))
                        someone_moves_endpoints = true;
                }
                if (!someone_moves_endpoints)
                    report(Violation::Code::DeadBondAssertion, t.id,
                           "asserted bond " + to_string(e.bond) +
                               " already exists in an input place and can never be"
                               " consumed or broken, so the transition cannot fire");
            }
        }
    }

    return out;
}

State initial_state(const Net& net) {
    State s;
    s.marking = net.initial_marking;
    for (const PlaceId& p : net.places)
        s.marking.places.try_emplace(p);
    return s;
}

void check_state(const Net& net, const State& s) {
    auto fail = [](const std::string& msg) { throw InvariantViolation(msg); };

    if (s.marking.places.size() != net.places.size())
        fail("marking does not cover the declared places exactly");
    for (const PlaceId& p : net.places)
        if (!s.marking.places.count(p)) fail("marking lost place '" + p + "'");

    std::map<BaseId, int> seen;
    for (const auto& b : net.bases) seen[b.id] = 0;
    for (const auto& [p, content] : s.marking.places) {
        for (const BaseId& b : content.bases) {
            auto it = seen.find(b);
            if (it == seen.end()) fail("marking contains undeclared base '" + b + "'");
            it->second += 1;
        }
    }
    for (const auto& [b, n] : seen)
        if (n != 1)
            fail("base '" + b + "' occurs " + std::to_string(n) +
                 " times in the marking");

    std::set<Bond> bonds_seen;
    for (const auto& [p, content] : s.marking.places) {
        for (const Bond& b : content.bonds) {
            if (!content.contains(b.first) || !content.contains(b.second))
                fail("bond " + to_string(b) + " in '" + p + "' lacks an endpoint there");
            if (!bonds_seen.insert(b).second)
                fail("bond " + to_string(b) + " appears in two places");
        }
    }

    std::set<std::uint64_t> keys;
    for (const auto& [t, ks] : s.history.keys) {
        if (!net.find_transition(t)) fail("history references unknown transition '" + t + "'");
        if (ks.empty()) fail("history keeps an empty entry for '" + t + "'");
        for (std::uint64_t k : ks) {
            if (k == 0) fail("occurrence keys start at 1");
            if (!keys.insert(k).second)
                fail("occurrence key " + std::to_string(k) + " appears twice");
        }
    }
}

}  // namespace rpn
