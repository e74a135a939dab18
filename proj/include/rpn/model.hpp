#pragma once
// Net structure and state: places, typed token bases, undirected bonds,
// labelled arcs, guarded transitions, markings and occurrence histories.

#include "rpn/cond.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace rpn {

using BaseId = std::string;
using PlaceId = std::string;
using TransitionId = std::string;
using TypeId = std::string;

struct ModelError : Error {
    using Error::Error;
};

struct UnknownIdentifier : Error {
    using Error::Error;
};

struct InvariantViolation : Error {
    using Error::Error;
};

// Undirected bond between two distinct bases; endpoints are stored sorted so
// (a,b) and (b,a) compare equal.
struct Bond {
    BaseId first, second;

    Bond() = default;
    Bond(BaseId a, BaseId b);  // normalizes; ModelError if a == b

    bool touches(const BaseId& b) const { return first == b || second == b; }
    auto operator<=>(const Bond&) const = default;
};

std::string to_string(const Bond& b);

struct TokenType {
    TypeId id;
    cond::ValueKind kind;
};

struct Base {
    BaseId id;
    TypeId type;
};

// One element of an arc label: a base or a bond, possibly negated
// (a negated element requires absence instead of presence).
struct ArcElement {
    enum class Sort { Base, Bond };
    Sort sort = Sort::Base;
    bool negated = false;
    BaseId base;  // Sort::Base
    Bond bond;    // Sort::Bond

    auto operator<=>(const ArcElement&) const = default;
};

inline ArcElement base_elem(BaseId b, bool negated = false) {
    return {ArcElement::Sort::Base, negated, std::move(b), {}};
}
inline ArcElement bond_elem(Bond b, bool negated = false) {
    return {ArcElement::Sort::Bond, negated, {}, std::move(b)};
}

using ArcLabel = std::set<ArcElement>;

// All bases a label mentions positively, either directly or as an endpoint
// of a positive bond element.
std::set<BaseId> tokens_of(const ArcLabel& label);

// Plain set of bases and bonds; the content of one place, and the currency
// of connected-component computations.
struct ElementSet {
    std::set<BaseId> bases;
    std::set<Bond> bonds;

    bool empty() const { return bases.empty() && bonds.empty(); }
    bool contains(const BaseId& b) const { return bases.count(b) != 0; }
    bool contains(const Bond& b) const { return bonds.count(b) != 0; }
    void merge(const ElementSet& other);
    void subtract(const ElementSet& other);

    bool operator==(const ElementSet&) const = default;
};

// Positive elements of a label as an ElementSet (negated entries dropped).
ElementSet positive_elements(const ArcLabel& label);

struct Marking {
    // One entry per declared place, always.
    std::map<PlaceId, ElementSet> places;

    const ElementSet& at(const PlaceId& p) const;
    ElementSet& at(const PlaceId& p);

    bool operator==(const Marking&) const = default;
};

struct History {
    // Sparse: holds only transitions with at least one recorded occurrence,
    // so states of large nets stay cheap to copy and compare.
    std::map<TransitionId, std::set<std::uint64_t>> keys;

    const std::set<std::uint64_t>& of(const TransitionId& t) const;  // empty if absent
    std::uint64_t global_max() const;  // 0 when no keys exist

    bool operator==(const History&) const = default;
};

struct State {
    Marking marking;
    History history;

    bool operator==(const State&) const = default;
};

struct Transition {
    TransitionId id;
    std::map<PlaceId, ArcLabel> in;   // arcs from place to transition
    std::map<PlaceId, ArcLabel> out;  // arcs from transition to place
    cond::Expr guard;                 // never null once constructed
};

struct Net {
    std::vector<TokenType> types;        // declaration order
    std::vector<Base> bases;             // declaration order
    std::vector<PlaceId> places;         // declaration order
    std::vector<Bond> bonds;             // declared bond universe (documentary)
    std::vector<Transition> transitions; // declaration order
    std::map<BaseId, cond::Value> values;
    Marking initial_marking;
    std::map<std::string, cond::HostFunction> host_functions;

    bool has_place(const PlaceId& p) const;
    bool has_type(const TypeId& t) const;
    const TokenType& type(const TypeId& t) const;        // UnknownIdentifier
    const Base& base(const BaseId& b) const;             // UnknownIdentifier
    const Transition& transition(const TransitionId& t) const;
    const Transition* find_transition(const TransitionId& t) const;
    const cond::Value& value_of(const BaseId& b) const;  // UnknownIdentifier
    std::size_t base_index(const BaseId& b) const;       // declaration position
};

struct Violation {
    enum class Code {
        TokenPreservation,  // a transition would create or erase bases
        OutArcOverlap,      // two out-arcs of one transition share a base or bond
        InitialPlacement,   // a base does not occur exactly once in the initial marking
        BondClosure,        // a marked bond lacks both endpoints in its place, or sits in two places
        GuardType,          // a guard does not typecheck to boolean
        NegativeOutArc,     // a negated element on an out-arc
        DeadBondAssertion   // an asserted bond provably blocks its transition forever
    };
    Code code;
    TransitionId transition;  // empty for marking-level violations
    std::string message;
};

std::string to_string(Violation::Code code);

// Structural well-formedness of a net; returns every violation found.
std::vector<Violation> validate(const Net& net);

struct ValidationFailed : Error {
    ValidationFailed(std::string what, std::vector<Violation> violations)
        : Error(std::move(what)), violations(std::move(violations)) {}
    std::vector<Violation> violations;
};

State initial_state(const Net& net);

// Dynamic state invariants: every base in exactly one place, bonds closed
// and unduplicated, history keys globally unique. Throws InvariantViolation.
void check_state(const Net& net, const State& s);

}  // namespace rpn
