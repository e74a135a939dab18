#pragma once
// Execution semantics: forward firing, controlled reversal, enabledness,
// and seeded schedulers.

#include "rpn/model.hpp"

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

namespace rpn {

struct NotEnabled : Error {
    using Error::Error;
};

struct NotReversible : Error {
    using Error::Error;
};

enum class Direction { Forward, Reverse };

std::string to_string(Direction d);

// Connected component of `a` inside `c`: every base reachable from `a`
// through the bonds of `c`, plus the traversed bonds. A bond contributes its
// endpoints as graph nodes even when they are not listed in c.bases.
// Returns the empty set when `a` is not a node of `c`.
ElementSet con(const BaseId& a, const ElementSet& c);

bool forward_enabled(const Net& net, const State& s, const Transition& t);

// A transition can be reversed when it has a recorded occurrence, none of the
// tokens it produced were consumed or re-bonded by a later occurrence that is
// still in effect, and its guard now evaluates to false.
bool reverse_enabled(const Net& net, const State& s, const Transition& t);

State fire(const Net& net, const State& s, const Transition& t);     // NotEnabled
State reverse(const Net& net, const State& s, const Transition& t);  // NotReversible

// Reversal that skips the guard clause (structural clauses still apply);
// the testing hook for undo-equals-identity properties.
State force_reverse(const Net& net, const State& s, const Transition& t);

// Every (transition, direction) pair executable at s, in net declaration
// order. A transition contributes at most one entry (the guard cannot be
// true and false at once).
std::vector<std::pair<const Transition*, Direction>> enabled_steps(const Net& net,
                                                                   const State& s);

struct Step {
    std::size_t index = 0;
    TransitionId transition;
    Direction direction = Direction::Forward;
    std::uint64_t key = 0;  // occurrence key created (forward) or retired (reverse)
};

struct RandomPolicy {
    std::uint64_t seed = 0;
};

// Uniform among forward steps while any exists, else uniform among reversals.
struct ForwardFirstPolicy {
    std::uint64_t seed = 0;
};

// Predetermined step list; the run stops early if a listed step is not
// enabled when its turn comes.
struct FixedPolicy {
    std::vector<std::pair<TransitionId, Direction>> steps;
};

using SchedulerPolicy = std::variant<RandomPolicy, ForwardFirstPolicy, FixedPolicy>;

struct RunResult {
    State final_state;
    std::vector<Step> steps;
    bool stuck = false;  // stopped because nothing was enabled (or a fixed-list step was blocked)
};

RunResult run(const Net& net, const State& s0, const SchedulerPolicy& policy,
              std::size_t max_steps);

}  // namespace rpn
