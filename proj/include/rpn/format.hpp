#pragma once
// Text format for nets (.rpn files), marking dumps, and trace CSV output.

#include "rpn/model.hpp"
#include "rpn/semantics.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace rpn::io {

struct ParseError : Error {
    ParseError(const std::string& what, std::string file, int line)
        : Error(file + ":" + std::to_string(line) + ": " + what),
          file(std::move(file)),
          line(line) {}
    std::string file;
    int line;
};

// Parse and validate a net document. Throws ParseError / UnknownIdentifier /
// ValidationFailed. Guards may only use built-in predicates (no host
// functions are registered on loaded nets).
Net load(const std::string& path);
Net parse_net(const std::string& text, const std::string& filename = "<string>");

// Canonical document for a net; parse_net(save(net)) is structurally equal
// to net up to guard formatting.
std::string save(const Net& net);

// One line per place, declaration order: "place: base,...;bond,..." with
// bases in declaration order and bonds lexicographic. Empty places print as
// "place:".
std::string format_marking(const Net& net, const Marking& m);

// Header plus one row per step: step_index,transition_id,direction,occurrence_key
void write_trace_csv(std::ostream& out, const std::vector<Step>& steps);

}  // namespace rpn::io
