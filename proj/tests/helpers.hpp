#pragma once
// Terse construction of small nets for tests: element specs are strings like
// "a", "!a", "(a,b)", "!(a,b)".

#include "rpn/cond.hpp"
#include "rpn/model.hpp"

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace rpnt {

using namespace rpn;

inline ArcElement el(const std::string& spec) {
    std::string s = spec;
    bool neg = !s.empty() && s[0] == '!';
    if (neg) s.erase(0, 1);
    if (!s.empty() && s[0] == '(') {
        auto comma = s.find(',');
        return bond_elem(Bond(s.substr(1, comma - 1), s.substr(comma + 1, s.size() - comma - 2)),
                         neg);
    }
    return base_elem(s, neg);
}

inline ArcLabel label(const std::vector<std::string>& specs) {
    ArcLabel l;
    for (const auto& s : specs) l.insert(el(s));
    return l;
}

using ArcSpec = std::vector<std::pair<std::string, std::vector<std::string>>>;

struct NB {
    Net net;

    NB() { net.types = {{"u", cond::unit_kind()}}; }

    NB& base(const std::string& id) {
        net.bases.push_back({id, "u"});
        net.values[id] = cond::Unit{};
        return *this;
    }
    NB& bases(std::initializer_list<std::string> ids) {
        for (const auto& id : ids) base(id);
        return *this;
    }
    NB& place(const std::string& id) {
        net.places.push_back(id);
        net.initial_marking.places.try_emplace(id);
        return *this;
    }
    NB& places(std::initializer_list<std::string> ids) {
        for (const auto& id : ids) place(id);
        return *this;
    }
    NB& put(const std::string& b, const std::string& p) {
        net.initial_marking.places[p].bases.insert(b);
        return *this;
    }
    NB& bond(const std::string& a, const std::string& b, const std::string& p) {
        net.initial_marking.places[p].bonds.insert(Bond(a, b));
        net.bonds.push_back(Bond(a, b));
        return *this;
    }
    NB& trans(const std::string& id, const ArcSpec& in, const ArcSpec& out,
              const std::string& guard = "true") {
        Transition t;
        t.id = id;
        for (const auto& [p, specs] : in) {
            ArcLabel l = label(specs);
            t.in[p].insert(l.begin(), l.end());
        }
        for (const auto& [p, specs] : out) {
            ArcLabel l = label(specs);
            t.out[p].insert(l.begin(), l.end());
        }
        t.guard = cond::parse(guard);
        net.transitions.push_back(std::move(t));
        return *this;
    }
};

}  // namespace rpnt
