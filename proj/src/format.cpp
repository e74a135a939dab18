#include "rpn/format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace rpn::io {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string fmt_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) return "0";
    return std::string(buf, ptr);
}

// Cursor over one logical line.
struct LineScan {
    const std::string& text;
    std::size_t pos = 0;
    const std::string& file;
    int line;

    LineScan(const std::string& t, const std::string& f, int l)
        : text(t), file(f), line(l) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what, file, line);
    }
    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }
    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool accept(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c, const std::string& where) {
        if (!accept(c))
            fail(std::string("expected '") + c + "' " + where);
    }
    std::string ident(const std::string& what) {
        skip_ws();
        if (pos >= text.size() || !ident_start(text[pos]))
            fail("expected " + what);
        std::size_t b = pos;
        while (pos < text.size() && ident_char(text[pos])) ++pos;
        return text.substr(b, pos - b);
    }
    double number(const std::string& what) {
        skip_ws();
        std::size_t b = pos;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.' ||
                text[pos] == 'e' || text[pos] == 'E' ||
                ((text[pos] == '+' || text[pos] == '-') && pos > b &&
                 (text[pos - 1] == 'e' || text[pos - 1] == 'E'))))
            ++pos;
        double v = 0;
        auto [ptr, ec] = std::from_chars(text.data() + b, text.data() + pos, v);
        if (ec != std::errc{} || ptr != text.data() + pos || pos == b)
            fail("expected " + what);
        return v;
    }
    std::string rest() {
        skip_ws();
        return text.substr(pos);
    }
};

cond::ValueKind parse_kind(LineScan& sc) {
    std::string k = sc.ident("a value kind (unit, bool, real, vec(n))");
    if (k == "unit") return cond::unit_kind();
    if (k == "bool") return cond::bool_kind();
    if (k == "real") return cond::real_kind();
    if (k == "vec") {
        sc.expect('(', "after 'vec'");
        double d = sc.number("a vector dimension");
        sc.expect(')', "after vector dimension");
        if (d < 1 || d != static_cast<int>(d)) sc.fail("vector dimension must be a positive integer");
        return cond::vec_kind(static_cast<int>(d));
    }
    sc.fail("unknown value kind '" + k + "'");
}

Bond parse_bond(LineScan& sc) {
    sc.expect('(', "to open a bond");
    std::string a = sc.ident("a base id");
    sc.expect(',', "between bond endpoints");
    std::string b = sc.ident("a base id");
    sc.expect(')', "to close the bond");
    try {
        return Bond(a, b);
    } catch (const ModelError& e) {
        sc.fail(e.what());
    }
}

ArcLabel parse_label(LineScan& sc) {
    ArcLabel label;
    sc.expect('{', "to open an arc label");
    if (!sc.accept('}')) {
        while (true) {
            bool neg = sc.accept('!');
            if (sc.peek() == '(') {
                label.insert(bond_elem(parse_bond(sc), neg));
            } else {
                label.insert(base_elem(sc.ident("a base id or bond"), neg));
            }
            if (sc.accept('}')) break;
            sc.expect(',', "between arc-label elements");
        }
    }
    if (!sc.at_end()) sc.fail("trailing text after arc label");
    return label;
}

cond::Value default_value(const cond::ValueKind& k) {
    switch (k.tag) {
        case cond::ValueKind::Tag::Unit: return cond::Unit{};
        case cond::ValueKind::Tag::Bool: return false;
        case cond::ValueKind::Tag::Real: return 0.0;
        case cond::ValueKind::Tag::Vec:
            return std::vector<double>(static_cast<std::size_t>(k.dim), 0.0);
    }
    return cond::Unit{};
}

std::string kind_name(const cond::ValueKind& k) {
    switch (k.tag) {
        case cond::ValueKind::Tag::Unit: return "unit";
        case cond::ValueKind::Tag::Bool: return "bool";
        case cond::ValueKind::Tag::Real: return "real";
        case cond::ValueKind::Tag::Vec: return "vec(" + std::to_string(k.dim) + ")";
    }
    return "unit";
}

std::string value_text(const cond::Value& v) {
    if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
    if (std::holds_alternative<double>(v)) return fmt_real(std::get<double>(v));
    if (std::holds_alternative<std::vector<double>>(v)) {
        const auto& xs = std::get<std::vector<double>>(v);
        std::string out = "[";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) out += ", ";
            out += fmt_real(xs[i]);
        }
        return out + "]";
    }
    return "";
}

std::string element_text(const ArcElement& e) {
    std::string out = e.negated ? "!" : "";
    if (e.sort == ArcElement::Sort::Base) return out + e.base;
    return out + "(" + e.bond.first + ", " + e.bond.second + ")";
}

}  // namespace

Net parse_net(const std::string& text, const std::string& filename) {
    Net net;
    net.initial_marking.places.clear();
    std::map<BaseId, int> token_line;

    enum class Section { None, Types, Tokens, Places, Bonds, Marking, Transitions };
    Section section = Section::None;
    bool seen[7] = {};
    Transition* current = nullptr;
    std::vector<Bond> bond_universe;
    auto note_bond = [&](const Bond& b) {
        if (std::find(bond_universe.begin(), bond_universe.end(), b) == bond_universe.end())
            bond_universe.push_back(b);
    };

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::string line = trim(raw);
        if (line.empty()) continue;

        auto open_section = [&](Section s, const char* name) {
            if (seen[static_cast<int>(s)])
                throw ParseError(std::string("duplicate section ") + name, filename, lineno);
            seen[static_cast<int>(s)] = true;
            section = s;
            current = nullptr;
        };
        if (line == "TYPES") { open_section(Section::Types, "TYPES"); continue; }
        if (line == "TOKENS") { open_section(Section::Tokens, "TOKENS"); continue; }
        if (line == "PLACES") { open_section(Section::Places, "PLACES"); continue; }
        if (line == "BONDS") { open_section(Section::Bonds, "BONDS"); continue; }
        if (line == "MARKING") { open_section(Section::Marking, "MARKING"); continue; }
        if (line == "TRANSITIONS") { open_section(Section::Transitions, "TRANSITIONS"); continue; }

        LineScan sc(line, filename, lineno);
        switch (section) {
            case Section::None:
                sc.fail("expected a section header (TYPES, TOKENS, PLACES, BONDS, MARKING, TRANSITIONS)");
            case Section::Types: {
                std::string id = sc.ident("a type id");
                if (net.has_type(id)) sc.fail("duplicate type '" + id + "'");
                cond::ValueKind k = parse_kind(sc);
                if (!sc.at_end()) sc.fail("trailing text after type declaration");
                net.types.push_back({id, k});
                break;
            }
            case Section::Tokens: {
                std::string id = sc.ident("a base id");
                for (const Base& b : net.bases)
                    if (b.id == id) sc.fail("duplicate token '" + id + "'");
                sc.expect(':', "after the base id");
                std::string type = sc.ident("a type id");
                net.bases.push_back({id, type});
                token_line[id] = lineno;
                if (sc.accept('=')) {
                    cond::Value v;
                    char c = sc.peek();
                    if (c == '[') {
                        sc.expect('[', "");
                        std::vector<double> xs;
                        if (!sc.accept(']')) {
                            while (true) {
                                xs.push_back(sc.number("a number"));
                                if (sc.accept(']')) break;
                                sc.expect(',', "between vector entries");
                            }
                        }
                        v = std::move(xs);
                    } else if (ident_start(c)) {
                        std::string w = sc.ident("a value");
                        if (w == "true") v = true;
                        else if (w == "false") v = false;
                        else sc.fail("expected a value, got '" + w + "'");
                    } else {
                        v = sc.number("a value");
                    }
                    net.values[id] = std::move(v);
                }
                if (!sc.at_end()) sc.fail("trailing text after token declaration");
                break;
            }
            case Section::Places: {
                std::string id = sc.ident("a place id");
                if (!sc.at_end()) sc.fail("trailing text after place id");
                if (net.has_place(id)) sc.fail("duplicate place '" + id + "'");
                net.places.push_back(id);
                net.initial_marking.places.try_emplace(id);
                break;
            }
            case Section::Bonds: {
                Bond b = parse_bond(sc);
                sc.expect('@', "between the bond and its place");
                std::string place = sc.ident("a place id");
                if (!sc.at_end()) sc.fail("trailing text after bond entry");
                net.initial_marking.places.try_emplace(place);
                net.initial_marking.places[place].bonds.insert(b);
                note_bond(b);
                break;
            }
            case Section::Marking: {
                std::string base = sc.ident("a base id");
                sc.expect('@', "between the base and its place");
                std::string place = sc.ident("a place id");
                if (!sc.at_end()) sc.fail("trailing text after marking entry");
                net.initial_marking.places.try_emplace(place);
                net.initial_marking.places[place].bases.insert(base);
                break;
            }
            case Section::Transitions: {
                std::string head = sc.ident("'transition', 'in', 'out', or 'guard'");
                if (head == "transition") {
                    std::string id = sc.ident("a transition id");
                    if (!sc.at_end()) sc.fail("trailing text after transition id");
                    if (net.find_transition(id)) sc.fail("duplicate transition '" + id + "'");
                    net.transitions.push_back({id, {}, {}, cond::lit(true)});
                    current = &net.transitions.back();
                } else if (head == "in" || head == "out") {
                    if (!current) sc.fail("'" + head + "' outside of a transition block");
                    std::string place = sc.ident("a place id");
                    sc.expect(':', "after the place id");
                    ArcLabel label = parse_label(sc);
                    auto& arcs = head == "in" ? current->in : current->out;
                    ArcLabel& slot = arcs[place];
                    slot.insert(label.begin(), label.end());
                    for (const ArcElement& e : label)
                        if (e.sort == ArcElement::Sort::Bond) note_bond(e.bond);
                } else if (head == "guard") {
                    if (!current) sc.fail("'guard' outside of a transition block");
                    std::string src = sc.rest();
                    if (src.empty()) sc.fail("empty guard expression");
                    try {
                        current->guard = cond::parse(src);
                    } catch (const cond::SyntaxError& e) {
                        sc.fail(std::string("guard: ") + e.what());
                    }
                } else {
                    sc.fail("expected 'transition', 'in', 'out', or 'guard', got '" + head + "'");
                }
                break;
            }
        }
    }

    if (net.places.empty())
        throw ParseError("net declares no places (PLACES section missing or empty)",
                         filename, lineno);

    // Ensure every base without an explicit value still evaluates, and that
    // explicit values match the declared kind.
    for (const Base& b : net.bases) {
        if (!net.has_type(b.type)) continue;  // reported by validation later
        const cond::ValueKind& kind = net.type(b.type).kind;
        auto it = net.values.find(b.id);
        if (it == net.values.end()) {
            net.values[b.id] = default_value(kind);
        } else if (cond::kind_of(it->second) != kind) {
            throw ParseError("token '" + b.id + "' carries a " +
                                 cond::to_string(cond::kind_of(it->second)) +
                                 " value but its type '" + b.type + "' is " +
                                 cond::to_string(kind),
                             filename, token_line.count(b.id) ? token_line[b.id] : 0);
        }
    }
    net.bonds = std::move(bond_universe);
    return net;
}

Net load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file", path, 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    Net net = parse_net(buf.str(), path);
    auto violations = validate(net);
    if (!violations.empty()) throw ValidationFailed("net fails validation", violations);
    return net;
}

std::string save(const Net& net) {
    std::ostringstream out;
    out << "TYPES\n";
    for (const TokenType& t : net.types)
        out << "  " << t.id << " " << kind_name(t.kind) << "\n";
    out << "\nTOKENS\n";
    for (const Base& b : net.bases) {
        out << "  " << b.id << " : " << b.type;
        auto it = net.values.find(b.id);
        if (it != net.values.end() && !std::holds_alternative<cond::Unit>(it->second))
            out << " = " << value_text(it->second);
        out << "\n";
    }
    out << "\nPLACES\n";
    for (const PlaceId& p : net.places) out << "  " << p << "\n";
    out << "\nBONDS\n";
    for (const PlaceId& p : net.places) {
        auto it = net.initial_marking.places.find(p);
        if (it == net.initial_marking.places.end()) continue;
        for (const Bond& b : it->second.bonds)
            out << "  (" << b.first << ", " << b.second << ") @ " << p << "\n";
    }
    out << "\nMARKING\n";
    for (const PlaceId& p : net.places) {
        auto it = net.initial_marking.places.find(p);
        if (it == net.initial_marking.places.end()) continue;
        std::vector<BaseId> ordered(it->second.bases.begin(), it->second.bases.end());
        std::stable_sort(ordered.begin(), ordered.end(),
                         [&](const BaseId& a, const BaseId& b) {
                             return net.base_index(a) < net.base_index(b);
                         });
        for (const BaseId& b : ordered) out << "  " << b << " @ " << p << "\n";
    }
    out << "\nTRANSITIONS\n";
    for (const Transition& t : net.transitions) {
        out << "  transition " << t.id << "\n";
        auto emit_arcs = [&](const std::map<PlaceId, ArcLabel>& arcs, const char* word) {
            for (const PlaceId& p : net.places) {
                auto it = arcs.find(p);
                if (it == arcs.end()) continue;
                out << "    " << word << " " << p << ": {";
                bool first = true;
                for (const ArcElement& e : it->second) {
                    if (!first) out << ", ";
                    first = false;
                    out << element_text(e);
                }
                out << "}\n";
            }
        };
        emit_arcs(t.in, "in");
        emit_arcs(t.out, "out");
        out << "    guard " << cond::print(t.guard) << "\n";
    }
    return out.str();
}

std::string format_marking(const Net& net, const Marking& m) {
    std::ostringstream out;
    bool first_line = true;
    for (const PlaceId& p : net.places) {
        if (!first_line) out << "\n";
        first_line = false;
        out << p << ":";
        auto it = m.places.find(p);
        if (it == m.places.end() || it->second.empty()) continue;
        const ElementSet& es = it->second;
        std::vector<BaseId> ordered(es.bases.begin(), es.bases.end());
        std::stable_sort(ordered.begin(), ordered.end(),
                         [&](const BaseId& a, const BaseId& b) {
                             return net.base_index(a) < net.base_index(b);
                         });
        out << " ";
        bool first = true;
        for (const BaseId& b : ordered) {
            if (!first) out << ",";
            first = false;
            out << b;
        }
        if (!es.bonds.empty()) {
            out << ";";
            first = true;
            for (const Bond& b : es.bonds) {
                if (!first) out << ",";
                first = false;
                out << "(" << b.first << "," << b.second << ")";
            }
        }
    }
    return out.str();
}

void write_trace_csv(std::ostream& out, const std::vector<Step>& steps) {
    out << "step_index,transition_id,direction,occurrence_key\n";
    for (const Step& s : steps)
        out << s.index << "," << s.transition << "," << to_string(s.direction) << ","
            << s.key << "\n";
}

}  // namespace rpn::io
