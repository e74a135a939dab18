#include "rpn/cond.hpp"

#include "rpn/model.hpp"

#include <cassert>
#include <charconv>
#include <cmath>
#include <sstream>
#include <utility>

namespace rpn::cond {

namespace {

// ---------------------------------------------------------------- lexer ----

enum class Tok {
    Ident, Number, LParen, RParen, Comma,
    Lt, Le, Eq, Ne, Ge, Gt, Plus, Minus, Star, Slash, End
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double num = 0.0;
    int line = 1, col = 1;
};

bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (text[i + k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        i += n;
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < text.size() && ident_char(text[j])) ++j;
            t.kind = Tok::Ident;
            t.text = text.substr(i, j - i);
            advance(j - i);
        } else if (digit(c)) {
            std::size_t j = i;
            while (j < text.size() && digit(text[j])) ++j;
            if (j < text.size() && text[j] == '.') {
                ++j;
                if (j >= text.size() || !digit(text[j]))
                    throw SyntaxError("malformed number", line, col);
                while (j < text.size() && digit(text[j])) ++j;
            }
            if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
                if (k >= text.size() || !digit(text[k]))
                    throw SyntaxError("malformed exponent", line, col);
                while (k < text.size() && digit(text[k])) ++k;
                j = k;
            }
            t.kind = Tok::Number;
            t.text = text.substr(i, j - i);
            auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.num);
            if (res.ec != std::errc{})
                throw SyntaxError("malformed number '" + t.text + "'", line, col);
            advance(j - i);
        } else {
            auto two = [&](char a, char b) {
                return c == a && i + 1 < text.size() && text[i + 1] == b;
            };
            if (two('<', '=')) { t.kind = Tok::Le; advance(2); }
            else if (two('>', '=')) { t.kind = Tok::Ge; advance(2); }
            else if (two('!', '=')) { t.kind = Tok::Ne; advance(2); }
            else if (c == '<') { t.kind = Tok::Lt; advance(1); }
            else if (c == '>') { t.kind = Tok::Gt; advance(1); }
            else if (c == '=') { t.kind = Tok::Eq; advance(1); }
            else if (c == '(') { t.kind = Tok::LParen; advance(1); }
            else if (c == ')') { t.kind = Tok::RParen; advance(1); }
            else if (c == ',') { t.kind = Tok::Comma; advance(1); }
            else if (c == '+') { t.kind = Tok::Plus; advance(1); }
            else if (c == '-') { t.kind = Tok::Minus; advance(1); }
            else if (c == '*') { t.kind = Tok::Star; advance(1); }
            else if (c == '/') { t.kind = Tok::Slash; advance(1); }
            else
                throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

bool keyword(const Token& t, const char* kw) {
    return t.kind == Tok::Ident && t.text == kw;
}

// --------------------------------------------------------------- parser ----

std::shared_ptr<Node> make(Node::Tag tag, const Token& at) {
    auto n = std::make_shared<Node>();
    n->tag = tag;
    n->line = at.line;
    n->col = at.col;
    return n;
}

struct Parser {
    std::vector<Token> toks;
    std::size_t pos = 0;

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos + ahead;
        return i < toks.size() ? toks[i] : toks.back();
    }
    Token take() { return toks[pos < toks.size() - 1 ? pos++ : pos]; }

    [[noreturn]] static void fail(const Token& t, const std::string& msg) {
        throw SyntaxError(msg, t.line, t.col);
    }

    void expect(Tok kind, const char* what) {
        if (peek().kind != kind) fail(peek(), std::string("expected ") + what);
        take();
    }

    std::string expect_ident(const char* what) {
        if (peek().kind != Tok::Ident) fail(peek(), std::string("expected ") + what);
        return take().text;
    }

    Expr parse_or() {
        Expr l = parse_and();
        while (keyword(peek(), "or")) {
            Token op = take();
            auto n = make(Node::Tag::Logic, op);
            n->bop = BoolOp::Or;
            n->kids = {l, parse_and()};
            l = n;
        }
        return l;
    }

    Expr parse_and() {
        Expr l = parse_not();
        while (keyword(peek(), "and")) {
            Token op = take();
            auto n = make(Node::Tag::Logic, op);
            n->bop = BoolOp::And;
            n->kids = {l, parse_not()};
            l = n;
        }
        return l;
    }

    Expr parse_not() {
        if (keyword(peek(), "not")) {
            Token op = take();
            auto n = make(Node::Tag::Not, op);
            n->kids = {parse_cmp()};
            return n;
        }
        return parse_cmp();
    }

    Expr parse_cmp() {
        Expr l = parse_sum();
        CmpOp op;
        switch (peek().kind) {
            case Tok::Lt: op = CmpOp::Lt; break;
            case Tok::Le: op = CmpOp::Le; break;
            case Tok::Eq: op = CmpOp::Eq; break;
            case Tok::Ne: op = CmpOp::Ne; break;
            case Tok::Ge: op = CmpOp::Ge; break;
            case Tok::Gt: op = CmpOp::Gt; break;
            default: return l;
        }
        Token at = take();
        auto n = make(Node::Tag::Cmp, at);
        n->cmp = op;
        n->kids = {l, parse_sum()};
        return n;
    }

    Expr parse_sum() {
        Expr l = parse_prod();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            Token op = take();
            auto n = make(Node::Tag::Arith, op);
            n->arith = op.kind == Tok::Plus ? ArithOp::Add : ArithOp::Sub;
            n->kids = {l, parse_prod()};
            l = n;
        }
        return l;
    }

    Expr parse_prod() {
        Expr l = parse_atom();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            Token op = take();
            auto n = make(Node::Tag::Arith, op);
            n->arith = op.kind == Tok::Star ? ArithOp::Mul : ArithOp::Div;
            n->kids = {l, parse_atom()};
            l = n;
        }
        return l;
    }

    Expr parse_atom() {
        const Token& t = peek();
        if (t.kind == Tok::Number) {
            Token num = take();
            auto n = make(Node::Tag::RealLit, num);
            n->rval = num.num;
            return n;
        }
        if (t.kind == Tok::LParen) {
            take();
            Expr inner = parse_or();
            expect(Tok::RParen, "')'");
            return inner;
        }
        if (t.kind == Tok::Ident) {
            if (t.text == "true" || t.text == "false") {
                Token b = take();
                auto n = make(Node::Tag::BoolLit, b);
                n->bval = b.text == "true";
                return n;
            }
            if (t.text == "and" || t.text == "or" || t.text == "not")
                fail(t, "unexpected keyword '" + t.text + "'");
            Token name = take();
            if (peek().kind != Tok::LParen)
                fail(name, "bare identifier '" + name.text +
                               "' is only allowed as a function argument");
            take();  // (
            return parse_call(name);
        }
        fail(t, "expected an expression");
    }

    // Called after consuming `name (`.
    Expr parse_call(const Token& name) {
        if (name.text == "val") {
            auto n = make(Node::Tag::Val, name);
            n->id = expect_ident("a base id in val(...)");
            expect(Tok::RParen, "')'");
            return n;
        }
        if (name.text == "in") {
            auto n = make(Node::Tag::In, name);
            n->id = expect_ident("a base id in in(...)");
            expect(Tok::Comma, "','");
            n->id2 = expect_ident("a place id in in(...)");
            expect(Tok::RParen, "')'");
            return n;
        }
        if (name.text == "bonded") {
            auto n = make(Node::Tag::Bonded, name);
            n->id = expect_ident("a base id in bonded(...)");
            expect(Tok::Comma, "','");
            n->id2 = expect_ident("a base id in bonded(...)");
            expect(Tok::Comma, "','");
            n->id3 = expect_ident("a place id in bonded(...)");
            expect(Tok::RParen, "')'");
            return n;
        }
        if (name.text == "tokens_in") {
            auto n = make(Node::Tag::TokensIn, name);
            n->id = expect_ident("a place id in tokens_in(...)");
            expect(Tok::Comma, "','");
            n->id2 = expect_ident("a type id in tokens_in(...)");
            expect(Tok::RParen, "')'");
            return n;
        }
        auto n = make(Node::Tag::Call, name);
        n->id = name.text;
        if (peek().kind != Tok::RParen) {
            n->kids.push_back(parse_arg());
            while (peek().kind == Tok::Comma) {
                take();
                n->kids.push_back(parse_arg());
            }
        }
        expect(Tok::RParen, "')'");
        return n;
    }

    Expr parse_arg() {
        // A bare identifier (not followed by '(') is an id-reference argument.
        const Token& t = peek();
        if (t.kind == Tok::Ident && t.text != "true" && t.text != "false" &&
            t.text != "not" && peek(1).kind != Tok::LParen) {
            Token id = take();
            auto n = make(Node::Tag::Ident, id);
            n->id = id.text;
            return n;
        }
        return parse_or();
    }
};

// -------------------------------------------------------------- printing ----

std::string fmt_real(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    assert(res.ec == std::errc{});
    return std::string(buf, res.ptr);
}

const char* cmp_text(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "!=";
        case CmpOp::Ge: return ">=";
        case CmpOp::Gt: return ">";
    }
    return "?";
}

const char* arith_text(ArithOp op) {
    switch (op) {
        case ArithOp::Add: return "+";
        case ArithOp::Sub: return "-";
        case ArithOp::Mul: return "*";
        case ArithOp::Div: return "/";
    }
    return "?";
}

// Grammar levels; higher binds tighter.
constexpr int lvl_or = 1, lvl_and = 2, lvl_not = 3, lvl_cmp = 4, lvl_sum = 5,
              lvl_prod = 6, lvl_atom = 7;

int level(const Node& n) {
    switch (n.tag) {
        case Node::Tag::Logic: return n.bop == BoolOp::Or ? lvl_or : lvl_and;
        case Node::Tag::Not: return lvl_not;
        case Node::Tag::Cmp: return lvl_cmp;
        case Node::Tag::Arith:
            return (n.arith == ArithOp::Add || n.arith == ArithOp::Sub) ? lvl_sum
                                                                        : lvl_prod;
        case Node::Tag::RealLit: return n.rval < 0 ? lvl_sum : lvl_atom;
        default: return lvl_atom;
    }
}

void print_rec(std::ostream& os, const Expr& e, int min_level) {
    bool wrap = level(*e) < min_level;
    if (wrap) os << '(';
    switch (e->tag) {
        case Node::Tag::BoolLit:
            os << (e->bval ? "true" : "false");
            break;
        case Node::Tag::RealLit:
            // The grammar has no sign, so negative literals round-trip as a
            // subtraction from zero.
            if (e->rval < 0)
                os << "0 - " << fmt_real(-e->rval);
            else
                os << fmt_real(e->rval);
            break;
        case Node::Tag::Val:
            os << "val(" << e->id << ')';
            break;
        case Node::Tag::In:
            os << "in(" << e->id << ", " << e->id2 << ')';
            break;
        case Node::Tag::Bonded:
            os << "bonded(" << e->id << ", " << e->id2 << ", " << e->id3 << ')';
            break;
        case Node::Tag::TokensIn:
            os << "tokens_in(" << e->id << ", " << e->id2 << ')';
            break;
        case Node::Tag::Not:
            os << "not ";
            print_rec(os, e->kids[0], lvl_cmp);
            break;
        case Node::Tag::Logic: {
            int me = level(*e);
            print_rec(os, e->kids[0], me);
            os << (e->bop == BoolOp::Or ? " or " : " and ");
            print_rec(os, e->kids[1], me + 1);
            break;
        }
        case Node::Tag::Cmp:
            print_rec(os, e->kids[0], lvl_sum);
            os << ' ' << cmp_text(e->cmp) << ' ';
            print_rec(os, e->kids[1], lvl_sum);
            break;
        case Node::Tag::Arith: {
            int me = level(*e);
            print_rec(os, e->kids[0], me);
            os << ' ' << arith_text(e->arith) << ' ';
            print_rec(os, e->kids[1], me + 1);
            break;
        }
        case Node::Tag::Call: {
            os << e->id << '(';
            for (std::size_t i = 0; i < e->kids.size(); ++i) {
                if (i) os << ", ";
                print_rec(os, e->kids[i], 0);
            }
            os << ')';
            break;
        }
        case Node::Tag::Ident:
            os << e->id;
            break;
    }
    if (wrap) os << ')';
}

}  // namespace

Expr parse(const std::string& text) {
    Parser p{lex(text)};
    Expr e = p.parse_or();
    if (p.peek().kind != Tok::End)
        Parser::fail(p.peek(), "trailing input after expression");
    return e;
}

std::string print(const Expr& e) {
    std::ostringstream os;
    print_rec(os, e, 0);
    return os.str();
}

bool equal(const Expr& a, const Expr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->tag != b->tag) return false;
    if (a->bval != b->bval || a->rval != b->rval) return false;
    if (a->id != b->id || a->id2 != b->id2 || a->id3 != b->id3) return false;
    if (a->cmp != b->cmp || a->arith != b->arith || a->bop != b->bop) return false;
    if (a->kids.size() != b->kids.size()) return false;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!equal(a->kids[i], b->kids[i])) return false;
    return true;
}

std::string to_sexpr(const Expr& e) {
    switch (e->tag) {
        case Node::Tag::BoolLit: return e->bval ? "true" : "false";
        case Node::Tag::RealLit: return fmt_real(e->rval);
        case Node::Tag::Val: return "(val " + e->id + ")";
        case Node::Tag::In: return "(in " + e->id + " " + e->id2 + ")";
        case Node::Tag::Bonded:
            return "(bonded " + e->id + " " + e->id2 + " " + e->id3 + ")";
        case Node::Tag::TokensIn:
            return "(tokens_in " + e->id + " " + e->id2 + ")";
        case Node::Tag::Not: return "(not " + to_sexpr(e->kids[0]) + ")";
        case Node::Tag::Logic:
            return std::string("(") + (e->bop == BoolOp::Or ? "or" : "and") + " " +
                   to_sexpr(e->kids[0]) + " " + to_sexpr(e->kids[1]) + ")";
        case Node::Tag::Cmp:
            return std::string("(") + cmp_text(e->cmp) + " " + to_sexpr(e->kids[0]) +
                   " " + to_sexpr(e->kids[1]) + ")";
        case Node::Tag::Arith:
            return std::string("(") + arith_text(e->arith) + " " +
                   to_sexpr(e->kids[0]) + " " + to_sexpr(e->kids[1]) + ")";
        case Node::Tag::Call: {
            std::string s = "(call " + e->id;
            for (const auto& k : e->kids) s += " " + to_sexpr(k);
            return s + ")";
        }
        case Node::Tag::Ident: return "(id " + e->id + ")";
    }
    return "?";
}

Expr lit(bool b) {
    auto n = std::make_shared<Node>();
    n->tag = Node::Tag::BoolLit;
    n->bval = b;
    return n;
}

Expr lit(double r) {
    auto n = std::make_shared<Node>();
    n->tag = Node::Tag::RealLit;
    n->rval = r;
    return n;
}

std::string to_string(const ValueKind& k) {
    switch (k.tag) {
        case ValueKind::Tag::Unit: return "unit";
        case ValueKind::Tag::Bool: return "bool";
        case ValueKind::Tag::Real: return "real";
        case ValueKind::Tag::Vec: return "vec(" + std::to_string(k.dim) + ")";
    }
    return "?";
}

ValueKind kind_of(const Value& v) {
    if (std::holds_alternative<Unit>(v)) return unit_kind();
    if (std::holds_alternative<bool>(v)) return bool_kind();
    if (std::holds_alternative<double>(v)) return real_kind();
    if (auto* vec = std::get_if<std::vector<double>>(&v))
        return vec_kind(static_cast<int>(vec->size()));
    throw TypeError("id references carry no value kind");
}

// ------------------------------------------------------------- typecheck ----

namespace {

[[noreturn]] void type_fail(const Node& n, const std::string& msg) {
    throw TypeError(std::to_string(n.line) + ":" + std::to_string(n.col) + ": " + msg);
}

ValueKind check(const Expr& e, const Net& net);

void check_bool_operand(const Expr& e, const Net& net, const char* what) {
    ValueKind k = check(e, net);
    if (k != bool_kind())
        type_fail(*e, std::string(what) + " needs a boolean operand, got " +
                          to_string(k));
}

void check_real_operand(const Expr& e, const Net& net, const char* what) {
    ValueKind k = check(e, net);
    if (k != real_kind())
        type_fail(*e, std::string(what) + " needs a real operand, got " + to_string(k));
}

void check_base_exists(const Node& n, const Net& net, const std::string& id) {
    for (const auto& b : net.bases)
        if (b.id == id) return;
    type_fail(n, "unknown base '" + id + "'");
}

void check_place_exists(const Node& n, const Net& net, const std::string& id) {
    if (!net.has_place(id)) type_fail(n, "unknown place '" + id + "'");
}

void check_type_exists(const Node& n, const Net& net, const std::string& id) {
    if (!net.has_type(id)) type_fail(n, "unknown token type '" + id + "'");
}

ValueKind check(const Expr& e, const Net& net) {
    switch (e->tag) {
        case Node::Tag::BoolLit: return bool_kind();
        case Node::Tag::RealLit: return real_kind();
        case Node::Tag::Val:
            check_base_exists(*e, net, e->id);
            return net.type(net.base(e->id).type).kind;
        case Node::Tag::In:
            check_base_exists(*e, net, e->id);
            check_place_exists(*e, net, e->id2);
            return bool_kind();
        case Node::Tag::Bonded:
            check_base_exists(*e, net, e->id);
            check_base_exists(*e, net, e->id2);
            check_place_exists(*e, net, e->id3);
            if (e->id == e->id2)
                type_fail(*e, "bonded(...) needs two distinct bases");
            return bool_kind();
        case Node::Tag::TokensIn:
            type_fail(*e, "tokens_in(...) is only usable as a function argument");
        case Node::Tag::Not:
            check_bool_operand(e->kids[0], net, "'not'");
            return bool_kind();
        case Node::Tag::Logic:
            check_bool_operand(e->kids[0], net,
                               e->bop == BoolOp::Or ? "'or'" : "'and'");
            check_bool_operand(e->kids[1], net,
                               e->bop == BoolOp::Or ? "'or'" : "'and'");
            return bool_kind();
        case Node::Tag::Cmp:
            check_real_operand(e->kids[0], net, "comparison");
            check_real_operand(e->kids[1], net, "comparison");
            return bool_kind();
        case Node::Tag::Arith:
            check_real_operand(e->kids[0], net, "arithmetic");
            check_real_operand(e->kids[1], net, "arithmetic");
            return real_kind();
        case Node::Tag::Ident:
            type_fail(*e, "bare identifier '" + e->id +
                              "' outside a function argument list");
        case Node::Tag::Call: {
            auto it = net.host_functions.find(e->id);
            if (it == net.host_functions.end())
                type_fail(*e, "unknown function '" + e->id + "'");
            const HostFunction& fn = it->second;
            if (fn.params.size() != e->kids.size())
                type_fail(*e, "'" + e->id + "' expects " +
                                  std::to_string(fn.params.size()) +
                                  " arguments, got " +
                                  std::to_string(e->kids.size()));
            for (std::size_t i = 0; i < fn.params.size(); ++i) {
                const ParamKind& p = fn.params[i];
                const Expr& arg = e->kids[i];
                switch (p.tag) {
                    case ParamKind::Tag::BaseRef:
                        if (arg->tag != Node::Tag::Ident)
                            type_fail(*arg, "argument must be a base id");
                        check_base_exists(*arg, net, arg->id);
                        break;
                    case ParamKind::Tag::PlaceRef:
                        if (arg->tag != Node::Tag::Ident)
                            type_fail(*arg, "argument must be a place id");
                        check_place_exists(*arg, net, arg->id);
                        break;
                    case ParamKind::Tag::TypeRef:
                        if (arg->tag != Node::Tag::Ident)
                            type_fail(*arg, "argument must be a type id");
                        check_type_exists(*arg, net, arg->id);
                        break;
                    case ParamKind::Tag::TokenList:
                        if (arg->tag != Node::Tag::TokensIn)
                            type_fail(*arg, "argument must be tokens_in(...)");
                        check_place_exists(*arg, net, arg->id);
                        check_type_exists(*arg, net, arg->id2);
                        break;
                    case ParamKind::Tag::Value: {
                        if (arg->tag == Node::Tag::Ident ||
                            arg->tag == Node::Tag::TokensIn)
                            type_fail(*arg, "argument must be a value expression");
                        ValueKind k = check(arg, net);
                        if (k != p.value)
                            type_fail(*arg, "argument " + std::to_string(i + 1) +
                                                " of '" + e->id + "' must be " +
                                                to_string(p.value) + ", got " +
                                                to_string(k));
                        break;
                    }
                }
            }
            return fn.result;
        }
    }
    type_fail(*e, "unreachable expression form");
}

}  // namespace

ValueKind typecheck(const Expr& e, const Net& net) { return check(e, net); }

// ------------------------------------------------------------------ eval ----

namespace {

double as_real(const Value& v, const Node& at) {
    if (auto* d = std::get_if<double>(&v)) return *d;
    throw EvalError(std::to_string(at.line) + ":" + std::to_string(at.col) +
                    ": operand is not a real");
}

bool as_bool(const Value& v, const Node& at) {
    if (auto* b = std::get_if<bool>(&v)) return *b;
    throw EvalError(std::to_string(at.line) + ":" + std::to_string(at.col) +
                    ": operand is not a boolean");
}

}  // namespace

Value eval(const Expr& e, const EvalContext& ctx) {
    switch (e->tag) {
        case Node::Tag::BoolLit: return e->bval;
        case Node::Tag::RealLit: return e->rval;
        case Node::Tag::Val: return ctx.net.value_of(e->id);
        case Node::Tag::In: return ctx.marking.at(e->id2).contains(e->id);
        case Node::Tag::Bonded:
            return ctx.marking.at(e->id3).contains(Bond(e->id, e->id2));
        case Node::Tag::TokensIn: {
            TokenList out;
            for (const BaseId& b : ctx.marking.at(e->id).bases)
                if (ctx.net.base(b).type == e->id2) out.push_back(b);
            return out;  // set iteration: already lexicographic
        }
        case Node::Tag::Not: return !as_bool(eval(e->kids[0], ctx), *e);
        case Node::Tag::Logic: {
            // Strict: both operands are evaluated, errors on either side fire.
            bool l = as_bool(eval(e->kids[0], ctx), *e);
            bool r = as_bool(eval(e->kids[1], ctx), *e);
            return e->bop == BoolOp::Or ? (l || r) : (l && r);
        }
        case Node::Tag::Cmp: {
            double l = as_real(eval(e->kids[0], ctx), *e);
            double r = as_real(eval(e->kids[1], ctx), *e);
            switch (e->cmp) {
                case CmpOp::Lt: return l < r;
                case CmpOp::Le: return l <= r;
                case CmpOp::Eq: return l == r;
                case CmpOp::Ne: return l != r;
                case CmpOp::Ge: return l >= r;
                case CmpOp::Gt: return l > r;
            }
            throw EvalError("bad comparison operator");
        }
        case Node::Tag::Arith: {
            double l = as_real(eval(e->kids[0], ctx), *e);
            double r = as_real(eval(e->kids[1], ctx), *e);
            switch (e->arith) {
                case ArithOp::Add: return l + r;
                case ArithOp::Sub: return l - r;
                case ArithOp::Mul: return l * r;
                case ArithOp::Div:
                    if (r == 0.0)
                        throw DivisionByZero(std::to_string(e->line) + ":" +
                                             std::to_string(e->col) +
                                             ": division by zero");
                    return l / r;
            }
            throw EvalError("bad arithmetic operator");
        }
        case Node::Tag::Call: {
            auto it = ctx.net.host_functions.find(e->id);
            if (it == ctx.net.host_functions.end())
                throw MissingHostFunction("no registered function '" + e->id + "'");
            std::vector<Value> args;
            args.reserve(e->kids.size());
            for (const Expr& k : e->kids) {
                if (k->tag == Node::Tag::Ident)
                    args.emplace_back(k->id);
                else
                    args.emplace_back(eval(k, ctx));
            }
            return it->second.fn(ctx, args);
        }
        case Node::Tag::Ident:
            throw EvalError("bare identifier evaluated outside an argument list");
    }
    throw EvalError("unreachable expression form");
}

bool eval_bool(const Expr& e, const EvalContext& ctx) {
    Value v = eval(e, ctx);
    if (auto* b = std::get_if<bool>(&v)) return *b;
    throw EvalError("guard did not evaluate to a boolean");
}

}  // namespace rpn::cond
