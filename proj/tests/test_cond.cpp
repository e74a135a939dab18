#include "rpn/cond.hpp"
#include "rpn/model.hpp"

#include <doctest.h>

#include <algorithm>

using namespace rpn;

namespace {

// Small fixture: two unit tokens bonded in P, one real-valued and one
// vector-valued token elsewhere, plus a doubling host function.
Net fixture() {
    Net net;
    net.types = {{"thing", cond::unit_kind()},
                 {"level", cond::real_kind()},
                 {"pair", cond::vec_kind(2)}};
    net.bases = {{"b1", "thing"}, {"b2", "thing"}, {"x", "level"}, {"v", "pair"}};
    net.places = {"P", "Q"};
    net.values["b1"] = cond::Unit{};
    net.values["b2"] = cond::Unit{};
    net.values["x"] = 2.5;
    net.values["v"] = std::vector<double>{1.0, -2.0};
    auto& p = net.initial_marking.places["P"];
    p.bases = {"b1", "b2"};
    p.bonds = {Bond("b1", "b2")};
    auto& q = net.initial_marking.places["Q"];
    q.bases = {"x", "v"};

    cond::HostFunction twice;
    twice.name = "twice";
    twice.params = {cond::value_param(cond::real_kind())};
    twice.result = cond::real_kind();
    twice.fn = [](const cond::EvalContext&, const std::vector<cond::Value>& args) {
        return cond::Value(2.0 * std::get<double>(args[0]));
    };
    net.host_functions["twice"] = twice;

    cond::HostFunction count_of;
    count_of.name = "count_of";
    count_of.params = {cond::token_list_param()};
    count_of.result = cond::real_kind();
    count_of.fn = [](const cond::EvalContext&, const std::vector<cond::Value>& args) {
        return cond::Value(static_cast<double>(std::get<cond::TokenList>(args[0]).size()));
    };
    net.host_functions["count_of"] = count_of;

    cond::HostFunction named;
    named.name = "named";
    named.params = {cond::base_param(), cond::place_param(), cond::type_param()};
    named.result = cond::bool_kind();
    named.fn = [](const cond::EvalContext&, const std::vector<cond::Value>& args) {
        return cond::Value(std::get<std::string>(args[0]) == "b1" &&
                           std::get<std::string>(args[1]) == "P" &&
                           std::get<std::string>(args[2]) == "thing");
    };
    net.host_functions["named"] = named;
    return net;
}

cond::Value evaluate(const Net& net, const std::string& src) {
    cond::Expr e = cond::parse(src);
    (void)cond::typecheck(e, net);
    return cond::eval(e, cond::EvalContext{net, net.initial_marking});
}

double eval_real(const Net& net, const std::string& src) {
    return std::get<double>(evaluate(net, src));
}

bool eval_flag(const Net& net, const std::string& src) {
    return std::get<bool>(evaluate(net, src));
}

}  // namespace

TEST_CASE("expression parsing produces the expected trees") {
    CHECK(cond::to_sexpr(cond::parse("cap_without(Mk, ai) > cap_with(Mk, ai)")) ==
          "(> (call cap_without (id Mk) (id ai)) (call cap_with (id Mk) (id ai)))");
    CHECK(cond::to_sexpr(cond::parse("1 + 2 * 3")) == "(+ 1 (* 2 3))");
    CHECK(cond::to_sexpr(cond::parse("(1 + 2) * 3")) == "(* (+ 1 2) 3)");
    CHECK(cond::to_sexpr(cond::parse("not true and false")) == "(and (not true) false)");
    CHECK(cond::to_sexpr(cond::parse("1 - 2 - 3")) == "(- (- 1 2) 3)");
    // Comparison binds tighter than 'not'.
    CHECK(cond::to_sexpr(cond::parse("not val(x) < 3")) == "(not (< (val x) 3))");
}

TEST_CASE("parse rejects malformed input") {
    CHECK_THROWS_AS((void)cond::parse(""), cond::SyntaxError);
    CHECK_THROWS_AS((void)cond::parse("1 +"), cond::SyntaxError);
    CHECK_THROWS_AS((void)cond::parse("(1"), cond::SyntaxError);
    CHECK_THROWS_AS((void)cond::parse("!x"), cond::SyntaxError);
    CHECK_THROWS_AS((void)cond::parse("-1"), cond::SyntaxError);  // no unary minus
    CHECK_THROWS_AS((void)cond::parse("x"), cond::SyntaxError);   // bare identifier
    CHECK_THROWS_AS((void)cond::parse("x + 1"), cond::SyntaxError);
    CHECK_THROWS_AS((void)cond::parse("val(3)"), cond::SyntaxError);
    CHECK_THROWS_AS((void)cond::parse("in(a)"), cond::SyntaxError);
    CHECK_THROWS_AS((void)cond::parse("true false"), cond::SyntaxError);
    CHECK_THROWS_AS((void)cond::parse("and true"), cond::SyntaxError);

    try {
        (void)cond::parse("1 +\n  *2");
    } catch (const cond::SyntaxError& e) {
        CHECK(e.line == 2);
        CHECK(e.col > 0);
    }
}

TEST_CASE("print emits canonical text that reparses to the same tree") {
    auto roundtrip = [](const std::string& src, const std::string& expected) {
        cond::Expr e = cond::parse(src);
        std::string printed = cond::print(e);
        CHECK(printed == expected);
        CHECK(cond::equal(cond::parse(printed), e));
    };
    roundtrip("1+2*3", "1 + 2 * 3");
    roundtrip("(1+2)*3", "(1 + 2) * 3");
    roundtrip("1-(2-3)", "1 - (2 - 3)");
    roundtrip("not (true or false)", "not (true or false)");
    roundtrip("not val(x)<3", "not val(x) < 3");
    roundtrip("in(b1,P) and bonded(b1,b2,P)", "in(b1, P) and bonded(b1, b2, P)");
    roundtrip("twice(  val( x ) )=5", "twice(val(x)) = 5");
    roundtrip("1.5e2 < 200", "150 < 200");
}

TEST_CASE("negative literals print as a subtraction") {
    CHECK(cond::print(cond::lit(-2.0)) == "0 - 2");
    CHECK(cond::print(cond::lit(3.0)) == "3");
    cond::Expr e = cond::parse(cond::print(cond::lit(-2.0)));
    Net net = fixture();
    CHECK(std::get<double>(cond::eval(e, cond::EvalContext{net, net.initial_marking})) ==
          -2.0);
}

TEST_CASE("structural equality ignores formatting only") {
    CHECK(cond::equal(cond::parse("1 + 2"), cond::parse("1+2")));
    CHECK(!cond::equal(cond::parse("1 + 2"), cond::parse("2 + 1")));
    CHECK(!cond::equal(cond::parse("1 < 2"), cond::parse("1 > 2")));
}

TEST_CASE("typecheck classifies expressions and rejects kind clashes") {
    Net net = fixture();
    CHECK(cond::typecheck(cond::parse("true"), net) == cond::bool_kind());
    CHECK(cond::typecheck(cond::parse("1 + 2"), net) == cond::real_kind());
    CHECK(cond::typecheck(cond::parse("val(x)"), net) == cond::real_kind());
    CHECK(cond::typecheck(cond::parse("val(v)"), net) == cond::vec_kind(2));
    CHECK(cond::typecheck(cond::parse("in(b1, P)"), net) == cond::bool_kind());
    CHECK(cond::typecheck(cond::parse("bonded(b1, b2, P)"), net) == cond::bool_kind());
    CHECK(cond::typecheck(cond::parse("twice(val(x)) < 6"), net) == cond::bool_kind());
    CHECK(cond::typecheck(cond::parse("count_of(tokens_in(P, thing))"), net) ==
          cond::real_kind());
    CHECK(cond::typecheck(cond::parse("named(b1, P, thing)"), net) == cond::bool_kind());

    CHECK_THROWS_AS((void)cond::typecheck(cond::parse("1 and true"), net),
                    cond::TypeError);
    CHECK_THROWS_AS((void)cond::typecheck(cond::parse("true < false"), net),
                    cond::TypeError);
    CHECK_THROWS_AS((void)cond::typecheck(cond::parse("val(v) + 1"), net),
                    cond::TypeError);
    CHECK_THROWS_AS((void)cond::typecheck(cond::parse("val(nope)"), net),
                    cond::TypeError);
    CHECK_THROWS_AS((void)cond::typecheck(cond::parse("in(b1, nowhere)"), net),
                    cond::TypeError);
    CHECK_THROWS_AS((void)cond::typecheck(cond::parse("bonded(b1, b1, P)"), net),
                    cond::TypeError);
    CHECK_THROWS_AS((void)cond::typecheck(cond::parse("unknown_fn(val(x))"), net),
                    cond::TypeError);
    CHECK_THROWS_AS((void)cond::typecheck(cond::parse("twice(b1)"), net),
                    cond::TypeError);  // identifier where a value is expected
    CHECK_THROWS_AS((void)cond::typecheck(cond::parse("twice(val(x), val(x))"), net),
                    cond::TypeError);
    CHECK_THROWS_AS((void)cond::typecheck(cond::parse("named(val(x), P, thing)"), net),
                    cond::TypeError);
    // tokens_in is only meaningful as a host-function argument.
    CHECK_THROWS_AS((void)cond::typecheck(cond::parse("tokens_in(P, thing) = 1"), net),
                    cond::TypeError);
}

TEST_CASE("evaluation follows real arithmetic with strict operands") {
    Net net = fixture();
    CHECK(eval_real(net, "1 + 2 * 3") == 7.0);
    CHECK(eval_real(net, "(1 + 2) * 3") == 9.0);
    CHECK(eval_real(net, "7 / 2") == 3.5);
    CHECK(eval_real(net, "val(x) * 2") == 5.0);
    CHECK(eval_real(net, "twice(val(x))") == 5.0);
    CHECK(eval_real(net, "count_of(tokens_in(P, thing))") == 2.0);
    CHECK(eval_real(net, "count_of(tokens_in(Q, thing))") == 0.0);

    CHECK(eval_flag(net, "1 < 2"));
    CHECK(eval_flag(net, "2 <= 2"));
    CHECK(eval_flag(net, "2 = 2"));
    CHECK(eval_flag(net, "1 != 2"));
    CHECK(eval_flag(net, "3 >= 2"));
    CHECK(eval_flag(net, "3 > 2"));
    CHECK(eval_flag(net, "in(b1, P)"));
    CHECK(!eval_flag(net, "in(x, P)"));
    CHECK(eval_flag(net, "bonded(b1, b2, P)"));
    CHECK(eval_flag(net, "bonded(b2, b1, P)"));  // bonds are undirected
    CHECK(!eval_flag(net, "bonded(b1, b2, Q)"));
    CHECK(eval_flag(net, "named(b1, P, thing)"));
    CHECK(eval_flag(net, "not false and true"));
    CHECK(eval_flag(net, "false or not false"));

    CHECK_THROWS_AS((void)eval_real(net, "1 / 0"), cond::DivisionByZero);
    // Strict evaluation: 'and'/'or' always evaluate both operands.
    CHECK_THROWS_AS((void)eval_flag(net, "false and 1 / 0 = 1"), cond::DivisionByZero);
    CHECK_THROWS_AS((void)eval_flag(net, "true or 1 / 0 = 1"), cond::DivisionByZero);
}

TEST_CASE("eval_bool insists on boolean results") {
    Net net = fixture();
    CHECK(cond::eval_bool(cond::parse("1 < 2"), {net, net.initial_marking}));
    CHECK_THROWS_AS((void)cond::eval_bool(cond::parse("1 + 1"),
                                          {net, net.initial_marking}),
                    cond::EvalError);
}

TEST_CASE("calling an unregistered function at eval time is reported") {
    Net net = fixture();
    cond::Expr e = cond::parse("ghost(val(x)) < 1");  // parses fine
    CHECK_THROWS_AS((void)cond::eval(e, cond::EvalContext{net, net.initial_marking}),
                    cond::MissingHostFunction);
}

TEST_CASE("token lists arrive sorted by id") {
    Net net = fixture();
    cond::HostFunction first;
    first.name = "first_id_is_b1";
    first.params = {cond::token_list_param()};
    first.result = cond::bool_kind();
    first.fn = [](const cond::EvalContext&, const std::vector<cond::Value>& args) {
        const auto& ids = std::get<cond::TokenList>(args[0]);
        return cond::Value(!ids.empty() && ids.front() == "b1" &&
                           std::is_sorted(ids.begin(), ids.end()));
    };
    net.host_functions["first_id_is_b1"] = first;
    CHECK(eval_flag(net, "first_id_is_b1(tokens_in(P, thing))"));
}
