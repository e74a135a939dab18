#pragma once
// Guard expression language for net transitions: a small strict boolean/real
// expression tree with marking predicates and embedder-registered functions.

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace rpn {

struct Net;
struct Marking;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace cond {

struct SyntaxError : Error {
    SyntaxError(const std::string& what, int line, int col)
        : Error(what), line(line), col(col) {}
    int line, col;
};

struct TypeError : Error {
    using Error::Error;
};

struct EvalError : Error {
    using Error::Error;
};

struct DivisionByZero : EvalError {
    using EvalError::EvalError;
};

struct MissingHostFunction : EvalError {
    using EvalError::EvalError;
};

// Kind of a token value or expression result.
struct ValueKind {
    enum class Tag { Unit, Bool, Real, Vec };
    Tag tag = Tag::Unit;
    int dim = 0;  // element count, Vec only

    bool operator==(const ValueKind&) const = default;
};

inline ValueKind unit_kind() { return {ValueKind::Tag::Unit, 0}; }
inline ValueKind bool_kind() { return {ValueKind::Tag::Bool, 0}; }
inline ValueKind real_kind() { return {ValueKind::Tag::Real, 0}; }
inline ValueKind vec_kind(int dim) { return {ValueKind::Tag::Vec, dim}; }
std::string to_string(const ValueKind&);

// What a host function accepts for one parameter: a plain value, or a
// reference to a declared identifier (base / place / token type), or the
// id list produced by tokens_in(...).
struct ParamKind {
    enum class Tag { Value, BaseRef, PlaceRef, TypeRef, TokenList };
    Tag tag = Tag::Value;
    ValueKind value;  // Tag::Value only

    bool operator==(const ParamKind&) const = default;
};

inline ParamKind value_param(ValueKind k) { return {ParamKind::Tag::Value, k}; }
inline ParamKind base_param() { return {ParamKind::Tag::BaseRef, {}}; }
inline ParamKind place_param() { return {ParamKind::Tag::PlaceRef, {}}; }
inline ParamKind type_param() { return {ParamKind::Tag::TypeRef, {}}; }
inline ParamKind token_list_param() { return {ParamKind::Tag::TokenList, {}}; }

struct Unit {
    bool operator==(const Unit&) const = default;
};

using TokenList = std::vector<std::string>;

// Runtime value: unit, boolean, real, real vector, identifier reference,
// or a token id list. The last two only occur as host-function arguments.
using Value = std::variant<Unit, bool, double, std::vector<double>, std::string, TokenList>;

// Guard evaluation deliberately sees the net and the current marking only;
// transition histories are not reachable from here.
struct EvalContext {
    const Net& net;
    const Marking& marking;
};

struct HostFunction {
    std::string name;
    std::vector<ParamKind> params;
    ValueKind result;
    std::function<Value(const EvalContext&, const std::vector<Value>&)> fn;
};

enum class CmpOp { Lt, Le, Eq, Ne, Ge, Gt };
enum class ArithOp { Add, Sub, Mul, Div };
enum class BoolOp { And, Or };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
    enum class Tag {
        BoolLit,   // bval
        RealLit,   // rval
        Val,       // val(id)            id = base
        In,        // in(id, id2)        id = base, id2 = place
        Bonded,    // bonded(id,id2,id3) id,id2 = bases, id3 = place
        TokensIn,  // tokens_in(id, id2) id = place, id2 = token type
        Not,       // kids[0]
        Logic,     // bop, kids[0..1]
        Cmp,       // cmp, kids[0..1]
        Arith,     // arith, kids[0..1]
        Call,      // id = function name, kids = arguments
        Ident      // bare identifier argument, id
    };

    Tag tag;
    bool bval = false;
    double rval = 0.0;
    std::string id, id2, id3;
    CmpOp cmp = CmpOp::Lt;
    ArithOp arith = ArithOp::Add;
    BoolOp bop = BoolOp::And;
    std::vector<Expr> kids;
    int line = 0, col = 0;
};

bool equal(const Expr& a, const Expr& b);
std::string to_sexpr(const Expr& e);  // stable debug rendering, used by tests

Expr parse(const std::string& text);  // throws SyntaxError
std::string print(const Expr& e);     // canonical text; parse(print(e)) == e structurally

ValueKind typecheck(const Expr& e, const Net& net);  // throws TypeError
Value eval(const Expr& e, const EvalContext& ctx);   // throws EvalError
bool eval_bool(const Expr& e, const EvalContext& ctx);

ValueKind kind_of(const Value& v);

// Convenience constructors for building guards programmatically.
Expr lit(bool b);
Expr lit(double r);

}  // namespace cond
}  // namespace rpn
