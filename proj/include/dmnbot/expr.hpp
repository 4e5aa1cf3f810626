#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dmnbot/value.hpp"

namespace dmnbot {

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_string(CmpOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// FEEL-lite expression tree: literals, variable references, if/then/else,
// comparisons and boolean connectives.
struct Expr {
    enum class Kind { Literal, Var, If, Cmp, And, Or, Not };

    Kind kind = Kind::Literal;
    Value literal;
    std::string name;  // normalized, for Var
    CmpOp op = CmpOp::Eq;
    std::vector<ExprPtr> operands;

    static ExprPtr make_literal(Value v);
    static ExprPtr make_var(std::string name);
    static ExprPtr make_if(ExprPtr cond, ExprPtr then_branch, ExprPtr else_branch);
    static ExprPtr make_cmp(CmpOp op, ExprPtr lhs, ExprPtr rhs);
    static ExprPtr make_bool(Kind kind, std::vector<ExprPtr> operands);
};

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

// Throws ParseError.
ExprPtr parse_expression(std::string_view text);
std::string print_expression(const ExprPtr& e);

// Distinct variable names in order of first appearance.
std::vector<std::string> free_variables(const ExprPtr& e);

using VarLookup = std::function<std::optional<Value>(const std::string&)>;

// Throws MissingBinding for unbound variables and TypeError for operands of
// the wrong kind.
Value evaluate_expression(const ExprPtr& e, const VarLookup& lookup);

// Static result type given the types of variables; nullopt when a variable
// type is unknown. Throws TypeError on an ill-typed tree.
using TypeLookup = std::function<std::optional<TypeRef>(const std::string&)>;
std::optional<TypeRef> infer_type(const ExprPtr& e, const TypeLookup& lookup);

}  // namespace dmnbot
