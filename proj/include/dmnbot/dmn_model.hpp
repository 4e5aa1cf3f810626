#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dmnbot/expr.hpp"
#include "dmnbot/value.hpp"

namespace dmnbot {

// A single input-entry condition of a decision table rule.
struct UnaryTest {
    enum class Kind { Wildcard, Eq, Compare, Interval, AnyOf, Not };

    Kind kind = Kind::Wildcard;
    Value value;                 // Eq
    CmpOp op = CmpOp::Lt;        // Compare: Lt, Le, Gt, Ge
    double bound = 0.0;          // Compare
    double lo = 0.0, hi = 0.0;   // Interval
    bool lo_closed = true, hi_closed = true;
    std::vector<UnaryTest> items;  // AnyOf members, or the single Not operand

    static UnaryTest wildcard();
    static UnaryTest eq(Value v);
    static UnaryTest compare(CmpOp op, double bound);
    static UnaryTest interval(double lo, double hi, bool lo_closed, bool hi_closed);
    static UnaryTest any_of(std::vector<UnaryTest> items);
    static UnaryTest negate(UnaryTest inner);

    bool accepts(const Value& v) const;
    bool is_wildcard() const { return kind == Kind::Wildcard; }

    friend bool operator==(const UnaryTest& a, const UnaryTest& b);
};

// Throws ParseError (with rule/column coordinates) or TypeMismatch.
UnaryTest parse_unary_test(std::string_view text, TypeRef type, int rule = 0, int column = 0);
std::string print_unary_test(const UnaryTest& t);

enum class HitPolicy { Unique };
enum class InputSource { User, Decision, Literal };

struct InputClause {
    std::string label;
    std::string normalized_name;
    std::string expression_text;
    TypeRef type_ref = TypeRef::String;
    InputSource source = InputSource::User;
    std::string supplier;  // normalized name of the supplying element

    friend bool operator==(const InputClause&, const InputClause&) = default;
};

struct OutputClause {
    std::string label;
    std::string name;
    TypeRef type_ref = TypeRef::String;

    friend bool operator==(const OutputClause&, const OutputClause&) = default;
};

struct Rule {
    int number = 0;
    std::vector<UnaryTest> input_entries;
    Value output_entry;

    friend bool operator==(const Rule&, const Rule&) = default;
};

struct DecisionTable {
    HitPolicy hit_policy = HitPolicy::Unique;
    std::vector<InputClause> inputs;
    OutputClause output;
    std::vector<Rule> rules;

    friend bool operator==(const DecisionTable&, const DecisionTable&) = default;
};

struct Decision {
    std::string id;
    std::string name;
    std::string normalized_name;
    DecisionTable table;

    friend bool operator==(const Decision&, const Decision&) = default;
};

struct LiteralExpression {
    std::string id;
    std::string name;
    std::string normalized_name;
    ExprPtr expression;
    TypeRef result_type = TypeRef::String;

    friend bool operator==(const LiteralExpression& a, const LiteralExpression& b) {
        return a.id == b.id && a.name == b.name && a.normalized_name == b.normalized_name &&
               a.result_type == b.result_type && expr_equal(a.expression, b.expression);
    }
};

enum class ElementKind { Decision, Literal };

struct Requirement {
    std::string consumer;  // normalized names
    std::string supplier;
    ElementKind supplier_kind = ElementKind::Decision;

    friend bool operator==(const Requirement&, const Requirement&) = default;
};

enum class Severity { Error, Warning };

struct Location {
    std::string element;
    int rule = 0;    // 1-based, 0 = n/a
    int column = 0;  // 1-based, 0 = n/a

    friend auto operator<=>(const Location&, const Location&) = default;
};

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    Location location;
};

std::string format_diagnostic(const Diagnostic& d);

// An input the user must supply, indexed across all tables and literal
// expressions of the model.
struct UserInput {
    std::string normalized_name;
    std::string label;
    TypeRef type_ref = TypeRef::String;
    std::string owner;  // decision that declares the column; empty if only literals read it

    friend bool operator==(const UserInput&, const UserInput&) = default;
};

struct DmnModel {
    std::string id;
    std::string name;
    std::vector<Decision> decisions;
    std::vector<LiteralExpression> literal_expressions;
    std::vector<Requirement> requirements;
    std::string main_decision;  // empty when not unique

    // Filled by link_model().
    std::vector<UserInput> inputs;
    std::vector<Diagnostic> parse_notes;

    const Decision* find_decision(std::string_view name) const;
    const LiteralExpression* find_literal(std::string_view name) const;
    const UserInput* find_input(std::string_view name) const;
    std::vector<const Requirement*> requirements_of(std::string_view consumer) const;
    bool has_element(std::string_view name) const;

    friend bool operator==(const DmnModel& a, const DmnModel& b) {
        return a.id == b.id && a.name == b.name && a.decisions == b.decisions &&
               a.literal_expressions == b.literal_expressions &&
               a.requirements == b.requirements && a.main_decision == b.main_decision &&
               a.inputs == b.inputs;
    }
};

// Resolves input sources and suppliers, indexes user inputs and identifies
// the main decision. Idempotent; called by the parsers and by code that
// builds models by hand.
void link_model(DmnModel& model);

// Structural parse without static validation. Throws XmlError,
// UnsupportedFeature, UnresolvedReference, ParseError or TypeMismatch.
DmnModel parse_dmn_document(std::string_view xml_text);

// Structural parse followed by validate_model; the first error diagnostic is
// raised as an exception (CyclicDependency for CYCLE, ModelError otherwise).
DmnModel parse_dmn(std::string_view xml_text);
DmnModel load_dmn_file(const std::filesystem::path& path);

// Diagnostics ordered by location; empty iff the model is clean.
std::vector<Diagnostic> validate_model(const DmnModel& model);

// Canonical DMN 1.3 XML for the supported subset.
std::string serialize_dmn(const DmnModel& model);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace dmnbot
