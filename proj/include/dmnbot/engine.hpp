#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dmnbot/dmn_model.hpp"

namespace dmnbot {

// Normalized input name -> value.
using Assignment = std::map<std::string, Value>;

// Canonical text of an assignment, stable across runs; used as a cache key.
std::string assignment_key(const Assignment& a);

// Throws MissingBinding when a column of the table is unbound. Columns are
// looked up by their normalized name.
bool match_rule(const Rule& rule, const DecisionTable& table, const Assignment& a);

// Output of the unique matching rule. Throws NoRuleMatched or
// MultipleRulesMatched; `element` only decorates error messages.
Value evaluate_table(const DecisionTable& table, const Assignment& a, std::string_view element = {});

// Throws MissingBinding, TypeError.
Value eval_literal(const LiteralExpression& expr, const Assignment& a);

// All decisions and literal expressions, suppliers before consumers. Ties go
// to the smaller normalized name. Throws CyclicDependency.
std::vector<std::string> topo_order(const DmnModel& model);

struct TraceEntry {
    std::string element;
    ElementKind kind = ElementKind::Decision;
    int matched_rule = 0;  // decisions only
    std::vector<std::pair<std::string, Value>> inputs;
    Value value;
};

struct EvalTrace {
    std::vector<TraceEntry> entries;  // in evaluation order

    const TraceEntry* find(std::string_view element) const;
};

struct EvalResult {
    Value value;
    EvalTrace trace;
};

// Evaluates `decision` and everything it depends on. Sub-element outputs feed
// the columns they supply; a binding in `a` under a supplied column's name
// (or the supplier's name) overrides the computed value. Errors carry the
// element name.
EvalResult evaluate_drd(const DmnModel& model, std::string_view decision, const Assignment& a);

}  // namespace dmnbot
