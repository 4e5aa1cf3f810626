#include "dmnbot/engine.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "dmnbot/errors.hpp"

namespace dmnbot {

std::string assignment_key(const Assignment& a) {
    std::string out;
    for (const auto& [name, value] : a) {
        out += name;
        out += '=';
        out += value.key();
        out += ';';
    }
    return out;
}

bool match_rule(const Rule& rule, const DecisionTable& table, const Assignment& a) {
    for (std::size_t c = 0; c < table.inputs.size(); ++c) {
        const auto& test = rule.input_entries.at(c);
        auto it = a.find(table.inputs[c].normalized_name);
        if (it == a.end()) {
            throw MissingBinding("input '" + table.inputs[c].label + "' is not bound");
        }
        if (!test.accepts(it->second)) return false;
    }
    return true;
}

namespace {

std::string prefix(std::string_view element) {
    return element.empty() ? std::string{} : "'" + std::string(element) + "': ";
}

int matching_rule(const DecisionTable& table, const Assignment& a, std::string_view element) {
    std::vector<int> hits;
    for (const auto& rule : table.rules) {
        if (match_rule(rule, table, a)) hits.push_back(rule.number);
    }
    if (hits.empty()) {
        std::string values;
        for (const auto& in : table.inputs) {
            if (!values.empty()) values += ", ";
            values += in.normalized_name + "=" + a.at(in.normalized_name).display();
        }
        throw NoRuleMatched(prefix(element) + "no rule matches {" + values + "}");
    }
    if (hits.size() > 1) {
        std::string list;
        for (int r : hits) list += (list.empty() ? "" : ", ") + std::to_string(r);
        throw MultipleRulesMatched(prefix(element) + "rules " + list + " all match", hits);
    }
    return hits.front();
}

}  // namespace

Value evaluate_table(const DecisionTable& table, const Assignment& a, std::string_view element) {
    int number = matching_rule(table, a, element);
    for (const auto& rule : table.rules) {
        if (rule.number == number) return rule.output_entry;
    }
    return {};
}

Value eval_literal(const LiteralExpression& expr, const Assignment& a) {
    Value v = evaluate_expression(expr.expression, [&](const std::string& name) -> std::optional<Value> {
        auto it = a.find(name);
        if (it == a.end()) return std::nullopt;
        return it->second;
    });
    if (!v.conforms_to(expr.result_type) && !(v.is_number() && is_numeric(expr.result_type))) {
        throw TypeError(prefix(expr.name) + "result " + v.literal() + " is not " +
                        std::string(to_string(expr.result_type)));
    }
    return v.coerced_to(expr.result_type);
}

std::vector<std::string> topo_order(const DmnModel& model) {
    std::set<std::string> nodes;
    for (const auto& d : model.decisions) nodes.insert(d.normalized_name);
    for (const auto& l : model.literal_expressions) nodes.insert(l.normalized_name);

    std::map<std::string, int> indegree;
    std::map<std::string, std::vector<std::string>> consumers;
    for (const auto& n : nodes) indegree[n] = 0;
    for (const auto& r : model.requirements) {
        if (!nodes.count(r.consumer) || !nodes.count(r.supplier)) continue;
        ++indegree[r.consumer];
        consumers[r.supplier].push_back(r.consumer);
    }

    std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
    for (const auto& [n, deg] : indegree) {
        if (deg == 0) ready.push(n);
    }
    std::vector<std::string> order;
    while (!ready.empty()) {
        auto n = ready.top();
        ready.pop();
        order.push_back(n);
        for (const auto& c : consumers[n]) {
            if (--indegree[c] == 0) ready.push(c);
        }
    }
    if (order.size() != nodes.size()) {
        std::string stuck;
        for (const auto& [n, deg] : indegree) {
            if (deg > 0) stuck += (stuck.empty() ? "" : ", ") + n;
        }
        throw CyclicDependency("requirement cycle among " + stuck);
    }
    return order;
}

const TraceEntry* EvalTrace::find(std::string_view element) const {
    auto key = normalize_name(element);
    for (const auto& e : entries) {
        if (e.element == key) return &e;
    }
    return nullptr;
}

namespace {

class DrdEvaluator {
public:
    DrdEvaluator(const DmnModel& m, const Assignment& a) : m_(m), a_(a) {}

    Value element(const std::string& name) {
        if (auto it = done_.find(name); it != done_.end()) return it->second;
        if (!active_.insert(name).second) throw CyclicDependency("requirement cycle through '" + name + "'");
        Value v;
        if (const auto* d = m_.find_decision(name)) v = decision(*d);
        else if (const auto* l = m_.find_literal(name)) v = literal(*l);
        else throw UnresolvedReference("unknown element '" + name + "'");
        active_.erase(name);
        done_.emplace(name, v);
        return v;
    }

    EvalTrace trace;

private:
    // A caller-supplied binding for a derived value wins over computation.
    std::optional<Value> pinned(const std::string& column, const std::string& supplier) const {
        if (auto it = a_.find(column); it != a_.end()) return it->second;
        if (auto it = a_.find(supplier); it != a_.end()) return it->second;
        return std::nullopt;
    }

    Value decision(const Decision& d) {
        Assignment local;
        TraceEntry entry;
        entry.element = d.normalized_name;
        entry.kind = ElementKind::Decision;
        for (const auto& in : d.table.inputs) {
            Value v;
            if (in.source == InputSource::User) {
                auto it = a_.find(in.normalized_name);
                if (it == a_.end()) {
                    throw MissingBinding("'" + d.name + "': input '" + in.label + "' is not bound");
                }
                v = it->second.coerced_to(in.type_ref);
            } else if (auto p = pinned(in.normalized_name, in.supplier)) {
                v = p->coerced_to(in.type_ref);
            } else {
                v = element(in.supplier).coerced_to(in.type_ref);
            }
            local[in.normalized_name] = v;
            entry.inputs.emplace_back(in.normalized_name, v);
        }
        entry.matched_rule = matching_rule(d.table, local, d.name);
        for (const auto& r : d.table.rules) {
            if (r.number == entry.matched_rule) entry.value = r.output_entry;
        }
        trace.entries.push_back(entry);
        return entry.value;
    }

    Value literal(const LiteralExpression& l) {
        Assignment local;
        TraceEntry entry;
        entry.element = l.normalized_name;
        entry.kind = ElementKind::Literal;
        std::set<std::string> suppliers;
        for (const auto* r : m_.requirements_of(l.normalized_name)) suppliers.insert(r->supplier);
        for (const auto& var : free_variables(l.expression)) {
            Value v;
            if (suppliers.count(var)) {
                auto p = pinned(var, var);
                v = p ? *p : element(var);
            } else if (auto it = a_.find(var); it != a_.end()) {
                v = it->second;
            } else {
                throw MissingBinding("'" + l.name + "': variable '" + var + "' is not bound");
            }
            local[var] = v;
            entry.inputs.emplace_back(var, v);
        }
        entry.value = eval_literal(l, local);
        trace.entries.push_back(entry);
        return entry.value;
    }

    const DmnModel& m_;
    const Assignment& a_;
    std::map<std::string, Value> done_;
    std::set<std::string> active_;
};

}  // namespace

EvalResult evaluate_drd(const DmnModel& model, std::string_view decision, const Assignment& a) {
    auto name = normalize_name(decision);
    if (!model.has_element(name)) throw UnresolvedReference("unknown decision '" + std::string(decision) + "'");
    DrdEvaluator eval(model, a);
    Value v = eval.element(name);
    return {v, std::move(eval.trace)};
}

}  // namespace dmnbot
