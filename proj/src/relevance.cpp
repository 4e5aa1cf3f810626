#include "dmnbot/relevance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "dmnbot/errors.hpp"

namespace dmnbot {

bool Domain::contains(const Value& v) const { return index_of(v) >= 0; }

int Domain::index_of(const Value& v) const {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == v) return static_cast<int>(i);
    }
    return -1;
}

namespace {

// Accumulates the constants tests mention, for one logical input.
class DomainBuilder {
public:
    explicit DomainBuilder(TypeRef type) : type_(type) {}

    void add_test(const UnaryTest& t) {
        switch (t.kind) {
            case UnaryTest::Kind::Wildcard: break;
            case UnaryTest::Kind::Eq: add_constant(t.value); break;
            case UnaryTest::Kind::Compare: bounds_.insert(t.bound); break;
            case UnaryTest::Kind::Interval:
                bounds_.insert(t.lo);
                bounds_.insert(t.hi);
                interior_.insert(midpoint(t.lo, t.hi));
                break;
            case UnaryTest::Kind::AnyOf:
            case UnaryTest::Kind::Not:
                for (const auto& item : t.items) add_test(item);
                break;
        }
    }

    void add_constant(const Value& v) {
        if (v.is_number()) {
            bounds_.insert(v.as_number());
        } else if (v.is_string() && type_ == TypeRef::String) {
            for (const auto& s : strings_) {
                if (s == v) return;
            }
            strings_.push_back(v);
        }
    }

    Domain build(std::string_view what) const {
        Domain d;
        if (type_ == TypeRef::Boolean) {
            d.values = {Value::boolean(true), Value::boolean(false)};
            return d;
        }
        if (type_ == TypeRef::String) {
            if (strings_.empty()) throw EmptyDomain("input '" + std::string(what) + "' has no enumerable values");
            d.values = strings_;
            return d;
        }
        d.kind = Domain::Kind::NumericProbe;
        d.boundaries.assign(bounds_.begin(), bounds_.end());
        std::set<double> probes(interior_);
        for (double b : bounds_) {
            probes.insert(b);
            probes.insert(b - 1);
            probes.insert(b + 1);
        }
        // One point strictly inside each gap between neighbouring boundaries.
        for (std::size_t i = 1; i < d.boundaries.size(); ++i) {
            double m = midpoint(d.boundaries[i - 1], d.boundaries[i]);
            if (m > d.boundaries[i - 1] && m < d.boundaries[i]) probes.insert(m);
        }
        if (probes.empty()) probes.insert(0.0);
        for (double p : probes) d.values.push_back(Value::number(p, type_));
        return d;
    }

private:
    double midpoint(double lo, double hi) const {
        double m = (lo + hi) / 2;
        return is_integral(type_) ? std::floor(m) : m;
    }

    TypeRef type_;
    std::vector<Value> strings_;
    std::set<double> bounds_;
    std::set<double> interior_;
};

// Constants a literal expression compares `var` against.
void literal_constants(const ExprPtr& e, const std::string& var, DomainBuilder& out) {
    if (!e) return;
    if (e->kind == Expr::Kind::Cmp && e->operands.size() == 2) {
        const auto& a = e->operands[0];
        const auto& b = e->operands[1];
        if (a->kind == Expr::Kind::Var && a->name == var && b->kind == Expr::Kind::Literal) out.add_constant(b->literal);
        if (b->kind == Expr::Kind::Var && b->name == var && a->kind == Expr::Kind::Literal) out.add_constant(a->literal);
    }
    for (const auto& op : e->operands) literal_constants(op, var, out);
}

}  // namespace

Domain column_domain(const DecisionTable& table, std::size_t column) {
    const auto& in = table.inputs.at(column);
    DomainBuilder b(in.type_ref);
    for (const auto& rule : table.rules) {
        if (column < rule.input_entries.size()) b.add_test(rule.input_entries[column]);
    }
    return b.build(in.label);
}

Domain domain_of(const DmnModel& model, std::string_view input) {
    const auto* ui = model.find_input(input);
    if (!ui) throw UnknownInput("unknown input '" + std::string(input) + "'");
    DomainBuilder b(ui->type_ref);
    for (const auto& d : model.decisions) {
        for (std::size_t c = 0; c < d.table.inputs.size(); ++c) {
            const auto& in = d.table.inputs[c];
            if (in.source != InputSource::User || in.normalized_name != ui->normalized_name) continue;
            for (const auto& rule : d.table.rules) {
                if (c < rule.input_entries.size()) b.add_test(rule.input_entries[c]);
            }
        }
    }
    for (const auto& l : model.literal_expressions) literal_constants(l.expression, ui->normalized_name, b);
    return b.build(ui->label);
}

std::vector<std::string> required_inputs(const DmnModel& model, std::string_view element) {
    std::vector<std::string> out;
    std::set<std::string> seen_inputs;
    std::set<std::string> visiting;
    auto add = [&](const std::string& name) {
        if (seen_inputs.insert(name).second) out.push_back(name);
    };
    std::function<void(const std::string&)> visit = [&](const std::string& name) {
        if (!visiting.insert(name).second) return;
        if (const auto* d = model.find_decision(name)) {
            for (const auto& in : d->table.inputs) {
                if (in.source == InputSource::User) add(in.normalized_name);
                else visit(in.supplier);
            }
        } else if (const auto* l = model.find_literal(name)) {
            std::set<std::string> suppliers;
            for (const auto* r : model.requirements_of(name)) suppliers.insert(r->supplier);
            for (const auto& var : free_variables(l->expression)) {
                if (suppliers.count(var)) visit(var);
                else if (model.find_input(var)) add(var);
            }
        }
    };
    visit(normalize_name(element));
    return out;
}

std::vector<Overlap> detect_overlaps(const DecisionTable& table, const std::vector<Domain>& domains) {
    std::vector<Overlap> out;
    const auto& rules = table.rules;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        for (std::size_t j = i + 1; j < rules.size(); ++j) {
            Assignment witness;
            bool overlap = true;
            for (std::size_t c = 0; c < table.inputs.size() && overlap; ++c) {
                const auto& a = rules[i].input_entries.at(c);
                const auto& b = rules[j].input_entries.at(c);
                overlap = false;
                for (const auto& v : domains.at(c).values) {
                    if (a.accepts(v) && b.accepts(v)) {
                        witness[table.inputs[c].normalized_name] = v;
                        overlap = true;
                        break;
                    }
                }
            }
            if (overlap) out.push_back({rules[i].number, rules[j].number, std::move(witness)});
        }
    }
    return out;
}

std::vector<DecisionOverlap> detect_model_overlaps(const DmnModel& model) {
    std::vector<DecisionOverlap> out;
    for (const auto& d : model.decisions) {
        std::vector<Domain> domains;
        for (std::size_t c = 0; c < d.table.inputs.size(); ++c) {
            const auto& in = d.table.inputs[c];
            try {
                domains.push_back(in.source == InputSource::User ? domain_of(model, in.normalized_name)
                                                                 : column_domain(d.table, c));
            } catch (const EmptyDomain&) {
                // Only wildcards in this column: any single value stands for all.
                domains.push_back({Domain::Kind::Enumerated, {Value::string("")}, {}});
            }
        }
        for (auto& o : detect_overlaps(d.table, domains)) out.push_back({d.normalized_name, std::move(o)});
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kTableLimit = 200000;

std::string outcome_string(const DmnModel& model, const std::string& decision, const Assignment& a) {
    try {
        return "v:" + evaluate_drd(model, decision, a).value.key();
    } catch (const NoRuleMatched& e) {
        return "e:" + e.code();
    } catch (const MultipleRulesMatched& e) {
        return "e:" + e.code();
    }
}

}  // namespace

// Outcome ids for every point of the product of the required inputs'
// domains, indexed in mixed radix (first input varies slowest).
struct RelevanceEngine::Table {
    std::vector<std::string> dims;
    std::vector<const Domain*> domains;
    std::vector<std::size_t> stride;
    std::vector<int> outcome;  // empty when the product exceeds kTableLimit

    int dim_of(const std::string& name) const {
        auto it = std::find(dims.begin(), dims.end(), name);
        return it == dims.end() ? -1 : static_cast<int>(it - dims.begin());
    }
};

RelevanceEngine::RelevanceEngine(const DmnModel& model) : model_(model) {}
RelevanceEngine::~RelevanceEngine() = default;

const Domain& RelevanceEngine::domain(std::string_view input) const {
    auto key = normalize_name(input);
    {
        std::lock_guard lock(mutex_);
        if (auto it = domains_.find(key); it != domains_.end()) return it->second;
    }
    Domain d = domain_of(model_, key);
    std::lock_guard lock(mutex_);
    return domains_.emplace(key, std::move(d)).first->second;
}

const std::vector<std::string>& RelevanceEngine::required(std::string_view decision) const {
    auto key = normalize_name(decision);
    std::lock_guard lock(mutex_);
    auto it = required_.find(key);
    if (it == required_.end()) it = required_.emplace(key, required_inputs(model_, key)).first;
    return it->second;
}

RelevanceEngine::Table& RelevanceEngine::table_for(const std::string& decision) const {
    {
        std::lock_guard lock(mutex_);
        if (auto it = tables_.find(decision); it != tables_.end()) return *it->second;
    }
    auto t = std::make_unique<Table>();
    t->dims = required(decision);
    std::size_t size = 1;
    for (const auto& name : t->dims) t->domains.push_back(&domain(name));
    t->stride.assign(t->dims.size(), 1);
    for (std::size_t i = t->dims.size(); i-- > 0;) {
        t->stride[i] = size;
        size *= t->domains[i]->values.size();
        if (size > kTableLimit) break;
    }
    if (size <= kTableLimit) {
        std::map<std::string, int> ids;
        t->outcome.resize(size);
        Assignment a;
        for (std::size_t index = 0; index < size; ++index) {
            for (std::size_t i = 0; i < t->dims.size(); ++i) {
                a[t->dims[i]] = t->domains[i]->values[(index / t->stride[i]) % t->domains[i]->values.size()];
            }
            auto o = outcome_string(model_, decision, a);
            t->outcome[index] = ids.emplace(o, static_cast<int>(ids.size())).first->second;
        }
    }
    std::lock_guard lock(mutex_);
    return *tables_.emplace(decision, std::move(t)).first->second;
}

std::string RelevanceEngine::outcome_of(const std::string& decision, const Assignment& complete) const {
    auto key = decision + "|" + assignment_key(complete);
    {
        std::lock_guard lock(mutex_);
        if (auto it = outcomes_.find(key); it != outcomes_.end()) return it->second;
    }
    auto o = outcome_string(model_, decision, complete);
    std::lock_guard lock(mutex_);
    outcomes_.emplace(key, o);
    return o;
}

bool RelevanceEngine::slow_query(const std::string& decision, const std::string& input,
                                 const Assignment& partial) const {
    std::vector<std::string> free;
    for (const auto& name : required(decision)) {
        if (name != input && !partial.count(name)) free.push_back(name);
    }
    const auto& target = domain(input).values;
    std::vector<std::size_t> digit(free.size(), 0);
    Assignment a = partial;
    while (true) {
        for (std::size_t i = 0; i < free.size(); ++i) a[free[i]] = domain(free[i]).values[digit[i]];
        std::string first;
        for (std::size_t k = 0; k < target.size(); ++k) {
            a[input] = target[k];
            auto o = outcome_of(decision, a);
            if (k == 0) first = o;
            else if (o != first) return true;
        }
        std::size_t i = free.size();
        while (i > 0) {
            --i;
            if (++digit[i] < domain(free[i]).values.size()) break;
            digit[i] = 0;
            if (i == 0) return false;
        }
        if (free.empty()) return false;
    }
}

bool RelevanceEngine::is_necessary(std::string_view decision_name, std::string_view input_name,
                                   const Assignment& given) const {
    auto decision = normalize_name(decision_name);
    auto input = normalize_name(input_name);
    if (!model_.has_element(decision)) throw UnresolvedReference("unknown decision '" + decision + "'");
    Assignment partial = given;
    partial.erase(input);

    const auto& dims = required(decision);
    if (std::find(dims.begin(), dims.end(), input) == dims.end()) return false;
    if (domain(input).values.size() < 2) return false;

    auto memo_key = decision + "|" + input + "|" + assignment_key(partial);
    {
        std::lock_guard lock(mutex_);
        if (auto it = memo_.find(memo_key); it != memo_.end()) return it->second;
    }

    const auto& t = table_for(decision);
    bool fast = !t.outcome.empty();
    std::size_t base = 0;
    for (const auto& [name, value] : partial) {
        int d = fast ? t.dim_of(name) : -1;
        int idx = d >= 0 ? t.domains[d]->index_of(value) : -1;
        if (idx < 0) {
            fast = false;
            break;
        }
        base += static_cast<std::size_t>(idx) * t.stride[d];
    }

    bool result = false;
    if (!fast) {
        result = slow_query(decision, input, partial);
    } else {
        std::vector<int> free;
        for (std::size_t i = 0; i < t.dims.size(); ++i) {
            if (t.dims[i] != input && !partial.count(t.dims[i])) free.push_back(static_cast<int>(i));
        }
        int target = t.dim_of(input);
        std::size_t target_size = t.domains[target]->values.size();
        std::vector<std::size_t> digit(free.size(), 0);
        bool more = true;
        while (more && !result) {
            std::size_t index = base;
            for (std::size_t i = 0; i < free.size(); ++i) index += digit[i] * t.stride[free[i]];
            int first = t.outcome[index];
            for (std::size_t k = 1; k < target_size && !result; ++k) {
                result = t.outcome[index + k * t.stride[target]] != first;
            }
            more = false;
            for (std::size_t i = free.size(); i-- > 0;) {
                if (++digit[i] < t.domains[free[i]]->values.size()) {
                    more = true;
                    break;
                }
                digit[i] = 0;
            }
        }
    }

    std::lock_guard lock(mutex_);
    memo_.emplace(memo_key, result);
    return result;
}

Assignment RelevanceEngine::complete(std::string_view decision, const Assignment& partial) const {
    Assignment a = partial;
    for (const auto& name : required(decision)) {
        if (!a.count(name)) a[name] = domain(name).values.front();
    }
    return a;
}

bool is_necessary(const DmnModel& model, std::string_view decision, std::string_view input,
                  const Assignment& partial) {
    return RelevanceEngine(model).is_necessary(decision, input, partial);
}

}  // namespace dmnbot
