#include "dmnbot/dmn_model.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "dmnbot/errors.hpp"

namespace dmnbot {

namespace pt = boost::property_tree;

const Decision* DmnModel::find_decision(std::string_view name) const {
    auto key = normalize_name(name);
    for (const auto& d : decisions) {
        if (d.normalized_name == key) return &d;
    }
    return nullptr;
}

const LiteralExpression* DmnModel::find_literal(std::string_view name) const {
    auto key = normalize_name(name);
    for (const auto& l : literal_expressions) {
        if (l.normalized_name == key) return &l;
    }
    return nullptr;
}

const UserInput* DmnModel::find_input(std::string_view name) const {
    auto key = normalize_name(name);
    for (const auto& i : inputs) {
        if (i.normalized_name == key) return &i;
    }
    return nullptr;
}

std::vector<const Requirement*> DmnModel::requirements_of(std::string_view consumer) const {
    std::vector<const Requirement*> out;
    for (const auto& r : requirements) {
        if (r.consumer == consumer) out.push_back(&r);
    }
    return out;
}

bool DmnModel::has_element(std::string_view name) const {
    return find_decision(name) != nullptr || find_literal(name) != nullptr;
}

std::string format_diagnostic(const Diagnostic& d) {
    std::string out = d.severity == Severity::Error ? "error" : "warning";
    out += " [" + d.code + "]";
    if (!d.location.element.empty()) {
        out += " " + d.location.element;
        if (d.location.rule) out += " rule " + std::to_string(d.location.rule);
        if (d.location.column) out += " column " + std::to_string(d.location.column);
    }
    out += ": " + d.message;
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Linking

namespace {

// Names under which a supplier may be referenced by a consuming column.
std::set<std::string> supplier_aliases(const DmnModel& m, const Requirement& r) {
    std::set<std::string> names{r.supplier};
    if (const auto* d = m.find_decision(r.supplier)) {
        names.insert(normalize_name(d->id));
        if (!d->table.output.name.empty()) names.insert(normalize_name(d->table.output.name));
        if (!d->table.output.label.empty()) names.insert(normalize_name(d->table.output.label));
    } else if (const auto* l = m.find_literal(r.supplier)) {
        names.insert(normalize_name(l->id));
    }
    names.erase("");
    return names;
}

const Requirement* supplier_for(const DmnModel& m, std::string_view consumer, const std::string& key) {
    for (const auto* r : m.requirements_of(consumer)) {
        if (supplier_aliases(m, *r).count(key)) return r;
    }
    return nullptr;
}

std::optional<TypeRef> literal_var_type(const ExprPtr& e, const std::string& var) {
    if (e->kind == Expr::Kind::Cmp && e->operands.size() == 2) {
        const auto& a = e->operands[0];
        const auto& b = e->operands[1];
        if (a->kind == Expr::Kind::Var && a->name == var && b->kind == Expr::Kind::Literal) return b->literal.type();
        if (b->kind == Expr::Kind::Var && b->name == var && a->kind == Expr::Kind::Literal) return a->literal.type();
    }
    for (const auto& op : e->operands) {
        if (auto t = literal_var_type(op, var)) return t;
    }
    return std::nullopt;
}

}  // namespace

void link_model(DmnModel& model) {
    for (auto& d : model.decisions) {
        for (auto& in : d.table.inputs) {
            const Requirement* r = nullptr;
            auto by_text = normalize_name(in.expression_text);
            if (!by_text.empty()) r = supplier_for(model, d.normalized_name, by_text);
            if (!r) r = supplier_for(model, d.normalized_name, in.normalized_name);
            if (r) {
                in.source = r->supplier_kind == ElementKind::Decision ? InputSource::Decision : InputSource::Literal;
                in.supplier = r->supplier;
            } else {
                in.source = InputSource::User;
                in.supplier.clear();
            }
        }
    }

    model.inputs.clear();
    for (const auto& d : model.decisions) {
        for (const auto& in : d.table.inputs) {
            if (in.source != InputSource::User || model.find_input(in.normalized_name)) continue;
            model.inputs.push_back({in.normalized_name, in.label, in.type_ref, d.normalized_name});
        }
    }
    for (const auto& l : model.literal_expressions) {
        if (!l.expression) continue;
        for (const auto& var : free_variables(l.expression)) {
            if (supplier_for(model, l.normalized_name, var) || model.find_input(var)) continue;
            if (model.has_element(var)) continue;  // reported as UNRESOLVED by validation
            auto t = literal_var_type(l.expression, var).value_or(TypeRef::String);
            if (t == TypeRef::Integer || t == TypeRef::Long) t = TypeRef::Double;
            model.inputs.push_back({var, var, t, ""});
        }
    }

    std::set<std::string> supplied;
    for (const auto& r : model.requirements) supplied.insert(r.supplier);
    std::vector<std::string> roots;
    for (const auto& d : model.decisions) {
        if (!supplied.count(d.normalized_name)) roots.push_back(d.normalized_name);
    }
    model.main_decision = roots.size() == 1 ? roots.front() : std::string{};
}

// ---------------------------------------------------------------------------
// XML parsing

namespace {

std::string local_name(const std::string& key) {
    auto colon = key.find(':');
    return colon == std::string::npos ? key : key.substr(colon + 1);
}

std::string attr(const pt::ptree& node, const std::string& name, const std::string& fallback = "") {
    if (auto attrs = node.get_child_optional("<xmlattr>")) {
        for (const auto& [key, value] : *attrs) {
            if (local_name(key) == name) return value.data();
        }
    }
    return fallback;
}

std::string trimmed(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

const pt::ptree* child(const pt::ptree& node, const std::string& name) {
    for (const auto& [key, value] : node) {
        if (local_name(key) == name) return &value;
    }
    return nullptr;
}

std::string child_text(const pt::ptree& node, const std::string& name) {
    const auto* c = child(node, name);
    if (!c) return "";
    if (const auto* text = child(*c, "text")) return trimmed(text->data());
    return trimmed(c->data());
}

bool is_meta(const std::string& key) { return !key.empty() && key.front() == '<'; }

struct PendingEdge {
    std::string consumer;  // normalized
    std::string href;
};

class DocumentParser {
public:
    DmnModel parse(std::string_view xml) {
        pt::ptree tree;
        try {
            std::istringstream in{std::string(xml)};
            pt::read_xml(in, tree, pt::xml_parser::no_comments);
        } catch (const pt::xml_parser_error& e) {
            throw XmlError(std::string("malformed XML: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
        }
        const pt::ptree* defs = nullptr;
        for (const auto& [key, value] : tree) {
            if (local_name(key) == "definitions") defs = &value;
        }
        if (!defs) throw XmlError("missing <definitions> root element");

        model_.id = attr(*defs, "id");
        model_.name = attr(*defs, "name", model_.id);
        for (const auto& [key, node] : *defs) {
            if (is_meta(key)) continue;
            auto name = local_name(key);
            if (name == "decision") parse_decision(node);
            else if (name == "businessKnowledgeModel" || name == "decisionService") {
                warn("UNKNOWN_ELEMENT", "<" + name + "> is not supported and was ignored", {});
            } else if (!kIgnored.count(name)) {
                warn("UNKNOWN_ELEMENT", "unknown element <" + name + "> ignored", {});
            }
        }
        resolve_edges();
        link_model(model_);
        return std::move(model_);
    }

private:
    inline static const std::set<std::string> kIgnored{
        "DMNDI", "extensionElements", "description", "inputData", "itemDefinition",
        "textAnnotation", "association", "knowledgeSource", "import"};

    void warn(std::string code, std::string message, Location loc) {
        model_.parse_notes.push_back({Severity::Warning, std::move(code), std::move(message), std::move(loc)});
    }

    void parse_decision(const pt::ptree& node) {
        std::string id = attr(node, "id");
        std::string name = attr(node, "name", id);
        std::string norm = normalize_name(name);
        if (id.empty()) id = norm;
        ids_[id] = norm;

        const pt::ptree* table = nullptr;
        const pt::ptree* literal = nullptr;
        std::string variable_type;
        for (const auto& [key, c] : node) {
            if (is_meta(key)) continue;
            auto cname = local_name(key);
            if (cname == "informationRequirement") {
                for (const auto& [rk, rn] : c) {
                    if (is_meta(rk)) continue;
                    auto rname = local_name(rk);
                    if (rname == "requiredDecision") edges_.push_back({norm, attr(rn, "href")});
                    // requiredInput edges name user-supplied data; columns carry that already.
                }
            } else if (cname == "decisionTable") {
                table = &c;
            } else if (cname == "literalExpression") {
                literal = &c;
            } else if (cname == "variable") {
                variable_type = attr(c, "typeRef");
            } else if (cname == "knowledgeRequirement" || cname == "authorityRequirement") {
                warn("UNKNOWN_ELEMENT", "<" + cname + "> is not supported and was ignored", {name});
            } else if (cname != "description" && cname != "extensionElements" && cname != "question" &&
                       cname != "allowedAnswers") {
                warn("UNKNOWN_ELEMENT", "unknown element <" + cname + "> ignored", {name});
            }
        }
        if (table && literal) throw UnsupportedFeature("decision '" + name + "' has both a table and a literal expression");
        if (!table && !literal) throw UnsupportedFeature("decision '" + name + "' has no supported decision logic");

        if (literal) {
            LiteralExpression le;
            le.id = id;
            le.name = name;
            le.normalized_name = norm;
            std::string type_text = attr(*literal, "typeRef", variable_type);
            le.result_type = type_text.empty() ? TypeRef::String : parse_type(type_text, name);
            std::string text = child_text(node, "literalExpression");
            try {
                le.expression = parse_expression(text);
            } catch (const ParseError& e) {
                throw ParseError("literal expression '" + name + "': " + e.what());
            }
            model_.literal_expressions.push_back(std::move(le));
            return;
        }

        Decision d;
        d.id = id;
        d.name = name;
        d.normalized_name = norm;
        d.table = parse_table(*table, name);
        model_.decisions.push_back(std::move(d));
    }

    TypeRef parse_type(const std::string& text, const std::string& where) {
        auto t = type_ref_from_string(text);
        if (!t) throw UnsupportedFeature("unsupported typeRef '" + text + "' in '" + where + "'");
        return *t;
    }

    DecisionTable parse_table(const pt::ptree& node, const std::string& decision) {
        DecisionTable table;
        std::string policy = attr(node, "hitPolicy", "UNIQUE");
        if (policy != "UNIQUE") {
            throw UnsupportedFeature("decision '" + decision + "' uses hit policy " + policy + "; only UNIQUE is supported");
        }
        if (!attr(node, "aggregation").empty()) {
            throw UnsupportedFeature("decision '" + decision + "' uses an aggregation");
        }
        std::vector<const pt::ptree*> outputs;
        std::vector<const pt::ptree*> rules;
        for (const auto& [key, c] : node) {
            if (is_meta(key)) continue;
            auto cname = local_name(key);
            if (cname == "input") {
                InputClause in;
                const auto* expr = child(c, "inputExpression");
                in.expression_text = expr ? child_text(c, "inputExpression") : "";
                in.label = attr(c, "label", in.expression_text);
                if (in.label.empty()) in.label = attr(c, "id");
                in.normalized_name = normalize_name(in.label);
                std::string type_text = expr ? attr(*expr, "typeRef", "string") : "string";
                in.type_ref = parse_type(type_text, decision);
                table.inputs.push_back(std::move(in));
            } else if (cname == "output") {
                outputs.push_back(&c);
            } else if (cname == "rule") {
                rules.push_back(&c);
            } else if (cname != "annotation" && cname != "description" && cname != "extensionElements") {
                warn("UNKNOWN_ELEMENT", "unknown element <" + cname + "> in decision table ignored", {decision});
            }
        }
        if (outputs.size() != 1) {
            throw UnsupportedFeature("decision '" + decision + "' has " + std::to_string(outputs.size()) +
                                     " outputs; exactly one is supported");
        }
        const auto& out = *outputs.front();
        table.output.name = attr(out, "name");
        table.output.label = attr(out, "label", table.output.name);
        table.output.type_ref = parse_type(attr(out, "typeRef", "string"), decision);

        int position = 0;
        for (const auto* rn : rules) {
            ++position;
            Rule rule;
            std::string number = attr(*rn, "number");
            rule.number = position;
            if (!number.empty()) {
                try {
                    rule.number = std::stoi(number);
                } catch (const std::exception&) {
                    throw ParseError("rule number '" + number + "' is not an integer", position, 0);
                }
            }
            int column = 0;
            bool has_output = false;
            for (const auto& [key, c] : *rn) {
                if (is_meta(key)) continue;
                auto cname = local_name(key);
                if (cname == "inputEntry") {
                    ++column;
                    std::string text;
                    if (const auto* t = child(c, "text")) text = trimmed(t->data());
                    TypeRef type = column <= static_cast<int>(table.inputs.size())
                                       ? table.inputs[column - 1].type_ref
                                       : TypeRef::String;
                    rule.input_entries.push_back(parse_unary_test(text, type, rule.number, column));
                } else if (cname == "outputEntry") {
                    if (has_output) {
                        throw UnsupportedFeature("rule " + std::to_string(rule.number) + " of '" + decision +
                                                 "' has several output entries");
                    }
                    has_output = true;
                    std::string text;
                    if (const auto* t = child(c, "text")) text = trimmed(t->data());
                    rule.output_entry = parse_output(text, table.output.type_ref, decision, rule.number);
                }
            }
            if (!has_output) throw ParseError("rule " + std::to_string(rule.number) + " of '" + decision + "' has no output entry", rule.number, 0);
            table.rules.push_back(std::move(rule));
        }
        return table;
    }

    Value parse_output(const std::string& text, TypeRef type, const std::string& decision, int rule) {
        auto v = parse_literal(text);
        if (!v) {
            if (type == TypeRef::String && !text.empty()) return Value::string(text);
            throw ParseError("output entry '" + text + "' of '" + decision + "' is not a literal", rule, 0);
        }
        if (!v->conforms_to(type)) {
            throw TypeMismatch("output entry " + text + " of '" + decision + "' rule " + std::to_string(rule) +
                               " does not match type " + std::string(to_string(type)));
        }
        return v->coerced_to(type);
    }

    void resolve_edges() {
        for (const auto& e : edges_) {
            std::string target = e.href;
            if (!target.empty() && target.front() == '#') target.erase(0, 1);
            std::string norm;
            if (auto it = ids_.find(target); it != ids_.end()) norm = it->second;
            else if (model_.has_element(target)) norm = normalize_name(target);
            else throw UnresolvedReference("'" + e.consumer + "' requires unknown element '" + e.href + "'");
            ElementKind kind = model_.find_decision(norm) ? ElementKind::Decision : ElementKind::Literal;
            model_.requirements.push_back({e.consumer, norm, kind});
        }
        std::sort(model_.requirements.begin(), model_.requirements.end(), [](const auto& a, const auto& b) {
            return std::tie(a.consumer, a.supplier) < std::tie(b.consumer, b.supplier);
        });
        model_.requirements.erase(std::unique(model_.requirements.begin(), model_.requirements.end()),
                                  model_.requirements.end());
    }

    DmnModel model_;
    std::map<std::string, std::string> ids_;
    std::vector<PendingEdge> edges_;
};

}  // namespace

DmnModel parse_dmn_document(std::string_view xml_text) { return DocumentParser().parse(xml_text); }

DmnModel parse_dmn(std::string_view xml_text) {
    DmnModel model = parse_dmn_document(xml_text);
    for (const auto& d : validate_model(model)) {
        if (d.severity != Severity::Error) continue;
        auto text = format_diagnostic(d);
        if (d.code == "CYCLE") throw CyclicDependency(text);
        if (d.code == "UNRESOLVED") throw UnresolvedReference(text);
        if (d.code == "TYPE") throw TypeMismatch(text);
        throw ModelError(d.code, text);
    }
    return model;
}

DmnModel load_dmn_file(const std::filesystem::path& path) { return parse_dmn(read_text_file(path)); }

// ---------------------------------------------------------------------------
// Validation

namespace {

class Validator {
public:
    explicit Validator(const DmnModel& m) : m_(m) {}

    std::vector<Diagnostic> run() {
        names();
        for (const auto& d : m_.decisions) table(d);
        literals();
        requirements();
        cycles();
        main_decision();
        for (const auto& n : m_.parse_notes) out_.push_back(n);
        std::stable_sort(out_.begin(), out_.end(),
                         [](const Diagnostic& a, const Diagnostic& b) { return a.location < b.location; });
        return out_;
    }

private:
    void error(std::string code, std::string message, Location loc = {}) {
        out_.push_back({Severity::Error, std::move(code), std::move(message), std::move(loc)});
    }
    void warning(std::string code, std::string message, Location loc = {}) {
        out_.push_back({Severity::Warning, std::move(code), std::move(message), std::move(loc)});
    }

    void names() {
        std::map<std::string, std::string> seen;
        auto check = [&](const std::string& norm, const std::string& display) {
            if (norm.empty()) {
                error("NAME", "element '" + display + "' has an empty normalized name", {display});
                return;
            }
            auto [it, fresh] = seen.emplace(norm, display);
            if (!fresh) {
                error("NAME_COLLISION", "'" + display + "' and '" + it->second + "' both normalize to '" + norm + "'",
                      {display});
            }
        };
        for (const auto& d : m_.decisions) check(d.normalized_name, d.name);
        for (const auto& l : m_.literal_expressions) check(l.normalized_name, l.name);
        for (const auto& in : m_.inputs) {
            if (m_.has_element(in.normalized_name)) {
                error("NAME_COLLISION", "user input '" + in.label + "' has the same name as a decision element",
                      {in.owner.empty() ? in.label : in.owner});
            }
        }
    }

    void table(const Decision& d) {
        const auto& t = d.table;
        std::set<std::string> columns;
        for (std::size_t c = 0; c < t.inputs.size(); ++c) {
            const auto& in = t.inputs[c];
            Location loc{d.name, 0, static_cast<int>(c + 1)};
            if (!columns.insert(in.normalized_name).second) {
                error("NAME_COLLISION", "duplicate input column '" + in.label + "'", loc);
            }
            if (in.source == InputSource::User) {
                const auto* ui = m_.find_input(in.normalized_name);
                if (ui && ui->type_ref != in.type_ref) {
                    error("INPUT_TYPE_CONFLICT",
                          "input '" + in.label + "' is " + std::string(to_string(in.type_ref)) + " here but " +
                              std::string(to_string(ui->type_ref)) + " in '" + ui->owner + "'",
                          loc);
                }
            } else {
                auto supplied = supplier_type(in.supplier);
                if (supplied && !compatible(*supplied, in.type_ref)) {
                    error("TYPE",
                          "column '" + in.label + "' is " + std::string(to_string(in.type_ref)) + " but '" +
                              in.supplier + "' produces " + std::string(to_string(*supplied)),
                          loc);
                }
            }
        }
        if (t.rules.empty()) warning("EMPTY_TABLE", "decision table has no rules", {d.name});
        for (std::size_t r = 0; r < t.rules.size(); ++r) {
            const auto& rule = t.rules[r];
            if (rule.number != static_cast<int>(r + 1)) {
                error("RULE_NUMBERING",
                      "rule at position " + std::to_string(r + 1) + " is numbered " + std::to_string(rule.number),
                      {d.name, static_cast<int>(r + 1), 0});
            }
            if (rule.input_entries.size() != t.inputs.size()) {
                error("ARITY",
                      "rule has " + std::to_string(rule.input_entries.size()) + " input entries, table has " +
                          std::to_string(t.inputs.size()) + " inputs",
                      {d.name, rule.number, 0});
            }
            for (std::size_t c = 0; c < rule.input_entries.size() && c < t.inputs.size(); ++c) {
                check_test(rule.input_entries[c], t.inputs[c].type_ref, {d.name, rule.number, static_cast<int>(c + 1)});
            }
            if (!rule.output_entry.conforms_to(t.output.type_ref)) {
                error("TYPE", "output " + rule.output_entry.literal() + " is not " + std::string(to_string(t.output.type_ref)),
                      {d.name, rule.number, 0});
            }
        }
    }

    void check_test(const UnaryTest& test, TypeRef type, const Location& loc) {
        switch (test.kind) {
            case UnaryTest::Kind::Eq:
                if (!test.value.conforms_to(type)) {
                    error("TYPE", "constant " + test.value.literal() + " does not match column type " + std::string(to_string(type)), loc);
                }
                break;
            case UnaryTest::Kind::Compare:
                if (!is_numeric(type)) error("TYPE", "comparison on a non-numeric column", loc);
                break;
            case UnaryTest::Kind::Interval:
                if (!is_numeric(type)) error("TYPE", "interval on a non-numeric column", loc);
                if (test.lo > test.hi) error("TYPE", "interval lower bound exceeds upper bound", loc);
                break;
            case UnaryTest::Kind::AnyOf:
            case UnaryTest::Kind::Not:
                for (const auto& item : test.items) check_test(item, type, loc);
                break;
            case UnaryTest::Kind::Wildcard: break;
        }
    }

    static bool compatible(TypeRef a, TypeRef b) { return a == b || (is_numeric(a) && is_numeric(b)); }

    std::optional<TypeRef> supplier_type(const std::string& name) const {
        if (const auto* d = m_.find_decision(name)) return d->table.output.type_ref;
        if (const auto* l = m_.find_literal(name)) return l->result_type;
        return std::nullopt;
    }

    void literals() {
        for (const auto& l : m_.literal_expressions) {
            Location loc{l.name};
            if (!l.expression) {
                error("TYPE", "literal expression has no expression", loc);
                continue;
            }
            std::set<std::string> suppliers;
            for (const auto* r : m_.requirements_of(l.normalized_name)) suppliers.insert(r->supplier);
            for (const auto& var : free_variables(l.expression)) {
                if (suppliers.count(var) || m_.find_input(var)) continue;
                if (m_.has_element(var)) {
                    error("UNRESOLVED", "'" + var + "' is read without an information requirement", loc);
                } else {
                    error("UNRESOLVED", "unknown variable '" + var + "'", loc);
                }
            }
            try {
                auto t = infer_type(l.expression, [&](const std::string& var) -> std::optional<TypeRef> {
                    if (suppliers.count(var)) return supplier_type(var);
                    if (const auto* ui = m_.find_input(var)) return ui->type_ref;
                    return std::nullopt;
                });
                if (t && !compatible(*t, l.result_type)) {
                    error("TYPE", "expression yields " + std::string(to_string(*t)) + " but is declared " +
                                      std::string(to_string(l.result_type)), loc);
                }
            } catch (const TypeError& e) {
                error("TYPE", e.what(), loc);
            }
        }
    }

    void requirements() {
        for (const auto& r : m_.requirements) {
            if (!m_.has_element(r.consumer) || !m_.has_element(r.supplier)) {
                error("UNRESOLVED", "requirement " + r.consumer + " -> " + r.supplier + " names an unknown element",
                      {r.consumer});
                continue;
            }
            bool used = false;
            if (const auto* d = m_.find_decision(r.consumer)) {
                for (const auto& in : d->table.inputs) used = used || in.supplier == r.supplier;
            } else if (const auto* l = m_.find_literal(r.consumer)) {
                for (const auto& var : free_variables(l->expression)) used = used || var == r.supplier;
            }
            if (!used) warning("UNUSED_REQUIREMENT", "'" + r.supplier + "' is required but never read", {r.consumer});
        }
    }

    void cycles() {
        std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
        std::set<std::string> reported;
        std::function<void(const std::string&, std::vector<std::string>&)> visit =
            [&](const std::string& node, std::vector<std::string>& stack) {
                state[node] = 1;
                stack.push_back(node);
                for (const auto* r : m_.requirements_of(node)) {
                    int s = state[r->supplier];
                    if (s == 1) {
                        auto it = std::find(stack.begin(), stack.end(), r->supplier);
                        std::string path;
                        for (auto p = it; p != stack.end(); ++p) path += *p + " -> ";
                        path += r->supplier;
                        if (reported.insert(r->supplier).second) error("CYCLE", "requirement cycle " + path, {r->supplier});
                    } else if (s == 0) {
                        visit(r->supplier, stack);
                    }
                }
                stack.pop_back();
                state[node] = 2;
            };
        std::vector<std::string> all;
        for (const auto& d : m_.decisions) all.push_back(d.normalized_name);
        for (const auto& l : m_.literal_expressions) all.push_back(l.normalized_name);
        for (const auto& n : all) {
            std::vector<std::string> stack;
            if (state[n] == 0) visit(n, stack);
        }
        has_cycle_ = !reported.empty();
    }

    void main_decision() {
        if (m_.decisions.empty()) {
            error("MAIN_DECISION", "model has no decision table");
            return;
        }
        if (!m_.main_decision.empty()) return;
        if (has_cycle_) return;
        error("MAIN_DECISION", "main decision not unique: several decisions are required by no other element");
    }

    const DmnModel& m_;
    std::vector<Diagnostic> out_;
    bool has_cycle_ = false;
};

}  // namespace

std::vector<Diagnostic> validate_model(const DmnModel& model) { return Validator(model).run(); }

// ---------------------------------------------------------------------------
// Canonical serializer

namespace {

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string element_id(const DmnModel& m, const std::string& norm) {
    if (const auto* d = m.find_decision(norm)) return d->id.empty() ? norm : d->id;
    if (const auto* l = m.find_literal(norm)) return l->id.empty() ? norm : l->id;
    return norm;
}

void write_requirements(std::ostream& os, const DmnModel& m, const std::string& consumer) {
    for (const auto* r : m.requirements_of(consumer)) {
        os << "    <informationRequirement>\n"
           << "      <requiredDecision href=\"#" << xml_escape(element_id(m, r->supplier)) << "\"/>\n"
           << "    </informationRequirement>\n";
    }
}

}  // namespace

std::string serialize_dmn(const DmnModel& model) {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<definitions xmlns=\"https://www.omg.org/spec/DMN/20191111/MODEL/\" id=\"" << xml_escape(model.id)
       << "\" name=\"" << xml_escape(model.name) << "\">\n";
    for (const auto& d : model.decisions) {
        os << "  <decision id=\"" << xml_escape(d.id) << "\" name=\"" << xml_escape(d.name) << "\">\n";
        write_requirements(os, model, d.normalized_name);
        os << "    <decisionTable hitPolicy=\"UNIQUE\">\n";
        for (const auto& in : d.table.inputs) {
            os << "      <input label=\"" << xml_escape(in.label) << "\">\n"
               << "        <inputExpression typeRef=\"" << to_string(in.type_ref) << "\">\n"
               << "          <text>" << xml_escape(in.expression_text) << "</text>\n"
               << "        </inputExpression>\n"
               << "      </input>\n";
        }
        os << "      <output label=\"" << xml_escape(d.table.output.label) << "\" name=\""
           << xml_escape(d.table.output.name) << "\" typeRef=\"" << to_string(d.table.output.type_ref) << "\"/>\n";
        for (const auto& r : d.table.rules) {
            os << "      <rule number=\"" << r.number << "\">\n";
            for (const auto& e : r.input_entries) {
                os << "        <inputEntry><text>" << xml_escape(print_unary_test(e)) << "</text></inputEntry>\n";
            }
            os << "        <outputEntry><text>" << xml_escape(r.output_entry.literal()) << "</text></outputEntry>\n"
               << "      </rule>\n";
        }
        os << "    </decisionTable>\n  </decision>\n";
    }
    for (const auto& l : model.literal_expressions) {
        os << "  <decision id=\"" << xml_escape(l.id) << "\" name=\"" << xml_escape(l.name) << "\">\n"
           << "    <variable name=\"" << xml_escape(l.name) << "\" typeRef=\"" << to_string(l.result_type) << "\"/>\n";
        write_requirements(os, model, l.normalized_name);
        os << "    <literalExpression>\n"
           << "      <text>" << xml_escape(l.expression ? print_expression(l.expression) : "") << "</text>\n"
           << "    </literalExpression>\n  </decision>\n";
    }
    os << "</definitions>\n";
    return os.str();
}

}  // namespace dmnbot
