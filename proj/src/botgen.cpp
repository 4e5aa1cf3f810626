#include "dmnbot/botgen.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "dmnbot/errors.hpp"
#include "dmnbot/nlu.hpp"
#include "dmnbot/relevance.hpp"

namespace dmnbot {

std::string_view to_string(EntityKind k) {
    switch (k) {
        case EntityKind::SystemNumber: return "system-number";
        case EntityKind::CustomEnum: return "custom-enum";
        case EntityKind::CustomBoolean: return "custom-boolean";
    }
    return "custom-enum";
}

std::string_view to_string(IntentKind k) {
    switch (k) {
        case IntentKind::Decision: return "decision";
        case IntentKind::Input: return "input";
        case IntentKind::Support: return "support";
        case IntentKind::Help: return "help";
    }
    return "support";
}

std::vector<std::pair<std::string, Value>> Entity::surfaces() const {
    std::vector<std::pair<std::string, Value>> out;
    for (const auto& e : entries) {
        out.emplace_back(e.reference.display(), e.reference);
        for (const auto& s : e.synonyms) out.emplace_back(s, e.reference);
    }
    return out;
}

const Parameter* Intent::find_parameter(std::string_view name) const {
    for (const auto& p : parameters) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

const Entity* AgentBundle::find_entity(std::string_view name) const {
    for (const auto& e : entities) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

const Intent* AgentBundle::find_intent(std::string_view name) const {
    for (const auto& i : intents) {
        if (i.name == name) return &i;
    }
    return nullptr;
}

const DecisionInfo* AgentBundle::find_decision(std::string_view name) const {
    auto key = normalize_name(name);
    for (const auto& d : decisions) {
        if (d.name == key) return &d;
    }
    return nullptr;
}

const InputInfo* AgentBundle::find_input(std::string_view name) const {
    auto it = inputs.find(normalize_name(name));
    return it == inputs.end() ? nullptr : &it->second;
}

bool operator==(const AgentBundle& a, const AgentBundle& b) {
    bool models = (a.model && b.model) ? *a.model == *b.model : a.model == b.model;
    return models && a.source_dmn == b.source_dmn && a.entities == b.entities && a.intents == b.intents &&
           a.customization == b.customization && a.seed == b.seed && a.max_phrases == b.max_phrases &&
           a.decisions == b.decisions && a.inputs == b.inputs && a.responses == b.responses && a.specs == b.specs;
}

std::string decision_context(std::string_view decision) { return std::string(decision) + "_decision"; }

std::string input_context(std::string_view decision, std::string_view input) {
    return std::string(decision) + "_" + std::string(input);
}

std::string awaiting_context(std::string_view input) { return "awaiting_" + std::string(input); }

// ---------------------------------------------------------------------------
// Entities

namespace {

std::vector<std::pair<std::string, std::string>> entity_names(const DmnModel& model) {
    std::vector<std::pair<std::string, std::string>> out;  // input -> entity
    std::set<std::string> taken;
    for (const auto& in : model.inputs) {
        if (is_numeric(in.type_ref)) {
            out.emplace_back(in.normalized_name, kNumberEntity);
            continue;
        }
        std::string name = "ent_" + in.normalized_name;
        if (in.type_ref == TypeRef::Boolean && !in.owner.empty()) name += "_" + in.owner;
        if (taken.count(name) && !in.owner.empty()) name += "_" + in.owner;
        while (taken.count(name)) name += "_";
        taken.insert(name);
        out.emplace_back(in.normalized_name, name);
    }
    return out;
}

}  // namespace

std::string entity_for_input(const DmnModel& model, std::string_view input) {
    auto key = normalize_name(input);
    for (const auto& [in, entity] : entity_names(model)) {
        if (in == key) return entity;
    }
    throw UnknownInput("unknown input '" + std::string(input) + "'");
}

std::vector<Entity> gen_entities(const DmnModel& model) {
    std::vector<Entity> out;
    bool number = false;
    auto names = entity_names(model);
    for (std::size_t i = 0; i < model.inputs.size(); ++i) {
        const auto& in = model.inputs[i];
        if (is_numeric(in.type_ref)) {
            number = true;
            continue;
        }
        Entity e;
        e.name = names[i].second;
        if (in.type_ref == TypeRef::Boolean) {
            auto label = fold_text(in.label);
            e.kind = EntityKind::CustomBoolean;
            e.entries.push_back({Value::boolean(true), {"yes", "ok", "correct", label, "has " + label}});
            e.entries.push_back({Value::boolean(false), {"no", "not " + label, "without " + label}});
        } else {
            e.kind = EntityKind::CustomEnum;
            for (const auto& v : domain_of(model, in.normalized_name).values) e.entries.push_back({v, {}});
        }
        out.push_back(std::move(e));
    }
    if (number) out.push_back({kNumberEntity, EntityKind::SystemNumber, {}});
    return out;
}

void apply_customization(const DmnModel& model, const Customization& c, std::vector<Entity>& entities) {
    for (const auto& [name, custom] : c.inputs) {
        const auto* in = model.find_input(name);
        if (!in || in->normalized_name != name) {
            throw CustomizationError("customization refers to unknown input '" + name + "'");
        }
        if (custom.synonyms.empty()) continue;
        if (is_numeric(in->type_ref)) {
            throw CustomizationError("input '" + name + "' is numeric; synonyms are not allowed");
        }
        auto entity_name = entity_for_input(model, name);
        auto it = std::find_if(entities.begin(), entities.end(), [&](const Entity& e) { return e.name == entity_name; });
        for (const auto& [reference, extra] : custom.synonyms) {
            auto entry = std::find_if(it->entries.begin(), it->entries.end(), [&](const EntityEntry& e) {
                return fold_text(e.reference.display()) == fold_text(reference);
            });
            if (entry == it->entries.end()) {
                throw CustomizationError("input '" + name + "' has no entry '" + reference + "'");
            }
            for (const auto& s : extra) {
                if (fold_text(s).empty()) throw CustomizationError("empty synonym for '" + reference + "'");
                bool dup = fold_text(s) == fold_text(entry->reference.display());
                for (const auto& existing : entry->synonyms) dup = dup || fold_text(existing) == fold_text(s);
                if (!dup) entry->synonyms.push_back(s);
            }
        }
    }
    static const std::set<std::string> kSupport = {kWelcomeIntent, kFallbackIntent, kHelpIntent, kCancelIntent,
                                                   kEndIntent};
    for (const auto& [intent, pool] : c.responses) {
        if (!kSupport.count(intent)) throw CustomizationError("responses for unknown support intent '" + intent + "'");
        if (pool.empty()) throw CustomizationError("empty response pool for '" + intent + "'");
    }
}

// ---------------------------------------------------------------------------
// Intents

namespace {

std::vector<Parameter> decision_parameters(const DmnModel& model, std::string_view decision) {
    std::vector<Parameter> out;
    for (const auto& name : required_inputs(model, decision)) {
        const auto* in = model.find_input(name);
        out.push_back({name, in->label, entity_for_input(model, name), in->type_ref, false});
    }
    return out;
}

const Decision& require_decision(const DmnModel& model, std::string_view decision) {
    const auto* d = model.find_decision(decision);
    if (!d) throw UnresolvedReference("unknown decision '" + std::string(decision) + "'");
    return *d;
}

}  // namespace

Intent gen_decision_intent(const DmnModel& model, std::string_view decision) {
    const auto& d = require_decision(model, decision);
    Intent intent;
    intent.name = d.normalized_name;
    intent.kind = IntentKind::Decision;
    intent.decision = d.normalized_name;
    intent.parameters = decision_parameters(model, d.normalized_name);
    intent.output_contexts = {{decision_context(d.normalized_name), kDecisionContextLifespan}};
    intent.action = "decide_or_ask";
    return intent;
}

std::vector<Intent> gen_input_intents(const DmnModel& model, std::string_view decision) {
    const auto& d = require_decision(model, decision);
    auto params = decision_parameters(model, d.normalized_name);
    std::vector<Intent> out;
    for (const auto& p : params) {
        Intent intent;
        intent.name = input_context(d.normalized_name, p.name);
        intent.kind = IntentKind::Input;
        intent.decision = d.normalized_name;
        intent.input = p.name;
        intent.parameters = params;
        for (auto& q : intent.parameters) q.required = q.name == p.name;
        intent.input_contexts = {decision_context(d.normalized_name), input_context(d.normalized_name, p.name)};
        intent.output_contexts = {{decision_context(d.normalized_name), kDecisionContextLifespan}};
        intent.action = "decide_or_ask";
        out.push_back(std::move(intent));
    }
    return out;
}

std::vector<Intent> gen_support_intents(const DmnModel& model) {
    std::vector<Intent> out;
    for (const char* name : {kWelcomeIntent, kFallbackIntent, kHelpIntent, kCancelIntent, kEndIntent}) {
        Intent intent;
        intent.name = name;
        intent.kind = IntentKind::Support;
        std::string action = name;
        action = action.substr(0, action.size() - 6);  // strip "Intent"
        std::transform(action.begin(), action.end(), action.begin(), [](unsigned char c) { return std::tolower(c); });
        intent.action = action;
        out.push_back(std::move(intent));
    }
    for (const auto& d : model.decisions) {
        for (const auto& input_intent : gen_input_intents(model, d.normalized_name)) {
            Intent help;
            help.name = input_intent.name + "_help";
            help.kind = IntentKind::Help;
            help.decision = input_intent.decision;
            help.input = input_intent.input;
            help.input_contexts = input_intent.input_contexts;
            help.output_contexts = input_intent.output_contexts;
            help.action = "input_help";
            out.push_back(std::move(help));
        }
    }
    return out;
}

std::string default_question(const std::string& label, TypeRef type) {
    std::string q = "What is the " + label + " value?";
    if (is_numeric(type)) q += is_integral(type) ? " (a whole number)" : " (a number)";
    return q;
}

std::vector<std::string> default_response_pool(std::string_view support_intent) {
    if (support_intent == kWelcomeIntent) {
        return {"Hello! I can help you with these decisions: {decisions}. Which one do you want to make?",
                "Hi! Available decisions: {decisions}. What would you like to decide?"};
    }
    if (support_intent == kFallbackIntent) return {"Sorry, I did not understand that.", "I am not sure what you mean."};
    if (support_intent == kHelpIntent) {
        return {"I can help you with these decisions: {decisions}. Tell me which one you want to make and answer "
                "my questions. You can give several values in one message, in any order. Ask for the options of "
                "a question at any time."};
    }
    if (support_intent == kCancelIntent) return {"Okay, the conversation was cancelled.", "Conversation cancelled."};
    if (support_intent == kEndIntent) return {"You're welcome", "Come back soon"};
    return {};
}

// ---------------------------------------------------------------------------
// Assembly

AgentBundle assemble_agent(const DmnModel& model_in, const Customization& customization, std::uint64_t seed,
                           std::size_t max_phrases, std::string source_dmn) {
    for (const auto& d : validate_model(model_in)) {
        if (d.severity == Severity::Error) throw ModelError(d.code, format_diagnostic(d));
    }
    if (max_phrases == 0) throw SpecError("max_phrases must be at least 1");

    AgentBundle b;
    b.model = std::make_shared<const DmnModel>(model_in);
    const DmnModel& model = *b.model;
    b.source_dmn = source_dmn.empty() ? serialize_dmn(model) : std::move(source_dmn);
    b.customization = customization;
    b.seed = seed;
    b.max_phrases = max_phrases;
    b.relevance = std::make_shared<RelevanceEngine>(model);

    b.entities = gen_entities(model);
    apply_customization(model, customization, b.entities);

    for (const auto& in : model.inputs) {
        InputInfo info;
        info.name = in.normalized_name;
        info.label = in.label;
        info.type = in.type_ref;
        info.entity = entity_for_input(model, in.normalized_name);
        info.question = default_question(in.label, in.type_ref);
        if (auto it = customization.inputs.find(in.normalized_name); it != customization.inputs.end()) {
            if (it->second.question) info.question = *it->second.question;
            info.help = it->second.help;
        }
        const auto& domain = b.relevance->domain(in.normalized_name);
        if (in.type_ref == TypeRef::Boolean) {
            info.suggestions = {"yes", "no"};
        } else if (in.type_ref == TypeRef::String) {
            for (const auto& v : domain.values) info.suggestions.push_back(v.display());
        } else {
            info.boundaries = domain.boundaries;
        }
        b.inputs.emplace(info.name, std::move(info));
    }

    for (const char* name : {kWelcomeIntent, kFallbackIntent, kHelpIntent, kCancelIntent, kEndIntent}) {
        auto it = customization.responses.find(name);
        b.responses[name] = it != customization.responses.end() ? it->second : default_response_pool(name);
    }

    std::map<std::string, SlotDef> pools;
    for (const auto& [name, info] : b.inputs) {
        Parameter p{name, info.label, info.entity, info.type, false};
        const Domain* domain = is_numeric(info.type) ? &b.relevance->domain(name) : nullptr;
        pools[name] = slot_pool(p, b.entities, domain);
    }

    auto add_intent = [&](Intent intent, const GenSpec& spec) {
        intent.training_phrases = expand(spec, seed, max_phrases);
        b.specs[intent.name] = serialize_spec(spec);
        b.intents.push_back(std::move(intent));
    };

    auto support = gen_support_intents(model);
    for (const auto& d : model.decisions) {
        DecisionInfo info{d.normalized_name, d.name, d.table.output.label, required_inputs(model, d.normalized_name)};
        b.decisions.push_back(info);

        auto decision = gen_decision_intent(model, d.normalized_name);
        std::map<std::string, SlotDef> own;
        for (const auto& p : decision.parameters) own[p.name] = pools.at(p.name);
        auto spec = build_decision_spec(decision, info, own, seed);
        add_intent(std::move(decision), spec);
        for (auto& input : gen_input_intents(model, d.normalized_name)) {
            auto input_spec = build_input_spec(input, own);
            add_intent(std::move(input), input_spec);
        }
        for (auto& help : support) {
            if (help.kind != IntentKind::Help || help.decision != d.normalized_name) continue;
            const auto& info_in = b.inputs.at(help.input);
            auto help_spec = build_support_spec(help, info_in.label, info_in.type == TypeRef::Boolean);
            add_intent(help, help_spec);
        }
    }
    for (auto& s : support) {
        if (s.kind != IntentKind::Support) continue;
        auto spec = build_support_spec(s, "", false);
        add_intent(s, spec);
    }
    b.nlu = std::make_shared<const NluIndex>(b);
    return b;
}

AgentBundle assemble_agent_from_text(const std::string& dmn_text, const Customization& customization,
                                     std::uint64_t seed, std::size_t max_phrases) {
    return assemble_agent(parse_dmn(dmn_text), customization, seed, max_phrases, dmn_text);
}

}  // namespace dmnbot
