#include "dmnbot/bundle_io.hpp"

#include <fstream>
#include <set>

#include "dmnbot/errors.hpp"
#include "dmnbot/nlu.hpp"

namespace dmnbot {

namespace fs = std::filesystem;

Json value_to_json(const Value& v) {
    switch (v.kind()) {
        case Value::Kind::String: return v.as_string();
        case Value::Kind::Boolean: return v.as_boolean();
        case Value::Kind::Number:
            if (is_integral(v.number_kind()) && std::abs(v.as_number()) < 9e15) {
                return static_cast<long long>(v.as_number());
            }
            return v.as_number();
    }
    return nullptr;
}

Value value_from_json(const Json& j) {
    if (j.is_string()) return Value::string(j.get<std::string>());
    if (j.is_boolean()) return Value::boolean(j.get<bool>());
    if (j.is_number_integer()) return Value::number(j.get<double>(), TypeRef::Integer);
    if (j.is_number()) return Value::number(j.get<double>(), TypeRef::Double);
    throw CorruptRecord("expected a string, boolean or number value");
}

// ---------------------------------------------------------------------------
// Customization

Customization customization_from_json(const Json& j) {
    Customization c;
    if (j.is_null()) return c;
    if (!j.is_object()) throw CustomizationError("customization must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (key != "inputs" && key != "responses") throw CustomizationError("unknown customization key '" + key + "'");
    }
    if (j.contains("inputs")) {
        const auto& inputs = j.at("inputs");
        if (!inputs.is_object()) throw CustomizationError("'inputs' must be an object");
        for (const auto& [name, spec] : inputs.items()) {
            if (!spec.is_object()) throw CustomizationError("customization of '" + name + "' must be an object");
            InputCustomization ic;
            for (const auto& [key, value] : spec.items()) {
                if (key == "question" || key == "help") {
                    if (!value.is_string()) throw CustomizationError("'" + key + "' of '" + name + "' must be a string");
                    (key == "question" ? ic.question : ic.help) = value.get<std::string>();
                } else if (key == "synonyms") {
                    if (!value.is_object()) throw CustomizationError("'synonyms' of '" + name + "' must be an object");
                    for (const auto& [entry, list] : value.items()) {
                        if (!list.is_array()) throw CustomizationError("synonyms for '" + entry + "' must be a list");
                        for (const auto& s : list) {
                            if (!s.is_string()) throw CustomizationError("synonyms must be strings");
                            ic.synonyms[entry].push_back(s.get<std::string>());
                        }
                    }
                } else {
                    throw CustomizationError("unknown key '" + key + "' in customization of '" + name + "'");
                }
            }
            c.inputs[normalize_name(name)] = std::move(ic);
        }
    }
    if (j.contains("responses")) {
        const auto& responses = j.at("responses");
        if (!responses.is_object()) throw CustomizationError("'responses' must be an object");
        for (const auto& [intent, list] : responses.items()) {
            if (!list.is_array()) throw CustomizationError("responses for '" + intent + "' must be a list");
            for (const auto& s : list) {
                if (!s.is_string()) throw CustomizationError("responses must be strings");
                c.responses[intent].push_back(s.get<std::string>());
            }
        }
    }
    return c;
}

Customization parse_customization(const std::string& json_text) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const Json::parse_error& e) {
        throw CustomizationError(std::string("customization is not valid JSON: ") + e.what());
    }
    return customization_from_json(j);
}

Json customization_to_json(const Customization& c) {
    Json j = Json::object();
    Json inputs = Json::object();
    for (const auto& [name, ic] : c.inputs) {
        Json x = Json::object();
        if (ic.question) x["question"] = *ic.question;
        if (ic.help) x["help"] = *ic.help;
        if (!ic.synonyms.empty()) x["synonyms"] = ic.synonyms;
        inputs[name] = std::move(x);
    }
    j["inputs"] = std::move(inputs);
    j["responses"] = c.responses.empty() ? Json::object() : Json(c.responses);
    return j;
}

// ---------------------------------------------------------------------------
// Bundle parts

Json entity_to_json(const Entity& e) {
    Json entries = Json::array();
    for (const auto& entry : e.entries) {
        entries.push_back({{"value", value_to_json(entry.reference)}, {"synonyms", entry.synonyms}});
    }
    return {{"name", e.name}, {"kind", std::string(to_string(e.kind))}, {"entries", entries}};
}

namespace {

EntityKind entity_kind_from(const std::string& s) {
    if (s == "system-number") return EntityKind::SystemNumber;
    if (s == "custom-enum") return EntityKind::CustomEnum;
    if (s == "custom-boolean") return EntityKind::CustomBoolean;
    throw CorruptRecord("unknown entity kind '" + s + "'");
}

IntentKind intent_kind_from(const std::string& s) {
    if (s == "decision") return IntentKind::Decision;
    if (s == "input") return IntentKind::Input;
    if (s == "support") return IntentKind::Support;
    if (s == "help") return IntentKind::Help;
    throw CorruptRecord("unknown intent kind '" + s + "'");
}

TypeRef type_from(const std::string& s) {
    auto t = type_ref_from_string(s);
    if (!t) throw CorruptRecord("unknown type '" + s + "'");
    return *t;
}

Entity entity_from_json(const Json& j) {
    Entity e;
    e.name = j.at("name").get<std::string>();
    e.kind = entity_kind_from(j.at("kind").get<std::string>());
    for (const auto& entry : j.at("entries")) {
        e.entries.push_back({value_from_json(entry.at("value")), entry.at("synonyms").get<std::vector<std::string>>()});
    }
    return e;
}

}  // namespace

Json intent_to_json(const Intent& i) {
    Json params = Json::array();
    for (const auto& p : i.parameters) {
        params.push_back({{"name", p.name},
                          {"label", p.label},
                          {"entity", p.entity},
                          {"type", std::string(to_string(p.type))},
                          {"required", p.required}});
    }
    Json outputs = Json::array();
    for (const auto& c : i.output_contexts) outputs.push_back({{"name", c.name}, {"lifespan", c.lifespan}});
    Json phrases = Json::array();
    for (const auto& tp : i.training_phrases) {
        Json spans = Json::array();
        for (const auto& s : tp.spans) {
            spans.push_back({{"start", s.start},
                             {"end", s.end},
                             {"param", s.param},
                             {"entity", s.entity},
                             {"surface", s.surface},
                             {"value", value_to_json(s.value)}});
        }
        phrases.push_back({{"text", tp.text}, {"spans", spans}});
    }
    return {{"name", i.name},
            {"kind", std::string(to_string(i.kind))},
            {"decision", i.decision},
            {"input", i.input},
            {"action", i.action},
            {"parameters", params},
            {"input_contexts", i.input_contexts},
            {"output_contexts", outputs},
            {"training_phrases", phrases}};
}

namespace {

Intent intent_from_json(const Json& j) {
    Intent i;
    i.name = j.at("name").get<std::string>();
    i.kind = intent_kind_from(j.at("kind").get<std::string>());
    i.decision = j.at("decision").get<std::string>();
    i.input = j.at("input").get<std::string>();
    i.action = j.at("action").get<std::string>();
    for (const auto& p : j.at("parameters")) {
        i.parameters.push_back({p.at("name").get<std::string>(), p.at("label").get<std::string>(),
                                p.at("entity").get<std::string>(), type_from(p.at("type").get<std::string>()),
                                p.at("required").get<bool>()});
    }
    i.input_contexts = j.at("input_contexts").get<std::vector<std::string>>();
    for (const auto& c : j.at("output_contexts")) {
        i.output_contexts.push_back({c.at("name").get<std::string>(), c.at("lifespan").get<int>()});
    }
    for (const auto& tp : j.at("training_phrases")) {
        TrainingPhrase phrase;
        phrase.text = tp.at("text").get<std::string>();
        for (const auto& s : tp.at("spans")) {
            phrase.spans.push_back({s.at("start").get<std::size_t>(), s.at("end").get<std::size_t>(),
                                    s.at("param").get<std::string>(), s.at("entity").get<std::string>(),
                                    s.at("surface").get<std::string>(), value_from_json(s.at("value"))});
        }
        i.training_phrases.push_back(std::move(phrase));
    }
    return i;
}

}  // namespace

Json agent_manifest_json(const AgentBundle& b) {
    Json decisions = Json::array();
    for (const auto& d : b.decisions) {
        decisions.push_back({{"name", d.name}, {"label", d.label}, {"output_label", d.output_label}, {"inputs", d.inputs}});
    }
    Json inputs = Json::object();
    for (const auto& [name, info] : b.inputs) {
        Json x = {{"label", info.label},
                  {"type", std::string(to_string(info.type))},
                  {"entity", info.entity},
                  {"question", info.question},
                  {"suggestions", info.suggestions},
                  {"boundaries", info.boundaries}};
        x["help"] = info.help ? Json(*info.help) : Json(nullptr);
        inputs[name] = std::move(x);
    }
    Json entities = Json::array();
    Json system = Json::array();
    for (const auto& e : b.entities) {
        entities.push_back(e.name);
        if (e.kind == EntityKind::SystemNumber) system.push_back(e.name);
    }
    Json intents = Json::array();
    for (const auto& i : b.intents) intents.push_back(i.name);
    return {{"format", kAgentFormat},
            {"name", b.model ? b.model->name : ""},
            {"main_decision", b.model ? b.model->main_decision : ""},
            {"seed", b.seed},
            {"max_phrases", b.max_phrases},
            {"decisions", decisions},
            {"inputs", inputs},
            {"responses", b.responses},
            {"customization", customization_to_json(b.customization)},
            {"entities", entities},
            {"system_entities", system},
            {"intents", intents}};
}

Json trace_to_json(const EvalTrace& t) {
    Json out = Json::array();
    for (const auto& e : t.entries) {
        Json inputs = Json::object();
        for (const auto& [name, v] : e.inputs) inputs[name] = value_to_json(v);
        Json x = {{"element", e.element},
                  {"kind", e.kind == ElementKind::Decision ? "decision" : "literal"},
                  {"inputs", inputs},
                  {"value", value_to_json(e.value)}};
        if (e.kind == ElementKind::Decision) x["matched_rule"] = e.matched_rule;
        out.push_back(std::move(x));
    }
    return out;
}

Json diagnostic_to_json(const Diagnostic& d) {
    return {{"severity", d.severity == Severity::Error ? "error" : "warning"},
            {"code", d.code},
            {"message", d.message},
            {"element", d.location.element},
            {"rule", d.location.rule},
            {"column", d.location.column}};
}

Json overlap_to_json(const DecisionOverlap& o) {
    Json witness = Json::object();
    for (const auto& [name, v] : o.overlap.witness) witness[name] = value_to_json(v);
    return {{"decision", o.decision}, {"rules", {o.overlap.rule_a, o.overlap.rule_b}}, {"witness", witness}};
}

Json validation_report(const std::string& dmn_text) {
    Json diags = Json::array();
    Json overlaps = Json::array();
    Json decisions = Json::array();
    std::string main;
    int errors = 0, warnings = 0;
    try {
        auto model = parse_dmn_document(dmn_text);
        main = model.main_decision;
        for (const auto& d : model.decisions) decisions.push_back(d.normalized_name);
        for (const auto& d : validate_model(model)) {
            (d.severity == Severity::Error ? errors : warnings)++;
            diags.push_back(diagnostic_to_json(d));
        }
        if (errors == 0) {
            for (const auto& o : detect_model_overlaps(model)) overlaps.push_back(overlap_to_json(o));
        }
    } catch (const ParseError& e) {
        ++errors;
        diags.push_back({{"severity", "error"}, {"code", e.code()}, {"message", e.what()}, {"element", ""},
                         {"rule", e.rule()}, {"column", e.column()}});
    } catch (const Error& e) {
        ++errors;
        diags.push_back({{"severity", "error"}, {"code", e.code()}, {"message", e.what()}, {"element", ""},
                         {"rule", 0}, {"column", 0}});
    }
    return {{"valid", errors == 0 && overlaps.empty()},
            {"errors", errors},
            {"warnings", warnings},
            {"diagnostics", diags},
            {"overlaps", overlaps},
            {"decisions", decisions},
            {"main_decision", main}};
}

// ---------------------------------------------------------------------------
// Files

void write_text_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw IoError("cannot write " + path.string());
}

std::map<std::string, std::string> export_files(const AgentBundle& b) {
    std::map<std::string, std::string> files;
    files["agent.json"] = agent_manifest_json(b).dump(2) + "\n";
    files["model.dmn"] = b.source_dmn;
    for (const auto& e : b.entities) {
        if (e.kind == EntityKind::SystemNumber) continue;
        files["entities/" + e.name + ".json"] = entity_to_json(e).dump(2) + "\n";
    }
    for (const auto& i : b.intents) files["intents/" + i.name + ".json"] = intent_to_json(i).dump(2) + "\n";
    for (const auto& [intent, text] : b.specs) files["specs/" + intent + ".spec"] = text;
    return files;
}

std::vector<std::string> export_agent(const AgentBundle& bundle, const fs::path& dir) {
    auto files = export_files(bundle);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
    // Drop generated files from an earlier export so the tree matches exactly.
    for (const char* sub : {"entities", "intents", "specs"}) {
        auto p = dir / sub;
        if (!fs::is_directory(p)) continue;
        for (const auto& entry : fs::directory_iterator(p)) {
            auto ext = entry.path().extension();
            auto rel = std::string(sub) + "/" + entry.path().filename().string();
            if ((ext == ".json" || ext == ".spec") && !files.count(rel)) fs::remove(entry.path(), ec);
        }
    }
    std::vector<std::string> manifest;
    for (const auto& [rel, content] : files) {
        write_text_file(dir / rel, content);
        manifest.push_back(rel);
    }
    return manifest;
}

AgentBundle import_agent(const fs::path& dir) {
    auto read_json = [&](const fs::path& p) {
        auto text = read_text_file(p);
        try {
            return Json::parse(text);
        } catch (const Json::parse_error& e) {
            throw CorruptRecord(p.string() + ": " + e.what());
        }
    };
    try {
        auto manifest = read_json(dir / "agent.json");
        if (manifest.value("format", "") != kAgentFormat) {
            throw CorruptRecord(dir.string() + ": unsupported agent format");
        }
        AgentBundle b;
        b.source_dmn = read_text_file(dir / "model.dmn");
        b.model = std::make_shared<const DmnModel>(parse_dmn(b.source_dmn));
        b.seed = manifest.at("seed").get<std::uint64_t>();
        b.max_phrases = manifest.at("max_phrases").get<std::size_t>();
        b.customization = customization_from_json(manifest.at("customization"));
        b.responses = manifest.at("responses").get<std::map<std::string, std::vector<std::string>>>();
        for (const auto& d : manifest.at("decisions")) {
            b.decisions.push_back({d.at("name").get<std::string>(), d.at("label").get<std::string>(),
                                   d.at("output_label").get<std::string>(),
                                   d.at("inputs").get<std::vector<std::string>>()});
        }
        for (const auto& [name, x] : manifest.at("inputs").items()) {
            InputInfo info;
            info.name = name;
            info.label = x.at("label").get<std::string>();
            info.type = type_from(x.at("type").get<std::string>());
            info.entity = x.at("entity").get<std::string>();
            info.question = x.at("question").get<std::string>();
            if (!x.at("help").is_null()) info.help = x.at("help").get<std::string>();
            info.suggestions = x.at("suggestions").get<std::vector<std::string>>();
            info.boundaries = x.at("boundaries").get<std::vector<double>>();
            b.inputs.emplace(name, std::move(info));
        }
        std::set<std::string> system;
        for (const auto& s : manifest.at("system_entities")) system.insert(s.get<std::string>());
        for (const auto& n : manifest.at("entities")) {
            auto name = n.get<std::string>();
            if (system.count(name)) b.entities.push_back({name, EntityKind::SystemNumber, {}});
            else b.entities.push_back(entity_from_json(read_json(dir / "entities" / (name + ".json"))));
        }
        for (const auto& n : manifest.at("intents")) {
            auto name = n.get<std::string>();
            b.intents.push_back(intent_from_json(read_json(dir / "intents" / (name + ".json"))));
            auto spec = dir / "specs" / (name + ".spec");
            if (fs::exists(spec)) b.specs[name] = read_text_file(spec);
        }
        b.relevance = std::make_shared<RelevanceEngine>(*b.model);
        b.nlu = std::make_shared<const NluIndex>(b);
        return b;
    } catch (const Json::exception& e) {
        throw CorruptRecord(dir.string() + ": " + e.what());
    } catch (const IoError&) {
        throw;
    } catch (const CorruptRecord&) {
        throw;
    } catch (const Error& e) {
        throw CorruptRecord(dir.string() + ": " + e.what());
    }
}

}  // namespace dmnbot
