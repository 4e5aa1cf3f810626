#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmnbot/bundle.hpp"
#include "dmnbot/engine.hpp"
#include "dmnbot/errors.hpp"
#include "dmnbot/relevance.hpp"

namespace dmnbot {

using Json = nlohmann::json;

inline constexpr const char* kAgentFormat = "dmnbot-agent/1";

Json value_to_json(const Value& v);
// Integers become Integer-declared numbers, other numbers Double.
Value value_from_json(const Json& j);

// {"inputs": {name: {question, help, synonyms: {entry: [..]}}},
//  "responses": {SupportIntent: [..]}}. Input keys are normalized.
// Throws CustomizationError on a malformed document.
Customization parse_customization(const std::string& json_text);
Customization customization_from_json(const Json& j);
Json customization_to_json(const Customization& c);

Json entity_to_json(const Entity& e);
Json intent_to_json(const Intent& i);
Json agent_manifest_json(const AgentBundle& b);
Json trace_to_json(const EvalTrace& t);
Json diagnostic_to_json(const Diagnostic& d);
Json overlap_to_json(const DecisionOverlap& o);

// Report for a DMN text: {"valid", "errors", "warnings", "diagnostics",
// "overlaps", "decisions", "main_decision"}. Parse failures show up as a
// single error diagnostic.
Json validation_report(const std::string& dmn_text);

// Writes agent.json, entities/*.json (custom entities), intents/*.json,
// specs/*.spec and model.dmn. Returns the written paths relative to `dir`,
// sorted. Output is byte-stable. Throws IoError.
std::vector<std::string> export_agent(const AgentBundle& bundle, const std::filesystem::path& dir);

// Byte content of every file export_agent would write, keyed by relative path.
std::map<std::string, std::string> export_files(const AgentBundle& bundle);

// Inverse of export_agent. Throws IoError for unreadable files and
// CorruptRecord for schema mismatches.
AgentBundle import_agent(const std::filesystem::path& dir);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace dmnbot
