#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dmnbot/bundle.hpp"
#include "dmnbot/phrasegen.hpp"

namespace dmnbot {

inline constexpr int kDecisionContextLifespan = 5;
inline constexpr int kInputContextLifespan = 1;

std::string decision_context(std::string_view decision);
std::string input_context(std::string_view decision, std::string_view input);
std::string awaiting_context(std::string_view input);

// One entity per string/boolean user input plus the shared system-number
// entity when any input is numeric. Throws EmptyDomain.
std::vector<Entity> gen_entities(const DmnModel& model);

// Entity name a user input's parameter refers to.
std::string entity_for_input(const DmnModel& model, std::string_view input);

Intent gen_decision_intent(const DmnModel& model, std::string_view decision);
std::vector<Intent> gen_input_intents(const DmnModel& model, std::string_view decision);

// The five domain-independent intents followed by one help intent per input
// intent of every decision.
std::vector<Intent> gen_support_intents(const DmnModel& model);

// Checks `c` against the model and merges its synonyms into `entities`.
// Throws CustomizationError.
void apply_customization(const DmnModel& model, const Customization& c, std::vector<Entity>& entities);

std::string default_question(const std::string& label, TypeRef type);
std::vector<std::string> default_response_pool(std::string_view support_intent);

// Deterministic in (model, customization, seed, max_phrases). Throws
// ModelError when the model has validation errors, CustomizationError.
AgentBundle assemble_agent(const DmnModel& model, const Customization& customization, std::uint64_t seed,
                           std::size_t max_phrases = kDefaultMaxPhrases, std::string source_dmn = {});

// Parses and validates `dmn_text` first.
AgentBundle assemble_agent_from_text(const std::string& dmn_text, const Customization& customization,
                                     std::uint64_t seed, std::size_t max_phrases = kDefaultMaxPhrases);

}  // namespace dmnbot
