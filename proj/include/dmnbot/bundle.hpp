#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dmnbot/dmn_model.hpp"

namespace dmnbot {

class RelevanceEngine;
class NluIndex;

inline constexpr const char* kNumberEntity = "sys.number";

struct EntityEntry {
    Value reference;
    std::vector<std::string> synonyms;

    friend bool operator==(const EntityEntry&, const EntityEntry&) = default;
};

enum class EntityKind { SystemNumber, CustomEnum, CustomBoolean };

std::string_view to_string(EntityKind k);

struct Entity {
    std::string name;
    EntityKind kind = EntityKind::CustomEnum;
    std::vector<EntityEntry> entries;

    // Every surface form with its reference: reference display text first,
    // then synonyms, entry by entry.
    std::vector<std::pair<std::string, Value>> surfaces() const;

    friend bool operator==(const Entity&, const Entity&) = default;
};

struct Parameter {
    std::string name;  // normalized input name
    std::string label;
    std::string entity;
    TypeRef type = TypeRef::String;
    bool required = false;

    friend bool operator==(const Parameter&, const Parameter&) = default;
};

struct OutputContext {
    std::string name;
    int lifespan = 1;

    friend bool operator==(const OutputContext&, const OutputContext&) = default;
};

struct Span {
    std::size_t start = 0;
    std::size_t end = 0;  // exclusive
    std::string param;
    std::string entity;
    std::string surface;
    Value value;

    friend bool operator==(const Span&, const Span&) = default;
};

struct TrainingPhrase {
    std::string text;
    std::vector<Span> spans;

    friend bool operator==(const TrainingPhrase&, const TrainingPhrase&) = default;
};

enum class IntentKind { Decision, Input, Support, Help };

std::string_view to_string(IntentKind k);

inline constexpr const char* kWelcomeIntent = "WelcomeIntent";
inline constexpr const char* kFallbackIntent = "FallbackIntent";
inline constexpr const char* kHelpIntent = "HelpIntent";
inline constexpr const char* kCancelIntent = "CancelIntent";
inline constexpr const char* kEndIntent = "EndIntent";

struct Intent {
    std::string name;
    IntentKind kind = IntentKind::Support;
    std::string decision;  // owning decision, empty for domain-independent intents
    std::string input;     // input and help intents
    std::vector<Parameter> parameters;
    std::vector<std::string> input_contexts;
    std::vector<OutputContext> output_contexts;
    std::vector<TrainingPhrase> training_phrases;
    std::string action;

    const Parameter* find_parameter(std::string_view name) const;

    friend bool operator==(const Intent&, const Intent&) = default;
};

struct InputCustomization {
    std::optional<std::string> question;
    std::optional<std::string> help;
    std::map<std::string, std::vector<std::string>> synonyms;  // entry reference -> extra synonyms

    friend bool operator==(const InputCustomization&, const InputCustomization&) = default;
};

struct Customization {
    std::map<std::string, InputCustomization> inputs;        // keyed by normalized input name
    std::map<std::string, std::vector<std::string>> responses;  // support intent -> pool

    friend bool operator==(const Customization&, const Customization&) = default;
};

// Everything dialog needs to ask for and explain one user input.
struct InputInfo {
    std::string name;
    std::string label;
    TypeRef type = TypeRef::String;
    std::string entity;
    std::string question;
    std::optional<std::string> help;
    std::vector<std::string> suggestions;  // empty for numbers
    std::vector<double> boundaries;        // numbers only

    friend bool operator==(const InputInfo&, const InputInfo&) = default;
};

struct DecisionInfo {
    std::string name;  // normalized
    std::string label;
    std::string output_label;
    std::vector<std::string> inputs;  // required_inputs order

    friend bool operator==(const DecisionInfo&, const DecisionInfo&) = default;
};

struct AgentBundle {
    std::shared_ptr<const DmnModel> model;
    std::string source_dmn;
    std::vector<Entity> entities;
    std::vector<Intent> intents;
    Customization customization;
    std::uint64_t seed = 0;
    std::size_t max_phrases = 500;
    std::vector<DecisionInfo> decisions;     // model order
    std::map<std::string, InputInfo> inputs;  // every user input
    std::map<std::string, std::vector<std::string>> responses;  // support pools after customization
    std::map<std::string, std::string> specs;  // intent -> generation spec text

    // Necessity caches shared by every session over this bundle.
    std::shared_ptr<RelevanceEngine> relevance;
    // Matcher index over entities and training phrases.
    std::shared_ptr<const NluIndex> nlu;

    const Entity* find_entity(std::string_view name) const;
    const Intent* find_intent(std::string_view name) const;
    const DecisionInfo* find_decision(std::string_view name) const;
    const InputInfo* find_input(std::string_view name) const;

    // Equality over the exported content (model compared structurally,
    // caches ignored).
    friend bool operator==(const AgentBundle& a, const AgentBundle& b);
};

}  // namespace dmnbot
