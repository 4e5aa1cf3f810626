#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dmnbot/bundle.hpp"

namespace dmnbot {

struct Domain;

struct Segment {
    enum class Kind { Text, Alias, Slot };

    Kind kind = Kind::Text;
    std::string text;  // Text: literal words; Alias: alias name; Slot: parameter name
    bool optional = false;

    static Segment literal(std::string words) { return {Kind::Text, std::move(words), false}; }
    static Segment alias(std::string name, bool optional = false) { return {Kind::Alias, std::move(name), optional}; }
    static Segment slot(std::string param, bool optional = false) { return {Kind::Slot, std::move(param), optional}; }

    friend bool operator==(const Segment&, const Segment&) = default;
};

using Sentence = std::vector<Segment>;

struct SlotValue {
    std::string surface;
    Value value;

    friend bool operator==(const SlotValue&, const SlotValue&) = default;
};

struct SlotDef {
    std::string entity;
    std::vector<SlotValue> pool;

    friend bool operator==(const SlotDef&, const SlotDef&) = default;
};

struct GenSpec {
    std::string intent;
    std::vector<Sentence> patterns;
    std::map<std::string, std::vector<Sentence>> aliases;
    std::map<std::string, SlotDef> slots;  // keyed by parameter name

    friend bool operator==(const GenSpec&, const GenSpec&) = default;
};

inline constexpr std::size_t kDefaultMaxPhrases = 500;

// Orderings of `slots` used for the parameter part of decision phrases. For
// n <= 3 every k-permutation, k = 1..n. Otherwise every singleton, one
// n-permutation and min(2n, remaining) distinct k-permutations with
// 1 < k < n, drawn uniformly. Output order: by length, then draw order.
std::vector<std::vector<std::string>> kperm_sample(const std::vector<std::string>& slots, std::uint64_t seed);

// Slot pool for a parameter: entity surfaces for enumerations and booleans;
// {min boundary, max boundary, interior point} for numbers.
SlotDef slot_pool(const Parameter& p, const std::vector<Entity>& entities, const Domain* domain);

// `~[init?] ~[decision] ~[with parameters?]`. `pools` holds one SlotDef per
// parameter of the intent.
GenSpec build_decision_spec(const Intent& intent, const DecisionInfo& decision,
                            const std::map<std::string, SlotDef>& pools, std::uint64_t seed);

// Bare slot, decorated slot (`~[a value of?] ~[name?] equals to @[slot]`),
// and slot followed by one other parameter.
GenSpec build_input_spec(const Intent& intent, const std::map<std::string, SlotDef>& pools);

// Fixed phrasing for support and input help intents.
GenSpec build_support_spec(const Intent& intent, const std::string& input_label, bool label_is_value);

// Expands a spec into at most `max_phrases` distinct phrases (deduplicated on
// folded text). Small specs are enumerated exhaustively; large ones get a
// fixed set covering every alias alternative and then a seeded uniform
// sample. Throws SpecError on an unresolved alias or slot.
std::vector<TrainingPhrase> expand(const GenSpec& spec, std::uint64_t seed, std::size_t max_phrases);

// Number of distinct renderings before deduplication, saturating at 2^62.
std::uint64_t expansion_count(const GenSpec& spec);

// Whether `text` is one of the spec's renderings (case- and
// whitespace-insensitive).
bool spec_accepts(const GenSpec& spec, const std::string& text);

// Text DSL: `%[intent]`, `~[alias]`, `@[slot]`; `?` marks an optional
// reference; definitions list one alternative per indented line.
std::string serialize_spec(const GenSpec& spec);
GenSpec parse_spec(const std::string& text);

}  // namespace dmnbot
