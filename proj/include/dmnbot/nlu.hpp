#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dmnbot/bundle.hpp"

namespace dmnbot {

inline constexpr double kFillWeight = 0.6;
inline constexpr double kOverlapWeight = 0.4;
inline constexpr double kFallbackThreshold = 0.30;

struct Token {
    std::string text;  // lowercased
    std::size_t start = 0;
    std::size_t end = 0;
};

// Lowercase word split on non-alphanumerics. Bytes >= 0x80 count as word
// characters, so UTF-8 words stay whole. "-" directly before a digit at a
// word start is kept as a sign and "." between digits as a decimal point.
std::vector<Token> tokenize(std::string_view text);

struct EntitySpan {
    std::size_t start = 0;  // character offsets, end exclusive
    std::size_t end = 0;
    std::string entity;  // first candidate
    Value value;
    std::string surface;
    // Every (entity, reference) the surface resolves to. More than one for
    // shared surfaces such as "yes".
    std::vector<std::pair<std::string, Value>> candidates;
    std::size_t first_token = 0;
    std::size_t last_token = 0;  // exclusive

    bool has_entity(std::string_view e) const;
    const Value* value_for(std::string_view e) const;
};

// Non-overlapping spans sorted by position. Longest surface wins, then the
// earliest start. A boolean label span ("hired") directly followed by one of
// its entity's values ("hired equals to no") is folded into that value.
std::vector<EntitySpan> spot_entities(std::string_view text, const std::vector<Entity>& entities);

// Assigns spans to the intent's parameters. A span goes to the parameter
// whose label directly precedes it, else to the intent's required input,
// else to the first unfilled parameter with a matching entity in
// declaration order, else overwrites the first matching one. Numbers are
// retagged to the parameter type; fractions never fill integral slots.
std::map<std::string, Value> extract_slots(const Intent& intent, const std::vector<EntitySpan>& spans,
                                           std::string_view text = {});

struct Match {
    std::string intent;
    double score = 0.0;
    std::map<std::string, Value> slots;
    int residual = 0;  // utterance tokens absent from the closest phrase
};

// Precomputed entity dictionary and masked phrase sets for one bundle.
class NluIndex {
public:
    explicit NluIndex(const AgentBundle& bundle);

    std::vector<EntitySpan> spot(std::string_view text) const;
    Match match(std::string_view text, const std::set<std::string>& active_contexts) const;

private:
    NluIndex() = default;
    void add_entities(const std::vector<Entity>& entities);

    struct IntentEntry {
        std::size_t intent = 0;  // index into intents_
        std::vector<std::vector<int>> phrases;  // sorted unique masked token ids
    };

    std::vector<EntitySpan> spot_tokens(const std::vector<Token>& tokens, std::string_view text) const;
    // Utterance ids; words outside the vocabulary get distinct negative ids.
    std::vector<int> lookup_ids(const std::vector<std::string>& words) const;

    std::vector<Intent> intents_;
    std::map<std::vector<std::string>, std::vector<std::pair<std::string, Value>>> surfaces_;
    std::map<std::string, EntityKind> kinds_;
    std::size_t longest_ = 1;
    std::map<std::string, int> vocabulary_;
    std::vector<IntentEntry> entries_;

    friend std::vector<EntitySpan> spot_entities(std::string_view, const std::vector<Entity>&);
};

// Candidates are intents whose input contexts are all active. Score is
// kFillWeight * (spans absorbed / spans spotted) + kOverlapWeight * (best
// Jaccard overlap with a masked training phrase). Ties go to more required
// fills, then the smaller name. Below kFallbackThreshold the result is
// FallbackIntent with no slots.
Match match_intent(std::string_view text, const std::set<std::string>& active_contexts, const AgentBundle& bundle);

}  // namespace dmnbot
