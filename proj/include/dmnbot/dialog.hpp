#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dmnbot/bundle.hpp"
#include "dmnbot/engine.hpp"

namespace dmnbot {

// Consecutive unrecognized answers to one question before its help text is
// added to the reply.
inline constexpr int kFallbacksBeforeHelp = 3;

enum class SessionStatus { Open, Decided, Cancelled };

std::string_view to_string(SessionStatus s);

struct TranscriptLine {
    std::string role;  // "user" or "bot"
    std::string text;

    friend bool operator==(const TranscriptLine&, const TranscriptLine&) = default;
};

struct Response {
    std::string text;
    std::vector<std::string> suggestions;
    std::optional<std::string> help;
    bool done = false;
    std::optional<Value> decision_value;
    std::string intent;  // matched intent, for tracing
};

struct Session {
    std::string id;
    std::shared_ptr<const AgentBundle> bundle;
    std::optional<std::string> active_decision;
    Assignment collected;
    std::map<std::string, int> contexts;  // name -> remaining turns
    std::vector<TranscriptLine> transcript;
    SessionStatus status = SessionStatus::Open;
    bool closed = false;  // after Cancel or End no more turns are accepted
    std::optional<std::string> pending;  // input asked last
    std::optional<Value> decision_value;
    std::optional<EvalTrace> trace;
    std::vector<std::string> asked;  // every question asked, in order
    int fallbacks = 0;
    int turn = 0;
};

// Fresh session with the welcome message. `id` defaults to a random hex id.
std::pair<Session, Response> new_session(std::shared_ptr<const AgentBundle> bundle, std::string id = {});

// Throws SessionClosed once the session was cancelled or ended.
Response handle_turn(Session& s, std::string_view utterance);

// Asks for the first unbound necessary input of the active decision, or
// evaluates it when none is left.
Response decide_or_ask(Session& s);

std::string context_summary(const Session& s);

// Generic help without `input`; input help otherwise. Throws UnknownInput.
Response help_response(const Session& s, std::optional<std::string> input = std::nullopt);

// Reference values for enumerations, yes/no for booleans, nothing for
// numbers. Throws UnknownInput.
std::vector<std::string> suggestions_for(const AgentBundle& bundle, std::string_view input);

}  // namespace dmnbot
