#include "dmnbot/dialog.hpp"

#include <random>
#include <set>

#include "dmnbot/botgen.hpp"
#include "dmnbot/errors.hpp"
#include "dmnbot/nlu.hpp"
#include "dmnbot/relevance.hpp"

namespace dmnbot {

std::string_view to_string(SessionStatus s) {
    switch (s) {
        case SessionStatus::Open: return "open";
        case SessionStatus::Decided: return "decided";
        case SessionStatus::Cancelled: return "cancelled";
    }
    return "open";
}

namespace {

std::string random_id() {
    static thread_local std::mt19937_64 gen{std::random_device{}()};
    static const char* hex = "0123456789abcdef";
    std::string id;
    auto v = gen();
    for (int i = 0; i < 16; ++i) id.push_back(hex[(v >> (4 * i)) & 0xf]);
    return id;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string replace_all(std::string text, std::string_view what, const std::string& with) {
    for (std::size_t pos = text.find(what); pos != std::string::npos; pos = text.find(what, pos + with.size())) {
        text.replace(pos, what.size(), with);
    }
    return text;
}

std::string decision_list(const AgentBundle& b) {
    std::vector<std::string> labels;
    for (const auto& d : b.decisions) labels.push_back(d.label);
    return join(labels, ", ");
}

std::string from_pool(const Session& s, const std::string& intent) {
    auto it = s.bundle->responses.find(intent);
    if (it == s.bundle->responses.end() || it->second.empty()) return {};
    const auto& pool = it->second;
    auto text = pool[(s.bundle->seed + static_cast<std::uint64_t>(s.turn)) % pool.size()];
    return replace_all(std::move(text), "{decisions}", decision_list(*s.bundle));
}

const InputInfo& input_info(const AgentBundle& b, std::string_view input) {
    const InputInfo* info = b.find_input(input);
    if (!info) throw UnknownInput("unknown input '" + std::string(input) + "'");
    return *info;
}

std::string display_for_user(const Value& v) {
    if (v.is_boolean()) return v.as_boolean() ? "yes" : "no";
    return v.display();
}

std::string input_help_text(const InputInfo& info) {
    if (info.help) return *info.help;
    if (info.type == TypeRef::Boolean) return "For " + info.label + ", answer yes / no.";
    if (is_numeric(info.type)) {
        std::string text = "For " + info.label + ", enter " +
                           std::string(is_integral(info.type) ? "a whole number." : "a number.");
        if (!info.boundaries.empty()) {
            std::vector<std::string> hints;
            for (double v : info.boundaries) hints.push_back(format_number(v, is_integral(info.type)));
            text += " The decision changes around: " + join(hints, ", ") + ".";
        }
        return text;
    }
    return "For " + info.label + ", choose one of: " + join(info.suggestions, " / ") + ".";
}

// Contexts touched during the current turn keep their lifespan.
struct TurnContexts {
    Session& s;
    std::set<std::string> refreshed;

    void set(const std::string& name, int lifespan) {
        s.contexts[name] = lifespan;
        refreshed.insert(name);
    }
    void drop_prefix(std::string_view prefix) {
        for (auto it = s.contexts.begin(); it != s.contexts.end();) {
            if (it->first.rfind(prefix, 0) == 0) {
                refreshed.erase(it->first);
                it = s.contexts.erase(it);
            } else {
                ++it;
            }
        }
    }
    void finish() {
        for (auto it = s.contexts.begin(); it != s.contexts.end();) {
            if (!refreshed.count(it->first) && --it->second <= 0) it = s.contexts.erase(it);
            else ++it;
        }
    }
};

void activate_question(Session& s, TurnContexts& ctx, const std::string& decision, const std::string& input) {
    ctx.drop_prefix("awaiting_");
    for (const auto& in : s.bundle->decisions) {
        for (const auto& other : in.inputs) {
            if (other != input || in.name != decision) s.contexts.erase(input_context(in.name, other));
        }
    }
    ctx.set(decision_context(decision), kDecisionContextLifespan);
    ctx.set(input_context(decision, input), kInputContextLifespan);
    ctx.set(awaiting_context(input), kInputContextLifespan);
}

Response ask(Session& s, TurnContexts& ctx, const std::string& decision, const std::string& input) {
    const auto& info = input_info(*s.bundle, input);
    activate_question(s, ctx, decision, input);
    s.pending = input;
    s.asked.push_back(input);
    Response r;
    r.text = info.question;
    r.suggestions = info.suggestions;
    return r;
}

Response decide_or_ask_impl(Session& s, TurnContexts& ctx) {
    if (!s.active_decision) {
        Response r;
        r.text = "Which decision do you want to make? Available decisions: " + decision_list(*s.bundle) + ".";
        return r;
    }
    const std::string decision = *s.active_decision;
    const AgentBundle& b = *s.bundle;
    const DecisionInfo* info = b.find_decision(decision);
    if (!info) throw UnknownInput("unknown decision '" + decision + "'");
    ctx.set(decision_context(decision), kDecisionContextLifespan);
    for (const auto& input : info->inputs) {
        if (s.collected.count(input)) continue;
        if (b.relevance->is_necessary(decision, input, s.collected)) return ask(s, ctx, decision, input);
    }
    Response r;
    try {
        auto result = evaluate_drd(*b.model, decision, b.relevance->complete(decision, s.collected));
        s.status = SessionStatus::Decided;
        s.decision_value = result.value;
        s.trace = result.trace;
        s.pending.reset();
        ctx.drop_prefix("awaiting_");
        r.text = "The result is: " + result.value.display();
        r.done = true;
        r.decision_value = result.value;
    } catch (const NoRuleMatched&) {
        r.text = "Sorry, no rule of " + info->label + " covers these values. " + context_summary(s) +
                 " Say cancel to start over.";
    } catch (const MultipleRulesMatched&) {
        r.text = "Sorry, several rules of " + info->label + " apply to these values. " + context_summary(s) +
                 " Say cancel to start over.";
    }
    return r;
}

// Merges slot values; returns the number stored.
int merge_slots(Session& s, const std::map<std::string, Value>& slots) {
    int stored = 0;
    for (const auto& [name, v] : slots) {
        const InputInfo* info = s.bundle->find_input(name);
        if (!info || !v.conforms_to(info->type)) continue;
        s.collected[name] = v.coerced_to(info->type);
        ++stored;
    }
    return stored;
}

void append(std::string& text, const std::string& more) {
    if (more.empty()) return;
    if (!text.empty()) text += " ";
    text += more;
}

// Repeats the pending question after a support reply.
void reask(Session& s, TurnContexts& ctx, Response& r) {
    if (!s.pending || !s.active_decision || s.status != SessionStatus::Open) return;
    const auto& info = input_info(*s.bundle, *s.pending);
    activate_question(s, ctx, *s.active_decision, *s.pending);
    append(r.text, info.question);
    r.suggestions = info.suggestions;
}

}  // namespace

std::pair<Session, Response> new_session(std::shared_ptr<const AgentBundle> bundle, std::string id) {
    Session s;
    s.id = id.empty() ? random_id() : std::move(id);
    s.bundle = std::move(bundle);
    Response r;
    r.text = from_pool(s, kWelcomeIntent);
    r.intent = kWelcomeIntent;
    s.transcript.push_back({"bot", r.text});
    return {std::move(s), std::move(r)};
}

Response decide_or_ask(Session& s) {
    TurnContexts ctx{s, {}};
    return decide_or_ask_impl(s, ctx);
}

Response handle_turn(Session& s, std::string_view utterance) {
    if (s.closed) throw SessionClosed("session " + s.id + " is closed");
    ++s.turn;
    s.transcript.push_back({"user", std::string(utterance)});

    std::set<std::string> active;
    for (const auto& [name, _] : s.contexts) active.insert(name);
    Match m = match_intent(utterance, active, *s.bundle);
    const Intent* intent = s.bundle->find_intent(m.intent);

    TurnContexts ctx{s, {}};
    Response r;
    bool fallback = false;

    if (intent && (intent->kind == IntentKind::Decision || intent->kind == IntentKind::Input)) {
        for (const auto& oc : intent->output_contexts) ctx.set(oc.name, oc.lifespan);
        if (s.status == SessionStatus::Decided) {
            r.text = "The decision has already been made. The result is: " + s.decision_value->display() +
                     ". Start a new conversation to decide again.";
        } else {
            if (s.active_decision != intent->decision) s.pending.reset();
            s.active_decision = intent->decision;
            merge_slots(s, m.slots);
            if (s.pending && s.collected.count(*s.pending)) s.fallbacks = 0;
            r = decide_or_ask_impl(s, ctx);
        }
    } else if (intent && intent->kind == IntentKind::Help) {
        r = help_response(s, intent->input);
        if (s.pending && s.active_decision) activate_question(s, ctx, *s.active_decision, *s.pending);
    } else if (m.intent == kHelpIntent) {
        r = help_response(s);
        reask(s, ctx, r);
    } else if (m.intent == kWelcomeIntent) {
        r.text = from_pool(s, kWelcomeIntent);
        reask(s, ctx, r);
    } else if (m.intent == kCancelIntent) {
        r.text = from_pool(s, kCancelIntent);
        s.status = SessionStatus::Cancelled;
        s.closed = true;
        s.pending.reset();
        s.contexts.clear();
        r.done = true;
    } else if (m.intent == kEndIntent) {
        r.text = from_pool(s, kEndIntent);
        if (s.status == SessionStatus::Open) {
            s.status = SessionStatus::Cancelled;
            r.done = true;
        }
        s.closed = true;
        s.pending.reset();
        s.contexts.clear();
    } else {
        fallback = true;
        ++s.fallbacks;
        r.text = from_pool(s, kFallbackIntent);
        if (s.pending && s.active_decision && s.status == SessionStatus::Open) {
            const auto& info = input_info(*s.bundle, *s.pending);
            if (!info.suggestions.empty()) append(r.text, "Valid answers are: " + join(info.suggestions, " / ") + ".");
            if (s.fallbacks >= kFallbacksBeforeHelp) {
                r.help = input_help_text(info);
                append(r.text, *r.help);
            } else {
                append(r.text, "Say help if you need assistance.");
            }
            reask(s, ctx, r);
        } else if (s.status == SessionStatus::Open) {
            append(r.text, "You can ask me about: " + decision_list(*s.bundle) + ".");
        }
    }
    if (!fallback) s.fallbacks = 0;
    r.intent = intent ? intent->name : m.intent;
    if (r.intent.empty()) r.intent = kFallbackIntent;
    if (!s.closed) ctx.finish();
    s.transcript.push_back({"bot", r.text});
    return r;
}

std::string context_summary(const Session& s) {
    if (s.collected.empty()) return "No values provided yet.";
    std::string text;
    if (s.active_decision) {
        const DecisionInfo* d = s.bundle->find_decision(*s.active_decision);
        text = "Current decision: " + (d ? d->label : *s.active_decision) + ". ";
    }
    std::vector<std::string> parts;
    for (const auto& [name, v] : s.collected) {
        const InputInfo* info = s.bundle->find_input(name);
        parts.push_back((info ? info->label : name) + " = " + display_for_user(v));
    }
    return text + "Values provided so far: " + join(parts, ", ") + ".";
}

Response help_response(const Session& s, std::optional<std::string> input) {
    Response r;
    if (!input) {
        r.text = from_pool(s, kHelpIntent);
        r.help = r.text;
        return r;
    }
    const auto& info = input_info(*s.bundle, *input);
    r.text = input_help_text(info);
    r.help = r.text;
    r.suggestions = info.suggestions;
    return r;
}

std::vector<std::string> suggestions_for(const AgentBundle& bundle, std::string_view input) {
    return input_info(bundle, input).suggestions;
}

}  // namespace dmnbot
