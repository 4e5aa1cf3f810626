#include "dmnbot/nlu.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

namespace dmnbot {

namespace {

bool word_char(unsigned char c) { return c >= 0x80 || std::isalnum(c); }
bool digit(char c) { return c >= '0' && c <= '9'; }

bool connective(const std::string& w) {
    static const std::set<std::string> words = {"equals", "equal", "to", "is", "are", "as", "of", "be", "set"};
    return words.count(w) > 0;
}

std::optional<Value> number_token(const std::string& w) {
    if (w.empty()) return std::nullopt;
    std::size_t i = w[0] == '-' ? 1 : 0;
    if (i == w.size()) return std::nullopt;
    bool dot = false;
    for (std::size_t k = i; k < w.size(); ++k) {
        if (w[k] == '.') {
            if (dot) return std::nullopt;
            dot = true;
        } else if (!digit(w[k])) {
            return std::nullopt;
        }
    }
    double v = 0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || ptr != w.data() + w.size()) return std::nullopt;
    return Value::number(v, dot ? TypeRef::Double : TypeRef::Integer);
}

std::vector<std::string> words_of(std::string_view text) {
    std::vector<std::string> out;
    for (auto& t : tokenize(text)) out.push_back(std::move(t.text));
    return out;
}

void add_candidate(std::vector<std::pair<std::string, Value>>& refs, const std::string& entity, const Value& v) {
    for (const auto& [e, _] : refs) {
        if (e == entity) return;
    }
    refs.emplace_back(entity, v);
}

struct Extraction {
    std::map<std::string, Value> slots;
    std::size_t absorbed = 0;
};

Extraction extract(const Intent& intent, const std::vector<EntitySpan>& spans, const std::vector<Token>& tokens) {
    Extraction out;
    std::vector<std::vector<std::string>> labels;
    for (const auto& p : intent.parameters) labels.push_back(words_of(p.label));

    auto label_before = [&](const EntitySpan& s, std::size_t floor) -> const Parameter* {
        if (tokens.empty()) return nullptr;
        std::size_t j = s.first_token;
        while (j > floor && connective(tokens[j - 1].text)) --j;
        const Parameter* best = nullptr;
        std::size_t best_len = 0;
        for (std::size_t k = 0; k < intent.parameters.size(); ++k) {
            const auto& L = labels[k];
            if (L.empty() || L.size() > j - floor || L.size() <= best_len) continue;
            if (!s.has_entity(intent.parameters[k].entity)) continue;
            bool eq = true;
            for (std::size_t m = 0; m < L.size() && eq; ++m) eq = tokens[j - L.size() + m].text == L[m];
            if (eq) {
                best = &intent.parameters[k];
                best_len = L.size();
            }
        }
        return best;
    };

    std::size_t floor = 0;
    for (const auto& s : spans) {
        const Parameter* target = label_before(s, floor);
        floor = s.last_token;
        if (!target) {
            for (const auto& p : intent.parameters) {
                if (p.required && p.name == intent.input && !out.slots.count(p.name) && s.has_entity(p.entity)) {
                    target = &p;
                }
            }
        }
        if (!target) {
            for (const auto& p : intent.parameters) {
                if (!out.slots.count(p.name) && s.has_entity(p.entity)) {
                    target = &p;
                    break;
                }
            }
        }
        if (!target) {
            for (const auto& p : intent.parameters) {
                if (s.has_entity(p.entity)) {
                    target = &p;
                    break;
                }
            }
        }
        if (!target) continue;
        Value v = *s.value_for(target->entity);
        if (is_numeric(target->type)) {
            if (!v.is_number()) continue;
            if (is_integral(target->type) && std::floor(v.as_number()) != v.as_number()) continue;
            v = v.coerced_to(target->type);
        }
        out.slots[target->name] = v;
        ++out.absorbed;
    }
    return out;
}

std::vector<std::string> masked_words(const std::vector<Token>& tokens, const std::vector<EntitySpan>& spans) {
    std::vector<std::string> out;
    std::size_t k = 0;
    for (const auto& s : spans) {
        for (; k < s.first_token; ++k) out.push_back(tokens[k].text);
        out.push_back(s.candidates.size() == 1 ? "@" + s.entity : std::string("@generic"));
        k = s.last_token;
    }
    for (; k < tokens.size(); ++k) out.push_back(tokens[k].text);
    return out;
}

double jaccard(const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t i = 0, j = 0, common = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++common;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    std::size_t uni = a.size() + b.size() - common;
    return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        bool sign = c == '-' && i + 1 < n && digit(text[i + 1]) &&
                    (i == 0 || !word_char(static_cast<unsigned char>(text[i - 1])));
        if (!word_char(c) && !sign) {
            ++i;
            continue;
        }
        std::size_t start = i;
        std::string word;
        if (sign) word.push_back(text[i++]);
        while (i < n) {
            unsigned char d = static_cast<unsigned char>(text[i]);
            if (word_char(d)) {
                word.push_back(d < 0x80 ? static_cast<char>(std::tolower(d)) : static_cast<char>(d));
                ++i;
            } else if (d == '.' && i + 1 < n && digit(text[i + 1]) && !word.empty() && digit(word.back())) {
                word.push_back('.');
                ++i;
            } else {
                break;
            }
        }
        out.push_back({std::move(word), start, i});
    }
    return out;
}

bool EntitySpan::has_entity(std::string_view e) const { return value_for(e) != nullptr; }

const Value* EntitySpan::value_for(std::string_view e) const {
    for (const auto& [name, v] : candidates) {
        if (name == e) return &v;
    }
    return nullptr;
}

void NluIndex::add_entities(const std::vector<Entity>& entities) {
    for (const auto& e : entities) {
        kinds_[e.name] = e.kind;
        for (const auto& [surface, ref] : e.surfaces()) {
            auto words = words_of(surface);
            if (words.empty()) continue;
            longest_ = std::max(longest_, words.size());
            add_candidate(surfaces_[words], e.name, ref);
        }
    }
}

NluIndex::NluIndex(const AgentBundle& bundle) : intents_(bundle.intents) {
    add_entities(bundle.entities);
    for (std::size_t k = 0; k < intents_.size(); ++k) {
        IntentEntry entry;
        entry.intent = k;
        for (const auto& tp : intents_[k].training_phrases) {
            auto tokens = tokenize(tp.text);
            std::vector<int> ids;
            for (const auto& w : masked_words(tokens, spot_tokens(tokens, tp.text))) {
                auto [it, _] = vocabulary_.emplace(w, static_cast<int>(vocabulary_.size()));
                ids.push_back(it->second);
            }
            entry.phrases.push_back(sorted_unique(std::move(ids)));
        }
        std::sort(entry.phrases.begin(), entry.phrases.end());
        entry.phrases.erase(std::unique(entry.phrases.begin(), entry.phrases.end()), entry.phrases.end());
        entries_.push_back(std::move(entry));
    }
}

std::vector<int> NluIndex::lookup_ids(const std::vector<std::string>& words) const {
    std::vector<int> ids;
    std::map<std::string, int> unknown;
    for (const auto& w : words) {
        auto it = vocabulary_.find(w);
        if (it != vocabulary_.end()) {
            ids.push_back(it->second);
        } else {
            auto [u, _] = unknown.emplace(w, -1 - static_cast<int>(unknown.size()));
            ids.push_back(u->second);
        }
    }
    return sorted_unique(std::move(ids));
}

std::vector<EntitySpan> NluIndex::spot_tokens(const std::vector<Token>& tokens, std::string_view text) const {
    struct Hit {
        std::size_t first, last;
        std::vector<std::pair<std::string, Value>> refs;
    };
    std::vector<Hit> hits;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        std::vector<std::string> key;
        for (std::size_t len = 1; len <= longest_ && i + len <= tokens.size(); ++len) {
            key.push_back(tokens[i + len - 1].text);
            auto it = surfaces_.find(key);
            std::vector<std::pair<std::string, Value>> refs;
            if (it != surfaces_.end()) refs = it->second;
            if (len == 1) {
                if (auto num = number_token(tokens[i].text)) add_candidate(refs, kNumberEntity, *num);
            }
            if (!refs.empty()) hits.push_back({i, i + len, std::move(refs)});
        }
    }
    auto chars = [&](const Hit& h) { return tokens[h.last - 1].end - tokens[h.first].start; };
    std::stable_sort(hits.begin(), hits.end(), [&](const Hit& a, const Hit& b) {
        if (chars(a) != chars(b)) return chars(a) > chars(b);
        return a.first < b.first;
    });
    std::vector<bool> taken(tokens.size(), false);
    std::vector<EntitySpan> spans;
    for (auto& h : hits) {
        bool free = true;
        for (std::size_t k = h.first; k < h.last && free; ++k) free = !taken[k];
        if (!free) continue;
        for (std::size_t k = h.first; k < h.last; ++k) taken[k] = true;
        EntitySpan s;
        s.start = tokens[h.first].start;
        s.end = tokens[h.last - 1].end;
        s.first_token = h.first;
        s.last_token = h.last;
        s.surface = std::string(text.substr(s.start, s.end - s.start));
        s.candidates = std::move(h.refs);
        s.entity = s.candidates.front().first;
        s.value = s.candidates.front().second;
        spans.push_back(std::move(s));
    }
    std::sort(spans.begin(), spans.end(), [](const EntitySpan& a, const EntitySpan& b) { return a.start < b.start; });

    // Fold "<boolean label> [equals to] <value>" into the value span.
    std::vector<EntitySpan> out;
    for (std::size_t k = 0; k < spans.size(); ++k) {
        const auto& s = spans[k];
        if (k + 1 < spans.size() && s.candidates.size() == 1) {
            auto kind = kinds_.find(s.entity);
            const auto& next = spans[k + 1];
            bool bridged = true;
            for (std::size_t t = s.last_token; t < next.first_token && bridged; ++t) bridged = connective(tokens[t].text);
            if (kind != kinds_.end() && kind->second == EntityKind::CustomBoolean && bridged &&
                next.has_entity(s.entity)) {
                Value v = *next.value_for(s.entity);
                spans[k + 1].candidates = {{s.entity, v}};
                spans[k + 1].entity = s.entity;
                spans[k + 1].value = v;
                continue;
            }
        }
        out.push_back(s);
    }
    return out;
}

std::vector<EntitySpan> NluIndex::spot(std::string_view text) const { return spot_tokens(tokenize(text), text); }

std::vector<EntitySpan> spot_entities(std::string_view text, const std::vector<Entity>& entities) {
    NluIndex index;
    index.add_entities(entities);
    return index.spot(text);
}

std::map<std::string, Value> extract_slots(const Intent& intent, const std::vector<EntitySpan>& spans,
                                           std::string_view text) {
    return extract(intent, spans, text.empty() ? std::vector<Token>{} : tokenize(text)).slots;
}

Match NluIndex::match(std::string_view text, const std::set<std::string>& active_contexts) const {
    auto tokens = tokenize(text);
    auto spans = spot_tokens(tokens, text);
    auto words = masked_words(tokens, spans);
    auto ids = lookup_ids(words);

    Match best;
    best.intent = kFallbackIntent;
    int best_required = -1;
    bool have = false;
    std::vector<int> best_phrase;
    for (const auto& entry : entries_) {
        const Intent& intent = intents_[entry.intent];
        if (intent.name == kFallbackIntent) continue;
        bool eligible = std::all_of(intent.input_contexts.begin(), intent.input_contexts.end(),
                                    [&](const std::string& c) { return active_contexts.count(c) > 0; });
        if (!eligible) continue;
        auto ex = extract(intent, spans, tokens);
        double fill = spans.empty() ? 0.0 : static_cast<double>(ex.absorbed) / static_cast<double>(spans.size());
        double overlap = 0.0;
        const std::vector<int>* closest = nullptr;
        for (const auto& p : entry.phrases) {
            double j = jaccard(ids, p);
            if (j > overlap) {
                overlap = j;
                closest = &p;
            }
        }
        double score = kFillWeight * fill + kOverlapWeight * overlap;
        int required = 0;
        for (const auto& p : intent.parameters) required += (p.required && ex.slots.count(p.name)) ? 1 : 0;
        bool better = !have || score > best.score + 1e-12 ||
                      (std::abs(score - best.score) <= 1e-12 &&
                       (required > best_required || (required == best_required && intent.name < best.intent)));
        if (better) {
            have = true;
            best.intent = intent.name;
            best.score = score;
            best.slots = std::move(ex.slots);
            best_required = required;
            best_phrase = closest ? *closest : std::vector<int>{};
        }
    }
    int residual = 0;
    for (int id : ids) residual += std::binary_search(best_phrase.begin(), best_phrase.end(), id) ? 0 : 1;
    best.residual = residual;
    if (!have || best.score < kFallbackThreshold) {
        best.intent = kFallbackIntent;
        best.slots.clear();
    }
    return best;
}

Match match_intent(std::string_view text, const std::set<std::string>& active_contexts, const AgentBundle& bundle) {
    if (bundle.nlu) return bundle.nlu->match(text, active_contexts);
    return NluIndex(bundle).match(text, active_contexts);
}

}  // namespace dmnbot
