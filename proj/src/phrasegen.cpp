#include "dmnbot/phrasegen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "dmnbot/errors.hpp"
#include "dmnbot/relevance.hpp"
#include "dmnbot/rng.hpp"

namespace dmnbot {

namespace {

constexpr std::uint64_t kCap = std::uint64_t{1} << 62;

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a + b >= kCap ? kCap : a + b; }
std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    return a > kCap / b ? kCap : a * b;
}

// P(n, k) = n! / (n-k)!, saturating.
std::uint64_t perm_count(std::uint64_t n, std::uint64_t k) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < k; ++i) r = sat_mul(r, n - i);
    return r;
}

std::vector<std::string> unrank_kperm(const std::vector<std::string>& items, std::size_t k, std::uint64_t rank) {
    std::vector<std::string> pool = items;
    std::vector<std::string> out;
    for (std::size_t i = 0; i < k; ++i) {
        std::uint64_t block = perm_count(pool.size() - 1, k - i - 1);
        std::size_t pick = static_cast<std::size_t>(rank / block);
        rank %= block;
        out.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return out;
}

void all_kperms(const std::vector<std::string>& items, std::size_t k, std::vector<std::string>& prefix,
                std::vector<bool>& used, std::vector<std::vector<std::string>>& out) {
    if (prefix.size() == k) {
        out.push_back(prefix);
        return;
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        prefix.push_back(items[i]);
        all_kperms(items, k, prefix, used, out);
        prefix.pop_back();
        used[i] = false;
    }
}

}  // namespace

std::vector<std::vector<std::string>> kperm_sample(const std::vector<std::string>& slots, std::uint64_t seed) {
    std::vector<std::vector<std::string>> out;
    const std::size_t n = slots.size();
    if (n == 0) return out;
    if (n <= 3) {
        for (std::size_t k = 1; k <= n; ++k) {
            std::vector<std::string> prefix;
            std::vector<bool> used(n, false);
            all_kperms(slots, k, prefix, used, out);
        }
        return out;
    }

    Rng rng(seed);
    for (const auto& s : slots) out.push_back({s});

    std::vector<std::string> full = slots;
    rng.shuffle(full.begin(), full.end());

    std::vector<std::uint64_t> per_k(n, 0);
    std::uint64_t others = 0;
    for (std::size_t k = 2; k < n; ++k) {
        per_k[k] = perm_count(n, k);
        others = sat_add(others, per_k[k]);
    }
    std::uint64_t want = std::min<std::uint64_t>(2 * n, others);
    std::set<std::vector<std::string>> seen;
    std::vector<std::vector<std::string>> drawn;
    while (drawn.size() < want) {
        std::uint64_t r = rng.below(others);
        std::size_t k = 2;
        while (k + 1 < n && r >= per_k[k]) {
            r -= per_k[k];
            ++k;
        }
        auto p = unrank_kperm(slots, k, std::min(r, per_k[k] - 1));
        if (seen.insert(p).second) drawn.push_back(std::move(p));
    }
    std::stable_sort(drawn.begin(), drawn.end(),
                     [](const auto& a, const auto& b) { return a.size() < b.size(); });
    out.insert(out.end(), drawn.begin(), drawn.end());
    out.push_back(std::move(full));
    return out;
}

SlotDef slot_pool(const Parameter& p, const std::vector<Entity>& entities, const Domain* domain) {
    SlotDef def;
    def.entity = p.entity;
    if (is_numeric(p.type)) {
        std::vector<double> points;
        if (domain && !domain->boundaries.empty()) {
            double lo = domain->boundaries.front();
            double hi = domain->boundaries.back();
            double mid = (lo + hi) / 2;
            if (is_integral(p.type)) mid = std::floor(mid);
            points = {lo, hi, mid};
        } else {
            points = {1};
        }
        std::set<std::string> seen;
        for (double x : points) {
            Value v = Value::number(x, p.type);
            if (seen.insert(v.display()).second) def.pool.push_back({v.display(), v});
        }
        return def;
    }
    for (const auto& e : entities) {
        if (e.name != p.entity) continue;
        for (auto& [surface, value] : e.surfaces()) def.pool.push_back({surface, value});
    }
    return def;
}

// ---------------------------------------------------------------------------
// Spec builders

namespace {

const std::vector<std::string> kInitPhrases = {"i want to know the", "i want to determine the", "what is the",
                                               "tell me the"};

std::string param_alias(const Parameter& p) { return "param " + p.name; }

void add_param_alias(GenSpec& spec, const Parameter& p) {
    std::vector<Sentence> alts;
    alts.push_back({Segment::literal(fold_text(p.label)), Segment::slot(p.name)});
    if (p.type != TypeRef::Boolean) alts.push_back({Segment::slot(p.name)});
    spec.aliases[param_alias(p)] = std::move(alts);
}

}  // namespace

GenSpec build_decision_spec(const Intent& intent, const DecisionInfo& decision,
                            const std::map<std::string, SlotDef>& pools, std::uint64_t seed) {
    GenSpec spec;
    spec.intent = intent.name;
    Sentence pattern{Segment::alias("init", true), Segment::alias("decision")};

    for (const auto& text : kInitPhrases) spec.aliases["init"].push_back({Segment::literal(text)});
    auto& names = spec.aliases["decision"];
    names.push_back({Segment::literal(decision.label)});
    if (!decision.output_label.empty() && fold_text(decision.output_label) != fold_text(decision.label)) {
        names.push_back({Segment::literal(decision.output_label)});
    }

    if (!intent.parameters.empty()) {
        pattern.push_back(Segment::alias("with parameters", true));
        spec.aliases["preposition"] = {{Segment::literal("with")}, {Segment::literal("for")}};
        std::vector<std::string> order;
        for (const auto& p : intent.parameters) {
            order.push_back(p.name);
            add_param_alias(spec, p);
            spec.slots[p.name] = pools.at(p.name);
        }
        auto& with = spec.aliases["with parameters"];
        for (const auto& ordering : kperm_sample(order, fnv1a(intent.name, seed))) {
            Sentence s{Segment::alias("preposition", true)};
            for (std::size_t i = 0; i < ordering.size(); ++i) {
                if (i) s.push_back(Segment::literal("and"));
                s.push_back(Segment::alias(param_alias(*intent.find_parameter(ordering[i]))));
            }
            with.push_back(std::move(s));
        }
    }
    spec.patterns.push_back(std::move(pattern));
    return spec;
}

GenSpec build_input_spec(const Intent& intent, const std::map<std::string, SlotDef>& pools) {
    GenSpec spec;
    spec.intent = intent.name;
    const Parameter* required = nullptr;
    for (const auto& p : intent.parameters) {
        if (p.required) required = &p;
    }
    if (!required) throw SpecError("input intent '" + intent.name + "' has no required parameter");
    for (const auto& p : intent.parameters) spec.slots[p.name] = pools.at(p.name);

    spec.patterns.push_back({Segment::slot(required->name)});
    spec.aliases["a value of"] = {{Segment::literal("a value of")}};
    spec.aliases["name"] = {{Segment::literal(fold_text(required->label))}};
    spec.patterns.push_back({Segment::alias("a value of", true), Segment::alias("name", true),
                             Segment::literal("equals to"), Segment::slot(required->name)});

    std::vector<Sentence> others;
    for (const auto& p : intent.parameters) {
        if (&p == required) continue;
        add_param_alias(spec, p);
        others.push_back({Segment::alias("preposition", true), Segment::alias(param_alias(p))});
    }
    if (!others.empty()) {
        spec.aliases["preposition"] = {{Segment::literal("with")}, {Segment::literal("and")}};
        spec.aliases["other parameters"] = std::move(others);
        spec.patterns.push_back({Segment::slot(required->name), Segment::alias("other parameters", true)});
    }
    return spec;
}

GenSpec build_support_spec(const Intent& intent, const std::string& input_label, bool label_is_value) {
    static const std::map<std::string, std::vector<std::string>> fixed = {
        {kWelcomeIntent, {"hi", "hello", "hey there", "good morning", "good afternoon", "hello there", "start"}},
        {kHelpIntent, {"help", "i need help", "how does this work", "what can you do", "help me please",
                       "i am lost"}},
        {kCancelIntent, {"cancel", "stop", "start over", "forget it", "abort", "cancel the conversation"}},
        {kEndIntent, {"thanks", "thank you", "bye", "goodbye", "thanks bye", "that is all", "see you"}},
    };
    GenSpec spec;
    spec.intent = intent.name;
    std::vector<std::string> phrases;
    if (intent.kind == IntentKind::Help) {
        phrases = {"what are the options", "which options do i have", "what can i answer here",
                   "i do not know what to answer", "give me some examples", "what should i say"};
        if (!label_is_value) {
            auto label = fold_text(input_label);
            phrases.push_back("what does " + label + " mean");
            phrases.push_back("explain " + label);
            phrases.push_back("help with " + label);
        }
    } else if (auto it = fixed.find(intent.name); it != fixed.end()) {
        phrases = it->second;
    }
    for (const auto& p : phrases) spec.patterns.push_back({Segment::literal(p)});
    return spec;
}

// ---------------------------------------------------------------------------
// Expansion

namespace {

struct Piece {
    std::string text;
    const std::string* param = nullptr;
    const SlotValue* value = nullptr;
};

class Expander {
public:
    explicit Expander(const GenSpec& spec) : spec_(spec) {
        for (const auto& [name, alts] : spec_.aliases) {
            std::set<std::string> visiting;
            check_alias(name, visiting);
        }
        for (const auto& p : spec_.patterns) check_sentence(p);
    }

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (const auto& p : spec_.patterns) t = sat_add(t, count(p));
        return t;
    }

    TrainingPhrase unrank(std::uint64_t index) const {
        std::vector<Piece> pieces;
        for (const auto& p : spec_.patterns) {
            auto c = count(p);
            if (index < c) {
                render_index(p, index, pieces);
                return assemble(pieces);
            }
            index -= c;
        }
        return {};
    }

    // Default renderings: every alias alternative once, and each pattern with
    // all optional parts off.
    std::vector<TrainingPhrase> forced() const {
        std::vector<TrainingPhrase> out;
        std::size_t counter = 0;
        for (const auto& p : spec_.patterns) {
            std::vector<Piece> pieces;
            render_forced(p, "", 0, counter, pieces);
            out.push_back(assemble(pieces));
        }
        for (const auto& [name, alts] : spec_.aliases) {
            for (std::size_t k = 0; k < alts.size(); ++k) {
                for (const auto& p : spec_.patterns) {
                    if (!sentence_reaches(p, name)) continue;
                    std::vector<Piece> pieces;
                    render_forced(p, name, k, counter, pieces);
                    out.push_back(assemble(pieces));
                    break;
                }
            }
        }
        return out;
    }

private:
    void check_sentence(const Sentence& s) const {
        for (const auto& seg : s) {
            if (seg.kind == Segment::Kind::Alias && !spec_.aliases.count(seg.text)) {
                throw SpecError("unresolved alias '" + seg.text + "' in spec " + spec_.intent);
            }
            if (seg.kind == Segment::Kind::Slot) {
                auto it = spec_.slots.find(seg.text);
                if (it == spec_.slots.end()) throw SpecError("unresolved slot '" + seg.text + "' in spec " + spec_.intent);
                if (it->second.pool.empty()) throw SpecError("slot '" + seg.text + "' has an empty pool");
            }
        }
    }

    void check_alias(const std::string& name, std::set<std::string>& visiting) const {
        if (!visiting.insert(name).second) throw SpecError("recursive alias '" + name + "' in spec " + spec_.intent);
        for (const auto& alt : spec_.aliases.at(name)) {
            check_sentence(alt);
            for (const auto& seg : alt) {
                if (seg.kind == Segment::Kind::Alias) check_alias(seg.text, visiting);
            }
        }
        visiting.erase(name);
    }

    std::uint64_t count(const Sentence& s) const {
        std::uint64_t c = 1;
        for (const auto& seg : s) c = sat_mul(c, count(seg));
        return c;
    }

    std::uint64_t count(const Segment& seg) const {
        switch (seg.kind) {
            case Segment::Kind::Text: return 1;
            case Segment::Kind::Slot: return spec_.slots.at(seg.text).pool.size() + (seg.optional ? 1 : 0);
            case Segment::Kind::Alias: {
                auto it = alias_counts_.find(seg.text);
                std::uint64_t c;
                if (it != alias_counts_.end()) {
                    c = it->second;
                } else {
                    c = 0;
                    for (const auto& alt : spec_.aliases.at(seg.text)) c = sat_add(c, count(alt));
                    alias_counts_[seg.text] = c;
                }
                return sat_add(c, seg.optional ? 1 : 0);
            }
        }
        return 1;
    }

    void render_index(const Sentence& s, std::uint64_t index, std::vector<Piece>& out) const {
        std::vector<std::uint64_t> digits;
        for (auto it = s.rbegin(); it != s.rend(); ++it) {
            auto c = count(*it);
            digits.push_back(index % c);
            index /= c;
        }
        std::reverse(digits.begin(), digits.end());
        for (std::size_t i = 0; i < s.size(); ++i) render_segment(s[i], digits[i], out);
    }

    void render_segment(const Segment& seg, std::uint64_t d, std::vector<Piece>& out) const {
        switch (seg.kind) {
            case Segment::Kind::Text: out.push_back({seg.text}); return;
            case Segment::Kind::Slot: {
                if (seg.optional) {
                    if (d == 0) return;
                    --d;
                }
                const auto& v = spec_.slots.at(seg.text).pool[d];
                out.push_back({v.surface, &seg.text, &v});
                return;
            }
            case Segment::Kind::Alias: {
                if (seg.optional) {
                    if (d == 0) return;
                    --d;
                }
                for (const auto& alt : spec_.aliases.at(seg.text)) {
                    auto c = count(alt);
                    if (d < c) {
                        render_index(alt, d, out);
                        return;
                    }
                    d -= c;
                }
                return;
            }
        }
    }

    bool reaches(const std::string& alias, const std::string& target) const {
        if (alias == target) return true;
        for (const auto& alt : spec_.aliases.at(alias)) {
            if (sentence_reaches(alt, target)) return true;
        }
        return false;
    }

    bool sentence_reaches(const Sentence& s, const std::string& target) const {
        for (const auto& seg : s) {
            if (seg.kind == Segment::Kind::Alias && reaches(seg.text, target)) return true;
        }
        return false;
    }

    void render_forced(const Sentence& s, const std::string& target, std::size_t alt, std::size_t& counter,
                       std::vector<Piece>& out) const {
        for (const auto& seg : s) {
            switch (seg.kind) {
                case Segment::Kind::Text: out.push_back({seg.text}); break;
                case Segment::Kind::Slot: {
                    if (seg.optional) break;
                    const auto& pool = spec_.slots.at(seg.text).pool;
                    const auto& v = pool[counter++ % pool.size()];
                    out.push_back({v.surface, &seg.text, &v});
                    break;
                }
                case Segment::Kind::Alias: {
                    const auto& alts = spec_.aliases.at(seg.text);
                    if (seg.text == target) {
                        render_forced(alts[alt], target, alt, counter, out);
                    } else if (!target.empty() && reaches(seg.text, target)) {
                        for (const auto& a : alts) {
                            if (sentence_reaches(a, target)) {
                                render_forced(a, target, alt, counter, out);
                                break;
                            }
                        }
                    } else if (!seg.optional) {
                        render_forced(alts.front(), target, alt, counter, out);
                    }
                    break;
                }
            }
        }
    }

    static TrainingPhrase assemble(const std::vector<Piece>& pieces) {
        TrainingPhrase tp;
        for (const auto& piece : pieces) {
            if (piece.text.empty()) continue;
            if (!tp.text.empty()) tp.text.push_back(' ');
            std::size_t start = tp.text.size();
            tp.text += piece.text;
            if (piece.param) {
                tp.spans.push_back({start, tp.text.size(), *piece.param, "", piece.value->surface, piece.value->value});
            }
        }
        return tp;
    }

    const GenSpec& spec_;
    mutable std::map<std::string, std::uint64_t> alias_counts_;
};

}  // namespace

std::uint64_t expansion_count(const GenSpec& spec) { return Expander(spec).total(); }

std::vector<TrainingPhrase> expand(const GenSpec& spec, std::uint64_t seed, std::size_t max_phrases) {
    Expander ex(spec);
    std::vector<TrainingPhrase> out;
    std::set<std::string> seen;
    auto add = [&](TrainingPhrase tp) {
        if (out.size() >= max_phrases || tp.text.empty()) return;
        if (!seen.insert(fold_text(tp.text)).second) return;
        for (auto& s : tp.spans) s.entity = spec.slots.at(s.param).entity;
        out.push_back(std::move(tp));
    };

    const std::uint64_t total = ex.total();
    for (auto& tp : ex.forced()) add(std::move(tp));
    if (total <= max_phrases) {
        for (std::uint64_t i = 0; i < total; ++i) add(ex.unrank(i));
        return out;
    }
    Rng rng(fnv1a(spec.intent, seed));
    const std::size_t attempts = 50 * max_phrases;
    for (std::size_t i = 0; i < attempts && out.size() < max_phrases; ++i) add(ex.unrank(rng.below(total)));
    return out;
}

// ---------------------------------------------------------------------------
// Recognizer

namespace {

std::vector<std::string> words(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(fold_text(text));
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

class Recognizer {
public:
    Recognizer(const GenSpec& spec, std::vector<std::string> tokens) : spec_(spec), tokens_(std::move(tokens)) {}

    bool accepts() {
        for (const auto& p : spec_.patterns) {
            if (sentence(p, 0, 0).count(tokens_.size())) return true;
        }
        return false;
    }

private:
    bool match_words(const std::string& text, std::size_t pos, std::size_t& end) const {
        auto w = words(text);
        if (pos + w.size() > tokens_.size()) return false;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (tokens_[pos + i] != w[i]) return false;
        }
        end = pos + w.size();
        return true;
    }

    std::set<std::size_t> sentence(const Sentence& s, std::size_t i, std::size_t pos) {
        if (i == s.size()) return {pos};
        std::set<std::size_t> out;
        for (auto next : segment(s[i], pos)) {
            auto rest = sentence(s, i + 1, next);
            out.insert(rest.begin(), rest.end());
        }
        return out;
    }

    std::set<std::size_t> segment(const Segment& seg, std::size_t pos) {
        std::set<std::size_t> out;
        if (seg.optional) out.insert(pos);
        std::size_t end = 0;
        switch (seg.kind) {
            case Segment::Kind::Text:
                if (match_words(seg.text, pos, end)) out.insert(end);
                break;
            case Segment::Kind::Slot:
                for (const auto& v : spec_.slots.at(seg.text).pool) {
                    if (match_words(v.surface, pos, end)) out.insert(end);
                }
                break;
            case Segment::Kind::Alias:
                for (const auto& alt : spec_.aliases.at(seg.text)) {
                    auto r = sentence(alt, 0, pos);
                    out.insert(r.begin(), r.end());
                }
                break;
        }
        return out;
    }

    const GenSpec& spec_;
    std::vector<std::string> tokens_;
};

}  // namespace

bool spec_accepts(const GenSpec& spec, const std::string& text) {
    Expander check(spec);  // validates references
    (void)check;
    return Recognizer(spec, words(text)).accepts();
}

// ---------------------------------------------------------------------------
// DSL

namespace {

std::string render_sentence(const Sentence& s) {
    std::string out;
    for (const auto& seg : s) {
        if (!out.empty()) out.push_back(' ');
        switch (seg.kind) {
            case Segment::Kind::Text: out += seg.text; break;
            case Segment::Kind::Alias: out += "~[" + seg.text + (seg.optional ? "?]" : "]"); break;
            case Segment::Kind::Slot: out += "@[" + seg.text + (seg.optional ? "?]" : "]"); break;
        }
    }
    return out;
}

std::string trim_copy(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

Sentence parse_sentence(const std::string& line) {
    Sentence s;
    std::size_t pos = 0;
    auto flush_text = [&](const std::string& text) {
        auto t = trim_copy(text);
        if (!t.empty()) s.push_back(Segment::literal(t));
    };
    while (pos < line.size()) {
        auto ref = line.find_first_of("~@", pos);
        while (ref != std::string::npos && (ref + 1 >= line.size() || line[ref + 1] != '[')) {
            ref = line.find_first_of("~@", ref + 1);
        }
        if (ref == std::string::npos) {
            flush_text(line.substr(pos));
            break;
        }
        flush_text(line.substr(pos, ref - pos));
        auto close = line.find(']', ref);
        if (close == std::string::npos) throw SpecError("unterminated reference in '" + line + "'");
        std::string name = line.substr(ref + 2, close - ref - 2);
        bool optional = !name.empty() && name.back() == '?';
        if (optional) name.pop_back();
        s.push_back(line[ref] == '~' ? Segment::alias(name, optional) : Segment::slot(name, optional));
        pos = close + 1;
    }
    return s;
}

}  // namespace

std::string serialize_spec(const GenSpec& spec) {
    std::ostringstream os;
    os << "%[" << spec.intent << "]\n";
    for (const auto& p : spec.patterns) os << "    " << render_sentence(p) << "\n";
    for (const auto& [name, alts] : spec.aliases) {
        os << "\n~[" << name << "]\n";
        for (const auto& a : alts) os << "    " << render_sentence(a) << "\n";
    }
    for (const auto& [name, def] : spec.slots) {
        os << "\n@[" << name << "] " << def.entity << "\n";
        for (const auto& v : def.pool) {
            os << "    " << v.surface;
            if (!(v.value.is_string() && v.value.as_string() == v.surface)) os << " => " << v.value.literal();
            os << "\n";
        }
    }
    return os.str();
}

GenSpec parse_spec(const std::string& text) {
    GenSpec spec;
    std::istringstream in(text);
    std::string line;
    enum class Block { None, Intent, Alias, Slot } block = Block::None;
    std::string current;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (trim_copy(line).empty()) continue;
        bool indented = line[0] == ' ' || line[0] == '\t';
        if (!indented) {
            auto close = line.find(']');
            if (line.size() < 3 || line[1] != '[' || close == std::string::npos) {
                throw SpecError("line " + std::to_string(number) + ": expected a definition header");
            }
            current = line.substr(2, close - 2);
            switch (line[0]) {
                case '%': block = Block::Intent; spec.intent = current; break;
                case '~': block = Block::Alias; spec.aliases[current]; break;
                case '@':
                    block = Block::Slot;
                    spec.slots[current].entity = trim_copy(line.substr(close + 1));
                    break;
                default: throw SpecError("line " + std::to_string(number) + ": unknown definition kind");
            }
            continue;
        }
        auto body = trim_copy(line);
        switch (block) {
            case Block::None: throw SpecError("line " + std::to_string(number) + ": content outside a definition");
            case Block::Intent: spec.patterns.push_back(parse_sentence(body)); break;
            case Block::Alias: spec.aliases[current].push_back(parse_sentence(body)); break;
            case Block::Slot: {
                auto arrow = body.find(" => ");
                if (arrow == std::string::npos) {
                    spec.slots[current].pool.push_back({body, Value::string(body)});
                } else {
                    auto v = parse_literal(body.substr(arrow + 4));
                    if (!v) throw SpecError("line " + std::to_string(number) + ": bad slot value");
                    spec.slots[current].pool.push_back({body.substr(0, arrow), *v});
                }
                break;
            }
        }
    }
    return spec;
}

}  // namespace dmnbot
