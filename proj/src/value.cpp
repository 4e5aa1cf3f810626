#include "dmnbot/value.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace dmnbot {

std::string_view to_string(TypeRef t) {
    switch (t) {
        case TypeRef::String: return "string";
        case TypeRef::Boolean: return "boolean";
        case TypeRef::Integer: return "integer";
        case TypeRef::Long: return "long";
        case TypeRef::Double: return "double";
    }
    return "string";
}

std::optional<TypeRef> type_ref_from_string(std::string_view text) {
    std::string t;
    for (char c : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    // DMN editors sometimes emit prefixed type names ("feel:string").
    if (auto colon = t.find(':'); colon != std::string::npos) t = t.substr(colon + 1);
    if (t == "string") return TypeRef::String;
    if (t == "boolean") return TypeRef::Boolean;
    if (t == "integer" || t == "int") return TypeRef::Integer;
    if (t == "long") return TypeRef::Long;
    if (t == "double" || t == "number") return TypeRef::Double;
    return std::nullopt;
}

bool is_numeric(TypeRef t) {
    return t == TypeRef::Integer || t == TypeRef::Long || t == TypeRef::Double;
}

bool is_integral(TypeRef t) { return t == TypeRef::Integer || t == TypeRef::Long; }

std::string normalize_name(std::string_view label) {
    std::string out;
    out.reserve(label.size());
    for (unsigned char c : label) {
        if (std::isalnum(c) && c < 0x80) out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::string fold_text(std::string_view text) {
    std::string out;
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    }
    return out;
}

std::string format_number(double v, bool integral) {
    if (integral || (std::floor(v) == v && std::fabs(v) < 1e15)) {
        char buf[32];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, static_cast<long long>(std::llround(v)));
        return std::string(buf, ptr);
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

TypeRef Value::type() const {
    switch (kind()) {
        case Kind::String: return TypeRef::String;
        case Kind::Boolean: return TypeRef::Boolean;
        case Kind::Number: return number_kind();
    }
    return TypeRef::String;
}

bool Value::conforms_to(TypeRef t) const {
    switch (kind()) {
        case Kind::String: return t == TypeRef::String;
        case Kind::Boolean: return t == TypeRef::Boolean;
        case Kind::Number:
            if (!is_numeric(t)) return false;
            if (is_integral(t)) return std::floor(as_number()) == as_number();
            return true;
    }
    return false;
}

Value Value::coerced_to(TypeRef t) const {
    if (is_number() && is_numeric(t)) return Value::number(as_number(), t);
    return *this;
}

std::string Value::display() const {
    switch (kind()) {
        case Kind::String: return as_string();
        case Kind::Boolean: return as_boolean() ? "true" : "false";
        case Kind::Number: return format_number(as_number(), is_integral(number_kind()));
    }
    return {};
}

std::string Value::literal() const {
    if (!is_string()) return display();
    std::string out = "\"";
    for (char c : as_string()) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string Value::key() const {
    switch (kind()) {
        case Kind::String: return "s:" + fold_text(as_string());
        case Kind::Boolean: return as_boolean() ? "b:1" : "b:0";
        case Kind::Number: {
            // Round to the comparison tolerance so that near-equal values
            // share a key.
            double r = std::round(as_number() / kNumericTolerance) * kNumericTolerance;
            if (r == 0.0) r = 0.0;
            return "n:" + format_number(r, false);
        }
    }
    return {};
}

bool operator==(const Value& a, const Value& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Value::Kind::String: return fold_text(a.as_string()) == fold_text(b.as_string());
        case Value::Kind::Boolean: return a.as_boolean() == b.as_boolean();
        case Value::Kind::Number:
            return std::fabs(a.as_number() - b.as_number()) <= kNumericTolerance;
    }
    return false;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

std::optional<Value> parse_literal(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"') return std::nullopt;
        std::string out;
        for (std::size_t i = 1; i + 1 < text.size(); ++i) {
            if (text[i] == '\\' && i + 2 < text.size()) ++i;
            else if (text[i] == '"') return std::nullopt;
            out.push_back(text[i]);
        }
        return Value::string(std::move(out));
    }
    if (text == "true") return Value::boolean(true);
    if (text == "false") return Value::boolean(false);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc{} && ptr == text.data() + text.size()) {
        bool integral = text.find_first_of(".eE") == std::string_view::npos;
        return Value::number(v, integral ? TypeRef::Integer : TypeRef::Double);
    }
    return std::nullopt;
}

}  // namespace dmnbot
