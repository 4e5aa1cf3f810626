#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace dmnbot {

enum class TypeRef { String, Boolean, Integer, Long, Double };

std::string_view to_string(TypeRef t);
std::optional<TypeRef> type_ref_from_string(std::string_view text);
bool is_numeric(TypeRef t);
bool is_integral(TypeRef t);

// Lowercase, keep only ASCII letters and digits. "KPI Visualization" ->
// "kpivisualization".
std::string normalize_name(std::string_view label);

// Lowercase and collapse runs of whitespace; used for case-insensitive
// string comparison.
std::string fold_text(std::string_view text);

inline constexpr double kNumericTolerance = 1e-9;

struct Number {
    double value = 0.0;
    TypeRef declared = TypeRef::Double;
};

// Tagged union of the three value kinds a DMN cell can hold. Equality is
// semantic: strings compare on their folded form, numbers within
// kNumericTolerance regardless of declared kind.
class Value {
public:
    enum class Kind { String, Boolean, Number };

    Value() : data_(std::string{}) {}
    static Value string(std::string s) { return Value(std::move(s)); }
    static Value boolean(bool b) { return Value(b); }
    static Value number(double v, TypeRef declared = TypeRef::Double) {
        return Value(Number{v, declared});
    }
    static Value integer(long long v) {
        return Value(Number{static_cast<double>(v), TypeRef::Integer});
    }

    Kind kind() const { return static_cast<Kind>(data_.index()); }
    bool is_string() const { return kind() == Kind::String; }
    bool is_boolean() const { return kind() == Kind::Boolean; }
    bool is_number() const { return kind() == Kind::Number; }

    const std::string& as_string() const { return std::get<std::string>(data_); }
    bool as_boolean() const { return std::get<bool>(data_); }
    double as_number() const { return std::get<Number>(data_).value; }
    TypeRef number_kind() const { return std::get<Number>(data_).declared; }

    // The TypeRef this value naturally belongs to.
    TypeRef type() const;
    // Whether the value may be bound to an input declared as `t`.
    bool conforms_to(TypeRef t) const;
    // Same value re-tagged with the numeric kind of `t` (no-op otherwise).
    Value coerced_to(TypeRef t) const;

    // Human-facing rendering: strings raw, booleans true/false, integers
    // without decimals, doubles in shortest round-trip form.
    std::string display() const;
    // FEEL-literal rendering: strings double-quoted.
    std::string literal() const;
    // Canonical key used for hashing and memoization; equal values map to
    // equal keys.
    std::string key() const;

    friend bool operator==(const Value& a, const Value& b);

private:
    explicit Value(std::string s) : data_(std::move(s)) {}
    explicit Value(bool b) : data_(b) {}
    explicit Value(Number n) : data_(n) {}

    std::variant<std::string, bool, Number> data_;
};

std::string format_number(double v, bool integral);

// Parses a FEEL literal: "quoted", true/false, or a decimal number.
std::optional<Value> parse_literal(std::string_view text);

}  // namespace dmnbot
