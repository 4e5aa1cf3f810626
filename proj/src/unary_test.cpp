#include <cctype>
#include <cmath>

#include "dmnbot/dmn_model.hpp"
#include "dmnbot/errors.hpp"

namespace dmnbot {

UnaryTest UnaryTest::wildcard() { return {}; }

UnaryTest UnaryTest::eq(Value v) {
    UnaryTest t;
    t.kind = Kind::Eq;
    t.value = std::move(v);
    return t;
}

UnaryTest UnaryTest::compare(CmpOp op, double bound) {
    UnaryTest t;
    t.kind = Kind::Compare;
    t.op = op;
    t.bound = bound;
    return t;
}

UnaryTest UnaryTest::interval(double lo, double hi, bool lo_closed, bool hi_closed) {
    UnaryTest t;
    t.kind = Kind::Interval;
    t.lo = lo;
    t.hi = hi;
    t.lo_closed = lo_closed;
    t.hi_closed = hi_closed;
    return t;
}

UnaryTest UnaryTest::any_of(std::vector<UnaryTest> items) {
    UnaryTest t;
    t.kind = Kind::AnyOf;
    t.items = std::move(items);
    return t;
}

UnaryTest UnaryTest::negate(UnaryTest inner) {
    UnaryTest t;
    t.kind = Kind::Not;
    t.items.push_back(std::move(inner));
    return t;
}

bool UnaryTest::accepts(const Value& v) const {
    switch (kind) {
        case Kind::Wildcard: return true;
        case Kind::Eq: return value == v;
        case Kind::Compare: {
            if (!v.is_number()) return false;
            double x = v.as_number();
            switch (op) {
                case CmpOp::Lt: return x < bound;
                case CmpOp::Le: return x <= bound;
                case CmpOp::Gt: return x > bound;
                case CmpOp::Ge: return x >= bound;
                default: return false;
            }
        }
        case Kind::Interval: {
            if (!v.is_number()) return false;
            double x = v.as_number();
            bool above = lo_closed ? x >= lo : x > lo;
            bool below = hi_closed ? x <= hi : x < hi;
            return above && below;
        }
        case Kind::AnyOf:
            for (const auto& item : items) {
                if (item.accepts(v)) return true;
            }
            return false;
        case Kind::Not: return !items.front().accepts(v);
    }
    return false;
}

bool operator==(const UnaryTest& a, const UnaryTest& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case UnaryTest::Kind::Wildcard: return true;
        case UnaryTest::Kind::Eq: return a.value.kind() == b.value.kind() && a.value == b.value;
        case UnaryTest::Kind::Compare: return a.op == b.op && a.bound == b.bound;
        case UnaryTest::Kind::Interval:
            return a.lo == b.lo && a.hi == b.hi && a.lo_closed == b.lo_closed && a.hi_closed == b.hi_closed;
        case UnaryTest::Kind::AnyOf:
        case UnaryTest::Kind::Not: return a.items == b.items;
    }
    return false;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Splits on commas that are outside quotes and brackets.
std::vector<std::string_view> split_top_level(std::string_view text) {
    std::vector<std::string_view> parts;
    int depth = 0;
    bool quoted = false;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '\\') ++i;
            else if (c == '"') quoted = false;
            continue;
        }
        if (c == '"') quoted = true;
        else if (c == '(' || c == '[') ++depth;
        else if (c == ')' || c == ']') --depth;
        else if (c == ',' && depth <= 0) {
            parts.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    parts.push_back(text.substr(start));
    return parts;
}

class TestParser {
public:
    TestParser(TypeRef type, int rule, int column) : type_(type), rule_(rule), column_(column) {}

    UnaryTest parse(std::string_view text) {
        text = trim(text);
        if (text.empty() || text == "-") return UnaryTest::wildcard();
        if (starts_with_not(text)) {
            return UnaryTest::negate(parse_list(text.substr(4, text.size() - 5)));
        }
        return parse_list(text);
    }

private:
    static bool starts_with_not(std::string_view text) {
        return text.size() >= 5 && text.substr(0, 4) == "not(" && text.back() == ')';
    }

    UnaryTest parse_list(std::string_view text) {
        auto parts = split_top_level(text);
        if (parts.size() == 1) return parse_single(parts.front());
        std::vector<UnaryTest> items;
        for (auto part : parts) items.push_back(parse_single(part));
        return UnaryTest::any_of(std::move(items));
    }

    UnaryTest parse_single(std::string_view text) {
        text = trim(text);
        if (text.empty()) fail("empty list item");
        if (text == "-") fail("wildcard inside a list");
        char first = text.front();
        if ((first == '[' || first == '(' || first == ']') && text.find("..") != std::string_view::npos) {
            return parse_interval(text);
        }
        if (first == '<' || first == '>') {
            require_numeric(text);
            CmpOp op = CmpOp::Lt;
            std::size_t skip = 1;
            if (text.size() > 1 && text[1] == '=') {
                op = first == '<' ? CmpOp::Le : CmpOp::Ge;
                skip = 2;
            } else {
                op = first == '<' ? CmpOp::Lt : CmpOp::Gt;
            }
            return UnaryTest::compare(op, number(text.substr(skip)));
        }
        return UnaryTest::eq(constant(text));
    }

    UnaryTest parse_interval(std::string_view text) {
        require_numeric(text);
        char open = text.front();
        char close = text.back();
        if (close != ']' && close != ')' && close != '[') fail("unterminated interval '" + std::string(text) + "'");
        auto body = text.substr(1, text.size() - 2);
        auto dots = body.find("..");
        double lo = number(body.substr(0, dots));
        double hi = number(body.substr(dots + 2));
        if (lo > hi) fail("interval bounds reversed in '" + std::string(text) + "'");
        return UnaryTest::interval(lo, hi, open == '[', close == ']');
    }

    Value constant(std::string_view text) {
        switch (type_) {
            case TypeRef::String: {
                if (text.front() == '"') {
                    auto v = parse_literal(text);
                    if (!v) fail("malformed string literal " + std::string(text));
                    return *v;
                }
                return Value::string(std::string(text));
            }
            case TypeRef::Boolean:
                if (text == "true") return Value::boolean(true);
                if (text == "false") return Value::boolean(false);
                mismatch("'" + std::string(text) + "' is not a boolean");
            default: {
                if (text.front() == '"') mismatch("string constant " + std::string(text) + " in a numeric column");
                return Value::number(number(text), type_);
            }
        }
    }

    double number(std::string_view text) {
        text = trim(text);
        auto v = parse_literal(text);
        if (!v || !v->is_number()) {
            if (v || (!text.empty() && text.front() == '"')) mismatch("'" + std::string(text) + "' is not a number");
            fail("expected a number, got '" + std::string(text) + "'");
        }
        if (is_integral(type_) && std::floor(v->as_number()) != v->as_number()) {
            mismatch("fractional constant '" + std::string(text) + "' in an integer column");
        }
        return v->as_number();
    }

    void require_numeric(std::string_view text) {
        if (!is_numeric(type_)) {
            mismatch("'" + std::string(text) + "' needs a numeric column, column is " + std::string(to_string(type_)));
        }
    }

    std::string where() const {
        if (rule_ == 0 && column_ == 0) return "";
        return " (rule " + std::to_string(rule_) + ", column " + std::to_string(column_) + ")";
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what + where(), rule_, column_); }
    [[noreturn]] void mismatch(const std::string& what) const { throw TypeMismatch(what + where()); }

    TypeRef type_;
    int rule_;
    int column_;
};

std::string print_bound(double v) { return format_number(v, false); }

}  // namespace

UnaryTest parse_unary_test(std::string_view text, TypeRef type, int rule, int column) {
    return TestParser(type, rule, column).parse(text);
}

std::string print_unary_test(const UnaryTest& t) {
    switch (t.kind) {
        case UnaryTest::Kind::Wildcard: return "-";
        case UnaryTest::Kind::Eq: return t.value.literal();
        case UnaryTest::Kind::Compare: return std::string(to_string(t.op)) + print_bound(t.bound);
        case UnaryTest::Kind::Interval:
            return std::string(t.lo_closed ? "[" : "(") + print_bound(t.lo) + ".." + print_bound(t.hi) +
                   (t.hi_closed ? "]" : ")");
        case UnaryTest::Kind::AnyOf: {
            std::string out;
            for (std::size_t i = 0; i < t.items.size(); ++i) {
                if (i) out += ", ";
                out += print_unary_test(t.items[i]);
            }
            return out;
        }
        case UnaryTest::Kind::Not: return "not(" + print_unary_test(t.items.front()) + ")";
    }
    return "-";
}

}  // namespace dmnbot
