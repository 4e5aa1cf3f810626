#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dmnbot {

// Base of every error raised by the library. `code()` is a stable
// upper-case identifier used in diagnostics and in the HTTP error envelope.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define DMNBOT_DEFINE_ERROR(Name, Code)                                      \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& message) : Error(Code, message) {}  \
    };

DMNBOT_DEFINE_ERROR(XmlError, "XML_ERROR")
DMNBOT_DEFINE_ERROR(UnsupportedFeature, "UNSUPPORTED_FEATURE")
DMNBOT_DEFINE_ERROR(UnresolvedReference, "UNRESOLVED_REFERENCE")
DMNBOT_DEFINE_ERROR(CyclicDependency, "CYCLE")
DMNBOT_DEFINE_ERROR(TypeMismatch, "TYPE_MISMATCH")
DMNBOT_DEFINE_ERROR(MissingBinding, "MISSING_BINDING")
DMNBOT_DEFINE_ERROR(NoRuleMatched, "NO_RULE_MATCHED")
DMNBOT_DEFINE_ERROR(TypeError, "TYPE_ERROR")
DMNBOT_DEFINE_ERROR(EmptyDomain, "EMPTY_DOMAIN")
DMNBOT_DEFINE_ERROR(SpecError, "SPEC_ERROR")
DMNBOT_DEFINE_ERROR(CustomizationError, "CUSTOMIZATION_ERROR")
DMNBOT_DEFINE_ERROR(IoError, "IO_ERROR")
DMNBOT_DEFINE_ERROR(CorruptRecord, "CORRUPT_RECORD")
DMNBOT_DEFINE_ERROR(SessionClosed, "SESSION_CLOSED")
DMNBOT_DEFINE_ERROR(UnknownInput, "UNKNOWN_INPUT")

#undef DMNBOT_DEFINE_ERROR

// Unary-test or expression syntax error. `rule` and `column` are 1-based,
// zero when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int rule = 0, int column = 0)
        : Error("PARSE_ERROR", message), rule_(rule), column_(column) {}

    int rule() const noexcept { return rule_; }
    int column() const noexcept { return column_; }

private:
    int rule_;
    int column_;
};

// A model that parsed structurally but failed a static check.
class ModelError : public Error {
public:
    ModelError(std::string code, const std::string& message)
        : Error(std::move(code), message) {}
};

class MultipleRulesMatched : public Error {
public:
    MultipleRulesMatched(const std::string& message, std::vector<int> rules)
        : Error("MULTIPLE_RULES_MATCHED", message), rules_(std::move(rules)) {}

    const std::vector<int>& rules() const noexcept { return rules_; }

private:
    std::vector<int> rules_;
};

}  // namespace dmnbot
