#include <doctest.h>

#include "../support/testkit.hpp"
#include "dmnbot/dmn_model.hpp"

using namespace dmnbot;
using testkit::fixture;
using testkit::fixture_text;

namespace {

// One-table model; `rules` is raw <rule> XML.
std::string table_model(const std::string& columns, const std::string& rules,
                        const std::string& hit_policy = "UNIQUE", const std::string& output_type = "string") {
    return R"(<?xml version="1.0" encoding="UTF-8"?>
<definitions xmlns="https://www.omg.org/spec/DMN/20191111/MODEL/" id="t" name="T">
  <decision id="d" name="Decide">
    <decisionTable id="dt" hitPolicy=")" +
           hit_policy + R"(">)" + columns + R"(
      <output label="Out" name="out" typeRef=")" +
           output_type + R"("/>)" + rules + R"(
    </decisionTable>
  </decision>
</definitions>)";
}

std::string column(const std::string& label, const std::string& type, const std::string& expr) {
    return "<input label=\"" + label + "\"><inputExpression typeRef=\"" + type + "\"><text>" + expr +
           "</text></inputExpression></input>";
}

std::string rule(const std::string& id, std::vector<std::string> entries, const std::string& out) {
    std::string s = "<rule id=\"" + id + "\">";
    for (const auto& e : entries) s += "<inputEntry><text>" + e + "</text></inputEntry>";
    return s + "<outputEntry><text>" + out + "</text></outputEntry></rule>";
}

bool has_code(const std::vector<Diagnostic>& ds, const std::string& code) {
    return std::any_of(ds.begin(), ds.end(), [&](const Diagnostic& d) { return d.code == code; });
}

}  // namespace

TEST_CASE("kpi fixture structure") {
    auto m = fixture("kpi.dmn");
    CHECK(m.main_decision == "kpivisualization");
    CHECK(m.decisions.size() == 3);
    CHECK(m.literal_expressions.size() == 4);
    const auto* kv = m.find_decision("kpivisualization");
    REQUIRE(kv);
    CHECK(kv->table.inputs.size() == 9);
    CHECK(kv->table.rules.size() == 22);
    CHECK(kv->table.inputs[0].source == InputSource::Literal);
    CHECK(kv->table.inputs[0].supplier == "findnumberofvalues");
    CHECK(kv->table.inputs[1].source == InputSource::Decision);
    CHECK(kv->table.inputs[1].supplier == "overtime");
    CHECK(kv->table.inputs[2].source == InputSource::User);
    CHECK(m.find_input("kpitype"));
    CHECK(m.find_input("showevolution"));
    CHECK(m.find_input("numberofcategories")->type_ref == TypeRef::Integer);
    CHECK(validate_model(m).empty());
}

TEST_CASE("membership fixture structure") {
    auto m = fixture("membership.dmn");
    CHECK(m.main_decision == "membership");
    REQUIRE(m.inputs.size() == 3);
    CHECK(m.find_input("age")->type_ref == TypeRef::Integer);
    CHECK(m.find_input("hired")->type_ref == TypeRef::Boolean);
    CHECK(m.find_input("contribution")->type_ref == TypeRef::String);
}

TEST_CASE("serialize then parse gives an equal model") {
    for (const char* name : {"kpi.dmn", "membership.dmn", "overlap.dmn"}) {
        auto m = fixture(name);
        auto again = parse_dmn(serialize_dmn(m));
        CHECK_MESSAGE(again == m, name);
        CHECK(serialize_dmn(again) == serialize_dmn(m));
    }
}

TEST_CASE("malformed XML") {
    CHECK_THROWS_AS(parse_dmn("<definitions><decision"), XmlError);
    CHECK_THROWS_AS(parse_dmn("<other/>"), XmlError);
    try {
        parse_dmn("not xml at all <");
        FAIL("expected XmlError");
    } catch (const Error& e) {
        CHECK(e.code() == "XML_ERROR");
    }
}

TEST_CASE("unsupported hit policies are rejected") {
    auto cols = column("A", "string", "a");
    auto rules = rule("r1", {"-"}, "\"x\"");
    for (const char* hp : {"FIRST", "ANY", "COLLECT", "PRIORITY", "RULE ORDER"}) {
        CHECK_THROWS_AS(parse_dmn(table_model(cols, rules, hp)), UnsupportedFeature);
    }
    CHECK_NOTHROW(parse_dmn(table_model(cols, rules, "UNIQUE")));
}

TEST_CASE("unsupported typeRef") {
    CHECK_THROWS_AS(parse_dmn(table_model(column("A", "date", "a"), rule("r1", {"-"}, "\"x\""))),
                    UnsupportedFeature);
}

TEST_CASE("bad unary test carries the rule and column") {
    auto text = table_model(column("A", "integer", "a") + column("B", "integer", "b"),
                            rule("r1", {"-", "-"}, "\"x\"") + rule("r2", {"1", "[1.."}, "\"y\""));
    try {
        parse_dmn(text);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.rule() == 2);
        CHECK(e.column() == 2);
    }
}

TEST_CASE("string constant on an integer column is a type mismatch") {
    auto text = table_model(column("A", "integer", "a"), rule("r1", {"\"seven\""}, "\"x\""));
    CHECK_THROWS_AS(parse_dmn(text), TypeMismatch);
}

TEST_CASE("output entry must match the output type") {
    auto text = table_model(column("A", "string", "a"), rule("r1", {"-"}, "12"));
    CHECK_THROWS_AS(parse_dmn(text), TypeMismatch);
}

TEST_CASE("arity mismatch is reported") {
    auto text = table_model(column("A", "string", "a") + column("B", "string", "b"), rule("r1", {"-"}, "\"x\""));
    auto m = parse_dmn_document(text);
    auto ds = validate_model(m);
    CHECK(has_code(ds, "ARITY"));
    CHECK_THROWS_AS(parse_dmn(text), ModelError);
}

TEST_CASE("cycle is detected with its path") {
    auto m = parse_dmn_document(fixture_text("cycle.dmn"));
    auto ds = validate_model(m);
    REQUIRE(has_code(ds, "CYCLE"));
    CHECK_THROWS_AS(parse_dmn(fixture_text("cycle.dmn")), CyclicDependency);
    try {
        parse_dmn(fixture_text("cycle.dmn"));
    } catch (const Error& e) {
        CHECK(e.code() == "CYCLE");
        CHECK(std::string(e.what()).find("->") != std::string::npos);
    }
}

TEST_CASE("two unrequired decisions make the main decision ambiguous") {
    auto m = parse_dmn_document(fixture_text("two_mains.dmn"));
    CHECK(m.main_decision.empty());
    CHECK(has_code(validate_model(m), "MAIN_DECISION"));
}

TEST_CASE("unknown requirement href") {
    std::string text = R"(<?xml version="1.0"?>
<definitions xmlns="https://www.omg.org/spec/DMN/20191111/MODEL/" id="t" name="T">
  <decision id="d" name="D">
    <informationRequirement><requiredDecision href="#missing"/></informationRequirement>
    <decisionTable id="dt" hitPolicy="UNIQUE">
      <input label="A"><inputExpression typeRef="string"><text>a</text></inputExpression></input>
      <output label="Out" name="out" typeRef="string"/>
      <rule id="r1"><inputEntry><text>-</text></inputEntry><outputEntry><text>"x"</text></outputEntry></rule>
    </decisionTable>
  </decision>
</definitions>)";
    CHECK_THROWS_AS(parse_dmn(text), UnresolvedReference);
}

TEST_CASE("diagnostic formatting") {
    Diagnostic d{Severity::Error, "TYPE", "bad", {"Decide", 3, 2}};
    auto s = format_diagnostic(d);
    CHECK(s.find("TYPE") != std::string::npos);
    CHECK(s.find("Decide") != std::string::npos);
    CHECK(s.find("3") != std::string::npos);
}

TEST_CASE("empty table warns but parses") {
    auto text = table_model(column("A", "string", "a"), "");
    auto m = parse_dmn_document(text);
    auto ds = validate_model(m);
    REQUIRE(has_code(ds, "EMPTY_TABLE"));
    for (const auto& d : ds) {
        if (d.code == "EMPTY_TABLE") CHECK(d.severity == Severity::Warning);
    }
}

TEST_CASE("read_text_file on a missing file") {
    CHECK_THROWS_AS(read_text_file("/nonexistent/dir/x.dmn"), IoError);
}
