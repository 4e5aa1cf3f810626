#include <doctest.h>

#include "../support/testkit.hpp"
#include "dmnbot/botgen.hpp"
#include "dmnbot/bundle_io.hpp"

using namespace dmnbot;
using testkit::fixture;
using testkit::fixture_text;

namespace {

AgentBundle membership_bundle(std::uint64_t seed = 42, const Customization& c = {}) {
    return assemble_agent_from_text(fixture_text("membership.dmn"), c, seed);
}

}  // namespace

TEST_CASE("context names") {
    CHECK(decision_context("membership") == "membership_decision");
    CHECK(input_context("membership", "age") == "membership_age");
    CHECK(awaiting_context("age") == "awaiting_age");
}

TEST_CASE("entities for the kpi model") {
    auto m = fixture("kpi.dmn");
    auto es = gen_entities(m);
    std::vector<std::string> got;
    for (const auto& e : es) got.push_back(e.name);
    for (const char* n : {"ent_purpose", "ent_focus", "ent_relationship", "ent_kpitype", "sys.number",
                          "ent_multilevel_kpivisualization", "ent_showevolution_overtime"}) {
        CHECK_MESSAGE(std::find(got.begin(), got.end(), n) != got.end(), n);
    }
    CHECK(entity_for_input(m, "purpose") == "ent_purpose");
    CHECK(entity_for_input(m, "numberofcategories") == kNumberEntity);
    for (const auto& e : es) {
        if (e.name == "ent_focus") {
            REQUIRE(e.entries.size() >= 2);
            CHECK(e.kind == EntityKind::CustomEnum);
        }
        if (e.name == "ent_multilevel_kpivisualization") {
            CHECK(e.kind == EntityKind::CustomBoolean);
            REQUIRE(e.entries.size() == 2);
            CHECK(e.entries[0].reference == Value::boolean(true));
        }
    }
}

TEST_CASE("decision intent carries one optional parameter per required input") {
    auto m = fixture("kpi.dmn");
    auto i = gen_decision_intent(m, "kpivisualization");
    CHECK(i.name == "kpivisualization");
    CHECK(i.kind == IntentKind::Decision);
    CHECK(i.input_contexts.empty());
    REQUIRE(i.parameters.size() == 7);
    for (const auto& p : i.parameters) CHECK_FALSE(p.required);
    REQUIRE(i.output_contexts.size() == 1);
    CHECK(i.output_contexts[0].name == "kpivisualization_decision");
    CHECK(i.output_contexts[0].lifespan == kDecisionContextLifespan);
}

TEST_CASE("input intents require their own input and read the contexts") {
    auto m = fixture("membership.dmn");
    auto intents = gen_input_intents(m, "membership");
    REQUIRE(intents.size() == 3);
    for (const auto& i : intents) {
        CHECK(i.kind == IntentKind::Input);
        CHECK(i.input_contexts == std::vector<std::string>{"membership_decision", "membership_" + i.input});
        int required = 0;
        for (const auto& p : i.parameters) {
            if (p.required) {
                ++required;
                CHECK(p.name == i.input);
            }
        }
        CHECK(required == 1);
    }
}

TEST_CASE("support intents") {
    auto m = fixture("membership.dmn");
    auto s = gen_support_intents(m);
    REQUIRE(s.size() == 5 + 3);
    CHECK(s[0].name == kWelcomeIntent);
    std::set<std::string> n;
    for (const auto& i : s) n.insert(i.name);
    for (const char* k : {kWelcomeIntent, kFallbackIntent, kHelpIntent, kCancelIntent, kEndIntent}) CHECK(n.count(k));
    CHECK(n.count("membership_age_help"));
    for (const char* k : {kWelcomeIntent, kHelpIntent, kCancelIntent, kEndIntent}) {
        CHECK_FALSE(default_response_pool(k).empty());
    }
}

TEST_CASE("assembled membership bundle") {
    auto b = membership_bundle();
    CHECK(b.intents.size() == 12);
    REQUIRE(b.decisions.size() == 1);
    CHECK(b.decisions[0].inputs == std::vector<std::string>{"age", "hired", "contribution"});
    CHECK(b.find_input("contribution")->suggestions.size() == 5);
    CHECK(b.find_input("age")->suggestions.empty());
    CHECK(b.find_input("age")->boundaries == std::vector<double>{18, 55});
    CHECK(b.relevance);
    CHECK(b.nlu);
    for (const auto& i : b.intents) {
        if (i.kind == IntentKind::Decision || i.kind == IntentKind::Input) CHECK_FALSE(i.training_phrases.empty());
    }
    CHECK(default_question("Age", TypeRef::Integer).find("Age") != std::string::npos);
}

TEST_CASE("assembly is deterministic and seed dependent") {
    auto a = membership_bundle(5);
    auto b = membership_bundle(5);
    CHECK(a == b);
    CHECK(export_files(a) == export_files(b));
    auto c = assemble_agent_from_text(fixture_text("kpi.dmn"), {}, 5);
    auto d = assemble_agent_from_text(fixture_text("kpi.dmn"), {}, 6);
    CHECK(export_files(c) != export_files(d));
}

TEST_CASE("invalid models are refused") {
    CHECK_THROWS_AS(assemble_agent_from_text(fixture_text("cycle.dmn"), {}, 1), CyclicDependency);
    CHECK_THROWS_AS(assemble_agent_from_text(fixture_text("two_mains.dmn"), {}, 1), ModelError);
}

TEST_CASE("customization adds synonyms, questions, help and responses") {
    auto c = parse_customization(R"({
      "inputs": {
        "Contribution": {"question": "How much did you contribute?", "help": "Pick a level.",
                         "synonyms": {"very high": ["huge"]}}
      },
      "responses": {"WelcomeIntent": ["Hi there."]}
    })");
    CHECK(c.inputs.count("contribution"));
    auto b = membership_bundle(42, c);
    CHECK(b.find_input("contribution")->question == "How much did you contribute?");
    CHECK(b.find_input("contribution")->help == std::optional<std::string>("Pick a level."));
    CHECK(b.responses.at(kWelcomeIntent) == std::vector<std::string>{"Hi there."});
    const auto* e = b.find_entity("ent_contribution");
    REQUIRE(e);
    bool found = false;
    for (const auto& [s, v] : e->surfaces()) found = found || (s == "huge" && v == Value::string("very high"));
    CHECK(found);
    CHECK(customization_from_json(customization_to_json(c)) == c);
}

TEST_CASE("bad customization") {
    CHECK_THROWS_AS(parse_customization("[1,2]"), CustomizationError);
    CHECK_THROWS_AS(parse_customization("{\"colour\": {}}"), CustomizationError);
    CHECK_THROWS_AS(parse_customization("{not json"), CustomizationError);
    auto unknown = parse_customization(R"({"inputs": {"shoe size": {"question": "?"}}})");
    CHECK_THROWS_AS(membership_bundle(1, unknown), CustomizationError);
    auto bad_entry = parse_customization(R"({"inputs": {"contribution": {"synonyms": {"gigantic": ["x"]}}}})");
    CHECK_THROWS_AS(membership_bundle(1, bad_entry), CustomizationError);
    auto bad_pool = parse_customization(R"({"responses": {"NoSuchIntent": ["x"]}})");
    CHECK_THROWS_AS(membership_bundle(1, bad_pool), CustomizationError);
}

TEST_CASE("value json conversions") {
    CHECK(value_to_json(Value::integer(3)) == Json(3));
    CHECK(value_from_json(Json(3)).number_kind() == TypeRef::Integer);
    CHECK(value_from_json(Json(0.5)).number_kind() == TypeRef::Double);
    CHECK(value_from_json(Json("x")) == Value::string("x"));
    CHECK(value_from_json(Json(true)) == Value::boolean(true));
    CHECK_THROWS_AS(value_from_json(Json::array()), CorruptRecord);
}

TEST_CASE("export then import reproduces the bundle") {
    testkit::TempDir dir;
    auto b = assemble_agent_from_text(fixture_text("kpi.dmn"), {}, 9);
    auto files = export_agent(b, dir.path());
    CHECK(std::is_sorted(files.begin(), files.end()));
    CHECK(std::find(files.begin(), files.end(), "agent.json") != files.end());
    CHECK(std::find(files.begin(), files.end(), "entities/ent_focus.json") != files.end());
    CHECK(std::find(files.begin(), files.end(), "intents/kpivisualization.json") != files.end());
    auto back = import_agent(dir.path());
    CHECK(back == b);
    CHECK(export_files(back) == export_files(b));

    auto manifest = Json::parse(testkit::slurp(dir.path() / "agent.json"));
    CHECK(manifest["format"] == kAgentFormat);
    CHECK(manifest["main_decision"] == "kpivisualization");
}

TEST_CASE("export removes stale files from an earlier export") {
    testkit::TempDir dir;
    export_agent(assemble_agent_from_text(fixture_text("kpi.dmn"), {}, 1), dir.path());
    export_agent(membership_bundle(), dir.path());
    CHECK_FALSE(std::filesystem::exists(dir.path() / "intents/kpivisualization.json"));
    CHECK(std::filesystem::exists(dir.path() / "intents/membership.json"));
}

TEST_CASE("import of corrupt or missing records") {
    testkit::TempDir dir;
    CHECK_THROWS_AS(import_agent(dir.path() / "none"), IoError);
    export_agent(membership_bundle(), dir.path());
    write_text_file(dir.path() / "agent.json", "{\"format\": \"other\"}");
    CHECK_THROWS_AS(import_agent(dir.path()), CorruptRecord);
    write_text_file(dir.path() / "agent.json", "{ truncated");
    CHECK_THROWS_AS(import_agent(dir.path()), CorruptRecord);
}

TEST_CASE("export into an unwritable location") {
    testkit::TempDir dir;
    // A regular file where a directory is needed; fails even for root.
    write_text_file(dir.path() / "blocker", "x");
    CHECK_THROWS_AS(export_agent(membership_bundle(), dir.path() / "blocker" / "agent"), IoError);
}

TEST_CASE("validation report") {
    auto ok = validation_report(fixture_text("kpi.dmn"));
    CHECK(ok["valid"] == true);
    CHECK(ok["errors"] == 0);
    CHECK(ok["main_decision"] == "kpivisualization");
    auto over = validation_report(fixture_text("overlap.dmn"));
    CHECK(over["valid"] == false);
    REQUIRE(over["overlaps"].size() >= 1);
    CHECK(over["overlaps"][0]["rules"] == Json::array({1, 2}));
    auto broken = validation_report("<definitions");
    CHECK(broken["valid"] == false);
    CHECK(broken["diagnostics"][0]["code"] == "XML_ERROR");
    auto cyc = validation_report(fixture_text("cycle.dmn"));
    CHECK(cyc["diagnostics"][0]["code"] == "CYCLE");
}
