#include <doctest.h>

#include <algorithm>

#include "../support/testkit.hpp"
#include "dmnbot/botgen.hpp"
#include "dmnbot/bundle_io.hpp"
#include "dmnbot/dialog.hpp"

using namespace dmnbot;
using testkit::fixture_text;

namespace {

std::shared_ptr<const AgentBundle> bundle_of(const char* fixture, const Customization& c = {}) {
    return std::make_shared<const AgentBundle>(assemble_agent_from_text(fixture_text(fixture), c, 42));
}

const std::shared_ptr<const AgentBundle>& kpi() {
    static auto b = bundle_of("kpi.dmn");
    return b;
}

const std::shared_ptr<const AgentBundle>& membership() {
    static auto b = bundle_of("membership.dmn");
    return b;
}

bool contains(const std::string& text, const std::string& part) { return text.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("welcome lists the decisions") {
    auto [s, r] = new_session(kpi(), "t");
    CHECK(s.id == "t");
    CHECK(contains(r.text, "KPI Visualization"));
    CHECK(s.status == SessionStatus::Open);
    CHECK(s.transcript.size() == 1);
    auto [s2, r2] = new_session(kpi());
    CHECK(s2.id.size() >= 8);
}

TEST_CASE("running example, one answer per turn") {
    auto [s, w] = new_session(kpi(), "t");
    auto r = handle_turn(s, "I want to know the KPI visualization");
    CHECK(s.active_decision == std::optional<std::string>("kpivisualization"));
    CHECK(s.pending == std::optional<std::string>("kpitype"));
    CHECK(r.suggestions == std::vector<std::string>{"cycle time", "waiting time", "close average"});
    CHECK(s.contexts.at("kpivisualization_decision") == kDecisionContextLifespan);
    CHECK(s.contexts.at("kpivisualization_kpitype") == kInputContextLifespan);
    CHECK(s.contexts.at("awaiting_kpitype") == 1);

    handle_turn(s, "waiting time");
    CHECK(s.pending == std::optional<std::string>("showevolution"));
    handle_turn(s, "yes");
    handle_turn(s, "reveal relationships");
    CHECK(s.pending == std::optional<std::string>("focus"));
    handle_turn(s, "changes");
    CHECK(s.pending == std::optional<std::string>("relationship"));
    r = handle_turn(s, "time series");
    CHECK(r.done);
    CHECK(r.text == "The result is: Spark line");
    CHECK(r.decision_value == std::optional<Value>(Value::string("Spark line")));
    CHECK(s.status == SessionStatus::Decided);
    REQUIRE(s.trace);
    CHECK(s.trace->find("kpivisualization")->matched_rule == 7);
    // multilevel and numberofcategories were never needed.
    CHECK(std::find(s.asked.begin(), s.asked.end(), "multilevel") == s.asked.end());
    CHECK(std::find(s.asked.begin(), s.asked.end(), "numberofcategories") == s.asked.end());
}

TEST_CASE("an answer for a different input is kept while the question repeats") {
    auto [s, w] = new_session(kpi(), "t");
    handle_turn(s, "KPI visualization with waiting time and yes and reveal relationships");
    REQUIRE(s.pending == std::optional<std::string>("focus"));
    auto r = handle_turn(s, "time series");
    CHECK(s.collected.at("relationship") == Value::string("time series"));
    CHECK(s.pending == std::optional<std::string>("focus"));
    r = handle_turn(s, "changes");
    CHECK(r.text == "The result is: Spark line");
}

TEST_CASE("pruned inputs are never asked") {
    auto [s, w] = new_session(kpi(), "t");
    auto r = handle_turn(s, "I want to determine the KPI visualization with close average and look up and changes");
    CHECK(s.collected.size() == 3);
    CHECK(s.pending == std::optional<std::string>("numberofcategories"));
    r = handle_turn(s, "4");
    CHECK(r.text == "The result is: Stacked bar graph");
    CHECK(std::find(s.asked.begin(), s.asked.end(), "relationship") == s.asked.end());
    CHECK(std::find(s.asked.begin(), s.asked.end(), "multilevel") == s.asked.end());
}

TEST_CASE("membership: contribution is skipped when it cannot matter") {
    auto [s, w] = new_session(membership(), "t");
    handle_turn(s, "membership");
    CHECK(s.pending == std::optional<std::string>("age"));
    handle_turn(s, "60");
    CHECK(s.pending == std::optional<std::string>("hired"));
    auto r = handle_turn(s, "no");
    CHECK(r.text == "The result is: conditionally accepted");
    CHECK(s.asked == std::vector<std::string>{"age", "hired"});
}

TEST_CASE("help, context summary and fallback counting") {
    auto [s, w] = new_session(membership(), "t");
    handle_turn(s, "membership");
    auto h = handle_turn(s, "help");
    CHECK(h.help.has_value());
    CHECK(s.pending == std::optional<std::string>("age"));
    CHECK(context_summary(s) == "No values provided yet.");
    handle_turn(s, "30");
    CHECK(context_summary(s) == "Current decision: Membership. Values provided so far: Age = 30.");

    auto f1 = handle_turn(s, "zzkq wibble");
    CHECK(contains(f1.text, "Valid answers are: yes / no."));
    CHECK_FALSE(f1.help.has_value());
    handle_turn(s, "zzkq wibble");
    auto f3 = handle_turn(s, "zzkq wibble");
    REQUIRE(f3.help.has_value());
    CHECK(contains(*f3.help, "Hired"));
    auto ok = handle_turn(s, "yes");
    CHECK(s.fallbacks == 0);
    CHECK(s.pending == std::optional<std::string>("contribution"));
    (void)ok;
}

TEST_CASE("help_response variants") {
    auto [s, w] = new_session(kpi(), "t");
    auto generic = help_response(s);
    CHECK_FALSE(generic.text.empty());
    CHECK(help_response(s, "multilevel").text == "For Multilevel, answer yes / no.");
    CHECK(contains(help_response(s, "numberofcategories").text, "whole number"));
    CHECK(help_response(s, "focus").text == "For Focus, choose one of: values / changes.");
    CHECK_THROWS_AS(help_response(s, "shoesize"), UnknownInput);
    CHECK(suggestions_for(*kpi(), "multilevel") == std::vector<std::string>{"yes", "no"});
    CHECK(suggestions_for(*kpi(), "numberofcategories").empty());
    CHECK_THROWS_AS(suggestions_for(*kpi(), "shoesize"), UnknownInput);
}

TEST_CASE("customized question and help text") {
    auto c = parse_customization(
        R"({"inputs": {"age": {"question": "How old are you?", "help": "Your age in years."}}})");
    auto b = bundle_of("membership.dmn", c);
    auto [s, w] = new_session(b, "t");
    auto r = handle_turn(s, "membership");
    CHECK(r.text == "How old are you?");
    CHECK(help_response(s, "age").text == "Your age in years.");
}

TEST_CASE("cancel closes the session") {
    auto [s, w] = new_session(membership(), "t");
    handle_turn(s, "membership");
    auto r = handle_turn(s, "cancel");
    CHECK(r.done);
    CHECK(s.closed);
    CHECK(s.status == SessionStatus::Cancelled);
    CHECK_THROWS_AS(handle_turn(s, "membership"), SessionClosed);
}

TEST_CASE("asking again after a decision") {
    auto [s, w] = new_session(membership(), "t");
    handle_turn(s, "membership");
    handle_turn(s, "60");
    handle_turn(s, "no");
    auto r = handle_turn(s, "membership");
    CHECK(contains(r.text, "already been made"));
    CHECK(contains(r.text, "conditionally accepted"));
}

TEST_CASE("rule gaps produce an apology, not an exception") {
    const std::string dmn = R"(<?xml version="1.0" encoding="UTF-8"?>
<definitions xmlns="https://www.omg.org/spec/DMN/20191111/MODEL/" id="paint" name="Paint">
  <decision id="paint" name="Paint">
    <decisionTable id="paintTable" hitPolicy="UNIQUE">
      <input label="Colour"><inputExpression typeRef="string"><text>colour</text></inputExpression></input>
      <input label="Size"><inputExpression typeRef="integer"><text>size</text></inputExpression></input>
      <output label="Brush" name="brush" typeRef="string"/>
      <rule id="r1"><inputEntry><text>"red"</text></inputEntry><inputEntry><text>-</text></inputEntry>
        <outputEntry><text>"fine"</text></outputEntry></rule>
      <rule id="r2"><inputEntry><text>"blue"</text></inputEntry><inputEntry><text>&gt;5</text></inputEntry>
        <outputEntry><text>"wide"</text></outputEntry></rule>
    </decisionTable>
  </decision>
</definitions>)";
    auto b = std::make_shared<const AgentBundle>(assemble_agent_from_text(dmn, {}, 1));
    auto [s, w] = new_session(b, "t");
    auto r = handle_turn(s, "paint with blue and size 3");
    CHECK(s.status == SessionStatus::Open);
    CHECK_FALSE(s.closed);
    CHECK(contains(r.text, "Sorry, no rule of Paint covers these values."));
    CHECK(contains(r.text, "Colour = blue"));
    CHECK(contains(r.text, "Say cancel to start over."));
}

TEST_CASE("contexts expire once nothing refreshes them") {
    auto [s, w] = new_session(membership(), "t");
    handle_turn(s, "membership");
    handle_turn(s, "60");
    CHECK_FALSE(s.contexts.count("membership_age"));
    handle_turn(s, "no");
    REQUIRE(s.contexts.count("membership_decision"));
    for (int i = 0; i < kDecisionContextLifespan; ++i) handle_turn(s, "what now");
    CHECK_FALSE(s.contexts.count("membership_decision"));
}

TEST_CASE("order of single answers does not change the outcome") {
    const std::vector<std::pair<std::string, std::string>> answers = {
        {"age", "age equals to 30"}, {"hired", "hired equals to yes"}, {"contribution", "contribution equals to low"}};
    std::vector<int> order = {0, 1, 2};
    std::set<std::string> outcomes;
    do {
        auto [s, w] = new_session(membership(), "t");
        handle_turn(s, "membership");
        Response last;
        for (int i : order) {
            if (s.status != SessionStatus::Open) break;
            last = handle_turn(s, answers[i].second);
        }
        REQUIRE(s.decision_value.has_value());
        outcomes.insert(s.decision_value->key());
    } while (std::next_permutation(order.begin(), order.end()));
    CHECK(outcomes.size() == 1);
}
