#include <doctest.h>

#include "../support/testkit.hpp"
#include "dmnbot/engine.hpp"

using namespace dmnbot;
using testkit::fixture;

namespace {

Assignment spark_line_inputs() {
    return {{"kpitype", Value::string("waiting time")},
            {"showevolution", Value::boolean(true)},
            {"purpose", Value::string("reveal relationships")},
            {"relationship", Value::string("time series")},
            {"focus", Value::string("changes")},
            {"multilevel", Value::boolean(false)},
            {"numberofcategories", Value::integer(3)}};
}

}  // namespace

TEST_CASE("assignment_key is order independent and canonical") {
    Assignment a{{"b", Value::integer(2)}, {"a", Value::string("X")}};
    Assignment b{{"a", Value::string("x")}, {"b", Value::number(2.0)}};
    CHECK(assignment_key(a) == assignment_key(b));
    Assignment c{{"a", Value::string("y")}, {"b", Value::integer(2)}};
    CHECK(assignment_key(a) != assignment_key(c));
}

TEST_CASE("literal expressions of the kpi model") {
    auto m = fixture("kpi.dmn");
    struct Row {
        const char* kpi;
        long long values;
        bool time;
        bool regular;
        double subtle;
    };
    const Row rows[] = {{"cycle time", 1, false, false, 0.0},
                        {"waiting time", 12, true, true, 0.3},
                        {"close average", 12, false, false, 0.09}};
    for (const auto& r : rows) {
        Assignment a{{"kpitype", Value::string(r.kpi)}};
        CHECK(eval_literal(*m.find_literal("findnumberofvalues"), a) == Value::integer(r.values));
        CHECK(eval_literal(*m.find_literal("hastimeattribute"), a) == Value::boolean(r.time));
        CHECK(eval_literal(*m.find_literal("hasregularintervals"), a) == Value::boolean(r.regular));
        CHECK(eval_literal(*m.find_literal("subtledifferences"), a).as_number() ==
              doctest::Approx(r.subtle).epsilon(1e-12));
    }
    CHECK_THROWS_AS(eval_literal(*m.find_literal("findnumberofvalues"), {}), MissingBinding);
}

TEST_CASE("evaluate_drd on the running example") {
    auto m = fixture("kpi.dmn");
    auto r = evaluate_drd(m, "kpivisualization", spark_line_inputs());
    CHECK(r.value == Value::string("Spark line"));
    const auto* e = r.trace.find("kpivisualization");
    REQUIRE(e);
    CHECK(e->matched_rule == 7);
    REQUIRE(r.trace.find("overtime"));
    CHECK(r.trace.find("overtime")->value == Value::boolean(true));
    CHECK(r.trace.find("pickkpi")->value == Value::string("process"));
    CHECK(r.trace.entries.back().element == "kpivisualization");
}

TEST_CASE("trace lists suppliers before consumers") {
    auto m = fixture("kpi.dmn");
    auto r = evaluate_drd(m, "kpivisualization", spark_line_inputs());
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < r.trace.entries.size(); ++i) pos[r.trace.entries[i].element] = i;
    for (const auto& req : m.requirements) {
        if (pos.count(req.consumer) && pos.count(req.supplier)) CHECK(pos[req.supplier] < pos[req.consumer]);
    }
}

TEST_CASE("binding for a derived name pins the value") {
    auto m = fixture("kpi.dmn");
    auto a = spark_line_inputs();
    a["regularintervals"] = Value::boolean(false);
    CHECK(evaluate_drd(m, "kpivisualization", a).value == Value::string("Dot plot"));
}

TEST_CASE("membership outcomes") {
    auto m = fixture("membership.dmn");
    Assignment young{{"age", Value::integer(16)}};
    CHECK(evaluate_drd(m, "membership", {{"age", Value::integer(16)},
                                         {"hired", Value::boolean(true)},
                                         {"contribution", Value::string("high")}})
              .value == Value::string("rejected"));
    CHECK(evaluate_drd(m, "membership", {{"age", Value::integer(60)},
                                         {"hired", Value::boolean(false)},
                                         {"contribution", Value::string("high")}})
              .value == Value::string("conditionally accepted"));
    CHECK(evaluate_drd(m, "membership", {{"age", Value::integer(60)},
                                         {"hired", Value::boolean(true)},
                                         {"contribution", Value::string("none")}})
              .value == Value::string("accepted"));
}

TEST_CASE("missing binding names the element") {
    auto m = fixture("membership.dmn");
    try {
        evaluate_drd(m, "membership", {{"age", Value::integer(30)}});
        FAIL("expected MissingBinding");
    } catch (const MissingBinding& e) {
        CHECK(std::string(e.what()).find("Hired") != std::string::npos);
    }
}

TEST_CASE("no rule and multiple rules") {
    auto over = fixture("overlap.dmn");
    const auto& table = over.find_decision("check")->table;
    try {
        evaluate_table(table, {{"age", Value::integer(60)}, {"hired", Value::boolean(true)}}, "Check");
        FAIL("expected MultipleRulesMatched");
    } catch (const MultipleRulesMatched& e) {
        CHECK(e.rules() == std::vector<int>{1, 2});
    }
    CHECK(evaluate_table(table, {{"age", Value::integer(20)}, {"hired", Value::boolean(true)}}) ==
          Value::string("a"));

    auto kpi = fixture("kpi.dmn");
    Assignment none{{"kpitype", Value::string("cycle time")}, {"showevolution", Value::boolean(true)},
                    {"purpose", Value::string("reveal relationships")}, {"focus", Value::string("values")},
                    {"relationship", Value::string("correlation")}, {"multilevel", Value::boolean(true)},
                    {"numberofcategories", Value::integer(3)}};
    // A single value: rule 1 (Bullet graph) applies whatever else is given.
    CHECK(evaluate_drd(kpi, "kpivisualization", none).value == Value::string("Bullet graph"));
    none["kpitype"] = Value::string("close average");
    none["purpose"] = Value::string("look up");
    none["focus"] = Value::string("values");
    none["multilevel"] = Value::boolean(true);
    CHECK(evaluate_drd(kpi, "kpivisualization", none).value == Value::string("Heat map"));
    none["kpitype"] = Value::string("unknown kpi");
    CHECK_THROWS_AS(evaluate_drd(kpi, "kpivisualization", none), NoRuleMatched);
}

TEST_CASE("match_rule needs every column bound") {
    auto m = fixture("membership.dmn");
    const auto& t = m.find_decision("membership")->table;
    CHECK_THROWS_AS(match_rule(t.rules[1], t, {{"age", Value::integer(20)}}), MissingBinding);
}

TEST_CASE("topo_order: suppliers first, smallest ready name next") {
    for (const char* name : {"kpi.dmn", "membership.dmn"}) {
        auto m = fixture(name);
        auto order = topo_order(m);
        std::set<std::string> all;
        for (const auto& d : m.decisions) all.insert(d.normalized_name);
        for (const auto& l : m.literal_expressions) all.insert(l.normalized_name);
        CHECK(std::set<std::string>(order.begin(), order.end()) == all);
        CHECK(order.size() == all.size());
        std::set<std::string> placed;
        for (const auto& node : order) {
            std::set<std::string> ready;
            for (const auto& n : all) {
                if (placed.count(n)) continue;
                bool ok = true;
                for (const auto* r : m.requirements_of(n)) ok = ok && placed.count(r->supplier);
                if (ok) ready.insert(n);
            }
            REQUIRE(!ready.empty());
            CHECK(node == *ready.begin());
            placed.insert(node);
        }
    }
}

TEST_CASE("topo_order rejects cycles") {
    auto m = parse_dmn_document(testkit::fixture_text("cycle.dmn"));
    CHECK_THROWS_AS(topo_order(m), CyclicDependency);
}
