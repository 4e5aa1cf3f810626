#include <doctest.h>

#include "../support/testkit.hpp"
#include <atomic>
#include <thread>

#include "dmnbot/relevance.hpp"

using namespace dmnbot;
using testkit::fixture;

namespace {

std::vector<double> numbers(const Domain& d) {
    std::vector<double> out;
    for (const auto& v : d.values) out.push_back(v.as_number());
    return out;
}

// Checks the engine against the oracle on every partial assignment.
std::size_t compare_with_oracle(const DmnModel& m, const std::string& decision) {
    RelevanceEngine engine(m);
    testkit::NecessityOracle oracle(m, decision);
    oracle.evaluate_all();
    std::size_t checked = 0, mismatches = 0;
    testkit::for_each_partial(oracle, [&](const std::vector<int>& p) {
        auto a = oracle.to_assignment(p);
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] >= 0) continue;
            bool expected = oracle.necessary(i, p);
            bool got = engine.is_necessary(decision, oracle.inputs()[i].name, a);
            ++checked;
            if (expected != got) {
                ++mismatches;
                if (mismatches < 5) {
                    MESSAGE("mismatch on " << oracle.inputs()[i].name << " given " << assignment_key(a));
                }
            }
        }
    });
    CHECK(mismatches == 0);
    return checked;
}

}  // namespace

TEST_CASE("integer domain of age has boundaries, neighbours and midpoints") {
    auto m = fixture("membership.dmn");
    auto d = domain_of(m, "age");
    CHECK(d.kind == Domain::Kind::NumericProbe);
    auto v = numbers(d);
    for (double p : {17.0, 18.0, 19.0, 36.0, 54.0, 55.0, 56.0}) {
        CHECK_MESSAGE(std::find(v.begin(), v.end(), p) != v.end(), p);
    }
    CHECK(std::is_sorted(v.begin(), v.end()));
    CHECK(d.boundaries == std::vector<double>{18, 55});
    for (const auto& x : d.values) CHECK(x.number_kind() == TypeRef::Integer);
}

TEST_CASE("enumerated and boolean domains") {
    auto m = fixture("membership.dmn");
    auto c = domain_of(m, "contribution");
    CHECK(c.kind == Domain::Kind::Enumerated);
    CHECK(c.contains(Value::string("none")));
    CHECK(c.contains(Value::string("very high")));
    CHECK(c.index_of(Value::string("missing")) == -1);
    auto h = domain_of(m, "hired");
    CHECK(h.values.size() == 2);
    CHECK_THROWS_AS(domain_of(m, "nope"), UnknownInput);
}

TEST_CASE("string input compared only in a literal expression still gets values") {
    auto m = fixture("kpi.dmn");
    auto d = domain_of(m, "kpitype");
    CHECK(d.contains(Value::string("cycle time")));
    CHECK(d.contains(Value::string("waiting time")));
    CHECK(d.contains(Value::string("close average")));
}

TEST_CASE("required_inputs order for the kpi model") {
    auto m = fixture("kpi.dmn");
    auto req = required_inputs(m, "kpivisualization");
    CHECK(req == std::vector<std::string>{"kpitype", "showevolution", "purpose", "focus", "relationship",
                                          "multilevel", "numberofcategories"});
    CHECK(required_inputs(m, "overtime") == std::vector<std::string>{"kpitype", "showevolution"});
    CHECK(required_inputs(m, "pickkpi") == std::vector<std::string>{"kpitype"});
}

TEST_CASE("overlap detection") {
    auto over = fixture("overlap.dmn");
    auto found = detect_model_overlaps(over);
    REQUIRE(!found.empty());
    CHECK(found[0].decision == "check");
    CHECK(found[0].overlap.rule_a == 1);
    CHECK(found[0].overlap.rule_b == 2);
    const auto& w = found[0].overlap.witness;
    CHECK(w.at("age").as_number() > 55);
    CHECK(w.at("hired") == Value::boolean(true));
    // The witness really hits both rules.
    const auto& t = over.find_decision("check")->table;
    CHECK(match_rule(t.rules[0], t, w));
    CHECK(match_rule(t.rules[1], t, w));

    for (const char* name : {"kpi.dmn", "membership.dmn"}) {
        CHECK_MESSAGE(detect_model_overlaps(fixture(name)).empty(), name);
    }
}

TEST_CASE("membership: contribution is irrelevant for old unhired applicants") {
    auto m = fixture("membership.dmn");
    RelevanceEngine e(m);
    Assignment a{{"age", Value::integer(60)}, {"hired", Value::boolean(false)}};
    CHECK_FALSE(e.is_necessary("membership", "contribution", a));
    CHECK(e.is_necessary("membership", "contribution", {{"age", Value::integer(30)}, {"hired", Value::boolean(true)}}));
    CHECK_FALSE(e.is_necessary("membership", "hired", {{"age", Value::integer(10)}}));
    CHECK(e.is_necessary("membership", "age", {}));
    CHECK(is_necessary(m, "membership", "contribution", {{"age", Value::integer(40)}}));
}

TEST_CASE("kpi: pruning after look up with a process KPI over time") {
    auto m = fixture("kpi.dmn");
    RelevanceEngine e(m);
    Assignment a{{"kpitype", Value::string("close average")}, {"purpose", Value::string("look up")},
                 {"focus", Value::string("changes")}};
    CHECK_FALSE(e.is_necessary("kpivisualization", "relationship", a));
    CHECK_FALSE(e.is_necessary("kpivisualization", "multilevel", a));
    CHECK(e.is_necessary("kpivisualization", "numberofcategories", a));
    // Single value: nothing else matters.
    Assignment single{{"kpitype", Value::string("cycle time")}};
    for (const char* in : {"showevolution", "purpose", "focus", "relationship", "multilevel", "numberofcategories"}) {
        CHECK_FALSE_MESSAGE(e.is_necessary("kpivisualization", in, single), in);
    }
}

TEST_CASE("complete fills unbound inputs from the domain") {
    auto m = fixture("membership.dmn");
    RelevanceEngine e(m);
    auto full = e.complete("membership", {{"age", Value::integer(60)}, {"hired", Value::boolean(false)}});
    CHECK(full.size() == 3);
    CHECK(evaluate_drd(m, "membership", full).value == Value::string("conditionally accepted"));
}

TEST_CASE("necessity agrees with the exhaustive oracle on membership") {
    auto m = fixture("membership.dmn");
    CHECK(compare_with_oracle(m, "membership") > 0);
}

TEST_CASE("necessity agrees with the exhaustive oracle on overtime") {
    auto m = fixture("kpi.dmn");
    CHECK(compare_with_oracle(m, "overtime") > 0);
    CHECK(compare_with_oracle(m, "pickkpi") > 0);
}

TEST_CASE("engine is safe to share between threads") {
    auto m = fixture("kpi.dmn");
    RelevanceEngine e(m);
    std::vector<std::thread> threads;
    std::atomic<int> wrong{0};
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&] {
            for (int i = 0; i < 50; ++i) {
                Assignment a{{"kpitype", Value::string("close average")}, {"purpose", Value::string("look up")},
                             {"focus", Value::string("changes")}};
                if (e.is_necessary("kpivisualization", "relationship", a)) ++wrong;
                if (!e.is_necessary("kpivisualization", "numberofcategories", a)) ++wrong;
            }
        });
    }
    for (auto& t : threads) t.join();
    CHECK(wrong == 0);
}
