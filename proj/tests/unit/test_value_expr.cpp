#include <doctest.h>

#include <random>

#include "dmnbot/dmn_model.hpp"
#include "dmnbot/errors.hpp"
#include "dmnbot/expr.hpp"
#include "dmnbot/value.hpp"

using namespace dmnbot;

TEST_CASE("normalize_name strips to lowercase alphanumerics") {
    CHECK(normalize_name("KPI Visualization") == "kpivisualization");
    CHECK(normalize_name("Pick KPI") == "pickkpi");
    CHECK(normalize_name("Single/Multiple value") == "singlemultiplevalue");
    CHECK(normalize_name("numberOfCategories") == "numberofcategories");
}

TEST_CASE("normalize_name is idempotent on random labels") {
    std::mt19937 gen(3);
    const std::string alphabet = "aB3 _-/.xYz9";
    for (int i = 0; i < 500; ++i) {
        std::string s;
        for (int k = 0; k < 12; ++k) s.push_back(alphabet[gen() % alphabet.size()]);
        auto once = normalize_name(s);
        CHECK(normalize_name(once) == once);
    }
}

TEST_CASE("value equality") {
    CHECK(Value::string("Cycle Time") == Value::string("cycle time"));
    CHECK(Value::string(" look  up ") == Value::string("look up"));
    CHECK_FALSE(Value::string("a") == Value::boolean(true));
    CHECK(Value::number(0.3) == Value::number(0.3 + 1e-12));
    CHECK_FALSE(Value::number(0.3) == Value::number(0.31));
    CHECK(Value::integer(12) == Value::number(12.0));
    CHECK(Value::integer(12).key() == Value::number(12.0).key());
    CHECK(Value::string("A").key() == Value::string("a").key());
}

TEST_CASE("value display and literal forms") {
    CHECK(Value::integer(12).display() == "12");
    CHECK(Value::number(0.09).display() == "0.09");
    CHECK(Value::boolean(false).display() == "false");
    CHECK(Value::string("look up").literal() == "\"look up\"");
}

TEST_CASE("parse_literal") {
    CHECK(parse_literal("\"x y\"")->as_string() == "x y");
    CHECK(parse_literal("true")->as_boolean());
    CHECK(parse_literal("-2.5")->as_number() == doctest::Approx(-2.5));
    CHECK_FALSE(parse_literal("bare words").has_value());
}

TEST_CASE("unary test grammar") {
    CHECK(parse_unary_test("-", TypeRef::String).kind == UnaryTest::Kind::Wildcard);
    auto iv = parse_unary_test("[1..2]", TypeRef::Integer);
    CHECK(iv == UnaryTest::interval(1, 2, true, true));
    auto open = parse_unary_test("(1..2]", TypeRef::Double);
    CHECK(open == UnaryTest::interval(1, 2, false, true));
    CHECK(parse_unary_test(">=5", TypeRef::Integer) == UnaryTest::compare(CmpOp::Ge, 5));
    auto any = parse_unary_test("\"cycle time\", \"waiting time\"", TypeRef::String);
    CHECK(any == UnaryTest::any_of({UnaryTest::eq(Value::string("cycle time")),
                                    UnaryTest::eq(Value::string("waiting time"))}));
    CHECK(any.accepts(Value::string("cycle time")));
    CHECK(any.accepts(Value::string("waiting time")));
    CHECK_FALSE(any.accepts(Value::string("close average")));
    auto neg = parse_unary_test("not(\"a\")", TypeRef::String);
    CHECK(neg.kind == UnaryTest::Kind::Not);
    CHECK(neg.accepts(Value::string("b")));
    CHECK_FALSE(neg.accepts(Value::string("a")));
}

TEST_CASE("unary test boundaries") {
    auto iv = parse_unary_test("[18..55]", TypeRef::Integer);
    CHECK(iv.accepts(Value::integer(18)));
    CHECK(iv.accepts(Value::integer(55)));
    CHECK_FALSE(iv.accepts(Value::integer(56)));
    CHECK_FALSE(parse_unary_test("[1..2]", TypeRef::Integer).accepts(Value::integer(3)));
    CHECK(parse_unary_test(">55", TypeRef::Integer).accepts(Value::integer(56)));
    CHECK_FALSE(parse_unary_test(">55", TypeRef::Integer).accepts(Value::integer(55)));
}

TEST_CASE("unary test errors") {
    CHECK_THROWS_AS(parse_unary_test("[1..2]", TypeRef::String), TypeMismatch);
    CHECK_THROWS_AS(parse_unary_test("1.5", TypeRef::Integer), TypeMismatch);
    CHECK_THROWS_AS(parse_unary_test("[1..", TypeRef::Integer), ParseError);
    try {
        parse_unary_test("[3..1]", TypeRef::Integer, 4, 2);
        FAIL("expected an error");
    } catch (const ParseError& e) {
        CHECK(e.rule() == 4);
        CHECK(e.column() == 2);
    } catch (const TypeMismatch&) {
    }
}

TEST_CASE("printed unary tests re-parse to equal tests") {
    const std::vector<std::pair<std::string, TypeRef>> cases = {
        {"-", TypeRef::String},           {"\"x\"", TypeRef::String},       {"\"a\", \"b\"", TypeRef::String},
        {"not(\"a\", \"b\")", TypeRef::String}, {"<=5", TypeRef::Integer},  {">1", TypeRef::Integer},
        {"[18..55]", TypeRef::Integer},   {"(0.1..0.5)", TypeRef::Double},  {"true", TypeRef::Boolean},
        {"12", TypeRef::Long},            {"[1..2], >10", TypeRef::Integer}, {"not(<3)", TypeRef::Double}};
    for (const auto& [text, type] : cases) {
        auto t = parse_unary_test(text, type);
        CHECK_MESSAGE(parse_unary_test(print_unary_test(t), type) == t, text);
    }
}

TEST_CASE("expression parse, print and evaluate") {
    auto e = parse_expression("if kpiType = \"waiting time\" then 0.3 else if kpiType = \"close average\" then 0.09 else 0");
    auto lookup = [](std::string v) {
        return [v](const std::string& name) -> std::optional<Value> {
            if (name == "kpitype") return Value::string(v);
            return std::nullopt;
        };
    };
    CHECK(evaluate_expression(e, lookup("waiting time")).as_number() == doctest::Approx(0.3));
    CHECK(evaluate_expression(e, lookup("close average")).as_number() == doctest::Approx(0.09));
    CHECK(evaluate_expression(e, lookup("cycle time")).as_number() == doctest::Approx(0.0));
    CHECK(free_variables(e) == std::vector<std::string>{"kpitype"});
    CHECK(expr_equal(parse_expression(print_expression(e)), e));

    auto b = parse_expression("not(x > 3) and (y or z = \"q\")");
    auto env = [](const std::string& n) -> std::optional<Value> {
        if (n == "x") return Value::integer(2);
        if (n == "y") return Value::boolean(false);
        if (n == "z") return Value::string("Q");
        return std::nullopt;
    };
    CHECK(evaluate_expression(b, env).as_boolean());
    CHECK(expr_equal(parse_expression(print_expression(b)), b));
}

TEST_CASE("expression errors") {
    CHECK_THROWS_AS(parse_expression("if x then"), ParseError);
    CHECK_THROWS_AS(parse_expression("x + 1"), ParseError);
    CHECK_THROWS_AS(parse_expression("\"unterminated"), ParseError);
    CHECK_THROWS_AS(evaluate_expression(parse_expression("y"), [](const std::string&) { return std::nullopt; }),
                    MissingBinding);
    CHECK_THROWS_AS(evaluate_expression(parse_expression("x and true"),
                                        [](const std::string&) -> std::optional<Value> { return Value::integer(1); }),
                    TypeError);
}
