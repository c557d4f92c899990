#include <doctest.h>

#include <algorithm>
#include <vector>

#include "tnorm/value.hpp"

using namespace tnorm;

TEST_CASE("values keep kinds distinct under equality") {
    CHECK(Value::resource("car1") == Value::resource("car1"));
    CHECK(Value::resource("car1") != Value::resource("car2"));
    // A resource named like a text literal is a different value.
    CHECK(Value::resource("x") != Value::text("x"));
    // Join equality never coerces numerics.
    CHECK(Value(std::int64_t{6}) != Value(6.0));
    CHECK(Value(Timestamp{1000}) != Value(Duration{1000}));
}

TEST_CASE("ordering is total and kind-major") {
    std::vector<Value> vs = {Value(6.0), Value::text("b"), Value(Timestamp{5}),
                             Value::resource("a"), Value(std::int64_t{9}), Value(Duration{1})};
    std::sort(vs.begin(), vs.end(), [](const Value& a, const Value& b) { return a < b; });
    // variant index order: resource, text, integer, decimal, timestamp, duration
    CHECK(vs[0].is_resource());
    CHECK(vs[1].is_text());
    CHECK(vs[2].is_int());
    CHECK(vs[3].is_decimal());
    CHECK(vs[4].is_timestamp());
    CHECK(vs[5].is_duration());
}

TEST_CASE("canonical rendering is unambiguous across kinds") {
    CHECK(Value::resource("car1").canonical() != Value::text("car1").canonical());
    CHECK(Value(std::int64_t{6}).canonical() != Value(6.0).canonical());
    CHECK(Value(Timestamp{0}).canonical() != Value(Duration{0}).canonical());
    // Canonical strings function as map keys: equal values, equal keys.
    CHECK(Value::resource("x").canonical() == Value::resource("x").canonical());
}

TEST_CASE("comparison requires like kinds for ordering") {
    auto i6 = Value(std::int64_t{6});
    auto d6 = Value(6.0);
    auto i7 = Value(std::int64_t{7});

    CHECK(compare_values(i6, CmpOp::Lt, i7));
    CHECK(compare_values(i7, CmpOp::Gt, i6));
    CHECK(compare_values(i6, CmpOp::Le, i6));
    // Numeric comparison bridges int and decimal (unlike join equality).
    CHECK(compare_values(i6, CmpOp::Eq, d6));
    CHECK(compare_values(d6, CmpOp::Ge, i6));
    CHECK(compare_values(i6, CmpOp::Ne, Value(6.5)));

    CHECK(compare_values(Value(Timestamp{100}), CmpOp::Lt, Value(Timestamp{200})));
    CHECK(compare_values(Value(Duration{100}), CmpOp::Lt, Value(Duration{200})));

    // Ordering across kinds is undefined, never true.
    CHECK(!compare_values(Value(Timestamp{100}), CmpOp::Lt, Value(Duration{200})));
    CHECK(!compare_values(i6, CmpOp::Lt, Value(Timestamp{100})));
    CHECK(!compare_values(Value::resource("a"), CmpOp::Lt, Value::resource("b")));
}

TEST_CASE("equality operators accept like-kinded non-numerics") {
    CHECK(compare_values(Value::resource("a"), CmpOp::Eq, Value::resource("a")));
    CHECK(compare_values(Value::resource("a"), CmpOp::Ne, Value::resource("b")));
    CHECK(compare_values(Value::text("hi"), CmpOp::Eq, Value::text("hi")));
    // Cross-kind operands are not comparable: every operator, = and !=
    // included, evaluates to false rather than guessing.
    CHECK(!compare_values(Value::resource("a"), CmpOp::Eq, Value::text("a")));
    CHECK(!compare_values(Value::resource("a"), CmpOp::Ne, Value::text("a")));
}

TEST_CASE("display renders timestamps lexically and quotes text") {
    CHECK(Value(Timestamp{1614583800000LL}).display() == "2021-03-01T07:30:00Z");
    CHECK(Value::text("late").display() == "'late'");
    CHECK(Value::resource("car1").display() == "car1");
    CHECK(Value(std::int64_t{6}).display() == "6");
}
