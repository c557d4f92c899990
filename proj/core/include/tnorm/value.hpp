// The object-position value domain for facts and bindings.
//
// A Value is exactly one of: resource reference, text literal, integer,
// decimal, timestamp, duration. Equality is exact (6 and 6.0 are different
// values; joins never coerce). Ordering is total: values sort by kind first,
// then within the kind, which gives every container of values a canonical
// order independent of insertion history.
#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "tnorm/time.hpp"

namespace tnorm {

struct Resource {
    std::string id;
    friend auto operator<=>(const Resource&, const Resource&) = default;
};

struct Text {
    std::string value;
    friend auto operator<=>(const Text&, const Text&) = default;
};

class Value {
  public:
    using Storage = std::variant<Resource, Text, std::int64_t, double, Timestamp, Duration>;

    Value() : v_(Resource{}) {}
    Value(Resource r) : v_(std::move(r)) {}
    Value(Text t) : v_(std::move(t)) {}
    Value(std::int64_t i) : v_(i) {}
    Value(double d) : v_(d) {}
    Value(Timestamp t) : v_(t) {}
    Value(Duration d) : v_(d) {}

    static Value resource(std::string id) { return Value(Resource{std::move(id)}); }
    static Value text(std::string s) { return Value(Text{std::move(s)}); }

    bool is_resource() const { return std::holds_alternative<Resource>(v_); }
    bool is_text() const { return std::holds_alternative<Text>(v_); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
    bool is_decimal() const { return std::holds_alternative<double>(v_); }
    bool is_timestamp() const { return std::holds_alternative<Timestamp>(v_); }
    bool is_duration() const { return std::holds_alternative<Duration>(v_); }
    bool is_numeric() const { return is_int() || is_decimal(); }

    const Resource& as_resource() const { return std::get<Resource>(v_); }
    const Text& as_text() const { return std::get<Text>(v_); }
    std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
    double as_decimal() const { return std::get<double>(v_); }
    Timestamp as_timestamp() const { return std::get<Timestamp>(v_); }
    Duration as_duration() const { return std::get<Duration>(v_); }

    // For numeric values regardless of representation.
    double as_double() const { return is_int() ? static_cast<double>(as_int()) : as_decimal(); }

    const Storage& storage() const { return v_; }

    friend bool operator==(const Value&, const Value&) = default;
    friend bool operator<(const Value& a, const Value& b) { return a.v_ < b.v_; }

    // Unambiguous one-line rendering, usable as a map key: kind prefix plus
    // payload ("r:car1", "i:6", "t:2021-03-01T07:30:00Z", ...).
    std::string canonical() const;

    // Human-oriented rendering (no kind prefix; text gets quotes).
    std::string display() const;

  private:
    Storage v_;
};

enum class CmpOp { Lt, Le, Eq, Ne, Ge, Gt };

const char* to_string(CmpOp op);

// Three-way comparability used by condition evaluation: ordering operators
// need both sides numeric, or both timestamps, or both durations; = and !=
// additionally accept any pair of like-kinded values. Integers and decimals
// compare numerically (6 = 6.0 holds here, unlike join equality).
// Returns false when the operands are not comparable under `op`.
bool compare_values(const Value& lhs, CmpOp op, const Value& rhs);

} // namespace tnorm
