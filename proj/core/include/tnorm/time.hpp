// UTC instants and durations at millisecond precision.
//
// Timestamps are a thin wrapper over "milliseconds since the Unix epoch";
// all calendar math goes through std::chrono's proleptic Gregorian types so
// leap years are handled once, in one place.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tnorm {

struct Timestamp {
    std::int64_t ms = 0;
    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

struct Duration {
    std::int64_t ms = 0;
    friend auto operator<=>(const Duration&, const Duration&) = default;
};

constexpr Timestamp operator+(Timestamp t, Duration d) { return {t.ms + d.ms}; }
constexpr Timestamp operator-(Timestamp t, Duration d) { return {t.ms - d.ms}; }
constexpr Duration operator-(Timestamp a, Timestamp b) { return {a.ms - b.ms}; }
constexpr Duration operator+(Duration a, Duration b) { return {a.ms + b.ms}; }

constexpr Duration millis(std::int64_t n) { return {n}; }
constexpr Duration seconds(std::int64_t n) { return {n * 1000}; }
constexpr Duration minutes(std::int64_t n) { return {n * 60'000}; }
constexpr Duration hours(std::int64_t n) { return {n * 3'600'000}; }
constexpr Duration days(std::int64_t n) { return {n * 86'400'000}; }

// Parses an xsd:dateTimeStamp lexical form: "YYYY-MM-DDThh:mm:ss[.fff](Z|±hh:mm)".
// The timezone is mandatory; the result is normalized to UTC. Fractional
// seconds beyond millisecond precision are rejected rather than truncated,
// so every accepted input round-trips through format_timestamp losslessly.
std::optional<Timestamp> parse_timestamp(std::string_view text);

// Canonical UTC form. Milliseconds are printed only when non-zero.
std::string format_timestamp(Timestamp t);

// Civil field extraction, UTC.
int year_of(Timestamp t);
int month_of(Timestamp t);
int day_of(Timestamp t);   // day of month, 1..31
int hour_of(Timestamp t);  // 0..23
int minute_of(Timestamp t);

// Calendar-aware: Feb 29 + N years lands on Feb 28 when the target year is
// not a leap year. Time of day is preserved.
Timestamp add_years(Timestamp t, int years);

// "PT26H30M", "P2DT1H", "PT0.5S"-style rendering (ISO 8601 duration, days at
// most; negative durations get a leading '-').
std::string format_duration(Duration d);

// Shorthand accepted on the command line: "250ms", "30s", "5m", "2h", "1d".
std::optional<Duration> parse_duration_shorthand(std::string_view text);

} // namespace tnorm
