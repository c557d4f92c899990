#include "tnorm/time.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>

namespace tnorm {

namespace {

using days_t = std::chrono::sys_days;

struct Civil {
    int year, month, day;
    int hour, minute, second, milli;
};

Civil split(Timestamp t) {
    std::int64_t day_ms = 86'400'000;
    std::int64_t d = t.ms / day_ms;
    std::int64_t rem = t.ms % day_ms;
    if (rem < 0) {
        rem += day_ms;
        --d;
    }
    std::chrono::year_month_day ymd{days_t{std::chrono::days{d}}};
    Civil c{};
    c.year = static_cast<int>(ymd.year());
    c.month = static_cast<int>(static_cast<unsigned>(ymd.month()));
    c.day = static_cast<int>(static_cast<unsigned>(ymd.day()));
    c.milli = static_cast<int>(rem % 1000);
    rem /= 1000;
    c.second = static_cast<int>(rem % 60);
    rem /= 60;
    c.minute = static_cast<int>(rem % 60);
    c.hour = static_cast<int>(rem / 60);
    return c;
}

std::int64_t join(const Civil& c) {
    std::chrono::year_month_day ymd{std::chrono::year{c.year}, std::chrono::month{static_cast<unsigned>(c.month)},
                                    std::chrono::day{static_cast<unsigned>(c.day)}};
    std::int64_t d = days_t{ymd}.time_since_epoch().count();
    return ((d * 24 + c.hour) * 60 + c.minute) * 60'000 + c.second * 1000 + c.milli;
}

// Reads exactly n digits starting at i; advances i. Returns -1 on failure.
int read_digits(std::string_view s, size_t& i, int n) {
    if (i + n > s.size()) return -1;
    int v = 0;
    for (int k = 0; k < n; ++k) {
        char ch = s[i + k];
        if (ch < '0' || ch > '9') return -1;
        v = v * 10 + (ch - '0');
    }
    i += n;
    return v;
}

bool expect(std::string_view s, size_t& i, char ch) {
    if (i >= s.size() || s[i] != ch) return false;
    ++i;
    return true;
}

} // namespace

std::optional<Timestamp> parse_timestamp(std::string_view s) {
    size_t i = 0;
    int year = read_digits(s, i, 4);
    if (year < 0 || !expect(s, i, '-')) return std::nullopt;
    int month = read_digits(s, i, 2);
    if (month < 1 || month > 12 || !expect(s, i, '-')) return std::nullopt;
    int day = read_digits(s, i, 2);
    if (day < 1 || !expect(s, i, 'T')) return std::nullopt;
    int hour = read_digits(s, i, 2);
    if (hour < 0 || hour > 23 || !expect(s, i, ':')) return std::nullopt;
    int minute = read_digits(s, i, 2);
    if (minute < 0 || minute > 59 || !expect(s, i, ':')) return std::nullopt;
    int second = read_digits(s, i, 2);
    if (second < 0 || second > 59) return std::nullopt;

    int milli = 0;
    if (i < s.size() && s[i] == '.') {
        ++i;
        size_t start = i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
        size_t ndig = i - start;
        if (ndig == 0 || ndig > 3) return std::nullopt; // sub-millisecond digits would not round-trip
        for (size_t k = start; k < i; ++k) milli = milli * 10 + (s[k] - '0');
        for (size_t k = ndig; k < 3; ++k) milli *= 10;
    }

    std::int64_t offset_min = 0;
    if (i < s.size() && s[i] == 'Z') {
        ++i;
    } else if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        bool neg = s[i] == '-';
        ++i;
        int oh = read_digits(s, i, 2);
        if (oh < 0 || oh > 14 || !expect(s, i, ':')) return std::nullopt;
        int om = read_digits(s, i, 2);
        if (om < 0 || om > 59) return std::nullopt;
        offset_min = oh * 60 + om;
        if (neg) offset_min = -offset_min;
    } else {
        return std::nullopt; // xsd:dateTimeStamp requires a timezone
    }
    if (i != s.size()) return std::nullopt;

    std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                                    std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok()) return std::nullopt;

    Civil c{year, month, day, hour, minute, second, milli};
    return Timestamp{join(c) - offset_min * 60'000};
}

std::string format_timestamp(Timestamp t) {
    Civil c = split(t);
    char buf[40];
    if (c.milli != 0) {
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", c.year, c.month, c.day, c.hour,
                      c.minute, c.second, c.milli);
    } else {
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year, c.month, c.day, c.hour, c.minute,
                      c.second);
    }
    return buf;
}

int year_of(Timestamp t) { return split(t).year; }
int month_of(Timestamp t) { return split(t).month; }
int day_of(Timestamp t) { return split(t).day; }
int hour_of(Timestamp t) { return split(t).hour; }
int minute_of(Timestamp t) { return split(t).minute; }

Timestamp add_years(Timestamp t, int years) {
    Civil c = split(t);
    std::chrono::year_month_day ymd{std::chrono::year{c.year + years},
                                    std::chrono::month{static_cast<unsigned>(c.month)},
                                    std::chrono::day{static_cast<unsigned>(c.day)}};
    if (!ymd.ok()) ymd = ymd.year() / ymd.month() / std::chrono::last; // Feb 29 -> Feb 28
    c.year = static_cast<int>(ymd.year());
    c.month = static_cast<int>(static_cast<unsigned>(ymd.month()));
    c.day = static_cast<int>(static_cast<unsigned>(ymd.day()));
    return Timestamp{join(c)};
}

std::string format_duration(Duration d) {
    std::int64_t ms = d.ms;
    std::string out;
    if (ms < 0) {
        out += '-';
        ms = -ms;
    }
    out += 'P';
    std::int64_t dd = ms / 86'400'000;
    ms %= 86'400'000;
    std::int64_t hh = ms / 3'600'000;
    ms %= 3'600'000;
    std::int64_t mm = ms / 60'000;
    ms %= 60'000;
    std::int64_t ss = ms / 1000;
    std::int64_t milli = ms % 1000;
    if (dd != 0) out += std::to_string(dd) + "D";
    if (hh != 0 || mm != 0 || ss != 0 || milli != 0 || dd == 0) {
        out += 'T';
        if (hh != 0) out += std::to_string(hh) + "H";
        if (mm != 0) out += std::to_string(mm) + "M";
        if (milli != 0) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%lld.%03lld", static_cast<long long>(ss), static_cast<long long>(milli));
            std::string frac = buf;
            while (frac.back() == '0') frac.pop_back();
            out += frac;
            out += 'S';
        } else if (ss != 0 || (dd == 0 && hh == 0 && mm == 0)) {
            out += std::to_string(ss) + "S";
        }
    }
    return out;
}

std::optional<Duration> parse_duration_shorthand(std::string_view s) {
    size_t i = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    if (i == 0 || i == s.size()) return std::nullopt;
    std::int64_t n = 0;
    for (size_t k = 0; k < i; ++k) n = n * 10 + (s[k] - '0');
    std::string_view unit = s.substr(i);
    if (unit == "ms") return millis(n);
    if (unit == "s") return seconds(n);
    if (unit == "m") return minutes(n);
    if (unit == "h") return hours(n);
    if (unit == "d") return days(n);
    return std::nullopt;
}

} // namespace tnorm
