#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace odflow {

// Seconds since 1970-01-01 00:00:00, timezone-naive local campus time.
using Timestamp = std::int64_t;

inline constexpr std::int64_t kSecondsPerDay = 86400;

struct CivilDateTime {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;
    int minute = 0;
    int second = 0;
};

// Proleptic Gregorian day count from 1970-01-01.
std::int64_t days_from_civil(int year, int month, int day);
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

Timestamp to_timestamp(const CivilDateTime& c);
CivilDateTime to_civil(Timestamp t);

// Strict "YYYY-MM-DD HH:MM:SS"; nullopt for anything malformed or out of range.
std::optional<Timestamp> parse_timestamp(std::string_view s);
std::string format_timestamp(Timestamp t);

Timestamp midnight_of(Timestamp t);

// 0 = Monday .. 6 = Sunday.
int weekday_of(Timestamp t);

}  // namespace odflow
