#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace cefsim {

// Market-local wall-clock time at minute resolution. Timestamps label the
// beginning of their interval.
using TimePoint = std::chrono::sys_time<std::chrono::minutes>;

// Accepts "YYYY-MM-DD HH:MM[:SS]" and the ISO "T" form. A trailing "Z" or
// UTC offset is ignored: exported series are already in local market time.
TimePoint parse_timestamp(std::string_view text);

// "YYYY-MM-DDTHH:MM"
std::string format_timestamp(TimePoint t);

// "YYYY-MM-DD"
std::string format_date(std::chrono::sys_days d);

int year_of(TimePoint t);
int hour_of_day(TimePoint t);
std::chrono::sys_days date_of(TimePoint t);
TimePoint hour_floor(TimePoint t);

TimePoint year_start(int year);
int hours_in_year(int year);

}  // namespace cefsim
