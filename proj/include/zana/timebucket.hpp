#pragma once

#include <cstdint>
#include <string>

namespace zana {

// UTC calendar bucketing over unix timestamps. Blocks carry unix seconds;
// daily and monthly aggregation is deterministic UTC bucketing.

// Days since the unix epoch (floor).
std::int64_t utc_day_index(std::int64_t unix_seconds);

std::string utc_day_label(std::int64_t day_index); // "YYYY-MM-DD"

// Months since year 0 (year*12 + month-1); total order over calendar months.
std::int64_t utc_month_index(std::int64_t unix_seconds);

std::string utc_month_label(std::int64_t month_index); // "YYYY-MM"

} // namespace zana
