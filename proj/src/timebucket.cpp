#include "zana/timebucket.hpp"

#include <chrono>

namespace zana {

namespace {

std::chrono::year_month_day ymd_of(std::int64_t unix_seconds) {
    using namespace std::chrono;
    // floor to days handles pre-1970 timestamps correctly
    sys_seconds tp{seconds{unix_seconds}};
    return year_month_day{floor<days>(tp)};
}

} // namespace

std::int64_t utc_day_index(std::int64_t unix_seconds) {
    std::int64_t d = unix_seconds / 86400;
    if (unix_seconds < 0 && unix_seconds % 86400 != 0) --d;
    return d;
}

std::string utc_day_label(std::int64_t day_index) {
    using namespace std::chrono;
    year_month_day ymd{sys_days{days{day_index}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()));
    return buf;
}

std::int64_t utc_month_index(std::int64_t unix_seconds) {
    auto ymd = ymd_of(unix_seconds);
    return std::int64_t(int(ymd.year())) * 12 + (int(unsigned(ymd.month())) - 1);
}

std::string utc_month_label(std::int64_t month_index) {
    std::int64_t y = month_index / 12;
    std::int64_t m = month_index % 12;
    if (m < 0) {
        m += 12;
        --y;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%04lld-%02lld", static_cast<long long>(y),
                  static_cast<long long>(m + 1));
    return buf;
}

} // namespace zana
