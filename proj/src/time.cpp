#include "cefsim/time.hpp"

#include <charconv>
#include <cstdio>

#include "cefsim/error.hpp"

namespace cefsim {
namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t len) {
    if (pos + len > text.size()) {
        throw ParseError("timestamp too short: '" + std::string(text) + "'");
    }
    int value = 0;
    auto first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc{} || ptr != first + len) {
        throw ParseError("malformed timestamp: '" + std::string(text) + "'");
    }
    return value;
}

void expect_char(std::string_view text, std::size_t pos, std::string_view allowed) {
    if (pos >= text.size() || allowed.find(text[pos]) == std::string_view::npos) {
        throw ParseError("malformed timestamp: '" + std::string(text) + "'");
    }
}

}  // namespace

TimePoint parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    while (!text.empty() && (text.front() == ' ' || text.front() == '"')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '"' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    if (text.size() >= 10 && text[2] == '.') {
        // Transparency-platform MTU label "DD.MM.YYYY HH:MM - DD.MM.YYYY HH:MM":
        // the interval start is used.
        const int d = read_int(text, 0, 2);
        expect_char(text, 5, ".");
        const int mo = read_int(text, 3, 2);
        const int y = read_int(text, 6, 4);
        int h = 0;
        int mi = 0;
        if (text.size() > 10) {
            expect_char(text, 10, " ");
            h = read_int(text, 11, 2);
            expect_char(text, 13, ":");
            mi = read_int(text, 14, 2);
        }
        const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                                 day{static_cast<unsigned>(d)}};
        if (!ymd.ok() || h > 23 || mi > 59) {
            throw ParseError("invalid calendar timestamp: '" + std::string(text) + "'");
        }
        return TimePoint{sys_days{ymd}} + hours{h} + minutes{mi};
    }
    const int y = read_int(text, 0, 4);
    expect_char(text, 4, "-");
    const int mo = read_int(text, 5, 2);
    expect_char(text, 7, "-");
    const int d = read_int(text, 8, 2);
    int h = 0;
    int mi = 0;
    if (text.size() > 10) {
        expect_char(text, 10, " T");
        h = read_int(text, 11, 2);
        expect_char(text, 13, ":");
        mi = read_int(text, 14, 2);
        std::size_t pos = 16;
        if (pos < text.size() && text[pos] == ':') {
            const int s = read_int(text, pos + 1, 2);
            if (s != 0) throw ParseError("sub-minute timestamp: '" + std::string(text) + "'");
            pos += 3;
        }
        if (pos < text.size()) {
            // Zone designator; anything else is junk.
            if (text[pos] != 'Z' && text[pos] != '+' && text[pos] != '-') {
                throw ParseError("malformed timestamp: '" + std::string(text) + "'");
            }
        }
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59) {
        throw ParseError("invalid calendar timestamp: '" + std::string(text) + "'");
    }
    return TimePoint{sys_days{ymd}} + hours{h} + minutes{mi};
}

std::string format_timestamp(TimePoint t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const auto rest = t - day;
    const auto h = duration_cast<hours>(rest);
    const auto m = rest - h;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(h.count()), static_cast<int>(m.count()));
    return buf;
}

std::string format_date(std::chrono::sys_days d) {
    using namespace std::chrono;
    const year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

int year_of(TimePoint t) {
    using namespace std::chrono;
    return static_cast<int>(year_month_day{floor<days>(t)}.year());
}

int hour_of_day(TimePoint t) {
    using namespace std::chrono;
    return static_cast<int>(duration_cast<hours>(t - floor<days>(t)).count());
}

std::chrono::sys_days date_of(TimePoint t) { return std::chrono::floor<std::chrono::days>(t); }

TimePoint hour_floor(TimePoint t) { return std::chrono::floor<std::chrono::hours>(t); }

TimePoint year_start(int y) {
    using namespace std::chrono;
    return TimePoint{sys_days{year{y} / January / 1}};
}

int hours_in_year(int y) {
    using namespace std::chrono;
    return year{y}.is_leap() ? 8784 : 8760;
}

}  // namespace cefsim
