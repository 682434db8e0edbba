#include "recall/dates.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cstdio>

#include "recall/text.hpp"

namespace recall {

namespace {

constexpr std::array<std::string_view, 12> kMonths = {
    "january", "february", "march",     "april",   "may",      "june",
    "july",    "august",   "september", "october", "november", "december"};

std::optional<unsigned> month_from_token(const std::string& tok) {
    for (unsigned m = 0; m < kMonths.size(); ++m) {
        // Accept common three-letter abbreviations ("jan", "feb", ...).
        if (tok == kMonths[m] || (tok.size() == 3 && kMonths[m].substr(0, 3) == tok))
            return m + 1;
    }
    return std::nullopt;
}

std::optional<int> parse_int(const std::string& tok) {
    int value = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || p != tok.data() + tok.size()) return std::nullopt;
    return value;
}

bool is_year(int v) { return v >= 1000 && v <= 9999; }
bool is_day(int v) { return v >= 1 && v <= 31; }

bool valid_ymd(int y, unsigned m, unsigned d) {
    using namespace std::chrono;
    return year_month_day{year{y}, month{m}, day{d}}.ok();
}

// ISO prefix: YYYY, YYYY-MM, YYYY-MM-DD (exact match on the trimmed string).
std::optional<CivilDate> parse_iso_prefix(const std::string& s) {
    auto digits = [&](size_t pos, size_t n) -> std::optional<int> {
        if (pos + n > s.size()) return std::nullopt;
        int v = 0;
        for (size_t i = pos; i < pos + n; ++i) {
            if (s[i] < '0' || s[i] > '9') return std::nullopt;
            v = v * 10 + (s[i] - '0');
        }
        return v;
    };
    auto y = digits(0, 4);
    if (!y || !is_year(*y)) return std::nullopt;
    if (s.size() == 4) return CivilDate{*y, 1, 1, DatePrecision::Year};
    if (s.size() >= 7 && s[4] == '-') {
        auto m = digits(5, 2);
        if (!m || *m < 1 || *m > 12) return std::nullopt;
        if (s.size() == 7) return CivilDate{*y, unsigned(*m), 1, DatePrecision::Month};
        if (s.size() == 10 && s[7] == '-') {
            auto d = digits(8, 2);
            if (!d || !valid_ymd(*y, unsigned(*m), unsigned(*d))) return std::nullopt;
            return CivilDate{*y, unsigned(*m), unsigned(*d), DatePrecision::Day};
        }
    }
    return std::nullopt;
}

CivilDate month_shift(const CivilDate& ref, int months) {
    int idx = ref.year * 12 + int(ref.month) - 1 + months;
    CivilDate out;
    out.year = idx / 12;
    out.month = unsigned(idx % 12) + 1;
    out.precision = DatePrecision::Month;
    return out;
}

}  // namespace

std::string CivilDate::to_iso() const {
    char buf[16];
    switch (precision) {
        case DatePrecision::Year:
            std::snprintf(buf, sizeof buf, "%04d", year);
            break;
        case DatePrecision::Month:
            std::snprintf(buf, sizeof buf, "%04d-%02u", year, month);
            break;
        case DatePrecision::Day:
            std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
            break;
    }
    return buf;
}

CivilDate shift_days(const CivilDate& date, int days) {
    using namespace std::chrono;
    sys_days sd = sys_days(year_month_day{year{date.year}, month{date.month}, day{date.day}});
    year_month_day shifted{sd + std::chrono::days{days}};
    return CivilDate{int(shifted.year()), unsigned(shifted.month()), unsigned(shifted.day()),
                     DatePrecision::Day};
}

std::optional<CivilDate> parse_date_like(std::string_view text) {
    std::string trimmed = trim(text);
    if (auto iso = parse_iso_prefix(trimmed)) return iso;

    // Scan token windows for day-month-year / month-day-year / month-year.
    auto toks = tokenize(trimmed);
    for (size_t i = 0; i < toks.size(); ++i) {
        auto m = month_from_token(toks[i]);
        if (!m) continue;
        std::optional<int> before = i > 0 ? parse_int(toks[i - 1]) : std::nullopt;
        std::optional<int> after = i + 1 < toks.size() ? parse_int(toks[i + 1]) : std::nullopt;
        std::optional<int> after2 = i + 2 < toks.size() ? parse_int(toks[i + 2]) : std::nullopt;
        // "8 May, 2023"
        if (before && is_day(*before) && after && is_year(*after) &&
            valid_ymd(*after, *m, unsigned(*before)))
            return CivilDate{*after, *m, unsigned(*before), DatePrecision::Day};
        // "May 8, 2023"
        if (after && is_day(*after) && after2 && is_year(*after2) &&
            valid_ymd(*after2, *m, unsigned(*after)))
            return CivilDate{*after2, *m, unsigned(*after), DatePrecision::Day};
        // "May 2023"
        if (after && is_year(*after)) return CivilDate{*after, *m, 1, DatePrecision::Month};
    }
    // Lone year anywhere in the string.
    for (const auto& t : toks)
        if (auto v = parse_int(t); v && is_year(*v)) return CivilDate{*v, 1, 1, DatePrecision::Year};
    return std::nullopt;
}

std::optional<std::string> normalize_event_time(std::string_view expr,
                                                const std::optional<CivilDate>& reference) {
    std::string trimmed = trim(expr);
    if (trimmed.empty()) return std::nullopt;
    if (auto iso = parse_iso_prefix(trimmed)) return iso->to_iso();

    auto toks = tokenize(trimmed);
    if (toks.empty()) return std::nullopt;

    // Absolute forms never need the reference date.
    {
        auto abs = parse_date_like(trimmed);
        if (abs && abs->precision != DatePrecision::Year) return abs->to_iso();
        // A bare year is fine too, but only when the string is essentially
        // just the year ("2021", "in 2021") so "20 miles in 2 hours" stays out.
        if (abs && abs->precision == DatePrecision::Year && toks.size() <= 2) return abs->to_iso();
    }

    if (!reference) return std::nullopt;
    const CivilDate& ref = *reference;

    auto word = [&](std::string_view w) {
        return toks.size() == 1 && toks[0] == w;
    };
    auto pair = [&](std::string_view a, std::string_view b) {
        return toks.size() == 2 && toks[0] == a && toks[1] == b;
    };

    if (word("today") || word("tonight")) return ref.to_iso();
    if (word("yesterday")) return shift_days(ref, -1).to_iso();
    if (word("tomorrow")) return shift_days(ref, 1).to_iso();
    if (pair("last", "night")) return shift_days(ref, -1).to_iso();
    if (pair("last", "week")) return shift_days(ref, -7).to_iso();
    if (pair("next", "week")) return shift_days(ref, 7).to_iso();
    if (pair("last", "month")) return month_shift(ref, -1).to_iso();
    if (pair("next", "month")) return month_shift(ref, 1).to_iso();
    if (pair("last", "year"))
        return CivilDate{ref.year - 1, 1, 1, DatePrecision::Year}.to_iso();
    if (pair("next", "year"))
        return CivilDate{ref.year + 1, 1, 1, DatePrecision::Year}.to_iso();

    // Bare month name ("in February") resolves to the reference year.
    if (toks.size() <= 2) {
        const std::string& tok = toks.back();
        if (auto m = month_from_token(tok))
            return CivilDate{ref.year, *m, 1, DatePrecision::Month}.to_iso();
    }
    return std::nullopt;
}

}  // namespace recall
