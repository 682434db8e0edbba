#pragma once
// Calendar-date normalization for tuple event times.
//
// Event times are ISO-8601 prefixes with the precision that was actually
// resolvable: "2023", "2023-02" or "2023-02-09". Relative expressions
// ("yesterday", "last month") resolve against the session date; anything
// unresolvable yields nullopt so the tuple carries no event_time at all.

#include <optional>
#include <string>
#include <string_view>

namespace recall {

enum class DatePrecision { Year, Month, Day };

struct CivilDate {
    int year = 0;
    unsigned month = 1;  // valid when precision >= Month
    unsigned day = 1;    // valid when precision == Day
    DatePrecision precision = DatePrecision::Day;

    std::string to_iso() const;
};

// Parses a date out of a free-form timestamp such as "2023-02-10",
// "8 May, 2023", "May 8, 2023" or "1:56 pm on 8 May, 2023".
std::optional<CivilDate> parse_date_like(std::string_view text);

// Normalizes a temporal expression to an ISO prefix. Handles ISO prefixes,
// absolute month/day-month-year forms, and relative expressions
// (today/yesterday/tomorrow, last/next week|month|year, bare month names)
// resolved against `reference` when one is available.
std::optional<std::string> normalize_event_time(std::string_view expr,
                                                const std::optional<CivilDate>& reference);

// Day-precision shift helper (civil-calendar arithmetic).
CivilDate shift_days(const CivilDate& date, int days);

}  // namespace recall
