#pragma once

#include <compare>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fieldnet {

struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    bool valid() const;
    static std::optional<Date> parse(std::string_view iso);  // YYYY-MM-DD
    std::string to_string() const;
};

// One lineup slot of one live event, with the venue's resolved location.
struct PerformanceRecord {
    std::string musician_id;
    std::string gig_id;
    std::string venue_id;
    Date date;
    std::string city_id;
    double lat = 0.0;
    double lon = 0.0;

    bool operator==(const PerformanceRecord&) const = default;
};

// One (release, style) pair; rows listing k styles expand to k records.
struct ReleaseRecord {
    std::string musician_id;
    std::string release_id;
    std::string label_id;
    std::string style_id;
    Date date;

    bool operator==(const ReleaseRecord&) const = default;
};

enum class FactKind { Gig, Venue, Label, Style };

const char* to_string(FactKind kind);

struct YearRange {
    int first = 0;
    int last = 0;

    bool contains(int year) const { return year >= first && year <= last; }
    bool operator==(const YearRange&) const = default;
};

struct RowError {
    std::size_t line = 0;  // 1-based, counting the header
    std::string message;
};

struct ParseOptions {
    // strict: throw ValidationError at the first bad row.
    // lenient: skip bad rows and report them in ParseResult::errors.
    bool strict = false;
    // When set, dates outside the range are row errors.
    std::optional<YearRange> period = YearRange{2001, 2018};
};

template <class Record>
struct ParseResult {
    std::vector<Record> records;
    std::vector<RowError> errors;
    std::size_t rows_seen = 0;    // data rows, excluding the header
    std::size_t rows_parsed = 0;  // rows that yielded records
};

// Expected headers:
//   performances: musician_id,gig_id,venue_id,date,city_id,lat,lon
//   releases:     musician_id,release_id,label_id,styles,date
ParseResult<PerformanceRecord> parse_performances(std::istream& in,
                                                  const ParseOptions& opts = {});
ParseResult<ReleaseRecord> parse_releases(std::istream& in,
                                          const ParseOptions& opts = {});

std::string serialize_performances(std::span<const PerformanceRecord> records);
std::string serialize_releases(std::span<const ReleaseRecord> records);

}  // namespace fieldnet
