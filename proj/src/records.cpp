#include "fieldnet/records.hpp"

#include <array>
#include <cstdio>
#include <istream>
#include <sstream>

#include "fieldnet/csv.hpp"
#include "fieldnet/errors.hpp"

namespace fieldnet {

namespace {

constexpr std::string_view kPerformanceHeader =
    "musician_id,gig_id,venue_id,date,city_id,lat,lon";
constexpr std::string_view kReleaseHeader =
    "musician_id,release_id,label_id,styles,date";

int days_in_month(int year, int month) {
    static constexpr std::array<int, 12> days = {31, 28, 31, 30, 31, 30,
                                                 31, 31, 30, 31, 30, 31};
    if (month == 2) {
        const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        return leap ? 29 : 28;
    }
    return days[month - 1];
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

void read_header(std::istream& in, std::string_view expected, const char* what) {
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError(std::string(what) + ": empty input, header row required");
    if (csv::strip_cr(line) != expected)
        throw ValidationError(std::string(what) + ": header mismatch, expected \"" +
                              std::string(expected) + "\"");
}

struct RowSink {
    const ParseOptions& opts;
    std::vector<RowError>& errors;

    // Returns false so callers can `return fail(...)` from a bool lambda.
    bool fail(std::size_t line, std::string message) const {
        if (opts.strict)
            throw ValidationError("line " + std::to_string(line) + ": " + message);
        errors.push_back({line, std::move(message)});
        return false;
    }
};

bool check_date(const RowSink& sink, std::size_t line_no, std::string_view text,
                Date& out) {
    auto parsed = Date::parse(text);
    if (!parsed)
        return sink.fail(line_no, "malformed date \"" + std::string(text) + "\"");
    if (sink.opts.period && !sink.opts.period->contains(parsed->year))
        return sink.fail(line_no, "date " + std::string(text) +
                                      " outside observation period");
    out = *parsed;
    return true;
}

}  // namespace

bool Date::valid() const {
    return month >= 1 && month <= 12 && day >= 1 && day <= days_in_month(year, month);
}

std::optional<Date> Date::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    const std::string_view y = iso.substr(0, 4);
    const std::string_view m = iso.substr(5, 2);
    const std::string_view d = iso.substr(8, 2);
    if (!all_digits(y) || !all_digits(m) || !all_digits(d)) return std::nullopt;
    Date date;
    csv::parse_int(y, date.year);
    csv::parse_int(m, date.month);
    csv::parse_int(d, date.day);
    if (!date.valid()) return std::nullopt;
    return date;
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

const char* to_string(FactKind kind) {
    switch (kind) {
        case FactKind::Gig: return "gig";
        case FactKind::Venue: return "venue";
        case FactKind::Label: return "label";
        case FactKind::Style: return "style";
    }
    return "?";
}

ParseResult<PerformanceRecord> parse_performances(std::istream& in,
                                                  const ParseOptions& opts) {
    read_header(in, kPerformanceHeader, "performances");
    ParseResult<PerformanceRecord> result;
    RowSink sink{opts, result.errors};

    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view row = csv::strip_cr(line);
        if (row.empty()) continue;
        ++result.rows_seen;

        const auto fields = csv::split(row);
        if (fields.size() != 7) {
            sink.fail(line_no, "expected 7 fields, got " + std::to_string(fields.size()));
            continue;
        }

        PerformanceRecord rec;
        rec.musician_id = std::string(fields[0]);
        rec.gig_id = std::string(fields[1]);
        rec.venue_id = std::string(fields[2]);
        rec.city_id = std::string(fields[4]);
        if (rec.musician_id.empty() || rec.gig_id.empty() || rec.venue_id.empty() ||
            rec.city_id.empty()) {
            sink.fail(line_no, "missing field");
            continue;
        }
        if (!check_date(sink, line_no, fields[3], rec.date)) continue;
        if (!csv::parse_double(fields[5], rec.lat) ||
            !csv::parse_double(fields[6], rec.lon)) {
            sink.fail(line_no, "malformed coordinate");
            continue;
        }
        if (rec.lat < -90.0 || rec.lat > 90.0 || rec.lon < -180.0 || rec.lon > 180.0) {
            sink.fail(line_no, "coordinate out of range");
            continue;
        }
        result.records.push_back(std::move(rec));
        ++result.rows_parsed;
    }
    return result;
}

ParseResult<ReleaseRecord> parse_releases(std::istream& in, const ParseOptions& opts) {
    read_header(in, kReleaseHeader, "releases");
    ParseResult<ReleaseRecord> result;
    RowSink sink{opts, result.errors};

    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view row = csv::strip_cr(line);
        if (row.empty()) continue;
        ++result.rows_seen;

        const auto fields = csv::split(row);
        if (fields.size() != 5) {
            sink.fail(line_no, "expected 5 fields, got " + std::to_string(fields.size()));
            continue;
        }

        const std::string musician(fields[0]);
        const std::string release(fields[1]);
        const std::string label(fields[2]);
        if (musician.empty() || release.empty() || label.empty()) {
            sink.fail(line_no, "missing field");
            continue;
        }
        Date date;
        if (!check_date(sink, line_no, fields[4], date)) continue;

        const auto styles = csv::split(fields[3], ';');
        bool ok = true;
        std::vector<ReleaseRecord> expanded;
        for (const auto style : styles) {
            if (style.empty()) {
                ok = sink.fail(line_no, "empty style");
                break;
            }
            // A style listed twice in one row is still one (release, style) pair.
            bool dup = false;
            for (const auto& r : expanded) dup = dup || r.style_id == style;
            if (dup) continue;
            expanded.push_back({musician, release, label, std::string(style), date});
        }
        if (!ok) continue;
        for (auto& rec : expanded) result.records.push_back(std::move(rec));
        ++result.rows_parsed;
    }
    return result;
}

std::string serialize_performances(std::span<const PerformanceRecord> records) {
    std::ostringstream out;
    out << kPerformanceHeader << '\n';
    for (const auto& r : records) {
        out << r.musician_id << ',' << r.gig_id << ',' << r.venue_id << ','
            << r.date.to_string() << ',' << r.city_id << ','
            << csv::format_double(r.lat) << ',' << csv::format_double(r.lon) << '\n';
    }
    return out.str();
}

std::string serialize_releases(std::span<const ReleaseRecord> records) {
    std::ostringstream out;
    out << kReleaseHeader << '\n';
    for (const auto& r : records) {
        out << r.musician_id << ',' << r.release_id << ',' << r.label_id << ','
            << r.style_id << ',' << r.date.to_string() << '\n';
    }
    return out.str();
}

}  // namespace fieldnet
