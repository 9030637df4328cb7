#pragma once

#include "chillerbow/timeseries.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace chillerbow {

namespace csv {

struct Record {
    std::size_t line = 0; ///< 1-based line the record starts on
    std::vector<std::string> fields;
};

/// RFC-4180 tokenizer: comma separated, double-quote escaping, quoted
/// fields may span lines. Accepts LF and CRLF line endings.
inline std::vector<Record> parse(std::string_view text)
{
    std::vector<Record> records;
    Record current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    current.line = 1;

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        bool blank = current.fields.size() == 1 && current.fields[0].empty();
        if (!blank)
            records.push_back(std::move(current));
        current = Record{};
        current.line = line;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n')
                    ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field_started && field.empty())
                in_quotes = true;
            else
                field += c;
            field_started = true;
            break;
        case ',':
            end_field();
            break;
        case '\r':
            break;
        case '\n':
            ++line;
            end_record();
            break;
        default:
            field += c;
            field_started = true;
        }
    }
    if (field_started || !field.empty() || !current.fields.empty())
        end_record();
    return records;
}

inline std::string quote(std::string_view s)
{
    if (s.find_first_of(",\"\n\r") == std::string_view::npos)
        return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

/// Empty, "NaN" or anything unparsable becomes the missing marker.
inline double parse_cell(std::string_view s)
{
    s = trim(s);
    if (s.empty())
        return kMissing;
    if (s.front() == '+')
        s.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        return kMissing;
    return v;
}

/// Shortest representation that round-trips; missing cells are empty.
inline std::string format_number(double v)
{
    if (is_missing(v))
        return {};
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace csv

/// "epoch" means integer seconds; anything else is a strftime-style pattern
/// interpreted in UTC.
struct TimestampFormat {
    std::string pattern = "epoch";

    bool is_epoch() const { return pattern == "epoch"; }

    std::optional<Instant> parse(std::string_view text) const
    {
        text = csv::trim(text);
        if (text.empty())
            return std::nullopt;
        if (is_epoch()) {
            Instant v = 0;
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc{} || ptr != text.data() + text.size())
                return std::nullopt;
            return v;
        }
        std::tm tm{};
        std::istringstream in{std::string(text)};
        in >> std::get_time(&tm, pattern.c_str());
        if (in.fail())
            return std::nullopt;
        in >> std::ws;
        if (!in.eof())
            return std::nullopt;
        return static_cast<Instant>(timegm(&tm));
    }

    std::string format(Instant t) const
    {
        if (is_epoch())
            return std::to_string(t);
        std::time_t tt = static_cast<std::time_t>(t);
        std::tm tm{};
        gmtime_r(&tt, &tm);
        std::ostringstream out;
        out << std::put_time(&tm, pattern.c_str());
        return out.str();
    }
};

/**
 * @brief Parses CSV text into a table following the given schema.
 *
 * The header must contain a "timestamp" column and every schema channel;
 * other columns are ignored. Rows are sorted by timestamp. Duplicate
 * instants are rejected.
 */
inline TimeSeriesTable parse_csv(std::string_view text, const std::vector<ChannelSpec>& schema,
                                 const TimestampFormat& format = {})
{
    validate_schema(schema);
    auto records = csv::parse(text);
    if (records.empty())
        throw Error(Errc::MissingColumn, "timeseries-core", "timestamp (no header row)");

    const auto& header = records.front().fields;
    auto find_col = [&](std::string_view name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (csv::trim(header[i]) == name)
                return i;
        throw Error(Errc::MissingColumn, "timeseries-core", std::string(name));
    };
    std::size_t ts_col = find_col("timestamp");
    std::vector<std::size_t> cols;
    for (const auto& c : schema)
        cols.push_back(find_col(c.name));

    struct Row {
        Instant t;
        std::size_t record;
    };
    std::vector<Row> order;
    order.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        std::string_view cell = ts_col < rec.fields.size() ? std::string_view(rec.fields[ts_col]) : "";
        auto t = format.parse(cell);
        if (!t)
            throw Error(Errc::UnparsableTimestamp, "timeseries-core",
                        "line " + std::to_string(rec.line) + ": '" + std::string(cell) + "'");
        order.push_back({*t, r});
    }
    std::stable_sort(order.begin(), order.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (order[i].t == order[i - 1].t)
            throw Error(Errc::DuplicateTimestamp, "timeseries-core", format.format(order[i].t));

    std::vector<Instant> timestamps;
    std::vector<double> values;
    timestamps.reserve(order.size());
    values.reserve(order.size() * schema.size());
    for (const auto& row : order) {
        timestamps.push_back(row.t);
        const auto& fields = records[row.record].fields;
        for (auto c : cols)
            values.push_back(c < fields.size() ? csv::parse_cell(fields[c]) : kMissing);
    }
    return TimeSeriesTable(std::move(timestamps), schema, std::move(values));
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::Io, "timeseries-core", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(Errc::Io, "timeseries-core", "cannot write '" + path + "'");
    out << content;
}

inline TimeSeriesTable ingest_csv(const std::string& path, const std::vector<ChannelSpec>& schema,
                                  const TimestampFormat& format = {})
{
    return parse_csv(read_file(path), schema, format);
}

inline std::string emit_csv(const TimeSeriesTable& table, const TimestampFormat& format = {})
{
    std::string out = "timestamp";
    for (const auto& c : table.channels())
        out += "," + csv::quote(c.name);
    out += '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        out += csv::quote(format.format(table.timestamps()[r]));
        for (double v : table.row(r)) {
            out += ',';
            out += csv::format_number(v);
        }
        out += '\n';
    }
    return out;
}

// Schema files: JSON list of {name, kind, unit}.

inline std::vector<ChannelSpec> schema_from_json(const nlohmann::json& j)
{
    if (!j.is_array())
        throw Error(Errc::InvalidSchema, "timeseries-core", "schema must be a JSON list");
    std::vector<ChannelSpec> schema;
    for (const auto& item : j) {
        if (!item.is_object() || !item.contains("name") || !item["name"].is_string())
            throw Error(Errc::InvalidSchema, "timeseries-core", "schema entry without a name");
        ChannelSpec c;
        c.name = item["name"].get<std::string>();
        auto kind = parse_channel_kind(item.value("kind", std::string("other")));
        if (!kind)
            throw Error(Errc::InvalidSchema, "timeseries-core", "unknown kind for '" + c.name + "'");
        c.kind = *kind;
        c.unit = item.value("unit", std::string{});
        schema.push_back(std::move(c));
    }
    validate_schema(schema);
    return schema;
}

inline nlohmann::json schema_to_json(std::span<const ChannelSpec> schema)
{
    auto j = nlohmann::json::array();
    for (const auto& c : schema)
        j.push_back({{"name", c.name}, {"kind", std::string(to_string(c.kind))}, {"unit", c.unit}});
    return j;
}

inline std::vector<ChannelSpec> load_schema(const std::string& path)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::InvalidSchema, "timeseries-core", path + ": " + e.what());
    }
    return schema_from_json(j);
}

} // namespace chillerbow
