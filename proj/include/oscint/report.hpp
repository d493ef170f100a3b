#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "oscint/errors.hpp"

namespace oscint::cli {

inline constexpr const char* artifact_version = "0.1.0";

enum class Format { csv, json };

inline const char* to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

using Cell = std::variant<long long, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

// Shortest round-trip decimal form.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_cell(const Cell& cell) {
    if (std::holds_alternative<long long>(cell)) return std::to_string(std::get<long long>(cell));
    if (std::holds_alternative<double>(cell)) return format_double(std::get<double>(cell));
    return std::get<std::string>(cell);
}

inline std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        out += table.columns[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_cell(row[c]);
        }
        out += '\n';
    }
    return out;
}

inline nlohmann::ordered_json cell_to_json(const Cell& cell) {
    if (std::holds_alternative<long long>(cell)) return std::get<long long>(cell);
    if (std::holds_alternative<double>(cell)) return std::get<double>(cell);
    return std::get<std::string>(cell);
}

inline std::string to_json_string(const Table& table, const nlohmann::ordered_json& meta) {
    nlohmann::ordered_json doc;
    doc["meta"] = meta;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t c = 0; c < row.size() && c < table.columns.size(); ++c)
            obj[table.columns[c]] = cell_to_json(row[c]);
        rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

// Renders the table and writes it to `path` (stdout when empty). Refuses to
// emit an empty table; no file is created in that case.
inline void emit(const Table& table, Format format, const std::string& path,
                 const nlohmann::ordered_json& meta, std::ostream& stdout_stream = std::cout) {
    if (table.rows.empty()) throw IoError("emit: empty table");
    const std::string body = format == Format::csv ? to_csv(table) : to_json_string(table, meta);
    if (path.empty()) {
        stdout_stream << body;
        stdout_stream.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("emit: cannot open output file: " + path);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw IoError("emit: write failed: " + path);
}

} // namespace oscint::cli
