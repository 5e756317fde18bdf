#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace erltv {

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double v);

/// 64-bit FNV-1a digest rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

/// A CSV document: comment lines (written with a leading "# "), a header and rows.
/// Output uses '.' decimals, ',' delimiters and LF line endings.
struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
    std::string to_string() const;
    void write(const std::string& path) const;
};

}  // namespace erltv
