#include "impulse_games/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace impulse_games {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += header[i];
    }
    buffer_ += '\n';
}

void CsvWriter::add_row(const std::vector<double>& row) {
    if (row.size() != columns_) throw std::logic_error("csv row width mismatch");
    for (size_t i = 0; i < row.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += format_double(row[i]);
    }
    buffer_ += '\n';
}

void CsvWriter::add_row_text(const std::vector<std::string>& row) {
    if (row.size() != columns_) throw std::logic_error("csv row width mismatch");
    for (size_t i = 0; i < row.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += row[i];
    }
    buffer_ += '\n';
}

void CsvWriter::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << buffer_;
}

} // namespace impulse_games
