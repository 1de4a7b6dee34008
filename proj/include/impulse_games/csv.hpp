#pragma once

#include <string>
#include <vector>

namespace impulse_games {

/// Locale-independent float formatting: 17 significant digits, shortest form
/// chosen by std::to_chars, so identical doubles always print identically.
std::string format_double(double v);

/// Minimal CSV emitter: header row, fixed column order, '\n' line endings.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void add_row(const std::vector<double>& row);
    void add_row_text(const std::vector<std::string>& row);

    const std::string& str() const { return buffer_; }
    void write_file(const std::string& path) const;

private:
    std::string buffer_;
    size_t columns_;
};

} // namespace impulse_games
