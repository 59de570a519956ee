#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nelson2d {

// RFC 4180: fields containing a comma, quote, CR or LF are quoted, quotes doubled,
// records end in CRLF.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}
    void row(const std::vector<std::string>& fields);
    // Numbers are written with 17 significant digits.
    void row(const std::vector<double>& values);

private:
    std::ostream& out_;
};

std::string csv_escape(const std::string& field);
std::string csv_number(double v);

// Parses a whole document; throws std::runtime_error on an unterminated quote.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace nelson2d
