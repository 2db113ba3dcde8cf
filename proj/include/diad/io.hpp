#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace diad {

/// 17 significant digits: doubles round-trip losslessly through the CSV.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Comma-separated rows with '#'-prefixed comment headers and LF endings.
class CsvBuilder {
  public:
    CsvBuilder& comment(const std::string& text) {
        out_ << "# " << text << '\n';
        return *this;
    }

    CsvBuilder& raw_line(const std::string& line) {
        out_ << line << '\n';
        return *this;
    }

    CsvBuilder& row(const std::vector<double>& values) {
        for (size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << format_number(values[i]);
        }
        out_ << '\n';
        return *this;
    }

    std::string str() const { return out_.str(); }

  private:
    std::ostringstream out_;
};

}  // namespace diad
