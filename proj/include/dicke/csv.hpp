#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace dicke::csv {

/// 17 significant digits, '.' decimal point, independent of the global locale.
inline std::string number(double x) {
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  for (auto &ch : s)
    if (ch == ',')
      ch = '.';
  return s;
}

inline std::string number(int x) { return std::to_string(x); }
inline std::string number(long x) { return std::to_string(x); }
inline std::string number(unsigned long x) { return std::to_string(x); }

class Writer {
public:
  explicit Writer(std::ostream &out) : out_(out) {}

  void comment(std::string_view text) { out_ << "# " << text << '\n'; }

  void header(const std::vector<std::string> &columns) { row(columns); }

  void row(const std::vector<std::string> &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i)
        out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  void flush() { out_.flush(); }

private:
  std::ostream &out_;
};

} // namespace dicke::csv
