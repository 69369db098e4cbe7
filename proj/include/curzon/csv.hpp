#pragma once
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "curzon/errors.hpp"

namespace curzon {

// %.17g round-trips doubles and prints identically across runs of the same
// binary, which the byte-determinism contract relies on.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw config_error("csv: cannot open output file '" + path + "'");
  }

  void header(std::initializer_list<const char*> cols) {
    bool first = true;
    for (const char* c : cols) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
  }

  void begin_row() { first_field_ = true; }

  CsvWriter& field(double v) { return raw_field(fmt_g17(v)); }
  CsvWriter& field(const std::string& v) { return raw_field(v); }

  void end_row() { out_ << '\n'; }

 private:
  CsvWriter& raw_field(const std::string& s) {
    if (!first_field_) out_ << ',';
    out_ << s;
    first_field_ = false;
    return *this;
  }

  std::ofstream out_;
  bool first_field_ = true;
};

} // namespace curzon
