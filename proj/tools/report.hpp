#pragma once

// CSV reports with a one-line JSON header comment carrying the resolved
// command and config, so any report can be replayed from its first line.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hfield/errors.hpp"

namespace hfield::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kHeaderPrefix = "# hfield ";

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ReportHeader {
  std::string command;
  Json config;
};

inline std::string header_line(const ReportHeader& h) {
  Json j;
  j["command"] = h.command;
  j["config"] = h.config;
  return kHeaderPrefix + j.dump();
}

inline ReportHeader parse_header(const std::string& line) {
  const std::string p = kHeaderPrefix;
  if (line.compare(0, p.size(), p) != 0) throw FormatError("first line is not an hfield header");
  const auto j = Json::parse(line.substr(p.size()));
  if (!j.contains("command") || !j.contains("config")) throw FormatError("header lacks command or config");
  return {j.at("command").get<std::string>(), j.at("config")};
}

inline ReportHeader read_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  return parse_header(line);
}

/// Table with string cells; numbers pass through num().
class Csv {
 public:
  explicit Csv(std::vector<std::string> columns) : cols_(std::move(columns)) {}

  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
  void comment(std::string text) { comments_.push_back(std::move(text)); }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }

  void write(std::ostream& os, const ReportHeader& h) const {
    os << header_line(h) << '\n';
    for (const auto& c : comments_) os << "# " << c << '\n';
    write_row(os, cols_);
    for (const auto& r : rows_) write_row(os, r);
  }

 private:
  static void write_row(std::ostream& os, const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  std::vector<std::string> cols_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::string> comments_;
};

}  // namespace hfield::cli
