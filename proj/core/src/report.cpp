#include "wfpl/report.hpp"

#include <algorithm>
#include <cstdio>

#include "wfpl/error.hpp"

namespace wfpl {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::passed: return "passed";
    case Status::violated: return "violated";
    case Status::inconclusive: return "inconclusive";
    case Status::hypothesis_not_met: return "hypothesis_not_met";
  }
  return "unknown";
}

std::vector<double> Series::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ContractError("no column named " + std::string(name));
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(c));
  return out;
}

void EstimateReport::violate(const std::string& msg) {
  status = Status::violated;
  message = message.empty() ? msg : message + "; " + msg;
}

void EstimateReport::inconclusive(const std::string& msg) {
  if (status == Status::passed) status = Status::inconclusive;
  message = message.empty() ? msg : message + "; " + msg;
}

std::string series_to_csv(const Series& s) {
  std::string out;
  for (std::size_t c = 0; c < s.columns.size(); ++c) out += (c ? "," : "") + s.columns[c];
  out += '\n';
  char buf[40];
  for (const auto& r : s.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17e", r[c]);
      if (c) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace wfpl
