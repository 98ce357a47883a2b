#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace wfpl {

enum class Status { passed, violated, inconclusive, hypothesis_not_met };

std::string_view to_string(Status s);

/// Rows of a CSV series (series_<name>.csv).
struct Series {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) { rows.push_back(std::move(row)); }
  std::vector<double> column(std::string_view name) const;
};

/// Measured constants and exponents for one checked estimate.
struct EstimateReport {
  std::string name;
  Status status = Status::passed;
  std::map<std::string, double> values;
  std::map<std::string, Series> series;
  std::string message;

  bool passed() const { return status == Status::passed; }
  /// Marks the report violated and appends msg (first message wins the headline).
  void violate(const std::string& msg);
  void inconclusive(const std::string& msg);
};

std::string series_to_csv(const Series& s);

}  // namespace wfpl
