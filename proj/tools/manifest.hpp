#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace pdirac::cli {

using json = nlohmann::json;

/// SHA-1 of "blob <size>\0<content>", the hash git assigns to a file.
std::string git_blob_sha1(const std::string& content);
std::string git_blob_sha1_file(const std::string& path);

/// Shortest round-trip decimal form of a double, independent of locale.
std::string format_double(double x);

/// CSV with a fixed header; rows are written as given.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(const std::vector<double>& values);
  /// Columns listed in `integer_columns` are printed without a fraction.
  void set_integer_columns(std::vector<int> cols) { integer_columns_ = std::move(cols); }
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
  std::vector<int> integer_columns_;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

/// Collects artifacts of one run and writes them into the output directory.
class RunRecord {
 public:
  RunRecord(std::string out_dir, std::string subcommand);

  void add_input(const std::string& path);
  /// Writes `content` to out_dir/name and records its hash.
  void write_output(const std::string& name, const std::string& content);
  void add_check(CheckResult c) { checks_.push_back(std::move(c)); }
  void add_line(const std::string& line) { summary_.push_back(line); }
  void set(const std::string& key, json value) { results_[key] = std::move(value); }

  bool all_passed() const;
  const std::vector<CheckResult>& checks() const { return checks_; }

  /// Writes manifest.json and summary.txt. The manifest carries no clock or
  /// host data so reruns are byte-identical.
  void finish(const json& config, const json& grid, const json& tolerances, int exit_code);

 private:
  std::string out_dir_;
  std::string subcommand_;
  json inputs_ = json::array();
  json outputs_ = json::array();
  json results_ = json::object();
  std::vector<CheckResult> checks_;
  std::vector<std::string> summary_;
};

}  // namespace pdirac::cli
