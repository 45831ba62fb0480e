#include "manifest.hpp"

#include <openssl/sha.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pdirac/errors.hpp"

namespace pdirac::cli {
namespace fs = std::filesystem;

std::string git_blob_sha1(const std::string& content) {
  const std::string data = "blob " + std::to_string(content.size()) + std::string(1, '\0') + content;
  unsigned char md[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(data.data()), data.size(), md);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char b : md) {
    out += hex[b >> 4];
    out += hex[b & 15];
  }
  return out;
}

std::string git_blob_sha1_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read input '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return git_blob_sha1(ss.str());
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // folds -0
  char buf[40];
  // shortest %.*g that round-trips
  for (int p = 15; p <= 17; ++p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != header_.size()) throw std::logic_error("csv row width mismatch");
  rows_.push_back(values);
}

std::string CsvWriter::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
  out += "\n";
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ",";
      bool integer = false;
      for (int c : integer_columns_) integer = integer || std::size_t(c) == i;
      out += integer ? std::to_string((long long)std::llround(r[i])) : format_double(r[i]);
    }
    out += "\n";
  }
  return out;
}

RunRecord::RunRecord(std::string out_dir, std::string subcommand)
    : out_dir_(std::move(out_dir)), subcommand_(std::move(subcommand)) {
  std::error_code ec;
  fs::create_directories(out_dir_, ec);
  if (ec) throw FormatError("cannot create output directory '" + out_dir_ + "': " + ec.message());
}

void RunRecord::add_input(const std::string& path) {
  inputs_.push_back({{"path", path}, {"sha1", git_blob_sha1_file(path)}});
}

void RunRecord::write_output(const std::string& name, const std::string& content) {
  const fs::path p = fs::path(out_dir_) / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + p.string() + "'");
  out << content;
  outputs_.push_back({{"path", name}, {"sha1", git_blob_sha1(content)}, {"bytes", content.size()}});
}

bool RunRecord::all_passed() const {
  for (const auto& c : checks_)
    if (!c.passed) return false;
  return true;
}

void RunRecord::finish(const json& config, const json& grid, const json& tolerances, int exit_code) {
  json checks = json::array();
  for (const auto& c : checks_)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value},
                      {"limit", c.limit}, {"detail", c.detail}});
  json m;
  m["tool"] = "pdirac";
  m["format_version"] = 1;
  m["subcommand"] = subcommand_;
  m["config"] = config;
  m["grid"] = grid;
  m["tolerances"] = tolerances;
  m["inputs"] = inputs_;
  m["outputs"] = outputs_;
  m["results"] = results_;
  m["checks"] = checks;
  m["exit_code"] = exit_code;

  std::string s;
  s += "pdirac " + subcommand_ + "\n";
  for (const auto& l : summary_) s += l + "\n";
  if (!checks_.empty()) s += "\nchecks:\n";
  for (const auto& c : checks_) {
    s += std::string(c.passed ? "  PASS " : "  FAIL ") + c.name + "  value=" + format_double(c.value) +
         " limit=" + format_double(c.limit);
    if (!c.detail.empty()) s += "  (" + c.detail + ")";
    s += "\n";
  }
  s += "exit code " + std::to_string(exit_code) + "\n";
  write_output("summary.txt", s);
  const std::string text = m.dump(2) + "\n";
  const fs::path p = fs::path(out_dir_) / "manifest.json";
  std::ofstream out(p, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + p.string() + "'");
  out << text;
}

}  // namespace pdirac::cli
