#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace layerpot {

enum class Command { Verify, Converge, Table, Bound };
enum class OutputFormat { Csv, Jsonl };

// Flat "key = value" text; '#' starts a comment. Keys are validated at parse
// time, values when the suite is resolved. See README for the key list.
class SuiteConfig {
 public:
  struct Entry {
    std::string value;
    int line = 0;  // 0 for overrides
    int column = 0;
  };

  // Config error "origin:line:col: message" on malformed text or unknown keys.
  static SuiteConfig parse(std::string_view text, std::string_view origin = "config");

  // Replaces (or adds) one key; the key must be a known one.
  void set(std::string_view key, std::string_view value);

  const std::map<std::string, Entry>& entries() const noexcept { return entries_; }
  const std::string& origin() const noexcept { return origin_; }

  // Resolves every value; throws Config on the first bad one.
  void validate() const;

 private:
  std::string origin_ = "config";
  std::map<std::string, Entry> entries_;
};

struct ReportRow {
  std::string suite;
  std::string identity;
  std::string field;
  int dim = 0;
  std::vector<double> point;
  int order = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;  // not emitted; errors and metadata for stderr
};

struct RunResult {
  std::vector<ReportRow> rows;
  bool all_pass = true;
};

// Config error for invalid suites; numerical errors inside a check become
// failing rows.
RunResult run_suite(const SuiteConfig& config, Command command);

OutputFormat output_format(const SuiteConfig& config);

std::string render_report(const RunResult& result, OutputFormat format);

// One line per failing row.
std::string describe_failures(const RunResult& result);

Command command_from_string(std::string_view name);

}  // namespace layerpot
