// layerpot: verify representation identities, convergence studies, constant
// tables and bound reports from a suite config.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "layerpot/layerpot.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string config;
  std::optional<long long> order;
  std::optional<long long> seed;
  std::optional<std::string> format;
  std::optional<std::string> out;
};

int report_error(const char* what) {
  std::cerr << "layerpot: " << what << ": " << layerpot_last_error() << "\n";
  return kExitUsage;
}

int run(const std::string& command, const Options& opt) {
  layerpot_suite* suite = nullptr;
  const layerpot_status st =
      opt.config.empty() ? layerpot_suite_parse("", "defaults", &suite) : layerpot_suite_load(opt.config.c_str(), &suite);
  if (st != LAYERPOT_OK) return report_error("config");

  auto set = [&](const char* key, const std::string& value) {
    if (layerpot_suite_set(suite, key, value.c_str()) != LAYERPOT_OK) {
      report_error("option");
      return false;
    }
    return true;
  };
  bool ok = true;
  if (opt.order) ok = ok && set("orders", std::to_string(*opt.order));
  if (opt.seed) ok = ok && set("seed", std::to_string(*opt.seed));
  if (opt.format) ok = ok && set("output.format", *opt.format);
  if (opt.out) ok = ok && set("output.path", *opt.out);
  if (!ok) {
    layerpot_suite_free(suite);
    return kExitUsage;
  }

  layerpot_report* report = nullptr;
  if (layerpot_suite_run(suite, command.c_str(), &report) != LAYERPOT_OK) {
    const int code = report_error(command.c_str());
    layerpot_suite_free(suite);
    return code;
  }
  const char* text = nullptr;
  if (layerpot_report_render(report, nullptr, &text) != LAYERPOT_OK) {
    const int code = report_error("render");
    layerpot_report_free(report);
    layerpot_suite_free(suite);
    return code;
  }

  const char* path = nullptr;
  layerpot_suite_get(suite, "output.path", &path);
  int code = kExitPass;
  if (path) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
      std::cerr << "layerpot: cannot write " << path << "\n";
      code = kExitUsage;
    }
  } else {
    std::fwrite(text, 1, std::char_traits<char>::length(text), stdout);
  }
  if (code == kExitPass && !layerpot_report_all_pass(report)) {
    std::cerr << layerpot_report_failures(report);
    code = kExitFail;
  }
  layerpot_report_free(report);
  layerpot_suite_free(suite);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layer potential identity verifier"};
  app.require_subcommand(1);
  Options opt;
  std::string chosen;
  const std::pair<const char*, const char*> commands[] = {
      {"verify", "Check the selected identities; exit 1 if any row fails"},
      {"converge", "Residuals over at least three orders with fitted rates"},
      {"table", "Sphere constants, moment integrals and sharp ball constants"},
      {"bound", "Bound ratios and sharpness rows"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "Suite config file")->check(CLI::ExistingFile);
    sub->add_option("--order", opt.order, "Quadrature order (replaces the orders list)")->check(CLI::Range(4, 4096));
    sub->add_option("--seed", opt.seed, "Seed for random probe points")->check(CLI::NonNegativeNumber);
    sub->add_option("--format", opt.format, "Report format")->check(CLI::IsMember({"csv", "jsonl"}));
    sub->add_option("--out", opt.out, "Write the report here instead of stdout");
    sub->callback([&chosen, name = std::string(name)] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  return run(chosen, opt);
}
