#include "layerpot/layerpot.h"

#include <fstream>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "layerpot/errors.hpp"
#include "layerpot/fields.hpp"
#include "layerpot/geometry.hpp"
#include "layerpot/harness.hpp"
#include "layerpot/potentials.hpp"

struct layerpot_domain {
  layerpot::Domain domain;
};

struct layerpot_field {
  layerpot::ScalarField field;
  int dim;
};

struct layerpot_suite {
  layerpot::SuiteConfig config;
};

struct layerpot_report {
  layerpot::RunResult result;
  layerpot::OutputFormat format;
  std::string rendered;
  std::string failures;
};

namespace {

thread_local std::string g_last_error;

layerpot_status status_for(layerpot::ErrorKind kind) {
  return static_cast<layerpot_status>(static_cast<int>(kind) + 1);
}

layerpot_status set_error(layerpot_status s, std::string message) {
  g_last_error = std::move(message);
  return s;
}

template <class F>
layerpot_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const layerpot::Error& e) {
    return set_error(status_for(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(LAYERPOT_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(LAYERPOT_E_INTERNAL, e.what());
  }
}

layerpot_status null_argument(const char* what) {
  return set_error(LAYERPOT_E_INVALID_ARGUMENT, std::string(what) + " is null");
}

layerpot::Point point_of(const double* x, int dim) {
  return layerpot::Point::from({x, static_cast<std::size_t>(dim)});
}

}  // namespace

extern "C" {

const char* layerpot_version(void) { return "1.0.0"; }

const char* layerpot_status_name(layerpot_status status) {
  switch (status) {
    case LAYERPOT_OK: return "ok";
    case LAYERPOT_E_INVALID_ARGUMENT: return "invalid_argument";
    case LAYERPOT_E_IO: return "io";
    case LAYERPOT_E_INTERNAL: return "internal";
    default: break;
  }
  const int k = static_cast<int>(status) - 1;
  if (k >= 0 && k <= static_cast<int>(layerpot::ErrorKind::Config)) {
    return layerpot::to_string(static_cast<layerpot::ErrorKind>(k));
  }
  return "unknown";
}

const char* layerpot_last_error(void) { return g_last_error.c_str(); }

layerpot_status layerpot_domain_ball(int dim, const double* center, double radius, layerpot_domain** out) {
  if (!center) return null_argument("center");
  if (!out) return null_argument("out");
  return guarded([&] {
    if (dim < 2 || dim > layerpot::kMaxDim) {
      layerpot::fail(layerpot::ErrorKind::Dimension, "dimension must lie in 2.." + std::to_string(layerpot::kMaxDim));
    }
    *out = new layerpot_domain{layerpot::Domain(layerpot::Ball(point_of(center, dim), radius))};
    return LAYERPOT_OK;
  });
}

layerpot_status layerpot_domain_star(const double center[2], const double* coefficients, size_t count,
                                     layerpot_domain** out) {
  if (!center) return null_argument("center");
  if (!coefficients && count > 0) return null_argument("coefficients");
  if (!out) return null_argument("out");
  return guarded([&] {
    std::vector<double> c(coefficients, coefficients + count);
    *out = new layerpot_domain{layerpot::Domain(layerpot::StarShaped2D(point_of(center, 2), std::move(c)))};
    return LAYERPOT_OK;
  });
}

void layerpot_domain_free(layerpot_domain* domain) { delete domain; }

int layerpot_domain_dim(const layerpot_domain* domain) { return domain ? domain->domain.dim() : 0; }

layerpot_status layerpot_domain_classify(const layerpot_domain* domain, const double* y, layerpot_location* out) {
  if (!domain) return null_argument("domain");
  if (!y) return null_argument("y");
  if (!out) return null_argument("out");
  return guarded([&] {
    switch (domain->domain.classify(point_of(y, domain->domain.dim()))) {
      case layerpot::LocationClass::Interior: *out = LAYERPOT_INTERIOR; break;
      case layerpot::LocationClass::Boundary: *out = LAYERPOT_BOUNDARY; break;
      case layerpot::LocationClass::Exterior: *out = LAYERPOT_EXTERIOR; break;
    }
    return LAYERPOT_OK;
  });
}

layerpot_status layerpot_field_catalog(const char* text, int dim, layerpot_field** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  return guarded([&] {
    if (dim < 2 || dim > layerpot::kMaxDim) {
      layerpot::fail(layerpot::ErrorKind::Dimension, "dimension must lie in 2.." + std::to_string(layerpot::kMaxDim));
    }
    *out = new layerpot_field{layerpot::catalog_from_text(text, dim), dim};
    return LAYERPOT_OK;
  });
}

void layerpot_field_free(layerpot_field* field) { delete field; }

layerpot_status layerpot_field_value(const layerpot_field* field, const double* x, double* out) {
  if (!field) return null_argument("field");
  if (!x) return null_argument("x");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = field->field(point_of(x, field->dim));
    return LAYERPOT_OK;
  });
}

layerpot_status layerpot_field_gradient(const layerpot_field* field, const double* x, double* out) {
  if (!field) return null_argument("field");
  if (!x) return null_argument("x");
  if (!out) return null_argument("out");
  return guarded([&] {
    const layerpot::Point g = field->field.gradient(point_of(x, field->dim));
    for (int i = 0; i < field->dim; ++i) out[i] = g[i];
    return LAYERPOT_OK;
  });
}

layerpot_status layerpot_double_layer(const layerpot_field* moment, const layerpot_domain* domain, const double* y,
                                      int order, double* value) {
  if (!moment) return null_argument("moment");
  if (!domain) return null_argument("domain");
  if (!y) return null_argument("y");
  if (!value) return null_argument("value");
  return guarded([&] {
    if (moment->dim != domain->domain.dim()) {
      layerpot::fail(layerpot::ErrorKind::Dimension, "field and domain dimensions differ");
    }
    *value = layerpot::double_layer(moment->field, domain->domain, point_of(y, moment->dim), order).value;
    return LAYERPOT_OK;
  });
}

layerpot_status layerpot_gradient_volume_integral(const layerpot_field* field, const layerpot_domain* domain,
                                                  const double* y, int order, double* value) {
  if (!field) return null_argument("field");
  if (!domain) return null_argument("domain");
  if (!y) return null_argument("y");
  if (!value) return null_argument("value");
  return guarded([&] {
    if (field->dim != domain->domain.dim()) {
      layerpot::fail(layerpot::ErrorKind::Dimension, "field and domain dimensions differ");
    }
    *value = layerpot::gradient_volume_integral(field->field, domain->domain, point_of(y, field->dim), order);
    return LAYERPOT_OK;
  });
}

layerpot_status layerpot_suite_parse(const char* text, const char* origin, layerpot_suite** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  return guarded([&] {
    layerpot::SuiteConfig c = layerpot::SuiteConfig::parse(text, origin ? origin : "config");
    c.validate();
    *out = new layerpot_suite{std::move(c)};
    return LAYERPOT_OK;
  });
}

layerpot_status layerpot_suite_load(const char* path, layerpot_suite** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  std::ifstream in(path, std::ios::binary);
  if (!in) return set_error(LAYERPOT_E_IO, std::string("cannot read ") + path);
  std::ostringstream text;
  text << in.rdbuf();
  return layerpot_suite_parse(text.str().c_str(), path, out);
}

void layerpot_suite_free(layerpot_suite* suite) { delete suite; }

layerpot_status layerpot_suite_set(layerpot_suite* suite, const char* key, const char* value) {
  if (!suite) return null_argument("suite");
  if (!key) return null_argument("key");
  if (!value) return null_argument("value");
  return guarded([&] {
    layerpot::SuiteConfig next = suite->config;
    next.set(key, value);
    next.validate();
    suite->config = std::move(next);
    return LAYERPOT_OK;
  });
}

layerpot_status layerpot_suite_get(const layerpot_suite* suite, const char* key, const char** value) {
  if (!suite) return null_argument("suite");
  if (!key) return null_argument("key");
  if (!value) return null_argument("value");
  auto it = suite->config.entries().find(key);
  *value = it == suite->config.entries().end() ? nullptr : it->second.value.c_str();
  return LAYERPOT_OK;
}

layerpot_status layerpot_suite_run(const layerpot_suite* suite, const char* command, layerpot_report** out) {
  if (!suite) return null_argument("suite");
  if (!command) return null_argument("command");
  if (!out) return null_argument("out");
  return guarded([&] {
    const layerpot::Command cmd = layerpot::command_from_string(command);
    auto* r = new layerpot_report{layerpot::run_suite(suite->config, cmd), layerpot::output_format(suite->config), {},
                                  {}};
    r->failures = layerpot::describe_failures(r->result);
    *out = r;
    return LAYERPOT_OK;
  });
}

void layerpot_report_free(layerpot_report* report) { delete report; }

size_t layerpot_report_row_count(const layerpot_report* report) { return report ? report->result.rows.size() : 0; }

int layerpot_report_all_pass(const layerpot_report* report) { return report && report->result.all_pass ? 1 : 0; }

layerpot_status layerpot_report_render(layerpot_report* report, const char* format, const char** text) {
  if (!report) return null_argument("report");
  if (!text) return null_argument("text");
  return guarded([&] {
    layerpot::OutputFormat f = report->format;
    if (format) {
      const std::string s = format;
      if (s == "csv") {
        f = layerpot::OutputFormat::Csv;
      } else if (s == "jsonl") {
        f = layerpot::OutputFormat::Jsonl;
      } else {
        layerpot::fail(layerpot::ErrorKind::Config, "unknown format '" + s + "'");
      }
    }
    report->rendered = layerpot::render_report(report->result, f);
    *text = report->rendered.c_str();
    return LAYERPOT_OK;
  });
}

const char* layerpot_report_failures(const layerpot_report* report) {
  return report ? report->failures.c_str() : "";
}

}  // extern "C"
