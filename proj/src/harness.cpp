#include "layerpot/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "layerpot/bounds.hpp"
#include "layerpot/errors.hpp"
#include "layerpot/fields.hpp"
#include "layerpot/geometry.hpp"
#include "layerpot/kernel.hpp"
#include "layerpot/potentials.hpp"
#include "layerpot/representations.hpp"

namespace layerpot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::set<std::string>& plain_keys() {
  static const std::set<std::string> keys = {
      "suite",           "domain.shape",    "domain.dim",      "domain.center",   "domain.radius",
      "domain.coefficients", "fields",      "identities",      "orders",          "points.interior",
      "points.exterior", "points.boundary", "probes.interior", "probes.exterior", "probes.boundary",
      "seed",            "z",               "ball.center",     "ball.radius",     "p",
      "zeta",            "f2.outer_order",  "f2.inner_order",  "output.format",   "output.path",
      "table.dims",      "table.p",         "table.radii",     "bound.kinds",     "oned.functions",
      "oned.interval",   "oned.points",     "oned.q",
  };
  return keys;
}

constexpr const char* kExtraToleranceKeys[] = {"GAUSS", "BOUND", "SHARP", "MONTGOMERY"};

bool is_known_key(std::string_view key) {
  if (plain_keys().count(std::string(key))) return true;
  constexpr std::string_view prefix = "tolerance.";
  if (key.substr(0, prefix.size()) != prefix) return false;
  const std::string_view rest = key.substr(prefix.size());
  if (identity_from_string(rest)) return true;
  for (const char* k : kExtraToleranceKeys) {
    if (rest == k) return true;
  }
  return false;
}

std::string trim(std::string_view s) {
  const std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const std::size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

// Splits on `sep` outside parentheses, so "distance(0,0); coordinate(1)"
// splits on ';' and "a(1,2), b(3)" on ','.
std::vector<std::string> split_top(std::string_view s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || (s[i] == sep && depth == 0)) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    } else if (s[i] == '(') {
      ++depth;
    } else if (s[i] == ')') {
      --depth;
    }
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Typed view of a config.

class Reader {
 public:
  explicit Reader(const SuiteConfig& c) : c_(c) {}

  bool has(const std::string& key) const { return c_.entries().count(key) > 0; }

  [[noreturn]] void error(const std::string& key, const std::string& msg) const {
    auto it = c_.entries().find(key);
    if (it == c_.entries().end() || it->second.line == 0) {
      fail(ErrorKind::Config, "override " + key + ": " + msg);
    }
    fail(ErrorKind::Config, c_.origin() + ":" + std::to_string(it->second.line) + ":" +
                                std::to_string(it->second.column) + ": " + key + ": " + msg);
  }

  const std::string& raw(const std::string& key) const { return c_.entries().at(key).value; }

  std::string text(const std::string& key, std::string fallback) const {
    return has(key) ? raw(key) : std::move(fallback);
  }

  double number(const std::string& key, const std::string& item) const {
    const std::string t = trim(item);
    if (t == "inf" || t == "infinity") return kInf;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      error(key, "expected a number, got '" + t + "'");
    }
    if (used != t.size() || std::isnan(v)) error(key, "expected a number, got '" + t + "'");
    return v;
  }

  double real(const std::string& key, double fallback) const {
    return has(key) ? number(key, raw(key)) : fallback;
  }

  long long integer(const std::string& key, long long fallback, long long lo, long long hi) const {
    if (!has(key)) return fallback;
    return checked_integer(key, raw(key), lo, hi);
  }

  long long checked_integer(const std::string& key, const std::string& item, long long lo, long long hi) const {
    const double v = number(key, item);
    if (v != std::floor(v) || v < static_cast<double>(lo) || v > static_cast<double>(hi)) {
      error(key, "expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got '" +
                     trim(item) + "'");
    }
    return static_cast<long long>(v);
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& item : split(raw(key), ',')) {
      if (item.empty()) error(key, "empty list item");
      out.push_back(number(key, item));
    }
    return out;
  }

  std::vector<std::vector<double>> point_list(const std::string& key) const {
    std::vector<std::vector<double>> out;
    for (const std::string& item : split(raw(key), ';')) {
      if (item.empty()) continue;
      std::vector<double> p;
      for (const std::string& c : split(item, ',')) p.push_back(number(key, c));
      out.push_back(std::move(p));
    }
    return out;
  }

 private:
  const SuiteConfig& c_;
};

struct FieldSpec {
  std::string text;
  bool extremal = false;
  std::optional<ScalarField> field;
};

// Harness-level pseudo identity for the three Gauss values.
constexpr int kGaussRank = 0;
int identity_rank(IdentityId id) { return 1 + static_cast<int>(id); }

struct Suite {
  std::string name;
  std::optional<Domain> domain;
  std::vector<FieldSpec> fields;
  bool gauss = false;
  std::vector<IdentityId> identities;
  bool identities_explicit = false;
  std::vector<int> orders;
  std::vector<Point> interior;
  std::vector<Point> exterior;
  std::vector<Point> boundary;
  std::optional<Point> z;
  std::optional<Ball> ball;
  std::vector<LebesgueExponent> ps;
  ZetaMode zeta = ZetaMode::Limit;
  int outer_order = 32;
  int inner_order = 64;
  std::map<std::string, double> tolerances;
  // table
  std::vector<int> table_dims;
  std::vector<double> table_p;
  std::vector<double> table_radii;
  // bound
  std::set<std::string> bound_kinds;
  std::vector<Function1D> oned;
  double oned_a = 0.0;
  double oned_b = 1.0;
  std::vector<double> oned_points;
  double oned_q = 2.0;

  std::optional<double> tol(const std::string& key) const {
    auto it = tolerances.find(key);
    if (it == tolerances.end()) return std::nullopt;
    return it->second;
  }
};

constexpr const char* kDefaultFields = "constant(1); coordinate(1); harmonic_poly(2); quadratic_radial(0)";

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Point random_direction(std::mt19937_64& rng, int dim) {
  const double phi = 2.0 * std::numbers::pi * unit_uniform(rng);
  if (dim == 2) return Point{std::cos(phi), std::sin(phi)};
  const double c = 2.0 * unit_uniform(rng) - 1.0;
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  return Point{s * std::cos(phi), s * std::sin(phi), c};
}

Point boundary_probe(const Domain& d, std::mt19937_64& rng) {
  if (d.dim() == 2 && !d.is_ball()) return d.star().boundary_point(2.0 * std::numbers::pi * unit_uniform(rng));
  return d.center() + random_direction(rng, d.dim()) * d.ball().radius();
}

void make_probes(Suite& s, const Reader& r, const Domain& d) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(r.integer("seed", 1, 0, std::numeric_limits<long long>::max())));
  const int dim = d.dim();
  const double half = 0.5 * d.diameter();
  const double margin = 0.1 * half;
  std::vector<Point> singular;
  for (const FieldSpec& f : s.fields) {
    if (!f.field) continue;
    for (const Point& a : f.field->singular_points()) singular.push_back(a);
  }
  auto clear_of_singular = [&](const Point& y) {
    return std::all_of(singular.begin(), singular.end(),
                       [&](const Point& a) { return distance(a, y) > 0.02 * d.diameter(); });
  };
  auto explicit_points = [&](const std::string& key, LocationClass want) {
    std::vector<Point> out;
    for (const std::vector<double>& c : r.point_list(key)) {
      if (static_cast<int>(c.size()) != dim) r.error(key, "points need " + std::to_string(dim) + " coordinates");
      const Point p = Point::from(c);
      if (d.classify(p) != want) r.error(key, p.to_string() + " is not " + to_string(want));
      out.push_back(p);
    }
    return out;
  };
  constexpr long long kMaxProbes = 10000;
  // Each class draws from its own stream so counts do not shift one another.
  if (r.has("points.interior")) {
    s.interior = explicit_points("points.interior", LocationClass::Interior);
  } else {
    std::mt19937_64 g(rng());
    const long long n = r.integer("probes.interior", 3, 0, kMaxProbes);
    while (static_cast<long long>(s.interior.size()) < n) {
      Point y = d.center();
      for (int i = 0; i < dim; ++i) y[i] += (2.0 * unit_uniform(g) - 1.0) * d.diameter();
      if (d.classify(y) == LocationClass::Interior && d.distance_to_boundary(y) > margin && clear_of_singular(y)) {
        s.interior.push_back(y);
      }
    }
  }
  if (r.has("points.exterior")) {
    s.exterior = explicit_points("points.exterior", LocationClass::Exterior);
  } else {
    std::mt19937_64 g(rng());
    const long long n = r.integer("probes.exterior", 2, 0, kMaxProbes);
    while (static_cast<long long>(s.exterior.size()) < n) {
      const double rad = d.diameter() * (0.6 + 1.4 * unit_uniform(g));
      const Point y = d.center() + random_direction(g, dim) * rad;
      if (d.classify(y) == LocationClass::Exterior && d.distance_to_boundary(y) > margin) s.exterior.push_back(y);
    }
  }
  if (r.has("points.boundary")) {
    s.boundary = explicit_points("points.boundary", LocationClass::Boundary);
  } else {
    std::mt19937_64 g(rng());
    const long long n = r.integer("probes.boundary", 1, 0, kMaxProbes);
    while (static_cast<long long>(s.boundary.size()) < n) s.boundary.push_back(boundary_probe(d, g));
  }
}

Suite resolve(const SuiteConfig& config) {
  const Reader r(config);
  Suite s;
  s.name = r.text("suite", "default");

  // Domain.
  const std::string shape = r.text("domain.shape", "ball");
  int dim = 2;
  std::vector<double> center;
  if (r.has("domain.center")) center = r.reals("domain.center");
  if (r.has("domain.dim")) {
    dim = static_cast<int>(r.integer("domain.dim", 2, 2, kMaxDim));
  } else if (!center.empty()) {
    dim = static_cast<int>(center.size());
  }
  if (center.empty()) center.assign(dim, 0.0);
  if (static_cast<int>(center.size()) != dim) r.error("domain.center", "needs " + std::to_string(dim) + " coordinates");
  if (dim < 2 || dim > kMaxDim) r.error("domain.center", "dimension must lie in 2.." + std::to_string(kMaxDim));
  try {
    if (shape == "ball") {
      if (r.has("domain.coefficients")) r.error("domain.coefficients", "only valid for domain.shape = star");
      const double radius = r.real("domain.radius", 1.0);
      if (!(radius > 0.0) || std::isinf(radius)) r.error("domain.radius", "must be a positive number");
      s.domain.emplace(Ball(Point::from(center), radius));
    } else if (shape == "star") {
      if (dim != 2) r.error("domain.shape", "star-shaped domains are planar");
      if (!r.has("domain.coefficients")) r.error("domain.shape", "star needs domain.coefficients");
      if (r.has("domain.radius")) r.error("domain.radius", "only valid for domain.shape = ball");
      s.domain.emplace(StarShaped2D(Point::from(center), r.reals("domain.coefficients")));
    } else {
      r.error("domain.shape", "expected ball or star, got '" + shape + "'");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    r.error(r.has("domain.coefficients") ? "domain.coefficients" : "domain.shape", e.what());
  }
  const Domain& d = *s.domain;

  // Fields.
  for (const std::string& t : split_top(r.text("fields", kDefaultFields), ';')) {
    if (t.empty()) continue;
    FieldSpec f;
    f.text = t;
    if (t == "extremal") {
      f.extremal = true;
    } else {
      try {
        f.field = catalog_from_text(t, dim);
      } catch (const Error& e) {
        r.error("fields", e.what());
      }
    }
    s.fields.push_back(std::move(f));
  }
  if (s.fields.empty()) r.error("fields", "no fields listed");

  // Identities.
  const std::string ids = r.text("identities", "all");
  s.identities_explicit = r.has("identities");
  for (const std::string& t : split(ids, ',')) {
    if (t == "all") {
      s.gauss = true;
      for (IdentityId id : all_identities()) s.identities.push_back(id);
    } else if (t == "GAUSS") {
      s.gauss = true;
    } else if (auto id = identity_from_string(t)) {
      s.identities.push_back(*id);
    } else {
      r.error("identities", "unknown identity '" + t + "'");
    }
  }
  std::sort(s.identities.begin(), s.identities.end());
  s.identities.erase(std::unique(s.identities.begin(), s.identities.end()), s.identities.end());

  // Orders.
  if (r.has("orders")) {
    for (const std::string& t : split(r.raw("orders"), ',')) {
      s.orders.push_back(static_cast<int>(r.checked_integer("orders", t, 4, kMaxEscalatedOrder)));
    }
  } else {
    s.orders = {128};
  }
  std::sort(s.orders.begin(), s.orders.end());
  s.orders.erase(std::unique(s.orders.begin(), s.orders.end()), s.orders.end());

  make_probes(s, r, d);

  if (r.has("z")) {
    const std::vector<double> z = r.reals("z");
    if (static_cast<int>(z.size()) != dim) r.error("z", "needs " + std::to_string(dim) + " coordinates");
    s.z = Point::from(z);
  }
  if (r.has("ball.center") || r.has("ball.radius")) {
    if (!r.has("ball.center") || !r.has("ball.radius")) {
      r.error(r.has("ball.center") ? "ball.center" : "ball.radius", "ball.center and ball.radius go together");
    }
    const std::vector<double> c = r.reals("ball.center");
    if (static_cast<int>(c.size()) != dim) r.error("ball.center", "needs " + std::to_string(dim) + " coordinates");
    const double radius = r.real("ball.radius", 1.0);
    if (!(radius > 0.0) || std::isinf(radius)) r.error("ball.radius", "must be a positive number");
    s.ball.emplace(Point::from(c), radius);
  } else if (d.is_ball()) {
    s.ball = d.ball();
  }

  if (r.has("p")) {
    for (double v : r.reals("p")) {
      if (!(v >= 1.0)) r.error("p", "exponents must lie in [1, inf]");
      s.ps.emplace_back(v);
    }
  } else {
    s.ps.push_back(LebesgueExponent::infinity());
  }

  const std::string zeta = r.text("zeta", "limit");
  if (zeta == "limit") {
    s.zeta = ZetaMode::Limit;
  } else if (zeta == "algebraic") {
    s.zeta = ZetaMode::Algebraic;
  } else {
    r.error("zeta", "expected limit or algebraic");
  }
  s.outer_order = static_cast<int>(r.integer("f2.outer_order", 32, 4, kMaxEscalatedOrder));
  s.inner_order = static_cast<int>(r.integer("f2.inner_order", 64, 4, kMaxEscalatedOrder));

  for (const auto& [key, entry] : config.entries()) {
    if (key.rfind("tolerance.", 0) != 0) continue;
    const double v = r.number(key, entry.value);
    if (!(v >= 0.0) || std::isinf(v)) r.error(key, "tolerance must be a finite non-negative number");
    s.tolerances[key.substr(10)] = v;
  }

  const std::string fmt = r.text("output.format", "csv");
  if (fmt != "csv" && fmt != "jsonl") r.error("output.format", "expected csv or jsonl");

  // Table grid.
  if (r.has("table.dims")) {
    for (const std::string& t : split(r.raw("table.dims"), ',')) {
      s.table_dims.push_back(static_cast<int>(r.checked_integer("table.dims", t, 2, kMaxDim)));
    }
  } else {
    s.table_dims = {2, 3, 4};
  }
  s.table_p = r.has("table.p") ? r.reals("table.p") : std::vector<double>{kInf, 3.0, 5.0, 10.0};
  for (double p : s.table_p) {
    if (!(p >= 1.0)) r.error("table.p", "exponents must lie in [1, inf]");
  }
  s.table_radii = r.has("table.radii") ? r.reals("table.radii") : std::vector<double>{0.5, 1.0, 2.0};
  for (double R : s.table_radii) {
    if (!(R > 0.0) || std::isinf(R)) r.error("table.radii", "radii must be positive numbers");
  }

  // Bounds.
  for (const std::string& t : split(r.text("bound.kinds", "general, ball, 1d"), ',')) {
    if (t != "general" && t != "ball" && t != "1d") r.error("bound.kinds", "expected general, ball or 1d, got '" + t + "'");
    s.bound_kinds.insert(t);
  }
  for (const std::string& t : split_top(r.text("oned.functions", "poly(0,1); poly(1,0,-2,1); sin(3)"), ';')) {
    if (t.empty()) continue;
    try {
      s.oned.push_back(function1d_from_text(t));
    } catch (const Error& e) {
      r.error("oned.functions", e.what());
    }
  }
  if (r.has("oned.interval")) {
    const std::vector<double> iv = r.reals("oned.interval");
    if (iv.size() != 2 || !(iv[0] < iv[1]) || std::isinf(iv[0]) || std::isinf(iv[1])) {
      r.error("oned.interval", "expected a, b with a < b");
    }
    s.oned_a = iv[0];
    s.oned_b = iv[1];
  }
  s.oned_points = r.has("oned.points") ? r.reals("oned.points") : std::vector<double>{s.oned_a, 0.3, 0.5};
  for (double x : s.oned_points) {
    if (!(x >= s.oned_a && x <= s.oned_b)) r.error("oned.points", "points must lie in the interval");
  }
  s.oned_q = r.real("oned.q", 2.0);
  if (!(s.oned_q > 1.0) || std::isinf(s.oned_q)) r.error("oned.q", "q must satisfy 1 < q < inf");
  return s;
}

// ---------------------------------------------------------------------------
// Execution.

struct Keyed {
  std::array<long long, 5> key{};
  ReportRow row;
};

struct Task {
  std::function<std::vector<Keyed>()> run;
};

std::vector<double> coords(const Point& p) { return {p.coords().begin(), p.coords().end()}; }

ReportRow row_from(const Suite& s, const IdentityReport& rep, int dim, const Point* point) {
  ReportRow row;
  row.suite = s.name;
  row.identity = to_string(rep.id);
  row.field = rep.field;
  row.dim = dim;
  if (point) row.point = coords(*point);
  row.order = rep.order;
  row.lhs = rep.lhs;
  row.rhs = rep.rhs;
  row.residual = rep.residual;
  row.tolerance = rep.tolerance;
  row.pass = rep.pass;
  row.note = rep.note;
  return row;
}

ReportRow error_row(const Suite& s, std::string identity, std::string field, int dim, const Point* point, int order,
                    const std::string& message) {
  ReportRow row;
  row.suite = s.name;
  row.identity = std::move(identity);
  row.field = std::move(field);
  row.dim = dim;
  if (point) row.point = coords(*point);
  row.order = order;
  row.lhs = row.rhs = row.residual = kNaN;
  row.tolerance = kNaN;
  row.pass = false;
  row.note = message;
  return row;
}

std::vector<Keyed> run_tasks(const std::vector<Task>& tasks) {
  std::vector<std::vector<Keyed>> results(tasks.size());
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, tasks.size()));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < tasks.size(); i += workers) results[i] = tasks[i].run();
    }));
  }
  for (auto& j : jobs) j.get();
  std::vector<Keyed> all;
  for (auto& r : results) {
    for (auto& k : r) all.push_back(std::move(k));
  }
  std::stable_sort(all.begin(), all.end(), [](const Keyed& a, const Keyed& b) { return a.key < b.key; });
  return all;
}

bool selected(const Suite& s, IdentityId id) {
  return std::binary_search(s.identities.begin(), s.identities.end(), id);
}

std::vector<Task> identity_tasks(const Suite& s, bool converge) {
  const Domain& d = *s.domain;
  const int dim = d.dim();
  std::vector<Task> tasks;
  auto add = [&](std::array<long long, 5> key, std::string id, std::string field, std::optional<Point> point,
                 int order, std::function<std::vector<IdentityReport>()> fn) {
    tasks.push_back({[=, &s] {
      std::vector<Keyed> out;
      try {
        long long sub = 0;
        for (IdentityReport& rep : fn()) {
          if (auto t = s.tol(to_string(rep.id))) {
            rep.tolerance = *t;
            rep.pass = rep.residual <= *t;
          }
          Keyed k{key, row_from(s, rep, dim, point ? &*point : nullptr)};
          k.key[0] = identity_rank(rep.id);
          k.key[4] = sub++;
          out.push_back(std::move(k));
        }
      } catch (const Error& e) {
        out.push_back({key, error_row(s, id, field, dim, point ? &*point : nullptr, order, e.what())});
      }
      return out;
    }});
  };

  if (s.gauss) {
    const Point inside = d.center();
    Point on = d.center();
    if (d.is_ball()) {
      on[0] += d.ball().radius();
    } else {
      on = d.star().boundary_point(0.0);
    }
    Point outside = d.center();
    outside[0] += 2.0 * d.diameter();
    const std::array<std::pair<Point, double>, 3> probes = {{{inside, 1.0}, {on, 0.5}, {outside, 0.0}}};
    const double tol = s.tol("GAUSS").value_or(1e-8);
    for (int order : s.orders) {
      for (std::size_t i = 0; i < probes.size(); ++i) {
        const auto [y, expect] = probes[i];
        tasks.push_back({[=, &s, &d] {
          ReportRow row;
          row.suite = s.name;
          row.identity = "GAUSS";
          row.field = "constant(1)";
          row.dim = dim;
          row.point = coords(y);
          row.order = order;
          try {
            const LayerEvaluation ev = double_layer([](const Point&) { return 1.0; }, d, y, order);
            row.lhs = ev.value;
            row.rhs = expect;
            row.residual = std::abs(ev.value - expect);
            row.tolerance = tol;
            row.pass = row.residual <= tol;
            row.note = to_string(ev.location);
          } catch (const Error& e) {
            row = error_row(s, "GAUSS", "constant(1)", dim, &y, order, e.what());
          }
          return std::vector<Keyed>{{{kGaussRank, 0, static_cast<long long>(i), order, 0}, row}};
        }});
      }
    }
  }

  const bool green_any = selected(s, IdentityId::GRR) || selected(s, IdentityId::GREEN_RIEMANN_INTERIOR) ||
                         selected(s, IdentityId::GREEN_RIEMANN_EXTERIOR);
  std::vector<Point> any_points = s.interior;
  any_points.insert(any_points.end(), s.exterior.begin(), s.exterior.end());
  std::vector<Point> ball_points;
  if (s.ball) {
    for (const Point& y : s.interior) {
      if (distance(y, s.ball->center()) <= 0.9 * s.ball->radius()) ball_points.push_back(y);
    }
  }
  const Point rp0_z = s.z.value_or([&] {
    Point z = d.center();
    z[0] += 1.5 * d.diameter();
    z[1] += 0.5 * d.diameter();
    return z;
  }());

  for (std::size_t fi = 0; fi < s.fields.size(); ++fi) {
    const FieldSpec& fs = s.fields[fi];
    if (!fs.field) continue;
    const ScalarField f = *fs.field;
    const long long fr = static_cast<long long>(fi);
    for (int order : s.orders) {
      auto per_point = [&](IdentityId id, const std::vector<Point>& pts, auto fn) {
        if (!selected(s, id)) return;
        for (std::size_t pi = 0; pi < pts.size(); ++pi) {
          const Point y = pts[pi];
          add({identity_rank(id), fr, static_cast<long long>(pi), order, 0}, to_string(id), f.name(), y, order,
              [=] { return std::vector<IdentityReport>{fn(y)}; });
        }
      };
      per_point(IdentityId::F1, s.interior, [=, &d](const Point& y) { return check_f1(f, d, y, order); });
      per_point(IdentityId::FIG, any_points, [=, &d](const Point& y) { return check_fig(f, d, y, order); });
      if (s.ball) {
        const Ball b = *s.ball;
        for (IdentityId id : {IdentityId::MAT, IdentityId::COM, IdentityId::CERC}) {
          per_point(id, ball_points, [=](const Point& y) { return check_ball_corollary(id, f, b, y, order); });
        }
        for (IdentityId id : {IdentityId::REP2, IdentityId::REP3}) {
          per_point(id, {b.center()}, [=](const Point& y) { return check_ball_corollary(id, f, b, y, order); });
        }
      }
      per_point(IdentityId::RP0, s.interior,
                [=, &d](const Point& y) { return check_rp(IdentityId::RP0, f, d, y, rp0_z, order); });
      per_point(IdentityId::RP1, s.interior,
                [=, &d](const Point& y) { return check_rp(IdentityId::RP1, f, d, y, y, order); });
      if (!s.ps.empty()) {
        const LebesgueExponent p = s.ps.front();
        per_point(IdentityId::C2_EXTERIOR, s.exterior, [=, &d](const Point& y) {
          return check_c2_exterior(f, d, y, p, order);
        });
      }
      if (green_any && f.has_laplacian()) {
        for (std::size_t pi = 0; pi < any_points.size(); ++pi) {
          const Point y = any_points[pi];
          const bool inside = d.classify(y) == LocationClass::Interior;
          const IdentityId gr = inside ? IdentityId::GREEN_RIEMANN_INTERIOR : IdentityId::GREEN_RIEMANN_EXTERIOR;
          const bool want_grr = selected(s, IdentityId::GRR);
          const bool want_gr = selected(s, gr);
          if (!want_grr && !want_gr) continue;
          const IdentityId first = want_grr ? IdentityId::GRR : gr;
          add({identity_rank(first), fr, static_cast<long long>(pi), order, 0}, to_string(first), f.name(), y, order,
              [=, &d, &s] {
                std::vector<IdentityReport> out;
                for (IdentityReport& rep : check_grr_and_green_riemann(f, d, y, order, s.zeta)) {
                  if (rep.id == IdentityId::GRR ? want_grr : want_gr) out.push_back(std::move(rep));
                }
                return out;
              });
        }
      }
      per_point(IdentityId::GREEN_RIEMANN_BOUNDARY, s.boundary, [=, &d](const Point& y) {
        return check_grr_and_green_riemann(f, d, y, order, s.zeta).front();
      });
    }

    if (selected(s, IdentityId::F2) || selected(s, IdentityId::F3)) {
      std::vector<std::pair<int, int>> pairs;
      if (converge) {
        for (int order : s.orders) pairs.emplace_back(order, 2 * order);
      } else {
        pairs.emplace_back(s.outer_order, s.inner_order);
      }
      for (const auto& [outer, inner] : pairs) {
        F2F3Options opt;
        opt.outer_order = outer;
        opt.inner_order = inner;
        opt.z = s.z;
        opt.zeta_mode = s.zeta;
        const bool w2 = selected(s, IdentityId::F2);
        const bool w3 = selected(s, IdentityId::F3);
        const IdentityId first = w2 ? IdentityId::F2 : IdentityId::F3;
        const Point z = s.z.value_or(d.center());
        add({identity_rank(first), fr, 0, outer, 0}, to_string(first), f.name(), z, outer, [=, &d] {
          auto [r2, r3] = check_f2_f3(f, d, opt);
          std::vector<IdentityReport> out;
          if (w2) out.push_back(std::move(r2));
          if (w3) out.push_back(std::move(r3));
          return out;
        });
      }
    }
  }
  return tasks;
}

void check_ball_selection(const Suite& s, const SuiteConfig& config) {
  if (s.ball || !s.identities_explicit) return;
  for (IdentityId id : {IdentityId::MAT, IdentityId::COM, IdentityId::CERC, IdentityId::REP2, IdentityId::REP3}) {
    if (selected(s, id)) {
      Reader(config).error("identities", std::string(to_string(id)) + " needs ball.center and ball.radius");
    }
  }
}

double rounding_floor(const ReportRow& r) {
  return 64.0 * std::numeric_limits<double>::epsilon() * std::max({1.0, std::abs(r.lhs), std::abs(r.rhs)});
}

// Rate rows follow each (identity, field, point) group of order rows.
std::vector<ReportRow> with_rates(const Suite& s, std::vector<Keyed> rows) {
  std::vector<ReportRow> out;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    while (j < rows.size() && rows[j].key[0] == rows[i].key[0] && rows[j].key[1] == rows[i].key[1] &&
           rows[j].key[2] == rows[i].key[2] && rows[j].key[4] == rows[i].key[4]) {
      ++j;
    }
    // Rows of multi-output tasks interleave by sub index; gather by key.
    std::vector<ReportRow> group;
    for (std::size_t k = i; k < j; ++k) group.push_back(rows[k].row);
    for (const ReportRow& r : group) out.push_back(r);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double min_factor = kInf;
    bool finite = true;
    for (std::size_t k = 0; k < group.size(); ++k) {
      const double res = std::max(group[k].residual, rounding_floor(group[k]));
      if (!std::isfinite(group[k].residual)) finite = false;
      const double x = std::log2(static_cast<double>(group[k].order));
      const double y = std::log2(res);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      if (k > 0) {
        const double prev = std::max(group[k - 1].residual, rounding_floor(group[k - 1]));
        min_factor = std::min(min_factor, prev / res);
      }
    }
    const double n = static_cast<double>(group.size());
    ReportRow rate = group.back();
    rate.suite = s.name + ":rate";
    rate.lhs = finite && n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : kNaN;
    rate.rhs = finite ? min_factor : kNaN;
    rate.note = "lhs = log-log slope, rhs = smallest reduction factor between consecutive orders";
    out.push_back(rate);
    i = j;
  }
  return out;
}

// Re-key rows so that groups for the rate fit are contiguous in order.
std::vector<Keyed> group_for_rates(std::vector<Keyed> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const Keyed& a, const Keyed& b) {
    return std::tie(a.key[0], a.key[1], a.key[2], a.key[4], a.key[3]) <
           std::tie(b.key[0], b.key[1], b.key[2], b.key[4], b.key[3]);
  });
  return rows;
}

// Bound rows: lhs = deviation, rhs = bound, residual = ratio.
ReportRow bound_row(const Suite& s, const std::string& identity, const BoundReport& b, int dim, double slack) {
  ReportRow row;
  row.suite = s.name;
  row.identity = identity;
  row.field = b.field;
  row.dim = dim;
  row.point = dim == 1 ? std::vector<double>{b.y[0]} : coords(b.y);
  row.order = b.order;
  row.lhs = b.deviation;
  row.rhs = b.bound;
  row.residual = b.ratio;
  row.tolerance = 1.0 + slack;
  row.pass = b.ratio <= row.tolerance;
  row.note = "p = " + LebesgueExponent(b.p).to_string();
  return row;
}

ReportRow sharp_row(const Suite& s, const std::string& identity, const BoundReport& b, int dim, double tol) {
  ReportRow row = bound_row(s, identity, b, dim, 0.0);
  row.residual = std::abs(b.ratio - 1.0);
  row.tolerance = tol;
  row.pass = row.residual <= tol;
  return row;
}

std::vector<Task> bound_tasks(const Suite& s, const SuiteConfig& config) {
  const Domain& d = *s.domain;
  const int dim = d.dim();
  const double slack = s.tol("BOUND").value_or(1e-6);
  const double sharp_tol = s.tol("SHARP").value_or(1e-3);
  std::vector<Task> tasks;
  const bool nd = s.bound_kinds.count("general") || s.bound_kinds.count("ball");
  if (nd) {
    for (const LebesgueExponent& p : s.ps) {
      if (!(p.is_infinite() || p.value() > dim)) {
        Reader(config).error("p", "bounds need p > N = " + std::to_string(dim) + ", got " + p.to_string());
      }
    }
  }
  auto field_for = [](const FieldSpec& fs, const LebesgueExponent& p, const Point& y) {
    return fs.extremal ? extremal_field(p, y, 1) : *fs.field;
  };
  std::vector<Point> general_points{d.center()};
  general_points.insert(general_points.end(), s.interior.begin(), s.interior.end());

  for (std::size_t fi = 0; fi < s.fields.size(); ++fi) {
    const FieldSpec fs = s.fields[fi];
    for (std::size_t pj = 0; pj < s.ps.size(); ++pj) {
      const LebesgueExponent p = s.ps[pj];
      for (int order : s.orders) {
        if (s.bound_kinds.count("general")) {
          for (std::size_t pi = 0; pi < general_points.size(); ++pi) {
            const Point y = general_points[pi];
            const long long sub = static_cast<long long>(pi * s.ps.size() + pj);
            tasks.push_back({[=, &s, &d] {
              std::vector<Keyed> out;
              const std::array<long long, 5> key{0, static_cast<long long>(fi), sub, order, 0};
              try {
                const ScalarField f = field_for(fs, p, y);
                const BoundReport b = ostrowski_bound_general(f, d, y, p, order);
                out.push_back({key, bound_row(s, "BOUND_GENERAL", b, dim, slack)});
                if (fs.extremal && d.is_ball() && distance(y, d.center()) == 0.0) {
                  auto k = key;
                  k[4] = 1;
                  out.push_back({k, sharp_row(s, "SHARP_GENERAL", b, dim, sharp_tol)});
                }
              } catch (const Error& e) {
                out.push_back({key, error_row(s, "BOUND_GENERAL", fs.text, dim, &y, order, e.what())});
              }
              return out;
            }});
          }
        }
        if (s.bound_kinds.count("ball") && s.ball) {
          const Ball b = *s.ball;
          tasks.push_back({[=, &s] {
            std::vector<Keyed> out;
            const std::array<long long, 5> key{1, static_cast<long long>(fi), static_cast<long long>(pj), order, 0};
            try {
              const ScalarField f = field_for(fs, p, b.center());
              const BoundReport r = ostrowski_bound_ball(f, b, p, order);
              out.push_back({key, bound_row(s, "BOUND_BALL", r, dim, slack)});
              if (fs.extremal) {
                auto k = key;
                k[4] = 1;
                out.push_back({k, sharp_row(s, "SHARP_BALL", r, dim, sharp_tol)});
              }
            } catch (const Error& e) {
              out.push_back({key, error_row(s, "BOUND_BALL", fs.text, dim, &b.center(), order, e.what())});
            }
            return out;
          }});
        }
      }
    }
  }
  if (s.bound_kinds.count("1d")) {
    const double mtol = s.tol("MONTGOMERY").value_or(1e-12);
    for (std::size_t fi = 0; fi < s.oned.size(); ++fi) {
      const Function1D f = s.oned[fi];
      for (std::size_t xi = 0; xi < s.oned_points.size(); ++xi) {
        const double x = s.oned_points[xi];
        tasks.push_back({[=, &s] {
          std::vector<Keyed> out;
          const long long fr = static_cast<long long>(fi);
          const long long xr = static_cast<long long>(xi);
          const Montgomery1DReport m = montgomery_identity_1d(f, s.oned_a, s.oned_b, x);
          ReportRow row;
          row.suite = s.name;
          row.identity = "MONTGOMERY_1D";
          row.field = f.name;
          row.dim = 1;
          row.point = {x};
          row.order = 32;
          row.lhs = m.lhs;
          row.rhs = m.rhs;
          row.residual = m.residual;
          row.tolerance = mtol;
          row.pass = m.residual <= mtol;
          out.push_back({{2, fr, xr, 0, 0}, row});
          const std::pair<const char*, Norm1D> branches[] = {
              {"OSTROWSKI_1D_INF", Norm1D::Infinity}, {"OSTROWSKI_1D_Q", Norm1D::Q}, {"OSTROWSKI_1D_ONE", Norm1D::One}};
          long long sub = 1;
          for (const auto& [name, norm] : branches) {
            const BoundReport b = ostrowski_bounds_1d(f, s.oned_a, s.oned_b, x, norm, s.oned_q);
            out.push_back({{2, fr, xr, 0, sub++}, bound_row(s, name, b, 1, 1e-12)});
          }
          return out;
        }});
      }
    }
  }
  return tasks;
}

// ω_N by ω_2 = 2π, ω_3 = 4π, ω_{N+2} = 2π ω_N / N.
double omega_by_recursion(int n) {
  double w = n % 2 == 0 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
  for (int k = n % 2 == 0 ? 2 : 3; k < n; k += 2) w *= 2.0 * std::numbers::pi / k;
  return w;
}

// ω_N ∫_0^R ρ^{N-1-(N-1)p'} dρ with a graded Gauss–Legendre rule.
double radial_moment(int n, double R, double pc, int order) {
  const double gamma = n - 1 - (n - 1) * pc;
  const int q = grading_for_exponent(gamma);
  const GaussRule& gl = gauss_legendre_unit(std::max(8, order / 2));
  Accumulator acc;
  for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
    const double t = gl.nodes[k];
    const double rho = R * std::pow(t, q);
    acc.add(gl.weights[k] * R * q * std::pow(t, q - 1) * std::pow(rho, gamma));
  }
  return sphere_area_constant(n) * acc.value();
}

std::vector<ReportRow> table_rows(const Suite& s) {
  const int order = s.orders.front();
  std::vector<ReportRow> rows;
  auto row = [&](const std::string& id, const std::string& field, int n, double lhs, double rhs, double tol) {
    ReportRow r;
    r.suite = s.name;
    r.identity = id;
    r.field = field;
    r.dim = n;
    r.order = order;
    r.lhs = lhs;
    r.rhs = rhs;
    r.residual = std::abs(lhs - rhs);
    r.tolerance = tol;
    r.pass = r.residual <= tol;
    rows.push_back(std::move(r));
  };
  for (int n : s.table_dims) {
    const double w = sphere_area_constant(n);
    row("OMEGA", "", n, w, omega_by_recursion(n), 1e-12 * w);
  }
  for (int n : s.table_dims) {
    for (double pv : s.table_p) {
      const LebesgueExponent p(pv);
      if (!(p.is_infinite() || pv > n)) continue;
      const double pc = p.conjugate();
      for (double R : s.table_radii) {
        const std::string label = "p=" + p.to_string() + " R=" + format_double(R);
        const double closed = moment_integral_closed_form(n, R, pc);
        const double quad = n <= 3 ? moment_integral_quadrature(Domain(Ball(Point(n), R)), Point(n), pc, order)
                                   : radial_moment(n, R, pc, order);
        row("MOMENT", label, n, closed, quad, 1e-8 * std::max(1.0, std::abs(closed)));
        const double c = ball_constant(n, R, p);
        const double via_moment = std::pow(quad, 1.0 / pc) / sphere_area_constant(n);
        row("BALL_CONSTANT", label, n, c, via_moment, 1e-8 * std::max(1.0, std::abs(c)));
      }
    }
  }
  return rows;
}

}  // namespace

// ---------------------------------------------------------------------------

SuiteConfig SuiteConfig::parse(std::string_view text, std::string_view origin) {
  SuiteConfig c;
  c.origin_ = std::string(origin);
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    auto where = [&](std::size_t col) {
      return c.origin_ + ":" + std::to_string(line_no) + ":" + std::to_string(col + 1) + ": ";
    };
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorKind::Config, where(first) + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(ErrorKind::Config, where(first) + "missing key before '='");
    if (!is_known_key(key)) fail(ErrorKind::Config, where(first) + "unknown key '" + key + "'");
    if (c.entries_.count(key)) fail(ErrorKind::Config, where(first) + "duplicate key '" + key + "'");
    const std::size_t vstart = line.find_first_not_of(" \t", eq + 1);
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) fail(ErrorKind::Config, where(eq + 1) + "empty value for '" + key + "'");
    c.entries_[key] = {value, line_no, static_cast<int>((vstart == std::string_view::npos ? eq + 1 : vstart) + 1)};
  }
  return c;
}

void SuiteConfig::set(std::string_view key, std::string_view value) {
  const std::string k = trim(key);
  if (!is_known_key(k)) fail(ErrorKind::Config, "override: unknown key '" + k + "'");
  const std::string v = trim(value);
  if (v.empty()) fail(ErrorKind::Config, "override " + k + ": empty value");
  entries_[k] = {v, 0, 0};
}

void SuiteConfig::validate() const { (void)resolve(*this); }

OutputFormat output_format(const SuiteConfig& config) {
  auto it = config.entries().find("output.format");
  if (it == config.entries().end() || it->second.value == "csv") return OutputFormat::Csv;
  if (it->second.value == "jsonl") return OutputFormat::Jsonl;
  Reader(config).error("output.format", "expected csv or jsonl");
}

Command command_from_string(std::string_view name) {
  if (name == "verify") return Command::Verify;
  if (name == "converge") return Command::Converge;
  if (name == "table") return Command::Table;
  if (name == "bound") return Command::Bound;
  fail(ErrorKind::Config, "unknown command '" + std::string(name) + "'");
}

RunResult run_suite(const SuiteConfig& config, Command command) {
  (void)node_budget();  // rejects a malformed LAYERPOT_MAX_NODES up front
  const Suite s = resolve(config);
  RunResult result;
  switch (command) {
    case Command::Verify: {
      check_ball_selection(s, config);
      for (Keyed& k : run_tasks(identity_tasks(s, false))) result.rows.push_back(std::move(k.row));
      break;
    }
    case Command::Converge: {
      if (s.orders.size() < 3) {
        if (config.entries().count("orders")) Reader(config).error("orders", "converge needs at least three orders");
        fail(ErrorKind::Config, "converge needs at least three orders (set 'orders')");
      }
      check_ball_selection(s, config);
      result.rows = with_rates(s, group_for_rates(run_tasks(identity_tasks(s, true))));
      break;
    }
    case Command::Table:
      if (s.table_dims.empty() || s.table_p.empty() || s.table_radii.empty()) {
        fail(ErrorKind::Config, "table grid is empty");
      }
      result.rows = table_rows(s);
      break;
    case Command::Bound:
      for (Keyed& k : run_tasks(bound_tasks(s, config))) result.rows.push_back(std::move(k.row));
      break;
  }
  for (const ReportRow& r : result.rows) result.all_pass = result.all_pass && r.pass;
  return result;
}

std::string render_report(const RunResult& result, OutputFormat format) {
  auto point_text = [](const std::vector<double>& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? " " : "") + format_double(p[i]);
    return s;
  };
  std::ostringstream out;
  if (format == OutputFormat::Csv) {
    auto cell = [](const std::string& s) {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    };
    out << "suite,identity,field,N,point,order,lhs,rhs,residual,tolerance,pass\n";
    for (const ReportRow& r : result.rows) {
      out << cell(r.suite) << ',' << cell(r.identity) << ',' << cell(r.field) << ',' << r.dim << ','
          << point_text(r.point) << ',' << r.order << ',' << format_double(r.lhs) << ',' << format_double(r.rhs) << ','
          << format_double(r.residual) << ',' << format_double(r.tolerance) << ',' << (r.pass ? "true" : "false")
          << '\n';
    }
    return out.str();
  }
  auto num = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  for (const ReportRow& r : result.rows) {
    nlohmann::ordered_json j;
    j["suite"] = r.suite;
    j["identity"] = r.identity;
    j["field"] = r.field;
    j["N"] = r.dim;
    j["point"] = r.point;
    j["order"] = r.order;
    j["lhs"] = num(r.lhs);
    j["rhs"] = num(r.rhs);
    j["residual"] = num(r.residual);
    j["tolerance"] = num(r.tolerance);
    j["pass"] = r.pass;
    out << j.dump() << '\n';
  }
  return out.str();
}

std::string describe_failures(const RunResult& result) {
  std::string out;
  for (const ReportRow& r : result.rows) {
    if (r.pass) continue;
    std::string point;
    for (std::size_t i = 0; i < r.point.size(); ++i) point += (i ? " " : "") + format_double(r.point[i]);
    out += "FAIL " + r.identity + " " + r.field + " [" + point + "] order " + std::to_string(r.order) +
           ": residual " + format_double(r.residual) + " > " + format_double(r.tolerance);
    if (!r.note.empty()) out += " (" + r.note + ")";
    out += "\n";
  }
  return out;
}

}  // namespace layerpot
