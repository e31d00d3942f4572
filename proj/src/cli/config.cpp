#include <cmath>
#include <set>

#include <json.hpp>

#include "transmute/cli/job.hpp"

namespace transmute::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) bad(path, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) bad(path.empty() ? k : path + "." + k, "unknown key");
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(path, "must be finite");
  return d;
}

std::size_t count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) bad(path, "expected a non-negative integer");
  return v.get<std::size_t>();
}

bool flag(const json& v, const std::string& path) {
  if (!v.is_boolean()) bad(path, "expected true or false");
  return v.get<bool>();
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) bad(path, "expected a string");
  return v.get<std::string>();
}

// a number or a [re, im] pair
cplx complex_number(const json& v, const std::string& path) {
  if (v.is_array()) {
    if (v.size() != 2) bad(path, "expected [re, im]");
    return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
  }
  return number(v, path);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

struct Range {
  double from = 0, to = 0;
  std::size_t n = 0;
};
Range range(const json& v, const std::string& path) {
  only_keys(v, path, {"from", "to", "count"});
  if (!v.contains("from") || !v.contains("to") || !v.contains("count")) bad(path, "needs from, to and count");
  Range r{number(v["from"], path + ".from"), number(v["to"], path + ".to"), count(v["count"], path + ".count")};
  if (r.n == 0) bad(path + ".count", "must be positive");
  return r;
}

template <class T, class F>
std::vector<T> list(const json& v, const std::string& path, F item) {
  if (!v.is_array()) bad(path, "expected a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(item(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

BoundaryCondition boundary(const json& v, const std::string& path) {
  only_keys(v, path, {"alpha", "beta"});
  BoundaryCondition bc;
  if (v.contains("alpha")) bc.alpha = number(v["alpha"], path + ".alpha");
  if (v.contains("beta")) bc.beta = number(v["beta"], path + ".beta");
  if (bc.alpha == 0.0 && bc.beta == 0.0) bad(path, "alpha and beta cannot both vanish");
  return bc;
}

void read_eigen(const json& v, EigenSpec& e) {
  const std::string p = "eigen";
  only_keys(v, p, {"count", "left", "right", "shift", "range", "eigenfunctions", "scan_density"});
  if (v.contains("count")) e.count = count(v["count"], p + ".count");
  if (v.contains("left")) e.left = boundary(v["left"], p + ".left");
  if (v.contains("right")) e.right = boundary(v["right"], p + ".right");
  if (v.contains("shift")) e.shift = number(v["shift"], p + ".shift");
  if (v.contains("range")) {
    const auto r = list<double>(v["range"], p + ".range", number);
    if (r.size() != 2 || !(r[0] >= 0.0 && r[1] > r[0])) bad(p + ".range", "expected [lo, hi] with 0 <= lo < hi");
    e.range = std::make_pair(r[0], r[1]);
  }
  if (v.contains("eigenfunctions")) e.eigenfunctions = flag(v["eigenfunctions"], p + ".eigenfunctions");
  if (v.contains("scan_density")) {
    e.scan_density = number(v["scan_density"], p + ".scan_density");
    if (e.scan_density < 0) bad(p + ".scan_density", "must be >= 0");
  }
}

void read_pde(const json& v, PdeSpec& d) {
  const std::string p = "pde";
  only_keys(v, p, {"method", "domain", "data", "exact", "basis", "points", "sources", "source_factor",
                   "pivoted_fallback", "constant_term", "field_grid"});
  if (v.contains("method")) {
    const auto m = text(v["method"], p + ".method");
    if (m == "family") d.method = PdeSpec::Method::family;
    else if (m == "mfs") d.method = PdeSpec::Method::mfs;
    else bad(p + ".method", "expected family or mfs");
  }
  if (v.contains("domain")) {
    const auto& dom = v["domain"];
    only_keys(dom, p + ".domain", {"rectangle", "disk"});
    if (dom.size() != 1) bad(p + ".domain", "give exactly one of rectangle, disk");
    if (dom.contains("rectangle")) {
      const auto r = list<double>(dom["rectangle"], p + ".domain.rectangle", number);
      if (r.size() != 4 || !(r[1] > r[0] && r[3] > r[2]))
        bad(p + ".domain.rectangle", "expected [x0, x1, y0, y1] with x0 < x1, y0 < y1");
      d.shape = PdeSpec::Shape::rectangle;
      d.x0 = r[0], d.x1 = r[1], d.y0 = r[2], d.y1 = r[3];
    } else {
      const auto& disk = dom["disk"];
      const std::string q = p + ".domain.disk";
      only_keys(disk, q, {"center", "radius"});
      d.shape = PdeSpec::Shape::disk;
      if (disk.contains("center")) {
        const auto c = list<double>(disk["center"], q + ".center", number);
        if (c.size() != 2) bad(q + ".center", "expected [x, y]");
        d.cx = c[0], d.cy = c[1];
      }
      if (disk.contains("radius")) d.radius = number(disk["radius"], q + ".radius");
      if (!(d.radius > 0)) bad(q + ".radius", "must be positive");
    }
  }
  if (v.contains("data")) d.data = text(v["data"], p + ".data");
  if (v.contains("exact")) d.exact = text(v["exact"], p + ".exact");
  if (v.contains("basis")) d.basis = count(v["basis"], p + ".basis");
  if (v.contains("points")) d.points = count(v["points"], p + ".points");
  if (v.contains("sources")) {
    if (v["sources"].is_array()) d.source_list = list<cplx>(v["sources"], p + ".sources", complex_number);
    else d.sources = count(v["sources"], p + ".sources");
  }
  if (v.contains("source_factor")) {
    d.source_factor = number(v["source_factor"], p + ".source_factor");
    if (!(d.source_factor > 1)) bad(p + ".source_factor", "must exceed 1");
  }
  if (v.contains("pivoted_fallback")) d.pivoted_fallback = flag(v["pivoted_fallback"], p + ".pivoted_fallback");
  if (v.contains("constant_term")) d.constant_term = flag(v["constant_term"], p + ".constant_term");
  if (v.contains("field_grid")) d.field_grid = count(v["field_grid"], p + ".field_grid");
  if (d.basis == 0) bad(p + ".basis", "must be positive");
}

void read_bench(const json& v, BenchSpec& s) {
  const std::string p = "bench";
  only_keys(v, p, {"orders", "omega", "grid_sizes", "eigen_count", "shooting_steps", "repeats", "x_points"});
  if (v.contains("orders")) s.orders = list<std::size_t>(v["orders"], p + ".orders", count);
  if (v.contains("omega")) s.omega = list<double>(v["omega"], p + ".omega", number);
  if (v.contains("grid_sizes")) s.grid_sizes = list<std::size_t>(v["grid_sizes"], p + ".grid_sizes", count);
  if (v.contains("eigen_count")) s.eigen_count = count(v["eigen_count"], p + ".eigen_count");
  if (v.contains("shooting_steps")) s.shooting_steps = count(v["shooting_steps"], p + ".shooting_steps");
  if (v.contains("repeats")) s.repeats = count(v["repeats"], p + ".repeats");
  if (v.contains("x_points")) s.x_points = count(v["x_points"], p + ".x_points");
  if (s.repeats == 0) bad(p + ".repeats", "must be positive");
  if (s.x_points < 2) bad(p + ".x_points", "must be at least 2");
  for (const auto m : s.grid_sizes)
    if (m < 8 || m % 2) bad(p + ".grid_sizes", "entries must be even and >= 8");
}

json complex_json(cplx z) { return z.imag() == 0.0 ? json(z.real()) : json::array({z.real(), z.imag()}); }

}  // namespace

const char* to_string(Representation r) {
  switch (r) {
    case Representation::legendre: return "legendre";
    case Representation::laguerre: return "laguerre";
    case Representation::hermite: return "hermite";
  }
  return "?";
}

const char* to_string(Task t) {
  switch (t) {
    case Task::solve: return "solve";
    case Task::kernel: return "kernel";
    case Task::eigen: return "eigen";
    case Task::pde: return "pde";
    case Task::compare: return "compare";
    case Task::bench: return "bench";
  }
  return "?";
}

Representation representation_from(std::string_view name) {
  for (auto r : {Representation::legendre, Representation::laguerre, Representation::hermite})
    if (name == to_string(r)) return r;
  throw ConfigError("representation: expected legendre, laguerre or hermite, got '" + std::string(name) + "'");
}

Task task_from(std::string_view name) {
  for (auto t : {Task::solve, Task::kernel, Task::eigen, Task::pde, Task::compare, Task::bench})
    if (name == to_string(t)) return t;
  throw ConfigError("task: expected solve, kernel, eigen, pde, compare or bench, got '" + std::string(name) + "'");
}

std::vector<std::string> job_config_keys() {
  return {"task", "potential", "b", "representation", "N", "K_max", "M", "omega", "x", "eigen", "pde", "bench", "out", "strict"};
}

JobConfig parse_job_config(std::string_view text_in) {
  json v;
  try {
    v = json::parse(text_in);
  } catch (const json::exception& e) {  // syntax, or a number that overflows a double
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(v, "", {"task", "potential", "b", "representation", "N", "K_max", "M", "omega", "x", "eigen", "pde",
                    "bench", "out", "strict"});
  JobConfig c;
  if (v.contains("task")) c.task = task_from(text(v["task"], "task"));
  if (v.contains("potential")) {
    const auto& q = v["potential"];
    if (q.is_string()) {
      c.potential.expression = q.get<std::string>();
    } else {
      only_keys(q, "potential", {"expression", "samples", "principal_value_ok"});
      if (q.contains("expression")) c.potential.expression = text(q["expression"], "potential.expression");
      if (q.contains("samples")) c.potential.samples = text(q["samples"], "potential.samples");
      if (q.contains("principal_value_ok"))
        c.potential.principal_value_ok = flag(q["principal_value_ok"], "potential.principal_value_ok");
    }
  }
  if (v.contains("b")) c.b = number(v["b"], "b");
  if (!(c.b > 0)) bad("b", "must be positive");
  if (v.contains("representation")) c.rep = representation_from(text(v["representation"], "representation"));
  if (v.contains("N")) c.N = count(v["N"], "N");
  if (v.contains("K_max")) c.K_max = count(v["K_max"], "K_max");
  if (v.contains("M")) c.M = count(v["M"], "M");
  if (c.M < 8 || c.M % 2) bad("M", "must be even and >= 8");
  if (c.K_max == 0) bad("K_max", "must be positive");
  if (v.contains("omega")) {
    const auto& w = v["omega"];
    if (w.is_object()) {
      const auto r = range(w, "omega");
      c.omega.clear();
      for (double d : linspace(r.from, r.to, r.n)) c.omega.push_back(d);
    } else {
      c.omega = list<cplx>(w, "omega", complex_number);
    }
  }
  if (v.contains("x")) {
    const auto& x = v["x"];
    if (x.is_object() && x.size() == 1 && x.contains("count")) {
      c.x_count = count(x["count"], "x.count");
      if (c.x_count == 0) bad("x.count", "must be positive");
    } else if (x.is_object()) {
      const auto r = range(x, "x");
      c.x = linspace(r.from, r.to, r.n);
    } else {
      c.x = list<double>(x, "x", number);
    }
  }
  if (v.contains("eigen")) read_eigen(v["eigen"], c.eigen);
  if (v.contains("pde")) read_pde(v["pde"], c.pde);
  if (v.contains("bench")) read_bench(v["bench"], c.bench);
  if (v.contains("out")) c.out = text(v["out"], "out");
  if (v.contains("strict")) c.strict = flag(v["strict"], "strict");
  return c;
}

std::string job_config_json(const JobConfig& c) {
  json v;
  v["task"] = to_string(c.task);
  v["potential"] = {{"expression", c.potential.expression}, {"principal_value_ok", c.potential.principal_value_ok}};
  if (!c.potential.samples.empty()) v["potential"]["samples"] = c.potential.samples;
  v["b"] = c.b;
  v["representation"] = to_string(c.rep);
  v["N"] = c.N;
  v["K_max"] = c.K_max;
  v["M"] = c.M;
  v["omega"] = json::array();
  for (const cplx w : c.omega) v["omega"].push_back(complex_json(w));
  if (c.x.empty()) v["x"] = {{"count", c.x_count}};
  else v["x"] = c.x;
  json e{{"count", c.eigen.count},
         {"left", {{"alpha", c.eigen.left.alpha}, {"beta", c.eigen.left.beta}}},
         {"right", {{"alpha", c.eigen.right.alpha}, {"beta", c.eigen.right.beta}}},
         {"shift", c.eigen.shift},
         {"eigenfunctions", c.eigen.eigenfunctions},
         {"scan_density", c.eigen.scan_density}};
  if (c.eigen.range) e["range"] = {c.eigen.range->first, c.eigen.range->second};
  v["eigen"] = e;
  const auto& d = c.pde;
  json p{{"method", d.method == PdeSpec::Method::family ? "family" : "mfs"},
         {"data", d.data},
         {"basis", d.basis},
         {"points", d.points},
         {"source_factor", d.source_factor},
         {"pivoted_fallback", d.pivoted_fallback},
         {"constant_term", d.constant_term},
         {"field_grid", d.field_grid}};
  if (d.shape == PdeSpec::Shape::rectangle) p["domain"] = {{"rectangle", {d.x0, d.x1, d.y0, d.y1}}};
  else p["domain"] = {{"disk", {{"center", {d.cx, d.cy}}, {"radius", d.radius}}}};
  if (!d.exact.empty()) p["exact"] = d.exact;
  if (d.source_list.empty()) {
    p["sources"] = d.sources;
  } else {
    p["sources"] = json::array();
    for (const cplx z : d.source_list) p["sources"].push_back(json::array({z.real(), z.imag()}));
  }
  v["pde"] = p;
  v["bench"] = {{"orders", c.bench.orders},
                {"omega", c.bench.omega},
                {"grid_sizes", c.bench.grid_sizes},
                {"eigen_count", c.bench.eigen_count},
                {"shooting_steps", c.bench.shooting_steps},
                {"repeats", c.bench.repeats},
                {"x_points", c.bench.x_points}};
  v["out"] = c.out;
  v["strict"] = c.strict;
  return v.dump(2);
}

std::string apply_flags(std::string_view text, std::string_view task, const FlagOverrides& flags) {
  json doc = json::object();
  if (!text.empty()) {
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must hold a JSON object");
  }
  doc["task"] = std::string(task);
  if (flags.q) {
    if (doc.contains("potential") && doc["potential"].is_object()) {
      doc["potential"]["expression"] = *flags.q;
      doc["potential"].erase("samples");
    } else {
      doc["potential"] = *flags.q;
    }
  }
  if (flags.b) doc["b"] = *flags.b;
  if (flags.N) doc["N"] = *flags.N;
  if (flags.M) doc["M"] = *flags.M;
  if (flags.rep) doc["representation"] = *flags.rep;
  if (flags.out) doc["out"] = *flags.out;
  if (flags.strict) doc["strict"] = true;
  return doc.dump();
}

}  // namespace transmute::cli
