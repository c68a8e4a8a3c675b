#include "sbdf/harness/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "sbdf/errors.hpp"
#include "sbdf/field_io.hpp"

namespace sbdf::harness {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool valid_key(const std::string& key) {
  const auto dot = key.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == key.size()) return false;
  return std::all_of(key.begin(), key.end(),
                     [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.'; });
}

// "auto" placeholders are filled in per model by resolve().
const std::map<std::string, std::string> kSchema = {
    {"model.id", "allen_cahn"},
    {"model.epsilon", "0.01"},
    {"model.B", "2"},
    {"model.initial", "example"},
    {"model.initial_value", "0"},
    {"grid.n", "auto"},
    {"grid.nx", "auto"},
    {"grid.ny", "auto"},
    {"grid.length", "auto"},
    {"bc.left", "dirichlet"},
    {"bc.right", "neumann"},
    {"bc.bottom", "neumann"},
    {"bc.top", "neumann"},
    {"scheme.k", "auto"},
    {"scheme.dt", "auto"},
    {"scheme.T", "auto"},
    {"scheme.tol_const", "1"},
    {"scheme.max_iters", "500"},
    {"scheme.cutoff", "true"},
    {"output.dir", "out"},
    {"output.timing", "true"},
    {"output.snapshot_csv", "false"},
    {"trace.energy", "false"},
    {"trace.mbp", "true"},
    {"trace.iterates", "false"},
    {"run.seed", "0"},
    {"run.threads", "1"},
    {"converge.dt_list", "0.1,0.05,0.025,0.0125,0.00625"},
    {"converge.reference_dt", "0"},
    {"converge.orders", "auto"},
    {"compare.dt_list", "0.1,0.05,0.025,0.0125,0.00625"},
    {"mbp.dt_list", "0.1,0.5,1"},
    {"mbp.orders", "1,2,3,4"},
    {"mbp.T", "60"},
    {"mbp.cutoff_k1", "false"},
    {"prostate.lambda", "640"},
    {"prostate.M", "2.5"},
    {"prostate.m_ref", "0.05"},
    {"prostate.eta", "6400"},
    {"prostate.S_h", "2.75"},
    {"prostate.S_c", "2.75"},
    {"prostate.s", "0"},
    {"prostate.gamma_h", "2.75"},
    {"prostate.gamma_c", "17"},
    {"prostate.D", "6400"},
    {"prostate.gamma_p", "0.27"},
    {"prostate.alpha_h", "0.016875"},
    {"prostate.alpha_c", "0.2322"},
    {"prostate.m_sigma", "0:-0.05,0.5:0.2,1:0.4"},
    {"prostate.u_base", "0"},
    {"prostate.u_schedule", ""},
    {"prostate.B_phi", "0"},
    {"prostate.a", "150"},
    {"prostate.b", "200"},
    {"prostate.c_sigma0", "1"},
    {"prostate.c_sigma1", "-0.8"},
    {"prostate.c_p0", "0.0625"},
    {"prostate.c_p1", "0.7975"},
    {"prostate.snapshot_times", "0,10,20,30"},
    {"prostate.diffusion_only", "false"},
};

class Reader {
 public:
  explicit Reader(std::map<std::string, std::string> v) : v_(std::move(v)) {}

  const std::string& raw(const std::string& key) const { return v_.at(key); }
  bool is_auto(const std::string& key) const { return v_.at(key) == "auto"; }
  void fill(const std::string& key, const std::string& value) {
    if (is_auto(key)) v_[key] = value;
  }

  double real(const std::string& key) const {
    const std::string& s = raw(key);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
      throw ConfigError(key, "expected a finite number, got '" + s + "'");
    return v;
  }
  double positive(const std::string& key) const {
    const double v = real(key);
    if (!(v > 0.0)) throw ConfigError(key, "must be > 0, got " + raw(key));
    return v;
  }
  double nonnegative(const std::string& key) const {
    const double v = real(key);
    if (v < 0.0) throw ConfigError(key, "must be >= 0, got " + raw(key));
    return v;
  }
  long long integer(const std::string& key) const {
    const std::string& s = raw(key);
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
      throw ConfigError(key, "expected an integer, got '" + s + "'");
    return v;
  }
  bool boolean(const std::string& key) const {
    const std::string& s = raw(key);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(key, "expected true or false, got '" + s + "'");
  }
  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split(raw(key), ',')) {
      char* end = nullptr;
      const double v = std::strtod(item.c_str(), &end);
      if (end != item.c_str() + item.size() || !std::isfinite(v))
        throw ConfigError(key, "bad list entry '" + item + "'");
      out.push_back(v);
    }
    return out;
  }
  std::vector<int> orders(const std::string& key) const {
    std::vector<int> out;
    for (const auto& item : split(raw(key), ',')) {
      char* end = nullptr;
      const long v = std::strtol(item.c_str(), &end, 10);
      if (end != item.c_str() + item.size() || v < 1 || v > 4)
        throw ConfigError(key, "order must be in 1..4, got '" + item + "'");
      out.push_back(static_cast<int>(v));
    }
    if (out.empty()) throw ConfigError(key, "empty order list");
    return out;
  }

  const std::map<std::string, std::string>& all() const { return v_; }

 private:
  std::map<std::string, std::string> v_;
};

std::vector<double> dt_list(const Reader& r, const std::string& key) {
  auto dts = r.reals(key);
  if (dts.empty()) throw ConfigError(key, "empty dt list");
  for (double dt : dts)
    if (!(dt > 0.0)) throw ConfigError(key, "every dt must be > 0");
  return dts;
}

Boundary edge(const Reader& r, const std::string& key) {
  try {
    return boundary_from_string(r.raw(key));
  } catch (const std::exception&) {
    throw ConfigError(key, "expected periodic, dirichlet or neumann, got '" + r.raw(key) + "'");
  }
}

PiecewiseLinear parse_table(const Reader& r, const std::string& key) {
  PiecewiseLinear t{{}, {}};
  for (const auto& item : split(r.raw(key), ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) throw ConfigError(key, "expected x:y pairs, got '" + item + "'");
    char* e1 = nullptr;
    char* e2 = nullptr;
    const double x = std::strtod(parts[0].c_str(), &e1);
    const double y = std::strtod(parts[1].c_str(), &e2);
    if (*e1 != '\0' || *e2 != '\0' || !std::isfinite(x) || !std::isfinite(y))
      throw ConfigError(key, "bad pair '" + item + "'");
    t.x.push_back(x);
    t.y.push_back(y);
  }
  try {
    t.validate(key);
  } catch (const std::exception& ex) {
    throw ConfigError(key, ex.what());
  }
  return t;
}

Schedule parse_schedule(const Reader& r, const std::string& base_key, const std::string& key) {
  Schedule s;
  s.base = r.real(base_key);
  for (const auto& item : split(r.raw(key), ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 3) throw ConfigError(key, "expected start:end:value triples, got '" + item + "'");
    double v[3];
    for (int q = 0; q < 3; ++q) {
      char* e = nullptr;
      v[q] = std::strtod(parts[q].c_str(), &e);
      if (*e != '\0' || !std::isfinite(v[q])) throw ConfigError(key, "bad window '" + item + "'");
    }
    if (!(v[1] > v[0])) throw ConfigError(key, "window end must exceed start in '" + item + "'");
    s.windows.push_back({v[0], v[1], v[2]});
  }
  return s;
}

}  // namespace

KeyValues KeyValues::parse(const std::string& text, const std::string& origin) {
  KeyValues kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", origin + ":" + std::to_string(lineno) + ": expected 'section.key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (!valid_key(key))
      throw ConfigError(key, origin + ":" + std::to_string(lineno) + ": key must look like section.key");
    kv.values_[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void KeyValues::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("", "override '" + assignment + "' is not section.key=value");
  const std::string key = trim(assignment.substr(0, eq));
  if (!valid_key(key)) throw ConfigError(key, "key must look like section.key");
  values_[key] = trim(assignment.substr(eq + 1));
}

const std::map<std::string, std::string>& schema() { return kSchema; }

RunConfig resolve(const KeyValues& kv) {
  std::map<std::string, std::string> merged = kSchema;
  for (const auto& [key, value] : kv.values()) {
    if (!kSchema.count(key)) throw ConfigError(key, "unknown key");
    merged[key] = value;
  }
  Reader r(std::move(merged));
  RunConfig c;

  const std::string& id = r.raw("model.id");
  if (id == "allen_cahn")
    c.model = ModelId::AllenCahn;
  else if (id == "prostate")
    c.model = ModelId::Prostate;
  else
    throw ConfigError("model.id", "expected allen_cahn or prostate, got '" + id + "'");
  const bool pro = c.model == ModelId::Prostate;

  r.fill("grid.n", pro ? "256" : "128");
  r.fill("grid.nx", r.raw("grid.n"));
  r.fill("grid.ny", r.raw("grid.n"));
  r.fill("grid.length", pro ? "3000" : "1");
  r.fill("scheme.k", "2");
  r.fill("scheme.dt", pro ? "0.01" : "0.1");
  r.fill("scheme.T", pro ? "30" : "1");
  r.fill("converge.orders", r.raw("scheme.k"));

  c.epsilon = r.positive("model.epsilon");
  c.B = r.nonnegative("model.B");
  const std::string& init = r.raw("model.initial");
  if (init == "example")
    c.initial = InitialKind::Example;
  else if (init == "zero")
    c.initial = InitialKind::Zero;
  else if (init == "constant")
    c.initial = InitialKind::Constant;
  else
    throw ConfigError("model.initial", "expected example, zero or constant, got '" + init + "'");
  c.initial_value = r.real("model.initial_value");

  const long long nx = r.integer("grid.nx");
  const long long ny = r.integer("grid.ny");
  if (nx < 3 || nx > 1 << 14) throw ConfigError("grid.nx", "must be in 3..16384");
  if (ny < 3 || ny > 1 << 14) throw ConfigError("grid.ny", "must be in 3..16384");
  if (r.integer("grid.n") < 3) throw ConfigError("grid.n", "must be >= 3");
  c.length = r.positive("grid.length");

  BoundarySpec bc;
  if (pro) {
    if (nx != ny) throw ConfigError("grid.nx", "the prostate model needs a square grid");
    bc = BoundarySpec::uniform(Boundary::DirichletZero);
  } else {
    bc.left = edge(r, "bc.left");
    bc.right = edge(r, "bc.right");
    bc.bottom = edge(r, "bc.bottom");
    bc.top = edge(r, "bc.top");
    if ((bc.left == Boundary::Periodic) != (bc.right == Boundary::Periodic))
      throw ConfigError("bc.right", "periodic edges must come in pairs (left/right)");
    if ((bc.bottom == Boundary::Periodic) != (bc.top == Boundary::Periodic))
      throw ConfigError("bc.top", "periodic edges must come in pairs (bottom/top)");
    if (bc.left == Boundary::Periodic && nx != ny)
      throw ConfigError("grid.nx", "a single spacing h is used; periodic grids must be square");
  }
  // Node-centred: a non-periodic direction has nodes at both ends.
  const bool periodic_x = bc.left == Boundary::Periodic;
  const double h = c.length / static_cast<double>(periodic_x ? nx : nx - 1);
  c.grid = GridSpec{static_cast<int>(nx), static_cast<int>(ny), h, bc};
  try {
    c.grid.validate();
  } catch (const std::exception& ex) {
    throw ConfigError("grid.n", ex.what());
  }

  const long long k = r.integer("scheme.k");
  if (k < 1 || k > 4) throw ConfigError("scheme.k", "order must be in 1..4, got " + r.raw("scheme.k"));
  c.k = static_cast<int>(k);
  c.dt = r.positive("scheme.dt");
  c.T = r.positive("scheme.T");
  if (c.dt > c.T) throw ConfigError("scheme.dt", "dt exceeds scheme.T");
  c.tol_const = r.positive("scheme.tol_const");
  const long long iters = r.integer("scheme.max_iters");
  if (iters < 1 || iters > 1000000) throw ConfigError("scheme.max_iters", "must be in 1..1000000");
  c.max_iters = static_cast<int>(iters);
  c.cutoff = r.boolean("scheme.cutoff");

  c.out_dir = r.raw("output.dir");
  if (c.out_dir.empty()) throw ConfigError("output.dir", "must not be empty");
  c.timing = r.boolean("output.timing");
  c.snapshot_csv = r.boolean("output.snapshot_csv");
  c.trace_energy = r.boolean("trace.energy");
  c.trace_mbp = r.boolean("trace.mbp");
  c.trace_iterates = r.boolean("trace.iterates");
  if (pro && c.trace_energy) throw ConfigError("trace.energy", "the energy trace is defined for allen_cahn only");
  const long long seed = r.integer("run.seed");
  if (seed < 0) throw ConfigError("run.seed", "must be >= 0");
  c.seed = static_cast<unsigned long long>(seed);
  const long long threads = r.integer("run.threads");
  if (threads < 1 || threads > 256) throw ConfigError("run.threads", "must be in 1..256");
  c.threads = static_cast<int>(threads);

  c.converge_dts = dt_list(r, "converge.dt_list");
  c.reference_dt = r.nonnegative("converge.reference_dt");
  c.converge_orders = r.orders("converge.orders");
  c.compare_dts = dt_list(r, "compare.dt_list");
  c.mbp_dts = dt_list(r, "mbp.dt_list");
  c.mbp_orders = r.orders("mbp.orders");
  c.mbp_T = r.positive("mbp.T");
  c.mbp_cutoff_k1 = r.boolean("mbp.cutoff_k1");

  ProstateParams& p = c.prostate.params;
  p.lambda = r.nonnegative("prostate.lambda");
  p.M = r.nonnegative("prostate.M");
  p.m_ref = r.real("prostate.m_ref");
  p.eta = r.nonnegative("prostate.eta");
  p.S_h = r.nonnegative("prostate.S_h");
  p.S_c = r.nonnegative("prostate.S_c");
  p.s = r.nonnegative("prostate.s");
  p.gamma_h = r.nonnegative("prostate.gamma_h");
  p.gamma_c = r.nonnegative("prostate.gamma_c");
  p.D = r.nonnegative("prostate.D");
  p.gamma_p = r.nonnegative("prostate.gamma_p");
  p.alpha_h = r.nonnegative("prostate.alpha_h");
  p.alpha_c = r.nonnegative("prostate.alpha_c");
  p.m_of_sigma = parse_table(r, "prostate.m_sigma");
  p.u_drug = parse_schedule(r, "prostate.u_base", "prostate.u_schedule");
  p.B_phi = r.nonnegative("prostate.B_phi");
  c.prostate.diffusion_only = r.boolean("prostate.diffusion_only");
  if (c.prostate.diffusion_only) {
    p.M = p.S_h = p.S_c = p.s = p.gamma_h = p.gamma_c = p.gamma_p = p.alpha_h = p.alpha_c = 0.0;
  }
  if (pro) {
    try {
      p.validate();
    } catch (const std::exception& ex) {
      throw ConfigError("prostate", ex.what());
    }
  }
  ProstateInitialConstants& ic = c.prostate.initial;
  ic.a = r.positive("prostate.a");
  ic.b = r.positive("prostate.b");
  ic.c_sigma0 = r.real("prostate.c_sigma0");
  ic.c_sigma1 = r.real("prostate.c_sigma1");
  ic.c_p0 = r.real("prostate.c_p0");
  ic.c_p1 = r.real("prostate.c_p1");
  c.prostate.snapshot_times = r.reals("prostate.snapshot_times");
  for (double t : c.prostate.snapshot_times)
    if (t < 0.0) throw ConfigError("prostate.snapshot_times", "times must be >= 0");

  for (const auto& [key, value] : r.all()) c.echo.emplace_back(key, value);
  return c;
}

NonlinearModel RunConfig::allen_cahn_model() const { return allen_cahn(epsilon, B); }

Field RunConfig::initial_field() const {
  switch (initial) {
    case InitialKind::Zero:
      return Field(grid, 0.0);
    case InitialKind::Constant: {
      Field u(grid, initial_value);
      u.enforce_dirichlet();
      return u;
    }
    case InitialKind::Example:
    default:
      return ac_initial(grid);
  }
}

int RunConfig::steps() const {
  const double n = T / dt;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-9 * std::max(1.0, r))
    throw ConfigError("scheme.T", "must be a whole multiple of scheme.dt");
  return static_cast<int>(r);
}

}  // namespace sbdf::harness
