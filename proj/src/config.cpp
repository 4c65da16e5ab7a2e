#include "ocfem/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ocfem/control.hpp"
#include "ocfem/errors.hpp"

namespace ocfem {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw ValidationError("");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config key " + key + " has a malformed number: " + s);
  }
}

int parse_int(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw ValidationError("");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config key " + key + " has a malformed integer: " + s);
  }
}

Side parse_side(const std::string& s) {
  if (s == "bottom") return Side::bottom;
  if (s == "right") return Side::right;
  if (s == "top") return Side::top;
  if (s == "left") return Side::left;
  throw ValidationError("unknown boundary side: " + s);
}

}  // namespace

void StudyConfig::validate() const {
  if (levels.empty()) throw ValidationError("mesh.levels must not be empty");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1) throw ValidationError("mesh.levels entries must be >= 1");
    if (i > 0 && levels[i] <= levels[i - 1])
      throw ValidationError("mesh.levels must be strictly increasing");
  }
  if (gamma1_sides.empty() || gamma1_sides.size() > 3)
    throw ValidationError("mesh.gamma1 must list between one and three sides");
  if (!(b > 0.0)) throw ValidationError("problem.b must be positive");
  if (!(m1 > 0.0) || !(m2 > 0.0)) throw ValidationError("problem.M1 and problem.M2 must be positive");
  if (zd_kind == "constant") {
    if (!std::isfinite(zd_value)) throw ValidationError("zd.value must be finite");
  } else if (zd_kind == "field") {
    builtin_field(zd_field);
  } else if (zd_kind != "zero_control_state") {
    throw ValidationError("zd.kind must be constant, field, or zero_control_state");
  }
  if (alphas.empty()) throw ValidationError("alpha.list must not be empty");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] >= 1.0)) throw ValidationError("alpha.list entries must be >= 1");
    if (i > 0 && alphas[i] <= alphas[i - 1])
      throw ValidationError("alpha.list must be strictly increasing");
  }
  if (n_ref < 4 * levels.back())
    throw ValidationError("reference.n must be at least 4 times the finest level");
  if (output_dir.empty()) throw ValidationError("output.dir must not be empty");
  if (alpha_n < 0) throw ValidationError("alpha.n must be positive");
  if (audit_alphas.empty()) throw ValidationError("audit.alpha must not be empty");
  for (double a : audit_alphas)
    if (!(a >= 1.0)) throw ValidationError("audit.alpha entries must be >= 1");
  if (audit_n < 1) throw ValidationError("audit.n must be >= 1");
  if (diagonal_count < 1) throw ValidationError("diagonal.count must be >= 1");
  if (!(fp_tol > 0.0)) throw ValidationError("fp.tol must be positive");
  if (fp_max_iter < 1) throw ValidationError("fp.max_iter must be >= 1");
}

StudyConfig default_config() {
  StudyConfig cfg;
  cfg.levels = {8, 16, 32};
  // three clamped sides keep the fixed-point iteration contractive at the
  // default penalties M1 = M2 = 1 for every alpha in the list
  cfg.gamma1_sides = {Side::bottom, Side::left, Side::right};
  cfg.b = 1.0;
  cfg.m1 = 1.0;
  cfg.m2 = 1.0;
  cfg.zd_kind = "field";
  cfg.zd_field = "xy";
  cfg.alphas = {1.0, 10.0, 100.0};
  cfg.n_ref = 128;
  cfg.output_dir = "out";
  return cfg;
}

StudyConfig parse_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(line_no) + " is not key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ValidationError("config line " + std::to_string(line_no) + " is not key = value");
    if (kv.count(key)) throw ValidationError("config key repeated: " + key);
    kv[key] = value;
  }

  for (const char* req : {"mesh.levels", "mesh.gamma1", "problem.b", "problem.M1", "problem.M2",
                          "zd.kind", "alpha.list", "reference.n", "output.dir"})
    if (!kv.count(req)) throw ValidationError(std::string("missing config key: ") + req);

  StudyConfig cfg;
  std::map<std::string, std::string> rest = kv;
  auto take = [&rest](const std::string& key) {
    std::string v = rest.at(key);
    rest.erase(key);
    return v;
  };

  cfg.levels.clear();
  for (const std::string& s : split_list(take("mesh.levels")))
    cfg.levels.push_back(parse_int("mesh.levels", s));
  for (const std::string& s : split_list(take("mesh.gamma1"))) cfg.gamma1_sides.insert(parse_side(s));
  cfg.b = parse_double("problem.b", take("problem.b"));
  cfg.m1 = parse_double("problem.M1", take("problem.M1"));
  cfg.m2 = parse_double("problem.M2", take("problem.M2"));
  cfg.zd_kind = take("zd.kind");
  if (cfg.zd_kind == "constant") {
    if (!rest.count("zd.value")) throw ValidationError("zd.kind = constant needs zd.value");
    cfg.zd_value = parse_double("zd.value", take("zd.value"));
  } else if (cfg.zd_kind == "field") {
    if (!rest.count("zd.field")) throw ValidationError("zd.kind = field needs zd.field");
    cfg.zd_field = take("zd.field");
  }
  cfg.alphas.clear();
  for (const std::string& s : split_list(take("alpha.list")))
    cfg.alphas.push_back(parse_double("alpha.list", s));
  cfg.n_ref = parse_int("reference.n", take("reference.n"));
  cfg.output_dir = take("output.dir");
  if (rest.count("alpha.n")) cfg.alpha_n = parse_int("alpha.n", take("alpha.n"));
  if (rest.count("audit.alpha")) {
    cfg.audit_alphas.clear();
    for (const std::string& s : split_list(take("audit.alpha")))
      cfg.audit_alphas.push_back(parse_double("audit.alpha", s));
  }
  if (rest.count("audit.n")) cfg.audit_n = parse_int("audit.n", take("audit.n"));
  if (rest.count("diagonal.count")) cfg.diagonal_count = parse_int("diagonal.count", take("diagonal.count"));
  if (rest.count("fp.tol")) cfg.fp_tol = parse_double("fp.tol", take("fp.tol"));
  if (rest.count("fp.max_iter")) cfg.fp_max_iter = parse_int("fp.max_iter", take("fp.max_iter"));
  if (!rest.empty()) throw ValidationError("unknown config key: " + rest.begin()->first);

  cfg.validate();
  return cfg;
}

StudyConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  return parse_config(in);
}

ScalarField builtin_field(const std::string& name) {
  if (name == "xy") return [](double x, double y) { return x * y; };
  if (name == "sinsin") {
    return [](double x, double y) {
      return std::sin(std::acos(-1.0) * x) * std::sin(std::acos(-1.0) * y);
    };
  }
  if (name == "gauss") {
    return [](double x, double y) {
      double dx = x - 0.5, dy = y - 0.5;
      return std::exp(-(dx * dx + dy * dy) / 0.08);
    };
  }
  throw ValidationError("unknown builtin field: " + name);
}

FeFunction make_zd(const StudyConfig& cfg, const Discretization& d) {
  if (cfg.zd_kind == "constant") return FeFunction::constant(d.mesh(), cfg.zd_value);
  if (cfg.zd_kind == "field") return interpolate(d.mesh(), builtin_field(cfg.zd_field));
  if (cfg.zd_kind == "zero_control_state") {
    ProblemSpec tmp{cfg.b, FeFunction::zero(d.mesh()), 1.0, 1.0, std::nullopt};
    FeFunction u = solve_state_dirichlet(d, tmp, zero_control(d, Variant::dirichlet));
    return FeFunction(d.mesh(), u.values());
  }
  throw ValidationError("zd.kind must be constant, field, or zero_control_state");
}

ProblemSpec make_spec(const StudyConfig& cfg, const Discretization& d) {
  ProblemSpec spec{cfg.b, make_zd(cfg, d), cfg.m1, cfg.m2, std::nullopt};
  spec.validate();
  return spec;
}

}  // namespace ocfem
