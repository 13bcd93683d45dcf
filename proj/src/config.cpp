#include "tac/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace tac {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw ConfigError("config: key '" + key + "': not a number: '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw ConfigError("config: key '" + key + "': not an integer: '" + v + "'");
  }
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  if (out.empty()) throw ConfigError("config: key '" + key + "': empty list");
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config: line " + std::to_string(lineno) + ": empty key or value");
    if (!kv.emplace(key, val).second)
      throw ConfigError("config: duplicate key '" + key + "'");
  }

  auto take = [&kv](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    return &it->second;
  };
  auto num = [&](const std::string& key, double& slot) {
    if (const auto* v = take(key)) slot = to_double(key, *v);
  };
  auto integer = [&](const std::string& key, int& slot) {
    if (const auto* v = take(key)) slot = static_cast<int>(to_int(key, *v));
  };

  integer("mesh.n", c.mesh_n);
  num("time.dt", c.dt);
  num("time.T", c.T);
  if (const auto* v = take("reg.eps")) c.eps_list = to_list("reg.eps", *v);
  num("reg.root_tol", c.root_tol);
  integer("reg.quad_points", c.quad_points);
  num("material.E", c.E);
  num("material.nu", c.nu);
  num("material.E_v", c.E_v);
  num("material.nu_v", c.nu_v);
  num("material.c1", c.c1);
  num("material.w_s", c.w_s);
  num("material.lambda_c", c.lambda_c);
  num("material.k0", c.k0);
  num("material.kernel_rho", c.kernel_rho);
  if (const auto* v = take("scenario.preset")) c.preset = *v;
  num("scenario.amp_f", c.amp_f);
  num("scenario.amp_g", c.amp_g);
  num("scenario.amp_h", c.amp_h);
  num("scenario.ramp_f", c.ramp_f);
  num("scenario.ramp_g", c.ramp_g);
  num("scenario.theta0", c.theta0);
  num("scenario.theta_s0", c.theta_s0);
  num("scenario.chi0", c.chi0);
  if (const auto* v = take("output.dir")) c.output_dir = *v;
  integer("output.stride", c.stride);
  num("tol.outer", c.tols.outer);
  num("tol.mom", c.tols.mom);
  num("tol.chi", c.tols.chi);
  num("tol.theta", c.tols.theta);
  num("tol.proj", c.tols.proj);
  num("tol.slip", c.tols.slip_tol);
  num("tol.omega", c.tols.omega);
  integer("tol.max_outer", c.tols.max_outer);
  num("tol.energy_slack", c.energy_slack);
  num("tol.dissip", c.dissip_tol);
  if (const auto* v = take("rng.seed")) c.seed = static_cast<unsigned long long>(to_int("rng.seed", *v));

  static const char* known[] = {
      "mesh.n", "time.dt", "time.T", "reg.eps", "reg.root_tol", "reg.quad_points",
      "material.E", "material.nu", "material.E_v", "material.nu_v", "material.c1",
      "material.w_s", "material.lambda_c", "material.k0", "material.kernel_rho",
      "scenario.preset", "scenario.amp_f", "scenario.amp_g", "scenario.amp_h",
      "scenario.ramp_f", "scenario.ramp_g", "scenario.theta0", "scenario.theta_s0",
      "scenario.chi0", "output.dir", "output.stride", "tol.outer", "tol.mom", "tol.chi",
      "tol.theta", "tol.proj", "tol.slip", "tol.omega", "tol.max_outer", "tol.energy_slack",
      "tol.dissip", "rng.seed"};
  for (const auto& [key, val] : kv) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&key](const char* k) { return key == k; }) == std::end(known))
      throw ConfigError("config: unknown key '" + key + "'");
  }

  // re-validate every invariant the domain types require
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
  };
  require(c.mesh_n >= 2, "mesh.n must be >= 2");
  require(c.dt > 0.0, "time.dt must be > 0");
  require(c.T > 0.0, "time.T must be > 0");
  for (double e : c.eps_list) require(e > 0.0, "reg.eps entries must be > 0");
  require(c.root_tol > 0.0, "reg.root_tol must be > 0");
  require(c.quad_points >= 8, "reg.quad_points must be >= 8");
  require(c.E > 0.0 && c.E_v > 0.0, "material moduli must be > 0");
  require(c.nu > -1.0 && c.nu < 0.5 && c.nu_v > -1.0 && c.nu_v < 0.5,
          "Poisson ratios must lie in (-1, 0.5)");
  require(c.c1 > 0.0, "material.c1 must be > 0 (friction coefficient lower bound)");
  require(c.w_s >= 0.0, "material.w_s must be >= 0");
  require(c.k0 >= 0.0, "material.k0 must be >= 0");
  require(c.kernel_rho > 0.0, "material.kernel_rho must be > 0");
  require(c.theta0 > 0.0 && c.theta_s0 > 0.0, "initial temperatures must be > 0");
  require(c.chi0 >= 0.0 && c.chi0 <= 1.0, "scenario.chi0 must lie in [0,1]");
  require(c.stride >= 1, "output.stride must be >= 1");
  require(c.tols.outer > 0.0 && c.tols.mom > 0.0 && c.tols.chi > 0.0 && c.tols.theta > 0.0 &&
              c.tols.proj > 0.0,
          "tolerances must be > 0");
  require(c.tols.omega > 0.0 && c.tols.omega <= 1.0, "tol.omega must lie in (0,1]");
  require(c.tols.max_outer >= 1, "tol.max_outer must be >= 1");
  require(c.energy_slack > 0.0 && c.dissip_tol > 0.0, "diagnostic slacks must be > 0");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

MaterialModel RunConfig::material() const {
  MaterialModel m = MaterialModel::defaults(E, nu, E_v, nu_v);
  m.c1 = c1;
  m.w_s = w_s;
  m.lambda_c = lambda_c;
  m.k0 = k0;
  m.kernel_rho = kernel_rho;
  const double cc1 = c1, ws = w_s, lam = lambda_c, kk0 = k0;
  m.fric_coeff = [cc1](double x) { return default_friction_coeff(x, cc1); };
  m.fric_coeff_deriv = [](double x) { return std::atan(x); };
  m.heat_exchange = [kk0](double x) { return kk0 * std::max(x, 0.0); };
  m.latent = [lam](double x) { return lam * x; };
  m.latent_deriv = [lam](double) { return lam; };
  m.cohesion = [ws](double x) { return default_cohesion_sigma(x, ws); };
  m.cohesion_deriv = [ws](double) { return -ws; };
  return m;
}

Scenario RunConfig::scenario() const {
  PresetParams p;
  p.amp_f = amp_f;
  p.amp_g = amp_g;
  p.amp_h = amp_h;
  p.ramp_f = ramp_f;
  p.ramp_g = ramp_g;
  p.theta0 = theta0;
  p.theta_s0 = theta_s0;
  p.chi0 = chi0;
  p.T_final = T;
  p.dt = dt;
  return make_preset(preset, p);
}

RegularizationParams RunConfig::reg(double eps) const {
  RegularizationParams r;
  r.eps = eps;
  r.root_tol = root_tol;
  r.quad_points = quad_points;
  r.validate();
  return r;
}

}  // namespace tac
