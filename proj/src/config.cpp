#include "shocklab/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "shocklab/error.hpp"

namespace shocklab {

namespace pt = boost::property_tree;

const std::vector<std::string>& runtime_check_names() {
  static const std::vector<std::string> names = {"contraction",   "dissipation",     "l1_unshifted",
                                                 "x_bound",       "xdot_cs_bound",   "sublinear_shift",
                                                 "max_principle", "conservation",  "tail_mass"};
  return names;
}

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"run", {"name"}},
      {"flux", {"a", "g", "kappa", "omega", "coeffs", "g2_bound", "transverse_coeffs"}},
      {"shock", {"u_minus", "u_plus"}},
      {"grid", {"L", "n_xi", "n", "n_t", "order"}},
      {"time", {"dt", "t_final", "diag_every", "c1", "c2"}},
      {"initial", {"family", "shape", "amplitude", "center", "width", "torus_center", "torus_width", "mollify",
                   "shift", "seed", "modes", "margin"}},
      {"profile", {"tol"}},
      {"output", {"snapshot_times", "write_profile"}},
      {"tolerances", {"tol_residual", "tail_tol", "linf_growth", "l1_rel"}},
      {"fit", {"t_min"}},
      {"checks", {"enabled"}},
  };
  return s;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::string source) : tree_(tree), source_(std::move(source)) {}

  bool has(const std::string& key) const { return tree_.get_child_optional(pt::ptree::path_type(key, '.')).has_value(); }

  std::string str(const std::string& key) const {
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) throw ConfigError(source_ + ": missing required key " + key);
    return trim(*v);
  }

  double num(const std::string& key) const {
    const std::string s = str(key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || !std::isfinite(v))
      throw ConfigError(source_ + ": " + key + " = '" + s + "' is not a finite number");
    return v;
  }
  double num(const std::string& key, double fallback) const { return has(key) ? num(key) : fallback; }

  std::int64_t integer(const std::string& key) const {
    const std::string s = str(key);
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0') throw ConfigError(source_ + ": " + key + " = '" + s + "' is not an integer");
    return v;
  }
  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string s = str(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(source_ + ": " + key + " = '" + s + "' is not a boolean");
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      char* end = nullptr;
      const double v = std::strtod(item.c_str(), &end);
      if (*end != '\0' || !std::isfinite(v)) throw ConfigError(source_ + ": bad list entry '" + item + "' in " + key);
      out.push_back(v);
    }
    return out;
  }

  std::vector<std::string> words(const std::string& key) const {
    std::vector<std::string> out;
    if (!has(key)) return out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(source_ + ": " + msg); }

 private:
  const pt::ptree& tree_;
  std::string source_;
};

}  // namespace

FluxSpec ExperimentConfig::flux() const {
  FluxSpec f;
  if (g_kind == "zero") {
    f = FluxSpec::burgers(a);
  } else if (g_kind == "sine") {
    f = FluxSpec::sine_perturbed(a, kappa, omega);
  } else {
    f.a = a;
    f.g = Perturbation::polynomial(g_coeffs);
  }
  if (g2_bound) f.g2_bound = *g2_bound;
  if (!transverse_coeffs.empty()) f.transverse = {Polynomial(transverse_coeffs)};
  return f;
}

Grid ExperimentConfig::grid() const { return Grid(half_width, n_xi, n_dims, n_t); }

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [section, body] : tree) {
    auto it = schema().find(section);
    if (it == schema().end()) throw ConfigError(source + ": unknown section [" + section + "]");
    if (body.empty() && !body.data().empty()) throw ConfigError(source + ": key '" + section + "' outside a section");
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw ConfigError(source + ": unknown key '" + key + "' in [" + section + "]");
  }

  Reader r(tree, source);
  ExperimentConfig c;
  if (r.has("run.name")) c.name = r.str("run.name");

  c.a = r.num("flux.a", c.a);
  if (r.has("flux.g")) c.g_kind = r.str("flux.g");
  if (c.g_kind != "zero" && c.g_kind != "sine" && c.g_kind != "poly")
    r.fail("flux.g must be zero, sine or poly, got '" + c.g_kind + "'");
  c.kappa = r.num("flux.kappa", c.kappa);
  c.omega = r.num("flux.omega", c.omega);
  c.g_coeffs = r.list("flux.coeffs");
  if (r.has("flux.g2_bound")) c.g2_bound = r.num("flux.g2_bound");
  if (c.g_kind == "poly" && !c.g2_bound) r.fail("flux.g = poly needs an explicit g2_bound");
  c.transverse_coeffs = r.list("flux.transverse_coeffs");

  c.u_minus = r.num("shock.u_minus");
  c.u_plus = r.num("shock.u_plus");

  c.half_width = r.num("grid.L");
  c.n_xi = static_cast<int>(r.integer("grid.n_xi"));
  c.n_dims = static_cast<int>(r.integer("grid.n", c.n_dims));
  c.n_t = static_cast<int>(r.integer("grid.n_t", c.n_t));
  if (r.has("grid.order")) {
    const std::string o = r.str("grid.order");
    if (o == "fourth" || o == "4")
      c.order = SpatialOrder::Fourth;
    else if (o == "second" || o == "2")
      c.order = SpatialOrder::Second;
    else
      r.fail("grid.order must be second or fourth");
  }
  if (!(c.half_width > 0.0)) r.fail("grid.L must be positive");
  if (c.n_xi < 5) r.fail("grid.n_xi must be at least 5");
  if (c.n_dims < 2) r.fail("grid.n must be at least 2");
  if (c.n_t < 1) r.fail("grid.n_t must be at least 1");

  if (r.has("time.dt")) {
    const std::string d = r.str("time.dt");
    if (d != "auto") {
      c.dt_auto = false;
      c.dt = r.num("time.dt");
      if (!(c.dt > 0.0)) r.fail("time.dt must be positive or 'auto'");
    }
  }
  c.t_final = r.num("time.t_final");
  if (!(c.t_final > 0.0)) r.fail("time.t_final must be positive");
  c.diag_every = r.integer("time.diag_every", c.diag_every);
  if (c.diag_every < 1) r.fail("time.diag_every must be at least 1");
  c.c_diffusion = r.num("time.c1", c.c_diffusion);
  c.c_advection = r.num("time.c2", c.c_advection);
  if (!(c.c_diffusion > 0.0 && c.c_diffusion <= 1.0) || !(c.c_advection > 0.0 && c.c_advection <= 1.0))
    r.fail("time.c1 and time.c2 must lie in (0, 1]");

  auto& d = c.initial;
  try {
    d.family = parse_family(r.str("initial.family"));
    if (r.has("initial.shape")) d.shape = parse_shape(r.str("initial.shape"));
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }
  d.amplitude = r.num("initial.amplitude", d.amplitude);
  d.center = r.num("initial.center", d.center);
  d.width_xi = r.num("initial.width", d.width_xi);
  d.torus_center = r.num("initial.torus_center", d.torus_center);
  d.width_t = r.num("initial.torus_width", d.width_t);
  d.mollify = r.num("initial.mollify", d.mollify);
  d.shift = r.num("initial.shift", d.shift);
  const auto seed = r.integer("initial.seed", static_cast<std::int64_t>(d.seed));
  if (seed < 0) r.fail("initial.seed must be nonnegative");
  d.seed = static_cast<std::uint64_t>(seed);
  d.modes = static_cast<int>(r.integer("initial.modes", d.modes));
  d.margin = r.num("initial.margin", d.margin);

  c.profile_tol = r.num("profile.tol", c.profile_tol);
  if (!(c.profile_tol > 0.0)) r.fail("profile.tol must be positive");

  c.snapshot_times = r.list("output.snapshot_times");
  c.write_profile = r.boolean("output.write_profile", c.write_profile);

  if (r.has("tolerances.tol_residual")) c.tol_residual = r.num("tolerances.tol_residual");
  c.tail_tol = r.num("tolerances.tail_tol", c.tail_tol);
  c.linf_growth_tol = r.num("tolerances.linf_growth", c.linf_growth_tol);
  c.l1_rel_tol = r.num("tolerances.l1_rel", c.l1_rel_tol);

  c.t_min = r.num("fit.t_min", c.t_min);

  c.checks = r.words("checks.enabled");
  for (const auto& name : c.checks)
    if (std::find(runtime_check_names().begin(), runtime_check_names().end(), name) == runtime_check_names().end())
      r.fail("unknown check '" + name + "' in [checks] enabled");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto c = parse_config(ss.str(), path.string());
  if (c.name == "run" && !path.stem().empty()) c.name = path.stem().string();
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  using nlohmann::json;
  json j;
  j["name"] = c.name;
  j["flux"] = {{"a", c.a},
               {"g", c.g_kind},
               {"kappa", c.kappa},
               {"omega", c.omega},
               {"coeffs", c.g_coeffs},
               {"g2_bound", c.flux().g2_bound},
               {"transverse_coeffs", c.transverse_coeffs}};
  j["shock"] = {{"u_minus", c.u_minus}, {"u_plus", c.u_plus}};
  j["grid"] = {{"L", c.half_width},
               {"n_xi", c.n_xi},
               {"n", c.n_dims},
               {"n_t", c.n_t},
               {"order", c.order == SpatialOrder::Fourth ? "fourth" : "second"}};
  j["time"] = {{"dt", c.dt_auto ? json("auto") : json(c.dt)},
               {"t_final", c.t_final},
               {"diag_every", c.diag_every},
               {"c1", c.c_diffusion},
               {"c2", c.c_advection}};
  const auto& d = c.initial;
  j["initial"] = {{"family", family_name(d.family)},
                  {"shape", shape_name(d.shape)},
                  {"amplitude", d.amplitude},
                  {"center", d.center},
                  {"width", d.width_xi},
                  {"torus_center", d.torus_center},
                  {"torus_width", d.width_t},
                  {"mollify", d.mollify},
                  {"shift", d.shift},
                  {"seed", d.seed},
                  {"modes", d.modes},
                  {"margin", d.margin}};
  j["profile"] = {{"tol", c.profile_tol}};
  j["output"] = {{"snapshot_times", c.snapshot_times}, {"write_profile", c.write_profile}};
  j["tolerances"] = {{"tol_residual", c.tol_residual ? json(*c.tol_residual) : json("auto")},
                     {"tail_tol", c.tail_tol},
                     {"linf_growth", c.linf_growth_tol},
                     {"l1_rel", c.l1_rel_tol}};
  j["fit"] = {{"t_min", c.t_min}};
  j["checks"] = {{"enabled", c.checks.empty() ? runtime_check_names() : c.checks}};
  return j;
}

}  // namespace shocklab
