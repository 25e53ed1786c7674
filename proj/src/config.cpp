#include <openbook/pipeline.hpp>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace openbook {

void RunConfig::validate() const {
  spec.validate();
  grid.validate();
  if (!(s_max > 0.0)) throw std::invalid_argument("config: s_max <= 0");
  if (!(solve_tol > 0.0)) throw std::invalid_argument("config: solve_tol <= 0");
  if (n_pages < 2) throw std::invalid_argument("config: foliation.pages < 2");
  if (n_points < 1) throw std::invalid_argument("config: foliation.points < 1");
  if (profile_grid < 100)
    throw std::invalid_argument("config: profile.grid < 100");
}

namespace {

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("config: bad number for " + key + ": " + v);
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("config: bad integer for " + key + ": " + v);
  return static_cast<int>(x);
}

// twist list: "lo:hi:count" entries separated by commas
std::vector<TwistBand> parse_twists(const std::string& v) {
  std::vector<TwistBand> bands;
  std::istringstream is(v);
  std::string item;
  while (std::getline(is, item, ',')) {
    TwistBand b;
    if (std::sscanf(item.c_str(), "%lf:%lf:%d", &b.r_lo, &b.r_hi, &b.count) != 3)
      throw std::invalid_argument("config: bad twist entry " + item);
    bands.push_back(b);
  }
  return bands;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string& s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
    };
    trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not key = value");
    std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    trim(key);
    trim(val);
    if (kv.count(key))
      throw std::invalid_argument("config: duplicate key " + key);
    kv[key] = val;
  }

  RunConfig cfg;
  auto take = [&kv](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) return std::string();
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  if (auto v = take("name"); !v.empty()) cfg.name = v;
  if (auto v = take("page.kind"); !v.empty()) {
    if (v == "disk") cfg.spec.page.kind = PageKind::disk;
    else if (v == "annulus") cfg.spec.page.kind = PageKind::annulus;
    else throw std::invalid_argument("config: page.kind must be disk|annulus");
  }
  if (auto v = take("page.radius"); !v.empty())
    cfg.spec.page.R1 = to_double("page.radius", v);
  if (auto v = take("page.r0"); !v.empty())
    cfg.spec.page.R0 = to_double("page.r0", v);
  if (auto v = take("page.r1"); !v.empty())
    cfg.spec.page.R1 = to_double("page.r1", v);
  if (auto v = take("monodromy.kind"); !v.empty()) {
    if (v == "identity") cfg.spec.monodromy.twists.clear();
    else if (v != "dehn_twist")
      throw std::invalid_argument(
          "config: monodromy.kind must be identity|dehn_twist");
  }
  if (auto v = take("monodromy.twists"); !v.empty())
    cfg.spec.monodromy.twists = parse_twists(v);
  if (auto v = take("profile.c"); !v.empty())
    cfg.spec.profile.c = to_double("profile.c", v);
  if (auto v = take("profile.kappa"); !v.empty())
    cfg.spec.profile.kappa = KappaSpec::parse(v);
  if (auto v = take("profile.delta"); !v.empty())
    cfg.spec.profile.delta = to_double("profile.delta", v);
  if (auto v = take("profile.delta_prime"); !v.empty())
    cfg.spec.profile.delta_prime = to_double("profile.delta_prime", v);
  if (auto v = take("profile.rho1"); !v.empty())
    cfg.spec.profile.rho1 = to_double("profile.rho1", v);
  if (auto v = take("profile.rho2"); !v.empty())
    cfg.spec.profile.rho2 = to_double("profile.rho2", v);
  if (auto v = take("profile.grid"); !v.empty())
    cfg.profile_grid = to_int("profile.grid", v);
  if (auto v = take("epsilon"); !v.empty())
    cfg.spec.epsilon = to_double("epsilon", v);
  if (auto v = take("tau.flat_width"); !v.empty())
    cfg.spec.tau_flat = to_double("tau.flat_width", v);
  if (auto v = take("grid.theta"); !v.empty())
    cfg.grid.n_theta = to_int("grid.theta", v);
  if (auto v = take("grid.rho"); !v.empty())
    cfg.grid.n_rho = to_int("grid.rho", v);
  if (auto v = take("grid.phi"); !v.empty())
    cfg.grid.n_phi = to_int("grid.phi", v);
  if (auto v = take("grid.page"); !v.empty())
    cfg.grid.n_page = to_int("grid.page", v);
  if (auto v = take("grid.fd_step"); !v.empty())
    cfg.grid.fd_step = to_double("grid.fd_step", v);
  if (auto v = take("solve.s_max"); !v.empty())
    cfg.s_max = to_double("solve.s_max", v);
  if (auto v = take("solve.tol"); !v.empty())
    cfg.solve_tol = to_double("solve.tol", v);
  if (auto v = take("foliation.pages"); !v.empty())
    cfg.n_pages = to_int("foliation.pages", v);
  if (auto v = take("foliation.points"); !v.empty())
    cfg.n_points = to_int("foliation.points", v);

  // the page collar width is the profile delta
  cfg.spec.page.delta = cfg.spec.profile.delta;

  if (!kv.empty()) {
    std::string unknown;
    for (const auto& [k, v] : kv) {
      if (!unknown.empty()) unknown += ", ";
      unknown += k;
    }
    throw std::invalid_argument("config: unknown keys: " + unknown);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace openbook
