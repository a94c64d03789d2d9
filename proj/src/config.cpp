#include "hh/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

#include "hh/textio.hpp"

namespace hh::config {

std::vector<double> Range::points() const {
  std::vector<double> out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(lo);
    return out;
  }
  for (int i = 0; i < count; ++i)
    out.push_back(lo + (hi - lo) * static_cast<double>(i) / (count - 1));
  return out;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

double parse_number(const std::string& where, const std::string& v) {
  const std::string body = unquote(v);
  char* end = nullptr;
  double x = std::strtod(body.c_str(), &end);
  if (end == body.c_str() || *end != '\0')
    throw ConfigError(where + ": expected a number, got '" + v + "'");
  return x;
}

int parse_int(const std::string& where, const std::string& v) {
  double x = parse_number(where, v);
  int i = static_cast<int>(x);
  if (static_cast<double>(i) != x)
    throw ConfigError(where + ": expected an integer, got '" + v + "'");
  return i;
}

bool parse_bool(const std::string& where, const std::string& v) {
  std::string body = unquote(v);
  if (body == "true") return true;
  if (body == "false") return false;
  throw ConfigError(where + ": expected true or false, got '" + v + "'");
}

Range parse_range(const std::string& where, const std::string& v) {
  const std::string body = unquote(v);
  std::size_t c1 = body.find(':');
  std::size_t c2 = (c1 == std::string::npos) ? std::string::npos : body.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw ConfigError(where + ": expected lo:hi:count, got '" + v + "'");
  Range rg;
  rg.lo = parse_number(where, body.substr(0, c1));
  rg.hi = parse_number(where, body.substr(c1 + 1, c2 - c1 - 1));
  rg.count = parse_int(where, body.substr(c2 + 1));
  if (rg.count < 1) throw ConfigError(where + ": range count must be >= 1");
  if (rg.count > 1 && !(rg.hi > rg.lo))
    throw ConfigError(where + ": range needs hi > lo when count > 1");
  return rg;
}

void apply_key(RunConfig& cfg, const std::string& where, const std::string& key,
               const std::string& value) {
  if (key == "m") cfg.m = unquote(value);
  else if (key == "alpha") cfg.alpha = parse_number(where, value);
  else if (key == "theta") cfg.theta = parse_number(where, value);
  else if (key == "lambda") cfg.lambda = parse_number(where, value);
  else if (key == "r") cfg.r = parse_number(where, value);
  else if (key == "l") cfg.l = parse_number(where, value);
  else if (key == "l_range") cfg.l_range = parse_range(where, value);
  else if (key == "alpha_range") cfg.alpha_range = parse_range(where, value);
  else if (key == "out") cfg.out = unquote(value);
  else if (key == "allow_constant") cfg.allow_constant = parse_bool(where, value);
  else if (key == "quad.panels") cfg.quad_panels = parse_int(where, value);
  else if (key == "quad.points") cfg.quad_points = parse_int(where, value);
  else if (key == "grid.n") cfg.grid_n = parse_int(where, value);
  else if (key == "ode.u0") cfg.ode_u0 = parse_number(where, value);
  else if (key == "ode.v0") cfg.ode_v0 = parse_number(where, value);
  else if (key == "ode.t_end") cfg.ode_t_end = parse_number(where, value);
  else if (key == "ode.dt") cfg.ode_dt = parse_number(where, value);
  else if (key == "ode.transient_fraction")
    cfg.ode_transient_fraction = parse_number(where, value);
  else if (key == "ode.amp_threshold") cfg.ode_amp_threshold = parse_number(where, value);
  else if (key == "pde.u0") cfg.pde_u0 = parse_number(where, value);
  else if (key == "pde.v0") cfg.pde_v0 = parse_number(where, value);
  else if (key == "pde.mode") cfg.pde_mode = unquote(value);
  else if (key == "pde.dt") cfg.pde_dt = parse_number(where, value);
  else if (key == "pde.t_end") cfg.pde_t_end = parse_number(where, value);
  else if (key == "pde.snapshots") cfg.pde_snapshots = parse_int(where, value);
  else if (key == "hopf.bracket_lo") cfg.hopf_bracket_lo = parse_number(where, value);
  else if (key == "hopf.bracket_hi") cfg.hopf_bracket_hi = parse_number(where, value);
  else throw ConfigError(where + ": unknown key '" + key + "'");
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // strip comments outside quotes
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      else if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    std::string stripped = trim(line);
    if (stripped.empty()) continue;
    std::size_t eq = stripped.find('=');
    const std::string where = "line " + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    apply_key(cfg, where, key, value);
  }
  return cfg;
}

void RunConfig::apply_set(const std::string& kv) {
  std::size_t eq = kv.find('=');
  if (eq == std::string::npos)
    throw ConfigError("--set: expected key=value, got '" + kv + "'");
  std::string key = trim(kv.substr(0, eq));
  std::string value = trim(kv.substr(eq + 1));
  if (key.empty() || value.empty())
    throw ConfigError("--set: expected key=value, got '" + kv + "'");
  apply_key(*this, "--set " + key, key, value);
}

void RunConfig::validate() const {
  if (m.empty()) throw ConfigError("config: 'm' (profile expression) is required");
  if (!(alpha >= 0.0)) throw ConfigError("config: alpha must be >= 0");
  if (!(theta > 0.0)) throw ConfigError("config: theta must be > 0");
  if (!(lambda >= 0.0)) throw ConfigError("config: lambda must be >= 0");
  if (!(r > 0.0)) throw ConfigError("config: r must be > 0");
  if (l && !(*l > 0.0)) throw ConfigError("config: l must be > 0");
  if (quad_panels < 1 || quad_points < 1)
    throw ConfigError("config: quad.panels and quad.points must be >= 1");
  if (grid_n < 16) throw ConfigError("config: grid.n must be >= 16");
  if (pde_mode != "imex" && pde_mode != "explicit")
    throw ConfigError("config: pde.mode must be imex or explicit");
  if (!(ode_transient_fraction > 0.0 && ode_transient_fraction < 1.0))
    throw ConfigError("config: ode.transient_fraction must be in (0,1)");
  if (pde_snapshots < 1) throw ConfigError("config: pde.snapshots must be >= 1");
}

std::string RunConfig::canonical() const {
  std::ostringstream out;
  auto put = [&](const char* key, const std::string& v) { out << key << " = " << v << "\n"; };
  auto range_str = [](const std::optional<Range>& r) {
    if (!r) return std::string("unset");
    return fmt17(r->lo) + ":" + fmt17(r->hi) + ":" + std::to_string(r->count);
  };
  put("allow_constant", allow_constant ? "true" : "false");
  put("alpha", fmt17(alpha));
  put("alpha_range", range_str(alpha_range));
  put("grid.n", std::to_string(grid_n));
  put("hopf.bracket_hi", fmt17(hopf_bracket_hi));
  put("hopf.bracket_lo", fmt17(hopf_bracket_lo));
  put("l", l ? fmt17(*l) : "unset");
  put("l_range", range_str(l_range));
  put("lambda", fmt17(lambda));
  put("m", m);
  put("ode.amp_threshold", fmt17(ode_amp_threshold));
  put("ode.dt", fmt17(ode_dt));
  put("ode.t_end", fmt17(ode_t_end));
  put("ode.transient_fraction", fmt17(ode_transient_fraction));
  put("ode.u0", fmt17(ode_u0));
  put("ode.v0", fmt17(ode_v0));
  // "out" is deliberately not hashed: it affects file placement, not results
  put("pde.dt", fmt17(pde_dt));
  put("pde.mode", pde_mode);
  put("pde.snapshots", std::to_string(pde_snapshots));
  put("pde.t_end", fmt17(pde_t_end));
  put("pde.u0", fmt17(pde_u0));
  put("pde.v0", fmt17(pde_v0));
  put("quad.panels", std::to_string(quad_panels));
  put("quad.points", std::to_string(quad_points));
  put("r", fmt17(r));
  put("theta", fmt17(theta));
  return out.str();
}

std::string RunConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

}  // namespace hh::config
