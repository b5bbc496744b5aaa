#include "dws/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "dws/io.hpp"

namespace dws {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0;
  const std::string t = trim(v);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), x);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size() || !std::isfinite(x))
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  int x = 0;
  const std::string t = trim(v);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), x);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

int pow2_at_least(double n) {
  int p = 8;
  while (p < n) p *= 2;
  return p;
}

}  // namespace

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(to_double("eps", item));
  }
  if (out.empty()) throw ConfigError("eps: empty list");
  return out;
}

std::vector<Branch> parse_branches(const std::string& s) {
  const std::string t = trim(s);
  if (t == "both") return {Branch::plus, Branch::minus};
  try {
    return {parse_branch(t)};
  } catch (const DomainError&) {
    throw ConfigError("branch must be +, - or both, got '" + s + "'");
  }
}

void RunConfig::set(const std::string& key, const std::string& v) {
  if (key == "grid.nx") nx = to_int(key, v);
  else if (key == "grid.nz") nz = to_int(key, v);
  else if (key == "grid.Lx") Lx = to_double(key, v);
  else if (key == "grid.Lz") Lz = to_double(key, v);
  else if (key == "wave.eps") eps = parse_list(v);
  else if (key == "wave.delta") delta = to_double(key, v);
  else if (key == "wave.theta") theta = to_double(key, v);
  else if (key == "wave.branch") branches = parse_branches(v);
  else if (key == "solver.gs_tol") gs_tol = to_double(key, v);
  else if (key == "solver.fdnls_tol") fdnls_tol = to_double(key, v);
  else if (key == "solver.picard_tol") picard_tol = to_double(key, v);
  else if (key == "solver.picard_max") picard_max = to_int(key, v);
  else if (key == "solver.contraction_abort") contraction_abort = to_double(key, v);
  else if (key == "solver.cheap_dn") cheap_dn = to_bool(key, v);
  else if (key == "solver.remainder") remainder = to_bool(key, v);
  else if (key == "surface.nx") surface_nx = to_int(key, v);
  else if (key == "surface.nz") surface_nz = to_int(key, v);
  else if (key == "output.dir") out = trim(v);
  else if (key == "output.force") force = to_bool(key, v);
  else if (key == "output.threads") threads = to_int(key, v);
  else throw ConfigError("unknown setting '" + key + "'");
}

void RunConfig::validate() const {
  auto even_size = [](const char* k, int n) {
    if (n < 8 || n % 2) throw ConfigError(std::string(k) + " must be even and at least 8");
  };
  even_size("grid.nx", nx);
  even_size("grid.nz", nz);
  if (!(Lx > 0) || !(Lz > 0)) throw ConfigError("grid.Lx, grid.Lz must be positive");
  if (eps.empty()) throw ConfigError("wave.eps: empty list");
  for (double e : eps) {
    try {
      params(e).validate();
    } catch (const DomainError& err) {
      throw ConfigError(std::string("wave: ") + err.what());
    }
  }
  if (branches.empty()) throw ConfigError("wave.branch: no branch selected");
  if (!(gs_tol > 0) || !(fdnls_tol > 0) || !(picard_tol > 0)) throw ConfigError("tolerances must be positive");
  if (picard_max < 1) throw ConfigError("solver.picard_max must be at least 1");
  if (!(contraction_abort > 0)) throw ConfigError("solver.contraction_abort must be positive");
  if (surface_nx != 0) even_size("surface.nx", surface_nx);
  if (surface_nz != 0) even_size("surface.nz", surface_nz);
  if (out.empty()) throw ConfigError("output.dir must not be empty");
  if (threads < 1) throw ConfigError("output.threads must be at least 1");
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> m;
  m["grid.nx"] = std::to_string(nx);
  m["grid.nz"] = std::to_string(nz);
  m["grid.Lx"] = io::num(Lx);
  m["grid.Lz"] = io::num(Lz);
  std::string el;
  for (size_t i = 0; i < eps.size(); ++i) el += (i ? "," : "") + io::num(eps[i]);
  m["wave.eps"] = el;
  m["wave.delta"] = io::num(delta);
  m["wave.theta"] = io::num(theta);
  std::string br;
  for (size_t i = 0; i < branches.size(); ++i) br += (i ? "," : "") + std::string(branch_name(branches[i]));
  m["wave.branch"] = br;
  m["solver.gs_tol"] = io::num(gs_tol);
  m["solver.fdnls_tol"] = io::num(fdnls_tol);
  m["solver.picard_tol"] = io::num(picard_tol);
  m["solver.picard_max"] = std::to_string(picard_max);
  m["solver.contraction_abort"] = io::num(contraction_abort);
  m["solver.cheap_dn"] = cheap_dn ? "true" : "false";
  m["solver.remainder"] = remainder ? "true" : "false";
  m["surface.nx"] = std::to_string(surface_nx);
  m["surface.nz"] = std::to_string(surface_nz);
  std::string s;
  for (const auto& [k, v] : m) s += k + " = " + v + "\n";
  return s;
}

std::string RunConfig::hash() const { return io::hex64(io::fnv1a(canonical())); }

FdnlsConfig RunConfig::fdnls() const {
  FdnlsConfig c;
  c.delta = delta;
  return c;
}

ReductionConfig RunConfig::reduction() const {
  ReductionConfig c;
  c.picard_tol = picard_tol;
  c.picard_max = picard_max;
  c.contraction_abort = contraction_abort;
  c.cheap_dn = cheap_dn;
  return c;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line, section;
  int n = 0;
  while (std::getline(ss, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) throw ConfigError("line " + std::to_string(n) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(n) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(n) + ": empty key");
    if (section.empty()) throw ConfigError("line " + std::to_string(n) + ": setting outside a section");
    out[section + "." + key] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig load_config(const std::filesystem::path& p) {
  std::string text;
  try {
    text = io::read_file(p);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  RunConfig c;
  for (const auto& [k, v] : parse_config_text(text)) c.set(k, v);
  return c;
}

Grid2D commensurate_envelope(const Grid2D& g, double eps) {
  const double m = std::max(1.0, std::round(g.Lx / (eps * kPi)));
  return Grid2D(g.nx, g.nz, eps * kPi * m, g.Lz);
}

Grid2D surface_for_envelope(const Grid2D& env, double eps, int nx, int nz) {
  const double Lx = env.Lx / eps, Lz = env.Lz / eps;
  if (nx == 0) nx = pow2_at_least(16 * Lx / kPi);
  if (nz == 0) nz = pow2_at_least(2 * Lz / kPi);
  return Grid2D(nx, nz, Lx, Lz);
}

}  // namespace dws
