#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dws/fdnls.hpp"
#include "dws/reduction.hpp"

namespace dws {

struct ConfigError : DomainError {
  using DomainError::DomainError;
};

// Everything a run depends on. Text form (sections, key = value, # comments):
//
//   [grid]     nx nz Lx Lz          envelope grid for the ground state and FDNLS
//   [wave]     eps (list) delta theta branch (+, -, both)
//   [solver]   gs_tol fdnls_tol picard_tol picard_max contraction_abort cheap_dn remainder
//   [surface]  nx nz                0 picks the smallest power of two that resolves the carrier
//   [output]   dir force threads
struct RunConfig {
  std::string command;
  int nx = 128, nz = 128;
  double Lx = 12, Lz = 12;
  std::vector<double> eps{0.1, 0.05, 0.025};
  std::vector<Branch> branches{Branch::plus, Branch::minus};
  double delta = 0.15;
  double theta = 5.0 / 6.0;
  double gs_tol = 1e-10;
  double fdnls_tol = 1e-9;
  double picard_tol = 1e-10;
  int picard_max = 40;
  double contraction_abort = 0.5;
  bool cheap_dn = false;
  bool remainder = false;
  int surface_nx = 0, surface_nz = 0;
  std::string out = "dws_out";
  bool force = false;
  int threads = 1;

  void set(const std::string& key, const std::string& value);  // key is "section.name"
  void validate() const;                                        // ConfigError
  // sorted "key = value" lines of every setting except the command and output handling
  std::string canonical() const;
  std::string hash() const;

  Grid2D grid() const { return Grid2D(nx, nz, Lx, Lz); }
  WaveParams params(double e) const { return WaveParams(e, delta, theta); }
  FdnlsConfig fdnls() const;
  ReductionConfig reduction() const;
};

// "section.key" -> raw value; ConfigError with the line number on malformed input
std::map<std::string, std::string> parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& p);

std::vector<double> parse_list(const std::string& s);
std::vector<Branch> parse_branches(const std::string& s);

// envelope box for eps: Lx adjusted to eps pi round(Lx / (eps pi)) so the surface box
// Lx / eps carries k1 = 1 as a lattice mode; Lz unchanged
Grid2D commensurate_envelope(const Grid2D& g, double eps);
// surface grid (Lx / eps, Lz / eps) with nx, nz given or chosen to resolve |k1| <= 8, |k3| <= 1
Grid2D surface_for_envelope(const Grid2D& env, double eps, int nx = 0, int nz = 0);

}  // namespace dws
