#pragma once

#include <array>
#include <vector>

#include "dws/field.hpp"

namespace dws {

// c(k1) = sqrt(k1 + 1/k1), the linear phase speed
double dispersion_speed(double k1);

// g(s) = 1 + |s|^2 - 2 s1^2/|s| with g(0) = 1; f(s) = s1^2/|s| with f(0) = 0
double symbol_g(double k1, double k3);
double symbol_f(double k1, double k3);
// 2 + k1^2 + 2 k3^2
double limit_symbol(double k1, double k3);
// eps^-2 g(e + eps k) + 2 f(e + eps k), e = (1, 0)
double full_dispersion_symbol(double k1, double k3, double eps);

// k1^2/|k|, k1 k3/|k|, k3^2/|k|, all zero at k = 0
double symbol_K0(double k1, double k3);
double symbol_L0(double k1, double k3);
double symbol_M0(double k1, double k3);

struct BandSpec {
  double delta = 0.15;
  std::vector<std::array<double, 2>> centers;

  static BandSpec carrier(double delta);       // B = B_delta(1,0) u B_delta(-1,0)
  static BandSpec plus(double delta);          // B_delta(1,0)
  static BandSpec minus(double delta);         // B_delta(-1,0)
  static BandSpec origin(double radius);       // B_radius(0,0)
  void validate() const;
};

// sharp indicator of the union of open balls
double cutoff(double k1, double k3, const BandSpec& band);
RArray cutoff_table(const Grid2D& g, const BandSpec& band);
SpectralField band_project(const SpectralField& f, const BandSpec& band);
SpectralField band_complement(const SpectralField& f, const BandSpec& band);

// F^-1[(1 - chi)/g F[f]] with the quotient set to 0 where chi = 1
SpectralField offband_inverse(const SpectralField& f, double delta = 0.15);

// symbol names used by config files: g, f, K0, L0, M0, limit
Symbol symbol_by_name(const std::string& name);

SpectralField K0(const SpectralField& f);
SpectralField L0(const SpectralField& f);
SpectralField M0(const SpectralField& f);

}  // namespace dws
