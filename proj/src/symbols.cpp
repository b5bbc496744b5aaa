#include "dws/symbols.hpp"

#include <cmath>

namespace dws {

double dispersion_speed(double k1) {
  if (!(k1 > 0)) throw DomainError("dispersion_speed needs k1 > 0");
  return std::sqrt(k1 + 1 / k1);
}

double symbol_f(double k1, double k3) {
  const double r = std::hypot(k1, k3);
  return r == 0 ? 0.0 : k1 * k1 / r;
}

double symbol_g(double k1, double k3) {
  const double r = std::hypot(k1, k3);
  if (r == 0) return 1.0;
  // 1 + r^2 - 2 k1^2/r = (r - 1)^2 + 2 k3^2/r, which keeps g >= 0 exactly
  return (r - 1) * (r - 1) + 2 * k3 * k3 / r;
}

double limit_symbol(double k1, double k3) { return 2 + k1 * k1 + 2 * k3 * k3; }

double full_dispersion_symbol(double k1, double k3, double eps) {
  const double s1 = 1 + eps * k1, s3 = eps * k3;
  return symbol_g(s1, s3) / (eps * eps) + 2 * symbol_f(s1, s3);
}

double symbol_K0(double k1, double k3) { return symbol_f(k1, k3); }

double symbol_L0(double k1, double k3) {
  const double r = std::hypot(k1, k3);
  return r == 0 ? 0.0 : k1 * k3 / r;
}

double symbol_M0(double k1, double k3) {
  const double r = std::hypot(k1, k3);
  return r == 0 ? 0.0 : k3 * k3 / r;
}

BandSpec BandSpec::carrier(double delta) { return BandSpec{delta, {{1.0, 0.0}, {-1.0, 0.0}}}; }
BandSpec BandSpec::plus(double delta) { return BandSpec{delta, {{1.0, 0.0}}}; }
BandSpec BandSpec::minus(double delta) { return BandSpec{delta, {{-1.0, 0.0}}}; }
BandSpec BandSpec::origin(double radius) { return BandSpec{radius, {{0.0, 0.0}}}; }

void BandSpec::validate() const {
  if (centers.empty()) throw DomainError("band needs at least one center");
  if (!(delta > 0)) throw DomainError("band radius must be positive");
  for (const auto& c : centers)
    if ((c[0] != 0 || c[1] != 0) && !(delta < 0.2)) throw DomainError("carrier band radius must lie in (0, 1/5)");
}

double cutoff(double k1, double k3, const BandSpec& band) {
  for (auto& c : band.centers) {
    const double a = k1 - c[0], b = k3 - c[1];
    if (a * a + b * b < band.delta * band.delta) return 1.0;
  }
  return 0.0;
}

RArray cutoff_table(const Grid2D& g, const BandSpec& band) {
  band.validate();
  return symbol_table(g, [&](double k1, double k3) { return cutoff(k1, k3, band); });
}

SpectralField band_project(const SpectralField& f, const BandSpec& band) {
  const Grid2D& g = f.grid();
  const RArray t = cutoff_table(g, band);
  // a single centred ball is not k -> -k symmetric, so realness is decided by apply_table
  return apply_table(f, t);
}

SpectralField band_complement(const SpectralField& f, const BandSpec& band) {
  const RArray t = 1.0 - cutoff_table(f.grid(), band);
  return apply_table(f, t);
}

SpectralField offband_inverse(const SpectralField& f, double delta) {
  const BandSpec band = BandSpec::carrier(delta);
  return apply_multiplier(f, [&](double k1, double k3) {
    if (cutoff(k1, k3, band) == 1.0) return 0.0;
    return 1.0 / symbol_g(k1, k3);
  });
}

Symbol symbol_by_name(const std::string& name) {
  if (name == "g") return symbol_g;
  if (name == "f") return symbol_f;
  if (name == "K0") return symbol_K0;
  if (name == "L0") return symbol_L0;
  if (name == "M0") return symbol_M0;
  if (name == "limit") return limit_symbol;
  throw DomainError("unknown symbol name: " + name);
}

SpectralField K0(const SpectralField& f) { return apply_multiplier(f, symbol_K0); }
SpectralField L0(const SpectralField& f) { return apply_multiplier(f, symbol_L0); }
SpectralField M0(const SpectralField& f) { return apply_multiplier(f, symbol_M0); }

}  // namespace dws
