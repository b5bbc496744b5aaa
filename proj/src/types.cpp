#include <algorithm>
#include <cmath>
#include <numbers>

#include "dws/types.hpp"

namespace dws {

Grid2D::Grid2D(int nx_, int nz_, double Lx_, double Lz_) : nx(nx_), nz(nz_), Lx(Lx_), Lz(Lz_) {
  auto pow2 = [](int n) { return n >= 2 && (n & (n - 1)) == 0; };
  if (!pow2(nx) || !pow2(nz)) throw DomainError("grid sizes must be powers of two >= 2");
  if (!(Lx > 0) || !(Lz > 0)) throw DomainError("box half-lengths must be positive");
}

double Grid2D::dk1() const { return std::numbers::pi / Lx; }
double Grid2D::dk3() const { return std::numbers::pi / Lz; }

WaveParams::WaveParams(double eps, double delta_, double theta_)
    : epsilon(eps), delta(delta_), theta(theta_) {
  validate();
}

double WaveParams::c() const { return std::sqrt(c2()); }

void WaveParams::validate() const {
  if (!(epsilon > 0) || !(epsilon < 1)) throw DomainError("epsilon must lie in (0, 1)");
  if (!(delta > 0) || !(delta < 0.2)) throw DomainError("delta must lie in (0, 1/5)");
  if (!(theta > 0) || !(theta < 1)) throw DomainError("theta must lie in (0, 1)");
  if (!(R1 > 0) || !(R3 > 0)) throw DomainError("ball radii must be positive");
}

void SolverReport::set(const std::string& key, double v) {
  for (auto& [k, x] : values)
    if (k == key) {
      x = v;
      return;
    }
  values.emplace_back(key, v);
}

double SolverReport::get(const std::string& key, double fallback) const {
  for (auto& [k, x] : values)
    if (k == key) return x;
  return fallback;
}

double SolverReport::max_contraction() const {
  double m = 0;
  for (double c : contraction) m = std::max(m, c);
  return m;
}

}  // namespace dws
