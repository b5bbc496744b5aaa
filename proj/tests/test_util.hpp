#pragma once

#include <random>

#include "dws/field.hpp"

namespace dws::testing {

// real field with random coefficients on |index| <= m in each direction, mean removed
inline SpectralField random_band_limited(const Grid2D& g, int mx, int mz, unsigned seed, bool mean_zero = true) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n01;
  CArray c = CArray::Zero(g.nz, g.nx);
  for (int jz = -mz; jz <= mz; ++jz)
    for (int jx = -mx; jx <= mx; ++jx) {
      const int iz = (jz + g.nz) % g.nz, ix = (jx + g.nx) % g.nx;
      c(iz, ix) = cplx(n01(rng), n01(rng));
    }
  if (mean_zero) c(0, 0) = 0;
  SpectralField f = SpectralField::from_coeffs(g, c, false);
  f = real_part(f);
  const double s = f.sup_norm();
  return (1.0 / s) * f;
}

inline double rel_diff(const SpectralField& a, const SpectralField& b) {
  const double d = (a - b).sup_norm();
  const double s = std::max(a.sup_norm(), b.sup_norm());
  return s > 0 ? d / s : d;
}

}  // namespace dws::testing

namespace dws::testing {

// Fourier-series amplitude of e^{i(m1 dk1 x + m3 dk3 z)} in f
inline cplx mode_amplitude(const SpectralField& f, int m1, int m3) {
  const Grid2D& g = f.grid();
  const int ix = (m1 + g.nx) % g.nx, iz = (m3 + g.nz) % g.nz;
  const double sign = ((m1 + m3) % 2 == 0) ? 1.0 : -1.0;
  return f.coeffs()(iz, ix) * sign / double(g.size());
}

// least-squares slope of log y against log x
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace dws::testing
