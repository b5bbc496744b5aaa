#pragma once

#include <functional>

#include "dws/types.hpp"

namespace dws {

// A scalar field on a periodic Grid2D, holding both physical values and
// unnormalized DFT coefficients (numpy/FFTW convention: c = sum_j f_j e^{-2 pi i jm/n}).
// With the grid starting at -L, f(x) = (1/N) sum_m c_m e^{i k_m (x + L)}.
class SpectralField {
 public:
  SpectralField() = default;

  static SpectralField from_values(const Grid2D& g, CArray values, bool real);
  static SpectralField from_real(const Grid2D& g, const RArray& values);
  static SpectralField from_coeffs(const Grid2D& g, CArray coeffs, bool real);
  static SpectralField zero(const Grid2D& g, bool real = true);

  // sample f(x, z) at the grid points
  static SpectralField sample(const Grid2D& g, const std::function<double(double, double)>& f);
  static SpectralField sample_complex(const Grid2D& g, const std::function<cplx(double, double)>& f);

  const Grid2D& grid() const { return grid_; }
  const CArray& values() const { return values_; }
  const CArray& coeffs() const { return coeffs_; }
  bool is_real() const { return real_; }
  bool empty() const { return grid_.nx == 0; }

  RArray real_values() const { return values_.real(); }
  double sup_norm() const;
  cplx at(int iz, int ix) const { return values_(iz, ix); }

  SpectralField operator-() const;
  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);

 private:
  SpectralField(const Grid2D& g, CArray v, CArray c, bool real)
      : grid_(g), values_(std::move(v)), coeffs_(std::move(c)), real_(real) {}
  Grid2D grid_;
  CArray values_;
  CArray coeffs_;
  bool real_ = true;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);
SpectralField operator*(cplx s, const SpectralField& a);

// pointwise products (aliased; fine for band-limited data on a large enough grid)
SpectralField operator*(const SpectralField& a, const SpectralField& b);
SpectralField conj(const SpectralField& a);
SpectralField real_part(const SpectralField& a);

// Exact Galerkin triple product a*b*c: inputs lose their Nyquist modes, the
// product is formed on a 2x zero-padded grid and truncated back.
SpectralField padded_product(const SpectralField& a, const SpectralField& b, const SpectralField& c);
// |z|^2 z
SpectralField dealiased_cubic(const SpectralField& z);

// Fixed weight w on the 2x-padded grid, applied as v -> P(w v) or P(w conj v)
// with P the truncation back to the grid; matches padded_product exactly.
class PaddedWeight {
 public:
  PaddedWeight() = default;
  // w = a * b (products of grid fields, formed on the padded grid)
  PaddedWeight(const SpectralField& a, const SpectralField& b);
  SpectralField apply(const SpectralField& v, bool conjugate_v = false) const;

 private:
  Grid2D grid_;
  CArray w_;
  bool real_ = true;
};

using Symbol = std::function<double(double k1, double k3)>;
using ComplexSymbol = std::function<cplx(double k1, double k3)>;

// symbol sampled on the lattice, shape (nz, nx)
RArray symbol_table(const Grid2D& g, const Symbol& s);
SpectralField apply_multiplier(const SpectralField& f, const Symbol& s);
SpectralField apply_complex_multiplier(const SpectralField& f, const ComplexSymbol& s);
SpectralField apply_table(const SpectralField& f, const RArray& table);

// spectral derivatives; odd orders drop the Nyquist mode to stay real
SpectralField dx(const SpectralField& f);
SpectralField dz(const SpectralField& f);
SpectralField dxx(const SpectralField& f);
SpectralField dzz(const SpectralField& f);
SpectralField laplacian(const SpectralField& f);

// <f, g> = sum conj(f) g dA
cplx inner(const SpectralField& f, const SpectralField& g);
double real_inner(const SpectralField& f, const SpectralField& g);
double l2_norm(const SpectralField& f);
double sobolev_norm(const SpectralField& f, double s);
// (sum (1 + eps^-2((|k1|-1)^2 + k3^2)) |c|^2 dA)^{1/2}; spectrum must lie in B_delta(+-1, 0)
double scaled_norm(const SpectralField& f, double eps, double delta = 0.15);
// relative Hermitian-symmetry defect of the coefficients
double hermitian_defect(const SpectralField& f);
// fraction of spectral energy outside |k_i| < frac * k_nyquist,i
double tail_energy_fraction(const SpectralField& f, double frac);

enum class Axis { x, z };
enum class Parity {
  even_even,       // f(-x,z) = f(x,z) = f(x,-z)
  odd_x_even_z,    // f(-x,z) = -f(x,z), f(x,-z) = f(x,z)
  even_x_odd_z,
  conj_x_even_z,   // f(-x,z) = conj f(x,z), f(x,-z) = f(x,z)
};

SpectralField reflect(const SpectralField& f, Axis axis);
SpectralField symmetrize(const SpectralField& f, Parity p);
// max |f - symmetrize(f)| / max |f|
double symmetry_defect(const SpectralField& f, Parity p);

}  // namespace dws
