#include "dws/field.hpp"

#include <cmath>
#include <sstream>

#include "dws/fft.hpp"

namespace dws {

namespace {

void require_same_grid(const SpectralField& a, const SpectralField& b) {
  if (a.grid() != b.grid()) throw DomainError("fields live on different grids");
}

int mirror(int i, int n) { return (n - i) % n; }

}  // namespace

SpectralField SpectralField::from_values(const Grid2D& g, CArray values, bool real) {
  if (values.rows() != g.nz || values.cols() != g.nx) throw DomainError("value array shape does not match grid");
  if (real) values = values.real().cast<cplx>();
  CArray c = fft::forward(values);
  return SpectralField(g, std::move(values), std::move(c), real);
}

SpectralField SpectralField::from_real(const Grid2D& g, const RArray& values) {
  return from_values(g, values.cast<cplx>(), true);
}

SpectralField SpectralField::from_coeffs(const Grid2D& g, CArray coeffs, bool real) {
  if (coeffs.rows() != g.nz || coeffs.cols() != g.nx) throw DomainError("coefficient array shape does not match grid");
  CArray v = fft::inverse(coeffs);
  if (real) return from_values(g, std::move(v), true);
  return SpectralField(g, std::move(v), std::move(coeffs), false);
}

SpectralField SpectralField::zero(const Grid2D& g, bool real) {
  return SpectralField(g, CArray::Zero(g.nz, g.nx), CArray::Zero(g.nz, g.nx), real);
}

SpectralField SpectralField::sample(const Grid2D& g, const std::function<double(double, double)>& f) {
  RArray v(g.nz, g.nx);
  for (int iz = 0; iz < g.nz; ++iz)
    for (int ix = 0; ix < g.nx; ++ix) v(iz, ix) = f(g.x(ix), g.z(iz));
  return from_real(g, v);
}

SpectralField SpectralField::sample_complex(const Grid2D& g, const std::function<cplx(double, double)>& f) {
  CArray v(g.nz, g.nx);
  for (int iz = 0; iz < g.nz; ++iz)
    for (int ix = 0; ix < g.nx; ++ix) v(iz, ix) = f(g.x(ix), g.z(iz));
  return from_values(g, std::move(v), false);
}

double SpectralField::sup_norm() const { return values_.size() ? values_.abs().maxCoeff() : 0.0; }

SpectralField SpectralField::operator-() const { return SpectralField(grid_, -values_, -coeffs_, real_); }

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(*this, o);
  values_ += o.values_;
  coeffs_ += o.coeffs_;
  real_ = real_ && o.real_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(*this, o);
  values_ -= o.values_;
  coeffs_ -= o.coeffs_;
  real_ = real_ && o.real_;
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  values_ *= s;
  coeffs_ *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

SpectralField operator*(cplx s, const SpectralField& a) {
  if (s.imag() == 0) return s.real() * a;
  return SpectralField::from_coeffs(a.grid(), a.coeffs() * s, false);
}

SpectralField operator*(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a, b);
  return SpectralField::from_values(a.grid(), a.values() * b.values(), a.is_real() && b.is_real());
}

SpectralField conj(const SpectralField& a) {
  if (a.is_real()) return a;
  return SpectralField::from_values(a.grid(), a.values().conjugate(), false);
}

SpectralField real_part(const SpectralField& a) {
  return SpectralField::from_values(a.grid(), a.values().real().cast<cplx>(), true);
}

namespace {

// coefficients -> values of the same trigonometric polynomial on the 2x grid
CArray pad_values(const Grid2D& g, const CArray& src) {
  const int nx = g.nx, nz = g.nz;
  CArray p = CArray::Zero(2 * nz, 2 * nx);
  for (int iz = 0; iz < nz; ++iz) {
    if (iz == nz / 2) continue;
    const int jz = iz < nz / 2 ? iz : iz + nz;
    for (int ix = 0; ix < nx; ++ix) {
      if (ix == nx / 2) continue;
      const int jx = ix < nx / 2 ? ix : ix + nx;
      p(jz, jx) = src(iz, ix);
    }
  }
  return fft::inverse(p) * 4.0;
}

CArray truncate_coeffs(const Grid2D& g, const CArray& fine_values) {
  const int nx = g.nx, nz = g.nz;
  const CArray big = fft::forward(fine_values);
  CArray out = CArray::Zero(nz, nx);
  for (int iz = 0; iz < nz; ++iz) {
    if (iz == nz / 2) continue;
    const int jz = iz < nz / 2 ? iz : iz + nz;
    for (int ix = 0; ix < nx; ++ix) {
      if (ix == nx / 2) continue;
      const int jx = ix < nx / 2 ? ix : ix + nx;
      out(iz, ix) = big(jz, jx) * 0.25;
    }
  }
  return out;
}

}  // namespace

SpectralField padded_product(const SpectralField& a, const SpectralField& b, const SpectralField& c) {
  require_same_grid(a, b);
  require_same_grid(a, c);
  const Grid2D& g = a.grid();
  CArray prod = pad_values(g, a.coeffs()) * pad_values(g, b.coeffs()) * pad_values(g, c.coeffs());
  return SpectralField::from_coeffs(g, truncate_coeffs(g, prod), a.is_real() && b.is_real() && c.is_real());
}

PaddedWeight::PaddedWeight(const SpectralField& a, const SpectralField& b)
    : grid_(a.grid()), real_(a.is_real() && b.is_real()) {
  require_same_grid(a, b);
  w_ = pad_values(grid_, a.coeffs()) * pad_values(grid_, b.coeffs());
}

SpectralField PaddedWeight::apply(const SpectralField& v, bool conjugate_v) const {
  if (v.grid() != grid_) throw DomainError("PaddedWeight applied on a different grid");
  CArray pv = pad_values(grid_, v.coeffs());
  if (conjugate_v) pv = pv.conjugate();
  const bool real = v.is_real() && real_;
  return SpectralField::from_coeffs(grid_, truncate_coeffs(grid_, w_ * pv), real);
}

SpectralField dealiased_cubic(const SpectralField& z) { return padded_product(z, conj(z), z); }

RArray symbol_table(const Grid2D& g, const Symbol& s) {
  RArray t(g.nz, g.nx);
  for (int iz = 0; iz < g.nz; ++iz)
    for (int ix = 0; ix < g.nx; ++ix) {
      const double v = s(g.k1(ix), g.k3(iz));
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "non-finite symbol value at k = (" << g.k1(ix) << ", " << g.k3(iz) << ")";
        throw DomainError(os.str());
      }
      t(iz, ix) = v;
    }
  return t;
}

namespace {

bool table_is_even(const RArray& t) {
  const int nz = int(t.rows()), nx = int(t.cols());
  for (int iz = 0; iz < nz; ++iz)
    for (int ix = 0; ix < nx; ++ix)
      if (t(iz, ix) != t(mirror(iz, nz), mirror(ix, nx))) return false;
  return true;
}

// Symbols odd in one wavenumber (L0, k1 k3 / |k|) are not even on the Nyquist
// lines, where k and its mirror share the Nyquist component. Replace those
// entries by their even part, as the odd derivatives zero them. Returns false
// if the table is not even off the Nyquist lines.
bool even_up_to_nyquist(RArray& t) {
  const int nz = int(t.rows()), nx = int(t.cols());
  for (int iz = 0; iz < nz; ++iz)
    for (int ix = 0; ix < nx; ++ix) {
      const int mz = mirror(iz, nz), mx = mirror(ix, nx);
      if (t(iz, ix) == t(mz, mx)) continue;
      if (iz != nz / 2 && ix != nx / 2) return false;
    }
  for (int iz = 0; iz < nz; ++iz)
    for (int ix = 0; ix < nx; ++ix) {
      if (iz != nz / 2 && ix != nx / 2) continue;
      const int mz = mirror(iz, nz), mx = mirror(ix, nx);
      const double e = 0.5 * (t(iz, ix) + t(mz, mx));
      t(iz, ix) = t(mz, mx) = e;
    }
  return true;
}

}  // namespace

SpectralField apply_table(const SpectralField& f, const RArray& table) {
  if (!f.is_real() || table_is_even(table))
    return SpectralField::from_coeffs(f.grid(), f.coeffs() * table.cast<cplx>(), f.is_real());
  RArray t = table;
  const bool real = even_up_to_nyquist(t);
  return SpectralField::from_coeffs(f.grid(), f.coeffs() * (real ? t : table).cast<cplx>(), real);
}

SpectralField apply_multiplier(const SpectralField& f, const Symbol& s) {
  return apply_table(f, symbol_table(f.grid(), s));
}

SpectralField apply_complex_multiplier(const SpectralField& f, const ComplexSymbol& s) {
  const Grid2D& g = f.grid();
  CArray t(g.nz, g.nx);
  bool herm = true;
  for (int iz = 0; iz < g.nz; ++iz)
    for (int ix = 0; ix < g.nx; ++ix) {
      const cplx v = s(g.k1(ix), g.k3(iz));
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        std::ostringstream os;
        os << "non-finite symbol value at k = (" << g.k1(ix) << ", " << g.k3(iz) << ")";
        throw DomainError(os.str());
      }
      t(iz, ix) = v;
    }
  for (int iz = 0; iz < g.nz && herm; ++iz)
    for (int ix = 0; ix < g.nx; ++ix)
      if (t(iz, ix) != std::conj(t(mirror(iz, g.nz), mirror(ix, g.nx)))) {
        herm = false;
        break;
      }
  return SpectralField::from_coeffs(g, f.coeffs() * t, f.is_real() && herm);
}

namespace {

SpectralField derivative(const SpectralField& f, int ox, int oz) {
  const Grid2D& g = f.grid();
  CArray c = f.coeffs();
  for (int iz = 0; iz < g.nz; ++iz) {
    const cplx fz = std::pow(cplx(0, g.k3(iz)), oz);
    const bool kill_z = (oz % 2 == 1) && g.is_nyquist_z(iz);
    for (int ix = 0; ix < g.nx; ++ix) {
      const bool kill_x = (ox % 2 == 1) && g.is_nyquist_x(ix);
      if (kill_x || kill_z) {
        c(iz, ix) = 0;
        continue;
      }
      c(iz, ix) *= std::pow(cplx(0, g.k1(ix)), ox) * fz;
    }
  }
  return SpectralField::from_coeffs(g, std::move(c), f.is_real());
}

}  // namespace

SpectralField dx(const SpectralField& f) { return derivative(f, 1, 0); }
SpectralField dz(const SpectralField& f) { return derivative(f, 0, 1); }
SpectralField dxx(const SpectralField& f) { return derivative(f, 2, 0); }
SpectralField dzz(const SpectralField& f) { return derivative(f, 0, 2); }
SpectralField laplacian(const SpectralField& f) {
  return apply_multiplier(f, [](double k1, double k3) { return -(k1 * k1 + k3 * k3); });
}

cplx inner(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f, g);
  const Grid2D& gr = f.grid();
  return (f.values().conjugate() * g.values()).sum() * (gr.dx() * gr.dz());
}

double real_inner(const SpectralField& f, const SpectralField& g) { return inner(f, g).real(); }

double l2_norm(const SpectralField& f) { return sobolev_norm(f, 0); }

double sobolev_norm(const SpectralField& f, double s) {
  if (s < 0) throw DomainError("sobolev index must be non-negative");
  const Grid2D& g = f.grid();
  double acc = 0;
  for (int iz = 0; iz < g.nz; ++iz) {
    const double k3 = g.k3(iz);
    for (int ix = 0; ix < g.nx; ++ix) {
      const double k1 = g.k1(ix);
      const double w = s == 0 ? 1.0 : std::pow(1 + k1 * k1 + k3 * k3, s);
      acc += w * std::norm(f.coeffs()(iz, ix));
    }
  }
  const double n = double(g.size());
  return std::sqrt(acc * g.area() / (n * n));
}

double scaled_norm(const SpectralField& f, double eps, double delta) {
  if (!(eps > 0)) throw DomainError("scaled_norm needs eps > 0");
  const Grid2D& g = f.grid();
  double in = 0, out = 0;
  for (int iz = 0; iz < g.nz; ++iz) {
    const double k3 = g.k3(iz);
    for (int ix = 0; ix < g.nx; ++ix) {
      const double k1 = g.k1(ix);
      const double p = std::norm(f.coeffs()(iz, ix));
      const double r2 = (std::abs(k1) - 1) * (std::abs(k1) - 1) + k3 * k3;
      if (r2 < delta * delta)
        in += (1 + r2 / (eps * eps)) * p;
      else
        out += p;
    }
  }
  if (out > 1e-12 * (in + out) && out > 0) throw DomainError("scaled_norm: spectrum leaks outside the carrier band");
  const double n = double(g.size());
  return std::sqrt(in * g.area() / (n * n));
}

double hermitian_defect(const SpectralField& f) {
  const Grid2D& g = f.grid();
  const CArray& c = f.coeffs();
  double num = 0, den = 0;
  for (int iz = 0; iz < g.nz; ++iz)
    for (int ix = 0; ix < g.nx; ++ix) {
      num = std::max(num, std::abs(c(iz, ix) - std::conj(c(mirror(iz, g.nz), mirror(ix, g.nx)))));
      den = std::max(den, std::abs(c(iz, ix)));
    }
  return den > 0 ? num / den : 0.0;
}

double tail_energy_fraction(const SpectralField& f, double frac) {
  const Grid2D& g = f.grid();
  double tot = 0, tail = 0;
  for (int iz = 0; iz < g.nz; ++iz)
    for (int ix = 0; ix < g.nx; ++ix) {
      const double p = std::norm(f.coeffs()(iz, ix));
      tot += p;
      const bool inside = std::abs(Grid2D::signed_index(ix, g.nx)) < frac * g.nx / 2 &&
                          std::abs(Grid2D::signed_index(iz, g.nz)) < frac * g.nz / 2;
      if (!inside) tail += p;
    }
  return tot > 0 ? tail / tot : 0.0;
}

SpectralField reflect(const SpectralField& f, Axis axis) {
  const Grid2D& g = f.grid();
  CArray v(g.nz, g.nx);
  for (int iz = 0; iz < g.nz; ++iz)
    for (int ix = 0; ix < g.nx; ++ix)
      v(iz, ix) = axis == Axis::x ? f.values()(iz, mirror(ix, g.nx)) : f.values()(mirror(iz, g.nz), ix);
  return SpectralField::from_values(g, std::move(v), f.is_real());
}

SpectralField symmetrize(const SpectralField& f, Parity p) {
  const Grid2D& g = f.grid();
  const CArray& a = f.values();
  CArray v(g.nz, g.nx);
  for (int iz = 0; iz < g.nz; ++iz) {
    const int mz = mirror(iz, g.nz);
    for (int ix = 0; ix < g.nx; ++ix) {
      const int mx = mirror(ix, g.nx);
      const cplx f0 = a(iz, ix), fx = a(iz, mx), fz = a(mz, ix), fxz = a(mz, mx);
      switch (p) {
        case Parity::even_even: v(iz, ix) = 0.25 * (f0 + fx + fz + fxz); break;
        case Parity::odd_x_even_z: v(iz, ix) = 0.25 * (f0 - fx + fz - fxz); break;
        case Parity::even_x_odd_z: v(iz, ix) = 0.25 * (f0 + fx - fz - fxz); break;
        case Parity::conj_x_even_z:
          v(iz, ix) = 0.25 * (f0 + std::conj(fx) + fz + std::conj(fxz));
          break;
      }
    }
  }
  return SpectralField::from_values(g, std::move(v), f.is_real());
}

double symmetry_defect(const SpectralField& f, Parity p) {
  const double m = f.sup_norm();
  if (m == 0) return 0;
  return (f - symmetrize(f, p)).sup_norm() / m;
}

}  // namespace dws
