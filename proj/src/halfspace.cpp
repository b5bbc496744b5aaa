#include "dws/halfspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dws {

namespace {

constexpr int P8 = YGrid::order;

// monomial coefficients of the Lagrange basis through `nodes`
YGrid::Coef lagrange_monomials(const std::array<double, P8>& nodes) {
  YGrid::Coef c{};
  for (int m = 0; m < P8; ++m) {
    std::array<double, P8> poly{};
    poly[0] = 1;
    int deg = 0;
    double denom = 1;
    for (int j = 0; j < P8; ++j) {
      if (j == m) continue;
      // poly *= (t - nodes[j])
      for (int n = deg + 1; n >= 1; --n) poly[n] = poly[n - 1] - nodes[j] * poly[n];
      poly[0] = -nodes[j] * poly[0];
      ++deg;
      denom *= nodes[m] - nodes[j];
    }
    for (int n = 0; n < P8; ++n) c[m][n] = poly[n] / denom;
  }
  return c;
}

// multiplicity of a half-spectrum column in the full spectrum
inline double column_weight(int ix, int nx) { return (ix == 0 || ix == nx / 2) ? 1.0 : 2.0; }

int mirror(int i, int n) { return (n - i) % n; }

}  // namespace

void DnoConfig::validate() const {
  if (Ymax < 0) throw DomainError("Ymax must be positive (or 0 for automatic)");
  if (ny < 16) throw DomainError("ny must be at least 16");
  if (!(picard_tol > 0)) throw DomainError("picard_tol must be positive");
  if (picard_max < 1) throw DomainError("picard_max must be at least 1");
  if (!(surface_spacing > 0)) throw DomainError("surface_spacing must be positive");
}

double DnoConfig::depth_for(const Grid2D& g) const {
  if (Ymax > 0) return Ymax;
  return 23.0 / std::min(g.dk1(), g.dk3());
}

std::shared_ptr<const YGrid> YGrid::geometric(double Ymax, int ny, double h0) {
  if (ny < P8) throw DomainError("y-grid needs at least 8 nodes");
  auto yg = std::make_shared<YGrid>();
  const int n = ny - 1;
  double r = 1;
  if (n * h0 < Ymax) {
    auto span = [&](double q) { return h0 * (std::pow(q, n) - 1) / (q - 1); };
    double lo = 1 + 1e-12, hi = 2;
    while (span(hi) < Ymax) hi *= 2;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (span(mid) < Ymax ? lo : hi) = mid;
    }
    r = 0.5 * (lo + hi);
  }
  yg->ratio = r;
  yg->y.resize(ny);
  yg->y[0] = 0;
  if (r == 1) {
    for (int j = 1; j < ny; ++j) yg->y[j] = -Ymax * j / n;
  } else {
    for (int j = 1; j < ny; ++j) yg->y[j] = -h0 * (std::pow(r, j) - 1) / (r - 1);
  }
  yg->y[n] = -Ymax;
  yg->h.resize(n);
  for (int i = 0; i < n; ++i) yg->h[i] = yg->y[i] - yg->y[i + 1];
  yg->first.resize(n);
  yg->down.resize(n);
  yg->up.resize(n);
  for (int i = 0; i < n; ++i) {
    const int f = std::clamp(i - 3, 0, ny - P8);
    yg->first[i] = f;
    std::array<double, P8> t{}, s{};
    for (int m = 0; m < P8; ++m) {
      t[m] = (yg->y[f + m] - yg->y[i + 1]) / yg->h[i];
      s[m] = 1 - t[m];
    }
    yg->down[i] = lagrange_monomials(t);
    yg->up[i] = lagrange_monomials(s);
  }
  yg->weight.assign(ny, 0.0);
  for (int i = 0; i < n; ++i) {
    yg->weight[i] += 0.5 * yg->h[i];
    yg->weight[i + 1] += 0.5 * yg->h[i];
  }
  return yg;
}

void exp_moments(double x, double* phi, double& emx) {
  emx = std::exp(-x);
  if (x < 2) {
    // e^{-x} sum_j x^j / (j! (n + j + 1)), all terms positive
    double acc[P8] = {};
    double term = 1;
    for (int j = 0; j < 40; ++j) {
      for (int n = 0; n < P8; ++n) acc[n] += term / (n + j + 1);
      term *= x / (j + 1);
      if (term < 1e-18) break;
    }
    for (int n = 0; n < P8; ++n) phi[n] = emx * acc[n];
    return;
  }
  phi[0] = -std::expm1(-x) / x;
  for (int n = 1; n < P8; ++n) phi[n] = (1 - n * phi[n - 1]) / x;
}

HalfSpaceField::HalfSpaceField(const Grid2D& g, std::shared_ptr<const YGrid> yg) : grid(g), ygrid(std::move(yg)) {
  u.assign(ny(), CArray::Zero(g.nz, nxh()));
  uy.assign(ny(), CArray::Zero(g.nz, nxh()));
}

CArray to_half(const SpectralField& f) {
  if (!f.is_real()) throw DomainError("half-spectrum storage needs a real field");
  return f.coeffs().leftCols(f.grid().nx / 2 + 1);
}

SpectralField from_half(const Grid2D& g, const CArray& half) {
  CArray c(g.nz, g.nx);
  const int nxh = g.nx / 2 + 1;
  for (int iz = 0; iz < g.nz; ++iz)
    for (int ix = 0; ix < g.nx; ++ix)
      c(iz, ix) = ix < nxh ? half(iz, ix) : std::conj(half(mirror(iz, g.nz), g.nx - ix));
  return SpectralField::from_coeffs(g, std::move(c), true);
}

SpectralField HalfSpaceField::layer(int j) const { return from_half(grid, u.at(j)); }
SpectralField HalfSpaceField::layer_dy(int j) const { return from_half(grid, uy.at(j)); }

double HalfSpaceField::layer_norm(int j) const {
  const CArray& a = u.at(j);
  double acc = 0;
  for (int iz = 0; iz < grid.nz; ++iz)
    for (int ix = 0; ix < nxh(); ++ix) acc += column_weight(ix, grid.nx) * std::norm(a(iz, ix));
  const double n = double(grid.size());
  return std::sqrt(acc * grid.area() / (n * n));
}

double HalfSpaceField::decay_ratio() const {
  const double top = layer_norm(0);
  return top > 0 ? layer_norm(ny() - 1) / top : 0.0;
}

double HalfSpaceField::star_norm() const {
  double acc = 0;
  for (int j = 0; j < ny(); ++j) {
    double layer = 0;
    for (int iz = 0; iz < grid.nz; ++iz) {
      const double k3 = grid.k3(iz);
      for (int ix = 0; ix < nxh(); ++ix) {
        const double k1 = grid.k1(ix) < 0 ? -grid.k1(ix) : grid.k1(ix);
        const double kk = k1 * k1 + k3 * k3;
        layer += column_weight(ix, grid.nx) * (1 + kk) * (1 + kk) * (kk * std::norm(u[j](iz, ix)) + std::norm(uy[j](iz, ix)));
      }
    }
    acc += ygrid->weight[j] * layer;
  }
  const double n = double(grid.size());
  return std::sqrt(acc * grid.area() / (n * n));
}

namespace detail {

void combine_sources(const Grid2D& g, const CArray& F1, const CArray& F2, const CArray& F3, CArray& P, CArray& Q) {
  const int nxh = g.nx / 2 + 1;
  for (int iz = 0; iz < g.nz; ++iz) {
    const double k3 = g.is_nyquist_z(iz) ? 0.0 : g.k3(iz);
    for (int ix = 0; ix < nxh; ++ix) {
      // the half spectrum stores ix = nx/2 as the (unsigned) Nyquist column
      const double k1 = g.is_nyquist_x(ix) ? 0.0 : g.k1(ix);
      const double kap = std::hypot(g.k1(ix), g.k3(iz));
      const cplx B = 0.5 * F2(iz, ix);
      cplx A = 0;
      if (kap > 0) A = cplx(0, -1) * (k1 * F1(iz, ix) + k3 * F3(iz, ix)) / (2 * kap);
      P(iz, ix) = A + B;
      Q(iz, ix) = A - B;
    }
  }
}

void integrate_sources(const Grid2D& g, const YGrid& yg, std::vector<CArray>& P, const std::vector<CArray>& Q,
                       const CArray* xi_half, std::vector<CArray>& D) {
  const int ny = yg.size(), nz = g.nz, nxh = g.nx / 2 + 1;
  const long nm = long(nz) * nxh;
  std::vector<double> kap(nm), k1v(nm);
  for (int iz = 0; iz < nz; ++iz)
    for (int ix = 0; ix < nxh; ++ix) {
      kap[iz * nxh + ix] = std::hypot(g.k1(ix), g.k3(iz));
      k1v[iz * nxh + ix] = g.is_nyquist_x(ix) ? 0.0 : g.k1(ix);
    }
  D.resize(ny);
  for (auto& d : D)
    if (d.rows() != nz || d.cols() != nxh) d.resize(nz, nxh);

  double phi[P8], w[P8];
  // Down(y) = int_{-inf}^{y} (A + B) e^{-|k|(y - yt)} dyt, swept upward from the bottom
  D[ny - 1].setZero();
  for (int i = ny - 2; i >= 0; --i) {
    const double h = yg.h[i];
    const int f = yg.first[i];
    const auto& C = yg.down[i];
    cplx* out = D[i].data();
    const cplx* below = D[i + 1].data();
    const cplx* src[P8];
    for (int m = 0; m < P8; ++m) src[m] = P[f + m].data();
    for (long q = 0; q < nm; ++q) {
      double emx;
      exp_moments(kap[q] * h, phi, emx);
      cplx acc = emx * below[q];
      for (int m = 0; m < P8; ++m) {
        double s = 0;
        for (int n = 0; n < P8; ++n) s += C[m][n] * phi[n];
        acc += (h * s) * src[m][q];
      }
      out[q] = acc;
    }
  }

  // boundary data: Down(0) + (i k1/|k|) xi, carried down by e^{|k| y}
  std::vector<cplx> bterm(nm), up(nm, 0.0);
  std::vector<double> E(nm, 1.0);
  for (long q = 0; q < nm; ++q) {
    cplx b = D[0].data()[q];
    if (xi_half && kap[q] > 0) b += cplx(0, k1v[q] / kap[q]) * xi_half->data()[q];
    bterm[q] = b;
  }
  auto emit = [&](int j) {
    cplx* dj = D[j].data();
    cplx* pj = P[j].data();
    const cplx* qj = Q[j].data();
    for (long q = 0; q < nm; ++q) {
      const double k = kap[q];
      const cplx twoB = pj[q] - qj[q];
      if (k == 0) {
        dj[q] = 0;
        pj[q] = twoB;
        continue;
      }
      const cplx img = E[q] * bterm[q];
      const cplx down = dj[q];
      dj[q] = down + up[q] + img;
      pj[q] = twoB - k * down + k * up[q] + k * img;
    }
  };
  emit(0);
  // Up(y) = int_y^0 (A - B) e^{-|k|(yt - y)} dyt, swept downward from y = 0
  for (int i = 0; i < ny - 1; ++i) {
    const double h = yg.h[i];
    const int f = yg.first[i];
    const auto& C = yg.up[i];
    const cplx* src[P8];
    for (int m = 0; m < P8; ++m) src[m] = Q[f + m].data();
    for (long q = 0; q < nm; ++q) {
      double emx;
      exp_moments(kap[q] * h, phi, emx);
      cplx acc = emx * up[q];
      for (int m = 0; m < P8; ++m) {
        double s = 0;
        for (int n = 0; n < P8; ++n) s += C[m][n] * phi[n];
        w[m] = h * s;
        acc += w[m] * src[m][q];
      }
      up[q] = acc;
      E[q] *= emx;
    }
    emit(i + 1);
  }
}

}  // namespace detail

HalfSpaceField solve_S(const HalfSpaceField& F1, const HalfSpaceField& F2, const HalfSpaceField& F3,
                       const SpectralField& xi) {
  if (F1.grid != F2.grid || F1.grid != F3.grid || F1.grid != xi.grid())
    throw DomainError("solve_S: inputs on different grids");
  if (F1.ygrid != F2.ygrid || F1.ygrid != F3.ygrid) throw DomainError("solve_S: inputs on different y-grids");
  const Grid2D& g = F1.grid;
  const int ny = F1.ny();
  std::vector<CArray> P(ny, CArray(g.nz, g.nx / 2 + 1)), Q = P, D;
  for (int j = 0; j < ny; ++j) detail::combine_sources(g, F1.u[j], F2.u[j], F3.u[j], P[j], Q[j]);
  CArray xh = to_half(xi);
  xh(0, 0) = 0;  // gauge: xi is taken mean-zero
  detail::integrate_sources(g, *F1.ygrid, P, Q, &xh, D);
  HalfSpaceField out(g, F1.ygrid);
  out.u = std::move(D);
  out.uy = std::move(P);
  const double dr = out.decay_ratio();
  if (dr > 1e-8) {
    std::ostringstream os;
    os << "solve_S: layer norm at y = -Ymax is " << dr << " of the top layer; increase Ymax beyond "
       << F1.ygrid->depth() * std::log(1e-10) / std::log(std::max(dr, 1e-300));
    throw SolverError(os.str());
  }
  return out;
}

}  // namespace dws
