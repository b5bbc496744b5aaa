#pragma once

#include <array>
#include <memory>
#include <vector>

#include "dws/field.hpp"

namespace dws {

struct DnoConfig {
  double Ymax = 0;               // truncation depth; 0 picks 23/|k|_min for the grid
  int ny = 56;                   // node count including y = 0 and y = -Ymax
  double surface_spacing = 0.01; // first spacing below y = 0; spacings grow geometrically
  double picard_tol = 1e-12;     // relative increment in the H^3-star norm
  int picard_max = 80;

  void validate() const;
  double depth_for(const Grid2D& g) const;
};

// Nodes on [-Ymax, 0] stored top-down (y[0] = 0). Each interval carries the
// monomial coefficients of an 8-point Lagrange stencil in the interval's
// local coordinate, used to integrate exp-weighted sources exactly per mode.
struct YGrid {
  static constexpr int order = 8;
  using Coef = std::array<std::array<double, order>, order>;  // [stencil point][power]

  std::vector<double> y;        // y[0] = 0 > y[1] > ... > y[ny-1] = -Ymax
  std::vector<double> h;        // h[i] = y[i] - y[i+1]
  std::vector<int> first;       // first stencil node for interval i
  std::vector<Coef> down;       // basis in t = (yt - y[i+1]) / h[i]
  std::vector<Coef> up;         // basis in s = 1 - t
  std::vector<double> weight;   // trapezoid weights for norms
  double ratio = 1;

  static std::shared_ptr<const YGrid> geometric(double Ymax, int ny, double h0);
  int size() const { return int(y.size()); }
  double depth() const { return -y.back(); }
};

// phi_n(x) = int_0^1 t^n e^{-x(1-t)} dt, n = 0..7, plus e^{-x}
void exp_moments(double x, double* phi, double& emx);

// A real field on the flattened half-space: per node, the half spectrum
// (nz, nx/2+1) of u and of u_y, unnormalized like SpectralField coefficients.
struct HalfSpaceField {
  Grid2D grid;
  std::shared_ptr<const YGrid> ygrid;
  std::vector<CArray> u;
  std::vector<CArray> uy;

  HalfSpaceField() = default;
  HalfSpaceField(const Grid2D& g, std::shared_ptr<const YGrid> yg);
  int ny() const { return ygrid ? ygrid->size() : 0; }
  int nxh() const { return grid.nx / 2 + 1; }

  SpectralField layer(int j) const;     // u(., y_j)
  SpectralField layer_dy(int j) const;  // u_y(., y_j)
  SpectralField trace() const { return layer(0); }
  double layer_norm(int j) const;       // L2 norm of u at node j
  double decay_ratio() const;           // bottom/top layer norm
  double star_norm() const;             // H^3-star norm: ||grad u||_{H^2} over the half-space
};

// half spectrum <-> full SpectralField (real)
CArray to_half(const SpectralField& f);
SpectralField from_half(const Grid2D& g, const CArray& half);

// Explicit solution operator for the flattened Laplace problem
//   Delta u = d_x F1 + d_y F2 + d_z F3,  u_y = F2 + xi_x on y = 0.
// Sources are passed as HalfSpaceFields whose `u` layers hold F1, F2, F3.
HalfSpaceField solve_S(const HalfSpaceField& F1, const HalfSpaceField& F2, const HalfSpaceField& F3,
                       const SpectralField& xi);

namespace detail {
// P = A + B, Q = A - B with A = -i(k1 F1 + k3 F3)/(2|k|), B = F2/2 (half spectra per node).
// On return D holds the new u and P the new u_y; Q is left unchanged.
void integrate_sources(const Grid2D& g, const YGrid& yg, std::vector<CArray>& P, const std::vector<CArray>& Q,
                       const CArray* xi_half, std::vector<CArray>& D);
void combine_sources(const Grid2D& g, const CArray& F1, const CArray& F2, const CArray& F3, CArray& P, CArray& Q);
}  // namespace detail

}  // namespace dws
