#pragma once

#include <string>
#include <vector>

#include "dws/krylov.hpp"

namespace dws {

// Stationary cubic NLS  -1/2 z_xx - z_zz + z - (11/16)|z|^2 z = 0.
constexpr double kNlsCubic = 11.0 / 16.0;

// (1 - 1/2 d_x^2 - d_z^2) z
SpectralField nls_linear(const SpectralField& z);
SpectralField nls_linear_inverse(const SpectralField& z);
SpectralField nls_residual(const SpectralField& z);
// int (1/4|z_x|^2 + 1/2|z_z|^2 + 1/2|z|^2 - (11/64)|z|^4); its L2 gradient is nls_residual
double nls_functional(const SpectralField& z);

struct NlsConfig {
  double seed_amplitude = 2.6;
  double gamma = 1.5;          // Petviashvili exponent
  int petviashvili_max = 600;
  double petviashvili_tol = 1e-10;  // relative increment that ends the fixed-point phase
  int newton_max = 12;
  double cg_tol = 1e-12;
  int cg_max = 400;
  double ring_mass_max = 1e-10;
};

struct GroundState {
  SpectralField zeta0;
  double residual_h1 = 0;
  double peak = 0;
  double ring_mass = 0;  // fraction of L2 mass in the outer tenth of the box
  int petviashvili_iterations = 0;
  int newton_iterations = 0;
  SolverReport report;
};

// Petviashvili on z = M^gamma L^{-1}((11/16)|z|^2 z), then Newton polish to
// residual_h1 <= tol; iterates stay even in x and z.
GroundState ground_state(const Grid2D& g, double tol, const NlsConfig& cfg = {});

// T v = L v - c P(zeta0^2 v) with c = 33/16 (T1) or 11/16 (T2)
class LinearizedOperator {
 public:
  LinearizedOperator(const SpectralField& zeta0, double coupling);
  SpectralField apply(const SpectralField& v) const;
  // c L^{-1/2} zeta0^2 L^{-1/2}, symmetric and compact
  SpectralField apply_compact(const SpectralField& v) const;
  double coupling() const { return c_; }
  const Grid2D& grid() const { return grid_; }

 private:
  Grid2D grid_;
  double c_;
  PaddedWeight w_;
  RArray L_, Lmh_;
};

struct LinearizedOps {
  LinearizedOperator T1, T2;
};
LinearizedOps linearized_ops(const SpectralField& zeta0);

struct SpectrumSlice {
  std::string op;        // "T1" or "T2"
  std::string subspace;  // "full", "even_even", "odd_x_even_z"
  // eigenvalues nu of L^{-1/2} T L^{-1/2} (same inertia and kernel as T; min |lambda(T)| >= min |nu|)
  std::vector<double> lowest;  // lowest few, ascending
  double min_abs = 0;          // smallest |nu|
  double ritz_residual = 0;    // Lanczos residual of that pair
  int steps = 0;
};

struct KernelReport {
  double t1_x_residual = 0;  // |T1 zeta0_x| / |L zeta0_x|
  double t1_z_residual = 0;
  double t2_residual = 0;
  std::vector<SpectrumSlice> slices;
  const SpectrumSlice* find(const std::string& op, const std::string& subspace) const;
};

KernelReport kernel_check(const GroundState& gs, int lanczos_steps = 80, int count = 4);

}  // namespace dws
