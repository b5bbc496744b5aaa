#pragma once

#include <functional>

#include "dws/nls.hpp"
#include "dws/symbols.hpp"

namespace dws {

constexpr double kFdnlsCubic = 11.0 / 8.0;

// Extra term added to the full-dispersion residual, e.g. the exact higher-order
// part obtained by a round trip through the surface reduction.
using RemainderCoupling = std::function<SpectralField(const SpectralField& zeta)>;

enum class Branch { plus, minus };
inline double branch_sign(Branch b) { return b == Branch::plus ? 1.0 : -1.0; }
const char* branch_name(Branch b);
Branch parse_branch(const std::string& s);

// indicator of |k| < delta/eps
RArray envelope_band_table(const Grid2D& g, double eps, double delta);
SpectralField envelope_band_project(const SpectralField& f, double eps, double delta);

// eps^-2 g(e + eps D) z + 2 f(e + eps D) z
SpectralField fdnls_linear(const SpectralField& z, double eps);
// the linear part minus (11/8) chi0(|z|^2 z), plus the coupling when given;
// rejects spectrum outside the band beyond 1e-12 relative energy
SpectralField fdnls_residual(const SpectralField& z, double eps, double delta = 0.15,
                             const RemainderCoupling& remainder = nullptr);

struct FdnlsConfig {
  double delta = 0.15;
  int newton_max = 40;
  int backtrack_max = 8;           // step halvings per Newton iteration
  double cg_tol = 1e-12;
  int cg_max = 400;
  double eps_max = 0.1;            // beyond this the report is marked extrapolation
  double jacobian_floor = 0.05;    // smallest |nu| accepted before eps is flagged too large
  int lanczos_steps = 40;
  RemainderCoupling remainder;     // empty: pure full-dispersion equation
};

struct FdnlsSolution {
  SpectralField zeta;  // complex, zeta(-x,z) = conj zeta(x,z), zeta(x,-z) = zeta(x,z)
  double epsilon = 0;
  Branch branch = Branch::plus;
  double residual_h1 = 0;
  double h1_distance_to_ground_state = 0;  // |zeta - (+-zeta0)|_1 against the unprojected zeta0
  double sup_distance_to_ground_state = 0;
  double jacobian_floor = 0;               // smallest |nu| of the preconditioned Jacobian in the class
  SolverReport report;
};

// Newton from +-zeta0 (projected to the band and symmetry class), linear solves
// by CGNR preconditioned with 1/(2 + k1^2 + 2 k3^2). `warm` replaces the seed.
FdnlsSolution solve_fdnls(double eps, Branch branch, const GroundState& ground, double tol,
                          const FdnlsConfig& cfg = {}, const SpectralField* warm = nullptr);

// Jacobian of the residual without coupling: v -> M v - (11/8) chi0(2|z|^2 v + z^2 conj v)
class FdnlsJacobian {
 public:
  FdnlsJacobian(const SpectralField& z, double eps, double delta);
  SpectralField apply(const SpectralField& v) const;
  // smallest |nu| of M^{-1/2} J M^{-1/2} on the symmetry class, by Lanczos
  double floor_estimate(int steps) const;

 private:
  Grid2D grid_;
  RArray M_, band_;
  PaddedWeight w_abs_, w_sq_;
};

}  // namespace dws
