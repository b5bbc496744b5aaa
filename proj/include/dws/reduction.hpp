#pragma once

#include <memory>

#include "dws/dno.hpp"
#include "dws/fdnls.hpp"

namespace dws {

struct ReductionConfig {
  DnoConfig dno;
  double picard_tol = 1e-10;       // relative H3 increment of the eta3 iteration
  int picard_max = 40;
  double contraction_abort = 0.5;  // measured contraction at or above this aborts
  bool cheap_dn = false;           // closed-form K'3, L'3 in place of the full DN operators
  bool throw_on_failure = true;    // false: solve_eta3 returns the unconverged iterate with its report
};

// Surface box for a given eps: Lx = pi round(X/(eps pi)) so that x -> eps x maps
// the carrier e^{ix} onto a lattice mode, Lz = Z/eps.
Grid2D surface_grid(double eps, int nx, int nz, double X = 8, double Z = 10);
// the envelope box (eps Lx, eps Lz) commensurate with `surface`
Grid2D envelope_grid(const Grid2D& surface, double eps, int nx, int nz);

// (eps/2) zeta(eps x, eps z) e^{ix} by an exact spectral shift; complex
SpectralField envelope_to_carrier(const SpectralField& zeta, const Grid2D& surface, double eps);
// E with b = E(eps x, eps z) e^{ix}, read from the modes of b near (1, 0); no eps/2 factor
SpectralField carrier_to_envelope(const SpectralField& b, const Grid2D& envelope, double eps);
// eta1 = 2 Re (eps/2) zeta(eps x, eps z) e^{ix}, projected onto the carrier band
SpectralField eta1_from_envelope(const SpectralField& zeta, const Grid2D& surface, double eps, double delta);

// 2(1 - eps^2) F^-1[(1 - chi)/g F[L'2(eta1)]]
SpectralField F_of_eta1(const SpectralField& eta1, double eps, double delta);

// N(eta1 + F + eta3) + 2(1 - eps^2) L'2(eta1): the nonlinearity with its quadratic
// carrier part removed. `state` warm-starts the DN solve in full mode.
SpectralField reduced_nonlinearity(const SpectralField& eta1, const SpectralField& eta, double eps,
                                   const ReductionConfig& cfg, SolverReport* dn_report = nullptr,
                                   HalfSpaceField* state = nullptr);

// one evaluation of the map in the Picard iteration below
SpectralField eta3_map(const SpectralField& eta1, const SpectralField& F, const SpectralField& eta3,
                       const WaveParams& params, const ReductionConfig& cfg, SolverReport* dn_report = nullptr,
                       HalfSpaceField* state = nullptr);
// (1 - chi)[(K'1 - c^2 L'1) eta2 + N(eta1 + eta2)], the off-band equation written directly.
// g (eta3 - eta3_map(eta3)) equals this with eta2 = F + eta3.
SpectralField offband_equation(const SpectralField& eta1, const SpectralField& eta2, const WaveParams& params,
                               const ReductionConfig& cfg);

struct Eta3Result {
  SpectralField eta3;
  SolverReport report;
  double contraction = 0;  // largest observed ratio of successive H3 increments
  double asymptotic_rate = 0;  // geometric mean of the last two ratios
  double scaled_size = 0;  // |eta3|_3 / (eps^{2 theta} |||eta1|||^2)
  bool cheap = false;
};

// Picard iteration eta3 <- -F^-1[(1-chi)/g F[reduced_nonlinearity + 2 eps^2 K0(F + eta3)]]
Eta3Result solve_eta3(const SpectralField& eta1, const WaveParams& params, const ReductionConfig& cfg,
                      const SpectralField* warm = nullptr);

struct SurfaceNorms {
  double triple_eta1 = 0;   // scaled norm
  double l1_hat_eta1 = 0;   // |hat eta1|_{L1}
  double h3_eta2 = 0;
  double h3_eta3 = 0;
  double z_norm = 0;        // |hat eta1|_{L1} + |eta2|_3
};

struct SurfaceDecomposition {
  SpectralField eta1, F, eta3, eta2, eta;
  WaveParams params;
  SurfaceNorms norms;
  SolverReport eta3_report;
  double eta3_contraction = 0;
  double eta3_rate = 0;
  double eta3_scaled_size = 0;
};

// eta = eta1 + F(eta1) + eta3(eta1) from an envelope on a grid commensurate with `surface`.
// with_eta3 = false skips the Picard solve (eta3 = 0).
SurfaceDecomposition reconstruct_surface(const SpectralField& zeta, const WaveParams& params, const Grid2D& surface,
                                         const ReductionConfig& cfg, bool with_eta3 = true);
// eta1 alone (F = eta3 = 0): the bare NLS surface
SurfaceDecomposition nls_only_surface(const SpectralField& zeta, const WaveParams& params, const Grid2D& surface);

// max |eta - sign eps zeta0(eps x, eps z) cos x|
double leading_order_error(const SurfaceDecomposition& d, const SpectralField& zeta0, double sign);

struct FullResidual {
  SpectralField r;          // K'(eta) - c^2 L'(eta)
  double h1 = 0;
  double band_h1 = 0;       // chi(D) part
  double offband_h1 = 0;    // (1 - chi(D)) part
  double largest_term_h1 = 0;  // max(|K'(eta)|_1, c^2 |L'(eta)|_1)
  SolverReport dn_report;
};
FullResidual full_residual(const SpectralField& eta, double c2, double delta, const DnoConfig& cfg);

// coefficients of chi+(eta1^- (eta1^+)^2) in the carrier-band parts of the
// nonlinear contributions, by L2 projection
struct CascadeReport {
  double n1 = 0;         // L'2(eta) - L'2(eta1)
  double kprime3 = 0;    // K'3(eta)
  double lprime3 = 0;    // L'3(eta)
  double n2 = 0;         // K'c(eta) - 2(1-eps^2) L'c(eta), full DN
  double assembled = 0;  // n2 - 2(1-eps^2) n1
  double extra_k = 0;    // |chi+ (K1(eta1) eta1)^2| / |(K1(eta1) eta1)^2|
  double extra_l = 0;
  double lprime2_band = 0;  // |chi L'2(eta1)| / |L'2(eta1)|
};
CascadeReport cascade_coefficients(const SurfaceDecomposition& d, const ReductionConfig& cfg);

// Exact higher-order term for the full-dispersion NLS: the round trip
// zeta -> eta1 -> F, eta3 -> chi+ nonlinearity -> envelope, minus the model cubic.
// Keeps the last eta3 and DN potential between calls as warm starts.
RemainderCoupling make_remainder_coupling(const Grid2D& surface, const WaveParams& params, const ReductionConfig& cfg);

}  // namespace dws
