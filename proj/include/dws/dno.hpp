#pragma once

#include "dws/halfspace.hpp"
#include "dws/symbols.hpp"

namespace dws {

struct DnSolution {
  HalfSpaceField u;
  SolverReport report;
};

// Picard iteration u <- S(F1(eta,u), F2(eta,u), F3(eta,u), xi) with
//   F1 = eta_x u_y, F2 = eta_x u_x + eta_z u_z - |grad eta|^2 u_y, F3 = eta_z u_y.
// `warm` (same grid and y-grid) seeds the iteration.
DnSolution solve_dn(const SpectralField& eta, const SpectralField& xi, const DnoConfig& cfg,
                    const HalfSpaceField* warm = nullptr);

struct KLPair {
  SpectralField K, L;
  SolverReport report;
};

// K(eta)xi = -d_x u(.,0), L(eta)xi = -d_z u(.,0) from one solve
KLPair KL_op(const SpectralField& eta, const SpectralField& xi, const DnoConfig& cfg);
SpectralField K_op(const SpectralField& eta, const SpectralField& xi, const DnoConfig& cfg);
SpectralField L_op(const SpectralField& eta, const SpectralField& xi, const DnoConfig& cfg);
KLPair trace_operators(const HalfSpaceField& u);

// first-order terms, polarized: eta is the surface, xi the data
SpectralField K1_closed(const SpectralField& eta, const SpectralField& xi);
SpectralField L1_closed(const SpectralField& eta, const SpectralField& xi);
// second-order term K2(eta)xi by Richardson-extrapolated central differences at amplitudes a, 2a
SpectralField K2_divided(const SpectralField& eta, const SpectralField& xi, double a, const DnoConfig& cfg);

SpectralField m_bilinear(const SpectralField& u, const SpectralField& v);
SpectralField Kprime1(const SpectralField& eta);
SpectralField Kprime3(const SpectralField& eta);
SpectralField Lprime1(const SpectralField& eta);
SpectralField Lprime2(const SpectralField& eta);
// rejects input with spectral energy beyond 2/3 of the Nyquist box (relative 1e-12)
SpectralField Lprime3(const SpectralField& eta);

SpectralField Kprime_full(const SpectralField& eta);
// `state`, when given, seeds the DN solve and receives the new potential
SpectralField Lprime_full(const SpectralField& eta, const DnoConfig& cfg, SolverReport* report = nullptr,
                          HalfSpaceField* state = nullptr);

// int (eta^2/2 + sqrt(1 + |grad eta|^2) - 1) and (1/2) int eta K(eta) eta
double functional_K(const SpectralField& eta);
double functional_L(const SpectralField& eta, const DnoConfig& cfg);

}  // namespace dws
