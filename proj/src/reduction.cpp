#include "dws/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dws {

namespace {

constexpr double kPi = 3.14159265358979323846;

double h3(const SpectralField& f) { return sobolev_norm(f, 3); }

// lattice index of the carrier wavenumber 1, after checking Lx is a multiple of pi
int carrier_index(const Grid2D& surface) {
  const double m = std::round(surface.Lx / kPi);
  if (m < 1 || std::abs(surface.Lx - m * kPi) > 1e-9 * surface.Lx)
    throw DomainError("surface box Lx must be a multiple of pi so that k1 = 1 is a lattice mode");
  return int(m);
}

void check_commensurate(const Grid2D& surface, const Grid2D& env, double eps) {
  auto off = [](double a, double b) { return std::abs(a - b) > 1e-10 * std::abs(b); };
  if (off(env.Lx, eps * surface.Lx) || off(env.Lz, eps * surface.Lz)) {
    std::ostringstream os;
    os << "envelope box (" << env.Lx << ", " << env.Lz << ") is not eps times the surface box ("
       << surface.Lx << ", " << surface.Lz << "); resample the envelope onto (" << eps * surface.Lx << ", "
       << eps * surface.Lz << ")";
    throw DomainError(os.str());
  }
}

int storage_index(int m, int n) { return m >= 0 ? m : m + n; }

bool inside(int m, int n) { return m > -n / 2 && m < n / 2; }

// Kprime_c and Lprime_c as full-minus-low-order differences, or their cubic truncations
struct Tails {
  SpectralField kc, lc;
};

Tails nonlinear_tails(const SpectralField& eta, const ReductionConfig& cfg, SolverReport* rep, HalfSpaceField* state) {
  if (cfg.cheap_dn) return {Kprime3(eta), Lprime3(eta)};
  const SpectralField kc = Kprime_full(eta) - Kprime1(eta);
  const SpectralField lc = Lprime_full(eta, cfg.dno, rep, state) - Lprime1(eta) - Lprime2(eta);
  return {kc, lc};
}

}  // namespace

Grid2D surface_grid(double eps, int nx, int nz, double X, double Z) {
  if (!(eps > 0)) throw DomainError("surface_grid: eps must be positive");
  const double m = std::max(1.0, std::round(X / (eps * kPi)));
  return Grid2D(nx, nz, m * kPi, Z / eps);
}

Grid2D envelope_grid(const Grid2D& surface, double eps, int nx, int nz) {
  return Grid2D(nx, nz, eps * surface.Lx, eps * surface.Lz);
}

SpectralField envelope_to_carrier(const SpectralField& zeta, const Grid2D& surface, double eps) {
  const Grid2D& env = zeta.grid();
  check_commensurate(surface, env, eps);
  const int mc = carrier_index(surface);
  const double scale = double(surface.size()) / double(env.size()) * (eps / 2) * (mc % 2 ? -1.0 : 1.0);
  const double cmax = zeta.coeffs().abs().maxCoeff();
  CArray c = CArray::Zero(surface.nz, surface.nx);
  for (int iz = 0; iz < env.nz; ++iz) {
    if (env.is_nyquist_z(iz)) continue;
    const int j3 = Grid2D::signed_index(iz, env.nz);
    for (int ix = 0; ix < env.nx; ++ix) {
      if (env.is_nyquist_x(ix)) continue;
      const cplx v = zeta.coeffs()(iz, ix);
      if (v == cplx(0)) continue;
      const int m1 = mc + Grid2D::signed_index(ix, env.nx);
      if (!inside(m1, surface.nx) || !inside(j3, surface.nz)) {
        if (std::abs(v) > 1e-13 * cmax)
          throw DomainError("envelope spectrum does not fit on the surface grid around the carrier");
        continue;
      }
      c(storage_index(j3, surface.nz), storage_index(m1, surface.nx)) = scale * v;
    }
  }
  return SpectralField::from_coeffs(surface, std::move(c), false);
}

SpectralField carrier_to_envelope(const SpectralField& b, const Grid2D& env, double eps) {
  const Grid2D& surface = b.grid();
  check_commensurate(surface, env, eps);
  const int mc = carrier_index(surface);
  const double scale = double(env.size()) / double(surface.size()) * (mc % 2 ? -1.0 : 1.0);
  CArray c = CArray::Zero(env.nz, env.nx);
  for (int iz = 0; iz < env.nz; ++iz) {
    if (env.is_nyquist_z(iz)) continue;
    const int j3 = Grid2D::signed_index(iz, env.nz);
    if (!inside(j3, surface.nz)) continue;
    for (int ix = 0; ix < env.nx; ++ix) {
      if (env.is_nyquist_x(ix)) continue;
      const int m1 = mc + Grid2D::signed_index(ix, env.nx);
      if (!inside(m1, surface.nx)) continue;
      c(iz, ix) = scale * b.coeffs()(storage_index(j3, surface.nz), storage_index(m1, surface.nx));
    }
  }
  return SpectralField::from_coeffs(env, std::move(c), false);
}

SpectralField eta1_from_envelope(const SpectralField& zeta, const Grid2D& surface, double eps, double delta) {
  return band_project(2.0 * real_part(envelope_to_carrier(zeta, surface, eps)), BandSpec::carrier(delta));
}

SpectralField F_of_eta1(const SpectralField& eta1, double eps, double delta) {
  return 2 * (1 - eps * eps) * offband_inverse(Lprime2(eta1), delta);
}

SpectralField reduced_nonlinearity(const SpectralField& eta1, const SpectralField& eta, double eps,
                                   const ReductionConfig& cfg, SolverReport* dn_report, HalfSpaceField* state) {
  const Tails t = nonlinear_tails(eta, cfg, dn_report, state);
  return t.kc - 2 * (1 - eps * eps) * (Lprime2(eta) - Lprime2(eta1) + t.lc);
}

SpectralField eta3_map(const SpectralField& eta1, const SpectralField& F, const SpectralField& eta3,
                       const WaveParams& params, const ReductionConfig& cfg, SolverReport* dn_report,
                       HalfSpaceField* state) {
  const double eps = params.epsilon;
  const SpectralField B =
      reduced_nonlinearity(eta1, eta1 + F + eta3, eps, cfg, dn_report, state) + 2 * eps * eps * K0(F + eta3);
  return -offband_inverse(B, params.delta);
}

SpectralField offband_equation(const SpectralField& eta1, const SpectralField& eta2, const WaveParams& params,
                               const ReductionConfig& cfg) {
  const double c2 = params.c2();
  const SpectralField eta = eta1 + eta2;
  const Tails t = nonlinear_tails(eta, cfg, nullptr, nullptr);
  const SpectralField N = t.kc - c2 * (Lprime2(eta) + t.lc);
  return band_complement(Kprime1(eta2) - c2 * Lprime1(eta2) + N, BandSpec::carrier(params.delta));
}

Eta3Result solve_eta3(const SpectralField& eta1, const WaveParams& params, const ReductionConfig& cfg,
                      const SpectralField* warm) {
  params.validate();
  if (!(cfg.picard_tol > 0)) throw DomainError("solve_eta3: tolerance must be positive");
  const double eps = params.epsilon, delta = params.delta;
  const double triple = scaled_norm(eta1, eps, delta);
  const SpectralField F = F_of_eta1(eta1, eps, delta);

  Eta3Result out;
  out.cheap = cfg.cheap_dn;
  SolverReport& rep = out.report;
  rep.solver = cfg.cheap_dn ? "eta3-picard (cheap: cubic K', L')" : "eta3-picard (full DN)";
  if (eta1.sup_norm() == 0) {
    // G(0) = 0 and the map contracts, so zero is the fixed point; a warm start would
    // only decay geometrically and never meet a relative tolerance
    out.eta3 = SpectralField::zero(eta1.grid());
    rep.converged = true;
    rep.set("contraction", 0);
    rep.set("scaled_size", 0);
    return out;
  }
  SpectralField eta3 = warm ? *warm : SpectralField::zero(eta1.grid());
  HalfSpaceField state;
  double prev_inc = -1;
  int dn_iterations = 0;
  std::string failure;
  for (int it = 1; it <= cfg.picard_max; ++it) {
    SolverReport dn;
    SpectralField next;
    try {
      next = eta3_map(eta1, F, eta3, params, cfg, &dn, &state);
    } catch (const DomainError& e) {
      if (it == 1) throw;
      failure = std::string("eta3 Picard: iterate ") + std::to_string(it - 1) + " left the resolved range: " + e.what();
      break;
    }
    dn_iterations += dn.iterations;
    const double size = h3(next);
    const double inc = h3(next - eta3);
    eta3 = std::move(next);
    rep.iterations = it;
    rep.residuals.push_back(size > 0 ? inc / size : 0.0);
    if (!std::isfinite(inc)) {
      failure = "eta3 Picard: non-finite iterate";
      break;
    }
    // ratios taken only while the increment is above the noise floor
    if (prev_inc > 0 && prev_inc > 1e3 * cfg.picard_tol * size) {
      const double ratio = inc / prev_inc;
      rep.contraction.push_back(ratio);
      out.contraction = std::max(out.contraction, ratio);
      if (ratio >= cfg.contraction_abort) {
        std::ostringstream os;
        os << "eta3 Picard: measured contraction " << ratio << " >= " << cfg.contraction_abort
           << " at eps = " << eps << " (iteration " << it
           << "); the surface is outside the small-amplitude regime, reduce eps";
        failure = os.str();
        break;
      }
    }
    prev_inc = inc;
    if (size == 0 || inc <= cfg.picard_tol * size) {
      rep.converged = true;
      break;
    }
  }
  if (!rep.converged && failure.empty()) {
    std::ostringstream os;
    os << "eta3 Picard: no convergence in " << cfg.picard_max << " iterations (last relative increment "
       << rep.residuals.back() << ")";
    failure = os.str();
  }
  const auto& ratios = rep.contraction;
  if (ratios.size() >= 2) out.asymptotic_rate = std::sqrt(ratios[ratios.size() - 1] * ratios[ratios.size() - 2]);
  rep.message = failure;
  if (!failure.empty() && cfg.throw_on_failure) throw SolverError(failure);
  out.eta3 = eta3;
  out.scaled_size = triple > 0 ? h3(eta3) / (std::pow(eps, 2 * params.theta) * triple * triple) : 0.0;
  rep.set("contraction", out.contraction);
  rep.set("asymptotic_rate", out.asymptotic_rate);
  rep.set("scaled_size", out.scaled_size);
  rep.set("dn_iterations", dn_iterations);
  rep.set("cheap", cfg.cheap_dn ? 1 : 0);
  return out;
}

namespace {

SurfaceNorms surface_norms(const SurfaceDecomposition& d) {
  SurfaceNorms n;
  const double eps = d.params.epsilon;
  n.triple_eta1 = scaled_norm(d.eta1, eps, d.params.delta);
  // unitary transform: a lattice mode of amplitude a carries 2 pi |a| of L1 mass
  n.l1_hat_eta1 = 2 * kPi * d.eta1.coeffs().abs().sum() / double(d.eta1.grid().size());
  n.h3_eta2 = h3(d.eta2);
  n.h3_eta3 = h3(d.eta3);
  n.z_norm = n.l1_hat_eta1 + n.h3_eta2;
  return n;
}

SpectralField band_envelope(const SpectralField& zeta, double eps, double delta) {
  return envelope_band_project(zeta, eps, delta);
}

}  // namespace

SurfaceDecomposition reconstruct_surface(const SpectralField& zeta, const WaveParams& params, const Grid2D& surface,
                                         const ReductionConfig& cfg, bool with_eta3) {
  params.validate();
  if (surface.dx() > 2 * kPi / 16 + 1e-12)
    throw DomainError("surface grid must carry at least 16 points per carrier wavelength");
  const double eps = params.epsilon, delta = params.delta;
  SurfaceDecomposition d;
  d.params = params;
  d.eta1 = eta1_from_envelope(band_envelope(zeta, eps, delta), surface, eps, delta);
  d.F = F_of_eta1(d.eta1, eps, delta);
  if (with_eta3) {
    Eta3Result r = solve_eta3(d.eta1, params, cfg);
    d.eta3 = r.eta3;
    d.eta3_report = r.report;
    d.eta3_contraction = r.contraction;
    d.eta3_rate = r.asymptotic_rate;
    d.eta3_scaled_size = r.scaled_size;
  } else {
    d.eta3 = SpectralField::zero(surface);
  }
  d.eta2 = d.F + d.eta3;
  d.eta = d.eta1 + d.eta2;
  d.norms = surface_norms(d);
  return d;
}

SurfaceDecomposition nls_only_surface(const SpectralField& zeta, const WaveParams& params, const Grid2D& surface) {
  params.validate();
  SurfaceDecomposition d;
  d.params = params;
  d.eta1 = eta1_from_envelope(band_envelope(zeta, params.epsilon, params.delta), surface, params.epsilon,
                              params.delta);
  d.F = SpectralField::zero(surface);
  d.eta3 = d.F;
  d.eta2 = d.F;
  d.eta = d.eta1;
  d.norms = surface_norms(d);
  return d;
}

double leading_order_error(const SurfaceDecomposition& d, const SpectralField& zeta0, double sign) {
  const double eps = d.params.epsilon;
  const SpectralField ref = 2.0 * real_part(envelope_to_carrier(zeta0, d.eta.grid(), eps));
  return (d.eta - sign * ref).sup_norm();
}

FullResidual full_residual(const SpectralField& eta, double c2, double delta, const DnoConfig& cfg) {
  FullResidual out;
  const SpectralField kp = Kprime_full(eta);
  const SpectralField lp = Lprime_full(eta, cfg, &out.dn_report);
  out.r = kp - c2 * lp;
  const SpectralField band = band_project(out.r, BandSpec::carrier(delta));
  out.h1 = sobolev_norm(out.r, 1);
  out.band_h1 = sobolev_norm(band, 1);
  out.offband_h1 = sobolev_norm(out.r - band, 1);
  out.largest_term_h1 = std::max(sobolev_norm(kp, 1), c2 * sobolev_norm(lp, 1));
  return out;
}

CascadeReport cascade_coefficients(const SurfaceDecomposition& d, const ReductionConfig& cfg) {
  const double eps = d.params.epsilon, delta = d.params.delta;
  const BandSpec plus = BandSpec::plus(delta);
  const SpectralField p = band_project(d.eta1, plus);
  const SpectralField target = band_project(padded_product(conj(p), p, p), plus);
  const double tt = real_inner(target, target);
  if (!(tt > 0)) throw DomainError("cascade_coefficients: eta1 has no carrier content");
  auto coef = [&](const SpectralField& x) { return real_inner(target, band_project(x, plus)) / tt; };

  CascadeReport out;
  const SpectralField& eta = d.eta;
  const SpectralField n1 = Lprime2(eta) - Lprime2(d.eta1);
  ReductionConfig full = cfg;
  full.cheap_dn = false;
  const Tails t = nonlinear_tails(eta, full, nullptr, nullptr);
  const SpectralField n2 = t.kc - 2 * (1 - eps * eps) * t.lc;
  out.n1 = coef(n1);
  out.kprime3 = coef(Kprime3(eta));
  out.lprime3 = coef(Lprime3(eta));
  out.n2 = coef(n2);
  out.assembled = coef(n2 - 2 * (1 - eps * eps) * n1);

  auto band_fraction = [](const SpectralField& x, const BandSpec& b) {
    const double n = l2_norm(x);
    return n > 0 ? l2_norm(band_project(x, b)) / n : 0.0;
  };
  const SpectralField k1 = K1_closed(d.eta1, d.eta1), l1 = L1_closed(d.eta1, d.eta1);
  out.extra_k = band_fraction(k1 * k1, plus);
  out.extra_l = band_fraction(l1 * l1, plus);
  out.lprime2_band = band_fraction(Lprime2(d.eta1), BandSpec::carrier(delta));
  return out;
}

RemainderCoupling make_remainder_coupling(const Grid2D& surface, const WaveParams& params, const ReductionConfig& cfg) {
  params.validate();
  struct State {
    SpectralField eta3;
    HalfSpaceField dn;
  };
  auto state = std::make_shared<State>();
  return [surface, params, cfg, state](const SpectralField& zeta) {
    const double eps = params.epsilon, delta = params.delta;
    const SpectralField eta1 = eta1_from_envelope(zeta, surface, eps, delta);
    const SpectralField F = F_of_eta1(eta1, eps, delta);
    Eta3Result r = solve_eta3(eta1, params, cfg, state->eta3.empty() ? nullptr : &state->eta3);
    state->eta3 = r.eta3;
    const SpectralField B = reduced_nonlinearity(eta1, eta1 + F + r.eta3, eps, cfg, nullptr, &state->dn);
    const SpectralField E = carrier_to_envelope(band_project(B, BandSpec::plus(delta)), zeta.grid(), eps);
    const SpectralField model = kFdnlsCubic * dealiased_cubic(zeta);
    return envelope_band_project(symmetrize((2 / (eps * eps * eps)) * E + model, Parity::conj_x_even_z), eps,
                                 delta);
  };
}

}  // namespace dws
