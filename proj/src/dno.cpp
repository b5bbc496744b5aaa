#include "dws/dno.hpp"

#include <cmath>
#include <sstream>

#include "dws/fft.hpp"

namespace dws {

namespace {

void require_real_pair(const SpectralField& eta, const SpectralField& xi) {
  if (eta.grid() != xi.grid()) throw DomainError("eta and xi live on different grids");
  if (!eta.is_real() || !xi.is_real()) throw DomainError("the DN operators act on real fields");
}

// ||(du, duy)||_{3,*} for the difference of two half-space states (empty u0: plain norm)
double star_diff(const Grid2D& g, const YGrid& yg, const std::vector<CArray>& u1, const std::vector<CArray>& uy1,
                 const std::vector<CArray>& u0, const std::vector<CArray>& uy0) {
  const int nxh = g.nx / 2 + 1;
  double acc = 0;
  for (int j = 0; j < yg.size(); ++j) {
    double layer = 0;
    for (int iz = 0; iz < g.nz; ++iz) {
      const double k3 = g.k3(iz);
      for (int ix = 0; ix < nxh; ++ix) {
        const double k1 = g.k1(ix);
        const double kk = k1 * k1 + k3 * k3;
        const double cw = (ix == 0 || ix == g.nx / 2) ? 1.0 : 2.0;
        const cplx du = u0.empty() ? u1[j](iz, ix) : u1[j](iz, ix) - u0[j](iz, ix);
        const cplx duy = uy0.empty() ? uy1[j](iz, ix) : uy1[j](iz, ix) - uy0[j](iz, ix);
        layer += cw * (1 + kk) * (1 + kk) * (kk * std::norm(du) + std::norm(duy));
      }
    }
    acc += yg.weight[j] * layer;
  }
  const double n = double(g.size());
  return std::sqrt(acc * g.area() / (n * n));
}

std::vector<CArray> zero_layers(const Grid2D& g, int ny) {
  return std::vector<CArray>(ny, CArray::Zero(g.nz, g.nx / 2 + 1));
}

}  // namespace

DnSolution solve_dn(const SpectralField& eta, const SpectralField& xi, const DnoConfig& cfg,
                    const HalfSpaceField* warm) {
  cfg.validate();
  require_real_pair(eta, xi);
  const Grid2D& g = eta.grid();
  const int nz = g.nz, nx = g.nx, nxh = nx / 2 + 1;
  auto yg = YGrid::geometric(cfg.depth_for(g), cfg.ny, cfg.surface_spacing);
  const int ny = yg->size();

  CArray xh = to_half(xi);
  xh(0, 0) = 0;

  const RArray ex = dx(eta).real_values(), ez = dz(eta).real_values();
  const RArray grad2 = ex * ex + ez * ez;
  const bool flat = eta.sup_norm() == 0;

  std::vector<CArray> U = zero_layers(g, ny), Uy = U, P = U, Q = U, D;
  if (warm && warm->grid == g && warm->ny() == ny && warm->ygrid->depth() == yg->depth()) {
    U = warm->u;
    Uy = warm->uy;
  }

  DnSolution out;
  out.report.solver = "dn-picard";
  RArray ux(nz, nx), uz(nz, nx), uyp(nz, nx), f1(nz, nx), f2(nz, nx), f3(nz, nx);
  CArray tmp(nz, nxh), F1(nz, nxh), F2(nz, nxh), F3(nz, nxh);
  double prev_inc = -1;
  int rising = 0;
  for (int it = 1; it <= cfg.picard_max; ++it) {
    for (int j = 0; j < ny; ++j) {
      if (flat) {
        P[j].setZero();
        Q[j].setZero();
        continue;
      }
      for (int iz = 0; iz < nz; ++iz)
        for (int ix = 0; ix < nxh; ++ix)
          tmp(iz, ix) = g.is_nyquist_x(ix) ? cplx(0) : cplx(0, g.k1(ix)) * U[j](iz, ix);
      fft::inverse_real(tmp.data(), ux.data(), nz, nx);
      for (int iz = 0; iz < nz; ++iz)
        for (int ix = 0; ix < nxh; ++ix)
          tmp(iz, ix) = g.is_nyquist_z(iz) ? cplx(0) : cplx(0, g.k3(iz)) * U[j](iz, ix);
      fft::inverse_real(tmp.data(), uz.data(), nz, nx);
      fft::inverse_real(Uy[j].data(), uyp.data(), nz, nx);
      f1 = ex * uyp;
      f3 = ez * uyp;
      f2 = ex * ux + ez * uz - grad2 * uyp;
      fft::forward_real(f1.data(), F1.data(), nz, nx);
      fft::forward_real(f2.data(), F2.data(), nz, nx);
      fft::forward_real(f3.data(), F3.data(), nz, nx);
      detail::combine_sources(g, F1, F2, F3, P[j], Q[j]);
    }
    detail::integrate_sources(g, *yg, P, Q, &xh, D);
    // D and P now hold the new iterate
    const double inc = star_diff(g, *yg, D, P, U, Uy);
    std::swap(U, D);
    std::swap(Uy, P);
    const double unorm = star_diff(g, *yg, U, Uy, {}, {});
    const double rel = unorm > 0 ? inc / unorm : 0.0;
    out.report.iterations = it;
    out.report.residuals.push_back(rel);
    if (prev_inc > 0) out.report.contraction.push_back(inc / prev_inc);
    if (flat || rel <= std::max(cfg.picard_tol, 2e-15)) {
      out.report.converged = true;
      break;
    }
    if (prev_inc > 0 && inc >= prev_inc) {
      if (++rising >= 2 && it > 3) {
        // stalled at roundoff is convergence, growth is divergence
        if (rel < 1e-12) {
          out.report.converged = true;
          out.report.message = "stalled at roundoff";
          break;
        }
        std::ostringstream os;
        os << "solve_dn: Picard contraction factor >= 1 (last " << inc / prev_inc
           << "); the surface is too large for the iteration";
        throw SolverError(os.str());
      }
    } else {
      rising = 0;
    }
    prev_inc = inc;
  }
  if (!out.report.converged) {
    std::ostringstream os;
    os << "solve_dn: no convergence in " << cfg.picard_max << " iterations, last relative increment "
       << out.report.residuals.back();
    throw SolverError(os.str());
  }
  out.u = HalfSpaceField(g, yg);
  out.u.u = std::move(U);
  out.u.uy = std::move(Uy);
  const double dr = out.u.decay_ratio();
  out.report.set("decay_ratio", dr);
  out.report.set("Ymax", yg->depth());
  out.report.set("ny", ny);
  out.report.set("y_ratio", yg->ratio);
  if (dr > 1e-8) {
    std::ostringstream os;
    os << "solve_dn: bottom layer holds " << dr << " of the surface layer; raise Ymax";
    throw SolverError(os.str());
  }
  return out;
}

KLPair trace_operators(const HalfSpaceField& u) {
  const Grid2D& g = u.grid;
  const int nxh = u.nxh();
  CArray a(g.nz, nxh), b(g.nz, nxh);
  for (int iz = 0; iz < g.nz; ++iz)
    for (int ix = 0; ix < nxh; ++ix) {
      const cplx c = u.u[0](iz, ix);
      a(iz, ix) = g.is_nyquist_x(ix) ? cplx(0) : cplx(0, -g.k1(ix)) * c;
      b(iz, ix) = g.is_nyquist_z(iz) ? cplx(0) : cplx(0, -g.k3(iz)) * c;
    }
  return KLPair{from_half(g, a), from_half(g, b), {}};
}

KLPair KL_op(const SpectralField& eta, const SpectralField& xi, const DnoConfig& cfg) {
  DnSolution s = solve_dn(eta, xi, cfg);
  KLPair kl = trace_operators(s.u);
  kl.report = std::move(s.report);
  return kl;
}

SpectralField K_op(const SpectralField& eta, const SpectralField& xi, const DnoConfig& cfg) {
  return KL_op(eta, xi, cfg).K;
}

SpectralField L_op(const SpectralField& eta, const SpectralField& xi, const DnoConfig& cfg) {
  return KL_op(eta, xi, cfg).L;
}

SpectralField K1_closed(const SpectralField& eta, const SpectralField& xi) {
  return -dx(eta * dx(xi)) - K0(eta * K0(xi)) - L0(eta * L0(xi));
}

SpectralField L1_closed(const SpectralField& eta, const SpectralField& xi) {
  return -dz(eta * dx(xi)) - L0(eta * K0(xi)) - M0(eta * L0(xi));
}

SpectralField K2_divided(const SpectralField& eta, const SpectralField& xi, double a, const DnoConfig& cfg) {
  const SpectralField k0 = K0(xi);
  auto second = [&](double t) {
    return (1.0 / (2 * t * t)) * (K_op(t * eta, xi, cfg) + K_op(-t * eta, xi, cfg) - 2.0 * k0);
  };
  return (1.0 / 3.0) * (4.0 * second(a) - second(2 * a));
}

SpectralField m_bilinear(const SpectralField& u, const SpectralField& v) {
  const SpectralField ux = dx(u), vx = dx(v);
  const SpectralField K0u = K0(u), K0v = K0(v), L0u = L0(u), L0v = L0(v);
  const SpectralField first = ux * vx - K0u * K0v - L0u * L0v;
  const SpectralField second = -dx(ux * v + u * vx) - K0(u * K0v + v * K0u) - L0(u * L0v + v * L0u);
  return 0.5 * (first + second);
}

SpectralField Kprime1(const SpectralField& eta) { return eta - laplacian(eta); }

SpectralField Kprime3(const SpectralField& eta) {
  const SpectralField ex = dx(eta), ez = dz(eta);
  const SpectralField q = ex * ex + ez * ez;
  return 0.5 * (dx(q * ex) + dz(q * ez));
}

SpectralField Lprime1(const SpectralField& eta) { return K0(eta); }

SpectralField Lprime2(const SpectralField& eta) { return m_bilinear(eta, eta); }

SpectralField Lprime3(const SpectralField& e) {
  if (tail_energy_fraction(e, 2.0 / 3.0) > 1e-12)
    throw DomainError("Lprime3: input is not band-limited to 2/3 of the grid's Nyquist box");
  const SpectralField K0e = K0(e), L0e = L0(e);
  const SpectralField eK = e * K0e, eL = e * L0e;
  const SpectralField exx = dxx(e), exz = dx(dz(e)), e2 = e * e;
  SpectralField r = K0e * K0(eK) + K0e * L0(eL) + L0e * L0(eK) + L0e * M0(eL);
  r += K0(e * K0(eK)) + K0(e * L0(eL)) + L0(e * L0(eK)) + L0(e * M0(eL));
  r += e * K0e * exx + 0.5 * K0(e2 * exx) + 0.5 * dxx(e2 * K0e);
  r += e * L0e * exz + 0.5 * L0(e2 * exz) + 0.5 * dx(dz(e2 * L0e));
  return r;
}

SpectralField Kprime_full(const SpectralField& eta) {
  const RArray ex = dx(eta).real_values(), ez = dz(eta).real_values();
  const RArray s = (1 + ex * ex + ez * ez).sqrt();
  const Grid2D& g = eta.grid();
  return eta - dx(SpectralField::from_real(g, ex / s)) - dz(SpectralField::from_real(g, ez / s));
}

SpectralField Lprime_full(const SpectralField& eta, const DnoConfig& cfg, SolverReport* report,
                          HalfSpaceField* state) {
  DnSolution s = solve_dn(eta, eta, cfg, state);
  const KLPair kl = trace_operators(s.u);
  if (report) *report = s.report;
  if (state) *state = std::move(s.u);
  const Grid2D& g = eta.grid();
  const RArray ex = dx(eta).real_values(), ez = dz(eta).real_values();
  const RArray K = kl.K.real_values(), L = kl.L.real_values();
  const RArray num = ex - ex * K - ez * L;
  const RArray v = -0.5 * K * K - 0.5 * L * L + num * num / (2 * (1 + ex * ex + ez * ez)) + K;
  return SpectralField::from_real(g, v);
}

double functional_K(const SpectralField& eta) {
  const Grid2D& g = eta.grid();
  const RArray e = eta.real_values(), ex = dx(eta).real_values(), ez = dz(eta).real_values();
  const RArray dens = 0.5 * e * e + ((1 + ex * ex + ez * ez).sqrt() - 1);
  return dens.sum() * g.dx() * g.dz();
}

double functional_L(const SpectralField& eta, const DnoConfig& cfg) {
  return 0.5 * real_inner(eta, K_op(eta, eta, cfg));
}

}  // namespace dws
