#include "dws/fdnls.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace dws {

const char* branch_name(Branch b) { return b == Branch::plus ? "+" : "-"; }

Branch parse_branch(const std::string& s) {
  if (s == "+" || s == "plus") return Branch::plus;
  if (s == "-" || s == "minus") return Branch::minus;
  throw DomainError("branch must be + or -, got '" + s + "'");
}

namespace {

void check_eps(double eps) {
  if (!(eps > 0) || !std::isfinite(eps)) throw DomainError("epsilon must be positive");
}

RArray fdnls_table(const Grid2D& g, double eps) {
  return symbol_table(g, [eps](double k1, double k3) { return full_dispersion_symbol(k1, k3, eps); });
}

SpectralField as_complex(const SpectralField& f) {
  if (!f.is_real()) return f;
  return SpectralField::from_values(f.grid(), f.values(), false);
}

// (Re, Im) stacking regardless of the realness flag, so Krylov vectors keep one length
Vec stack(const SpectralField& f) { return to_vec(as_complex(f)); }

double off_band_fraction(const SpectralField& f, const RArray& band) {
  const RArray p = f.coeffs().abs2();
  const double tot = p.sum();
  return tot > 0 ? (p * (1 - band)).sum() / tot : 0.0;
}

}  // namespace

RArray envelope_band_table(const Grid2D& g, double eps, double delta) {
  check_eps(eps);
  return cutoff_table(g, BandSpec::origin(delta / eps));
}

SpectralField envelope_band_project(const SpectralField& f, double eps, double delta) {
  return apply_table(f, envelope_band_table(f.grid(), eps, delta));
}

SpectralField fdnls_linear(const SpectralField& z, double eps) {
  check_eps(eps);
  return apply_table(as_complex(z), fdnls_table(z.grid(), eps));
}

SpectralField fdnls_residual(const SpectralField& z, double eps, double delta, const RemainderCoupling& remainder) {
  const RArray band = envelope_band_table(z.grid(), eps, delta);
  const double off = off_band_fraction(z, band);
  if (off > 1e-12) {
    std::ostringstream os;
    os << "fdnls_residual: " << off << " of the spectral energy lies outside |k| < delta/eps = " << delta / eps;
    throw DomainError(os.str());
  }
  SpectralField r = fdnls_linear(z, eps) - kFdnlsCubic * apply_table(dealiased_cubic(as_complex(z)), band);
  if (remainder) r += remainder(z);
  return r;
}

FdnlsJacobian::FdnlsJacobian(const SpectralField& z, double eps, double delta)
    : grid_(z.grid()),
      M_(fdnls_table(z.grid(), eps)),
      band_(envelope_band_table(z.grid(), eps, delta)),
      w_abs_(z, conj(z)),
      w_sq_(z, z) {}

SpectralField FdnlsJacobian::apply(const SpectralField& v0) const {
  const SpectralField v = as_complex(v0);
  const SpectralField cubic = 2.0 * w_abs_.apply(v) + w_sq_.apply(v, true);
  return apply_table(v, M_) - kFdnlsCubic * apply_table(cubic, band_);
}

double FdnlsJacobian::floor_estimate(int steps) const {
  const Grid2D g = grid_;
  const RArray band = band_;
  // M is positive on the band; outside it the Krylov space never reaches
  const RArray Mmh = band * M_.max(1e-300).rsqrt();
  auto project = [g, band](const Vec& v) {
    return stack(apply_table(symmetrize(from_vec(g, v, false), Parity::conj_x_even_z), band));
  };
  LinOp S = [&](const Vec& v) {
    const SpectralField u = apply_table(from_vec(g, v, false), Mmh);
    const SpectralField wu = 2.0 * w_abs_.apply(u) + w_sq_.apply(u, true);
    return stack(kFdnlsCubic * apply_table(wu, Mmh));
  };
  std::mt19937 rng(2024);
  std::normal_distribution<double> n01;
  Vec start(2 * g.size());
  for (auto& x : start) x = n01(rng);
  const LanczosResult lz = lanczos(S, start, steps, project);
  double m = 1e300;
  for (int i = 0; i < lz.steps; ++i) m = std::min(m, std::abs(1 - lz.values(i)));
  return m;
}

FdnlsSolution solve_fdnls(double eps, Branch branch, const GroundState& ground, double tol, const FdnlsConfig& cfg,
                          const SpectralField* warm) {
  check_eps(eps);
  if (!(tol > 0)) throw DomainError("solve_fdnls: tolerance must be positive");
  if (!ground.report.converged) throw DomainError("solve_fdnls: ground state not converged");
  const Grid2D& g = ground.zeta0.grid();
  const double sign = branch_sign(branch);
  const RArray band = envelope_band_table(g, eps, cfg.delta);
  const RArray precond = 1.0 / symbol_table(g, limit_symbol);

  FdnlsSolution sol;
  sol.epsilon = eps;
  sol.branch = branch;
  SolverReport& rep = sol.report;
  rep.solver = cfg.remainder ? "fdnls-newton+remainder" : "fdnls-newton";

  auto project_field = [&](const SpectralField& f) {
    return apply_table(symmetrize(as_complex(f), Parity::conj_x_even_z), band);
  };
  auto project = [&](const Vec& v) { return stack(project_field(from_vec(g, v, false))); };

  SpectralField z = project_field(warm ? *warm : sign * ground.zeta0);
  SpectralField R = fdnls_residual(z, eps, cfg.delta, cfg.remainder);
  double res = sobolev_norm(R, 1);
  rep.residuals.push_back(res);
  double best = res, max_defect = 0;
  for (int it = 1; it <= cfg.newton_max && res > tol; ++it) {
    const FdnlsJacobian J(z, eps, cfg.delta);
    LinOp A = [&](const Vec& x) { return project(stack(apply_table(J.apply(from_vec(g, x, false)), precond))); };
    LinOp At = [&](const Vec& x) { return project(stack(J.apply(apply_table(from_vec(g, x, false), precond)))); };
    const Vec b = project(stack(apply_table(-R, precond)));
    const CgnrResult cg = cgnr(A, At, b, cfg.cg_tol, cfg.cg_max);
    rep.set("cg_iterations_" + std::to_string(it), cg.iterations);
    // backtracking on the H1 residual; far from the solution full steps overshoot
    const SpectralField step = from_vec(g, cg.x, false);
    const double prev = res;
    double t = 1;
    SpectralField zt;
    for (int k = 0;; ++k, t *= 0.5) {
      zt = project_field(z + t * step);
      R = fdnls_residual(zt, eps, cfg.delta, cfg.remainder);
      res = sobolev_norm(R, 1);
      if (res <= (1 - 1e-4 * t) * prev || k >= cfg.backtrack_max) break;
    }
    rep.set("step_" + std::to_string(it), t);
    z = zt;
    max_defect = std::max(max_defect, symmetry_defect(z, Parity::conj_x_even_z));
    rep.residuals.push_back(res);
    if (prev > 0) rep.contraction.push_back(res / prev);
    rep.iterations = it;
    best = std::min(best, res);
    if (!std::isfinite(res) || res > 1e3 * best) break;
  }
  rep.converged = res <= tol;
  rep.set("max_symmetry_defect", max_defect);

  sol.zeta = z;
  sol.residual_h1 = res;
  const SpectralField d = z - sign * ground.zeta0;
  sol.h1_distance_to_ground_state = sobolev_norm(d, 1);
  sol.sup_distance_to_ground_state = d.sup_norm();
  sol.jacobian_floor = FdnlsJacobian(z, eps, cfg.delta).floor_estimate(cfg.lanczos_steps);
  rep.set("residual_h1", res);
  rep.set("h1_distance", sol.h1_distance_to_ground_state);
  rep.set("sup_distance", sol.sup_distance_to_ground_state);
  rep.set("jacobian_floor", sol.jacobian_floor);

  std::ostringstream msg;
  if (!rep.converged) msg << "Newton stopped at H1 residual " << res << " > " << tol << "; ";
  if (sol.jacobian_floor < cfg.jacobian_floor)
    msg << "Jacobian floor " << sol.jacobian_floor << " below " << cfg.jacobian_floor << ": epsilon too large; ";
  if (eps > cfg.eps_max) msg << "epsilon " << eps << " beyond the configured range (extrapolation); ";
  rep.message = msg.str();
  return sol;
}

}  // namespace dws
