#include "dws/nls.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace dws {

namespace {

double nls_symbol(double k1, double k3) { return 1 + 0.5 * k1 * k1 + k3 * k3; }

RArray linear_table(const Grid2D& g) { return symbol_table(g, nls_symbol); }

double ring_mass_fraction(const SpectralField& f) {
  const Grid2D& g = f.grid();
  double tot = 0, ring = 0;
  for (int iz = 0; iz < g.nz; ++iz)
    for (int ix = 0; ix < g.nx; ++ix) {
      const double p = std::norm(f.values()(iz, ix));
      tot += p;
      if (std::abs(g.x(ix)) > 0.9 * g.Lx || std::abs(g.z(iz)) > 0.9 * g.Lz) ring += p;
    }
  return tot > 0 ? ring / tot : 0.0;
}

}  // namespace

SpectralField nls_linear(const SpectralField& z) { return apply_multiplier(z, nls_symbol); }

SpectralField nls_linear_inverse(const SpectralField& z) {
  return apply_multiplier(z, [](double k1, double k3) { return 1 / nls_symbol(k1, k3); });
}

SpectralField nls_residual(const SpectralField& z) { return nls_linear(z) - kNlsCubic * dealiased_cubic(z); }

double nls_functional(const SpectralField& z) {
  const double quad = real_inner(z, nls_linear(z));
  const double quart = real_inner(z, dealiased_cubic(z));
  return 0.5 * quad - 0.25 * kNlsCubic * quart;
}

GroundState ground_state(const Grid2D& g, double tol, const NlsConfig& cfg) {
  if (!(tol > 0)) throw DomainError("ground_state: tolerance must be positive");
  GroundState gs;
  gs.report.solver = "nls-ground-state";
  const RArray L = linear_table(g);
  const RArray Linv = 1.0 / L;

  SpectralField z = SpectralField::sample(g, [&](double x, double zz) {
    return cfg.seed_amplitude * std::exp(-(x * x / 2 + zz * zz) / 2);
  });

  // Petviashvili phase
  double M = 0, prev_inc = 1e300;
  int stalls = 0;
  std::vector<double> factors;
  for (int it = 1; it <= cfg.petviashvili_max; ++it) {
    const SpectralField N = kNlsCubic * dealiased_cubic(z);
    const double num = real_inner(z, apply_table(z, L));
    const double den = real_inner(z, N);
    if (!(den > 0)) throw SolverError("ground_state: Petviashvili quotient lost positivity; seed degenerate");
    M = num / den;
    SpectralField next = symmetrize(std::pow(M, cfg.gamma) * apply_table(N, Linv), Parity::even_even);
    const double inc = l2_norm(next - z) / l2_norm(next);
    z = std::move(next);
    factors.push_back(M);
    gs.petviashvili_iterations = it;
    gs.report.residuals.push_back(inc);
    if (inc < cfg.petviashvili_tol) break;
    // stagnation at roundoff ends the phase too
    if (inc >= prev_inc && inc < 1e-8) {
      if (++stalls >= 5) break;
    } else {
      stalls = 0;
    }
    prev_inc = inc;
  }
  gs.report.set("petviashvili_factor", M);
  if (std::abs(M - 1) > 1e-6) {
    std::ostringstream os;
    os << "ground_state: Petviashvili factor " << M << " did not settle at 1 (grid too small or seed degenerate)";
    throw SolverError(os.str());
  }
  // monotone approach of the factor over the last iterations
  {
    int flips = 0;
    const size_t n = factors.size();
    for (size_t i = n > 10 ? n - 10 : 1; i < n; ++i)
      if (std::abs(factors[i] - 1) > std::abs(factors[i - 1] - 1) && std::abs(factors[i] - 1) > 1e-13) ++flips;
    gs.report.set("factor_nonmonotone_steps", flips);
  }

  // Newton polish in the even-even class, preconditioned by L^{-1}
  auto project = [&](const Vec& v) { return to_vec(symmetrize(from_vec(g, v, true), Parity::even_even)); };
  SpectralField R = nls_residual(z);
  double res = sobolev_norm(R, 1);
  for (int it = 0; it < cfg.newton_max && res > tol; ++it) {
    const PaddedWeight w(z, z);
    auto J = [&](const SpectralField& v) { return apply_table(v, L) - (3 * kNlsCubic) * w.apply(v); };
    LinOp A = [&](const Vec& x) { return project(to_vec(apply_table(J(from_vec(g, x, true)), Linv))); };
    LinOp At = [&](const Vec& x) { return project(to_vec(J(apply_table(from_vec(g, x, true), Linv)))); };
    const Vec b = project(to_vec(apply_table(-R, Linv)));
    const CgnrResult cg = cgnr(A, At, b, cfg.cg_tol, cfg.cg_max);
    z = symmetrize(z + from_vec(g, cg.x, true), Parity::even_even);
    R = nls_residual(z);
    res = sobolev_norm(R, 1);
    gs.newton_iterations = it + 1;
    gs.report.residuals.push_back(res);
    gs.report.set("newton_cg_iterations_" + std::to_string(it + 1), cg.iterations);
  }
  gs.zeta0 = z;
  gs.residual_h1 = res;
  gs.peak = z.values().real().maxCoeff();
  gs.ring_mass = ring_mass_fraction(z);
  gs.report.iterations = gs.petviashvili_iterations + gs.newton_iterations;
  gs.report.converged = res <= tol;
  gs.report.set("residual_h1", res);
  gs.report.set("peak", gs.peak);
  gs.report.set("ring_mass", gs.ring_mass);
  if (gs.ring_mass > cfg.ring_mass_max) {
    std::ostringstream os;
    os << "ground state carries " << gs.ring_mass << " of its mass near the boundary; enlarge the box";
    gs.report.message = os.str();
  }
  if (!gs.report.converged) {
    std::ostringstream os;
    os << "ground_state: Newton stopped at H1 residual " << res << " > " << tol;
    throw SolverError(os.str());
  }
  return gs;
}

LinearizedOperator::LinearizedOperator(const SpectralField& zeta0, double coupling)
    : grid_(zeta0.grid()), c_(coupling), w_(zeta0, zeta0) {
  L_ = linear_table(grid_);
  Lmh_ = L_.rsqrt();
}

SpectralField LinearizedOperator::apply(const SpectralField& v) const { return apply_table(v, L_) - c_ * w_.apply(v); }

SpectralField LinearizedOperator::apply_compact(const SpectralField& v) const {
  return c_ * apply_table(w_.apply(apply_table(v, Lmh_)), Lmh_);
}

LinearizedOps linearized_ops(const SpectralField& zeta0) {
  return LinearizedOps{LinearizedOperator(zeta0, 3 * kNlsCubic), LinearizedOperator(zeta0, kNlsCubic)};
}

const SpectrumSlice* KernelReport::find(const std::string& op, const std::string& subspace) const {
  for (const auto& s : slices)
    if (s.op == op && s.subspace == subspace) return &s;
  return nullptr;
}

namespace {

// Lanczos on the compact part S = c L^{-1/2} w L^{-1/2}. The values nu = 1 - mu are the
// eigenvalues of L^{-1/2} T L^{-1/2}; same inertia and kernel as T, and since L >= 1,
// min |lambda(T)| >= min |nu|.
SpectrumSlice spectrum_slice(const LinearizedOperator& T, const std::string& name, const char* subspace,
                             const Parity* parity, int steps, int count) {
  const Grid2D& g = T.grid();
  LinOp project = nullptr;
  if (parity) {
    const Parity p = *parity;
    project = [g, p](const Vec& v) { return to_vec(symmetrize(from_vec(g, v, true), p)); };
  }
  LinOp S = [&](const Vec& v) { return to_vec(T.apply_compact(from_vec(g, v, true))); };

  std::mt19937 rng(12345);
  std::normal_distribution<double> n01;
  Vec start(g.size());
  for (auto& x : start) x = n01(rng);
  const LanczosResult lz = lanczos(S, start, steps, project);

  SpectrumSlice out;
  out.op = name;
  out.subspace = subspace;
  out.steps = lz.steps;
  std::vector<double> nu(lz.steps);
  for (int i = 0; i < lz.steps; ++i) nu[i] = 1 - lz.values(i);
  std::vector<int> order(lz.steps);
  for (int i = 0; i < lz.steps; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return nu[a] < nu[b]; });
  int imin = 0;
  for (int k = 0; k < lz.steps; ++k) {
    const int i = order[k];
    if (int(out.lowest.size()) < count) out.lowest.push_back(nu[i]);
    if (std::abs(nu[i]) < std::abs(nu[imin])) imin = i;
  }
  out.min_abs = std::abs(nu[imin]);
  const Vec q = lz.vectors.col(imin);
  Vec r = S(q) - lz.values(imin) * q;
  if (project) r = project(r);
  out.ritz_residual = r.norm() / q.norm();
  return out;
}

}  // namespace

KernelReport kernel_check(const GroundState& gs, int lanczos_steps, int count) {
  const SpectralField& z = gs.zeta0;
  const LinearizedOps ops = linearized_ops(z);
  KernelReport rep;
  auto rel = [](const LinearizedOperator& T, const SpectralField& v) {
    return l2_norm(T.apply(v)) / l2_norm(nls_linear(v));
  };
  rep.t1_x_residual = rel(ops.T1, dx(z));
  rep.t1_z_residual = rel(ops.T1, dz(z));
  rep.t2_residual = rel(ops.T2, z);
  const Parity ee = Parity::even_even, ox = Parity::odd_x_even_z;
  rep.slices.push_back(spectrum_slice(ops.T1, "T1", "full", nullptr, lanczos_steps, count));
  rep.slices.push_back(spectrum_slice(ops.T1, "T1", "even_even", &ee, lanczos_steps, count));
  rep.slices.push_back(spectrum_slice(ops.T2, "T2", "full", nullptr, lanczos_steps, count));
  rep.slices.push_back(spectrum_slice(ops.T2, "T2", "odd_x_even_z", &ox, lanczos_steps, count));
  return rep;
}

}  // namespace dws
