#include "dws/krylov.hpp"

#include <cmath>

namespace dws {

CgnrResult cgnr(const LinOp& A, const LinOp& At, const Vec& b, double tol, int max_iter) {
  CgnrResult out;
  out.x = Vec::Zero(b.size());
  const double bn = b.norm();
  if (bn == 0) {
    out.converged = true;
    return out;
  }
  Vec r = b;
  Vec z = At(r);
  Vec p = z;
  double zz = z.squaredNorm();
  for (int it = 1; it <= max_iter; ++it) {
    const Vec w = A(p);
    const double ww = w.squaredNorm();
    if (ww == 0) break;
    const double alpha = zz / ww;
    out.x += alpha * p;
    r -= alpha * w;
    out.iterations = it;
    out.relative_residual = r.norm() / bn;
    if (out.relative_residual <= tol) {
      out.converged = true;
      break;
    }
    z = At(r);
    const double zz_new = z.squaredNorm();
    p = z + (zz_new / zz) * p;
    zz = zz_new;
  }
  // the recursive residual drifts; report the true one
  out.relative_residual = (b - A(out.x)).norm() / bn;
  out.converged = out.relative_residual <= 10 * tol;
  return out;
}

LanczosResult lanczos(const LinOp& A, const Vec& start, int steps, const LinOp& project) {
  const long n = start.size();
  steps = int(std::min<long>(steps, n));
  Eigen::MatrixXd Q(n, steps + 1);
  Vec alpha = Vec::Zero(steps), beta = Vec::Zero(steps);
  Vec q = project ? project(start) : start;
  q /= q.norm();
  Q.col(0) = q;
  int m = 0;
  for (int j = 0; j < steps; ++j) {
    Vec w = A(Q.col(j));
    if (project) w = project(w);
    alpha(j) = Q.col(j).dot(w);
    // two passes of classical Gram-Schmidt against the whole basis
    for (int pass = 0; pass < 2; ++pass) w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * w);
    m = j + 1;
    const double b = w.norm();
    beta(j) = b;
    if (b < 1e-13 * std::abs(alpha(j)) || b == 0) break;
    Q.col(j + 1) = w / b;
  }
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    T(j, j) = alpha(j);
    if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta(j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  LanczosResult out;
  out.steps = m;
  out.values = es.eigenvalues();
  out.basis = Q.leftCols(m);
  out.projected = T;
  out.vectors = out.basis * es.eigenvectors();
  return out;
}

Vec to_vec(const SpectralField& f) {
  const long n = f.grid().size();
  // callers that need a fixed layout must keep realness consistent
  if (f.is_real()) {
    Vec v(n);
    for (long i = 0; i < n; ++i) v(i) = f.values().data()[i].real();
    return v;
  }
  Vec v(2 * n);
  for (long i = 0; i < n; ++i) {
    v(i) = f.values().data()[i].real();
    v(n + i) = f.values().data()[i].imag();
  }
  return v;
}

SpectralField from_vec(const Grid2D& g, const Vec& v, bool real) {
  const long n = g.size();
  CArray a(g.nz, g.nx);
  for (long i = 0; i < n; ++i) a.data()[i] = real ? cplx(v(i), 0) : cplx(v(i), v(n + i));
  return SpectralField::from_values(g, std::move(a), real);
}

}  // namespace dws
