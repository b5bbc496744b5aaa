#pragma once

#include <Eigen/Dense>
#include <functional>

#include "dws/field.hpp"

namespace dws {

using Vec = Eigen::VectorXd;
using LinOp = std::function<Vec(const Vec&)>;

struct CgnrResult {
  Vec x;
  int iterations = 0;
  double relative_residual = 0;  // |b - A x| / |b|
  bool converged = false;
};

// Conjugate gradient on the normal equations A^T A x = A^T b.
CgnrResult cgnr(const LinOp& A, const LinOp& At, const Vec& b, double tol, int max_iter);

struct LanczosResult {
  Vec values;         // ascending Ritz values
  Eigen::MatrixXd vectors;  // Ritz vectors as columns
  Eigen::MatrixXd basis;    // orthonormal Krylov basis
  Eigen::MatrixXd projected;  // basis^T A basis (tridiagonal)
  int steps = 0;
};

// Lanczos with full reorthogonalization for a symmetric operator; `project`
// (optional) is applied to every Krylov vector to stay inside a subspace.
LanczosResult lanczos(const LinOp& A, const Vec& start, int steps, const LinOp& project = nullptr);

// flattening between fields and Krylov vectors: real fields use their values,
// complex fields stack (Re, Im)
Vec to_vec(const SpectralField& f);
SpectralField from_vec(const Grid2D& g, const Vec& v, bool real);

}  // namespace dws
