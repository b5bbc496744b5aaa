#pragma once

#include <Eigen/Core>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace dws {

using cplx = std::complex<double>;
// (nz, nx) arrays, x fastest: the layout of the binary field format and of FFTW's 2-D plans.
using CArray = Eigen::Array<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RArray = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Periodic box [-Lx, Lx) x [-Lz, Lz) sampled at nx x nz points.
struct Grid2D {
  int nx = 0, nz = 0;
  double Lx = 0, Lz = 0;

  Grid2D() = default;
  Grid2D(int nx_, int nz_, double Lx_, double Lz_);

  double dk1() const;
  double dk3() const;
  double dx() const { return 2 * Lx / nx; }
  double dz() const { return 2 * Lz / nz; }
  double x(int ix) const { return -Lx + ix * dx(); }
  double z(int iz) const { return -Lz + iz * dz(); }
  double area() const { return 4 * Lx * Lz; }
  long size() const { return long(nx) * nz; }

  // signed lattice index in [-n/2, n/2) for storage index i
  static int signed_index(int i, int n) { return i < n / 2 ? i : i - n; }
  double k1(int ix) const { return signed_index(ix, nx) * dk1(); }
  double k3(int iz) const { return signed_index(iz, nz) * dk3(); }
  bool is_nyquist_x(int ix) const { return ix == nx / 2; }
  bool is_nyquist_z(int iz) const { return iz == nz / 2; }

  bool operator==(const Grid2D& o) const {
    return nx == o.nx && nz == o.nz && Lx == o.Lx && Lz == o.Lz;
  }
  bool operator!=(const Grid2D& o) const { return !(*this == o); }
};

struct WaveParams {
  double epsilon = 0.05;
  double delta = 0.15;
  double theta = 5.0 / 6.0;
  double R1 = 10.0;
  double R3 = 1.0;

  WaveParams() = default;
  explicit WaveParams(double eps, double delta_ = 0.15, double theta_ = 5.0 / 6.0);
  double c2() const { return 2 * (1 - epsilon * epsilon); }
  double c() const;
  void validate() const;
};

struct SolverReport {
  std::string solver;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residuals;    // per iteration
  std::vector<double> contraction;  // ratio of successive increments
  std::string message;
  // free-form scalar diagnostics, kept ordered for deterministic output
  std::vector<std::pair<std::string, double>> values;

  void set(const std::string& key, double v);
  double get(const std::string& key, double fallback = 0) const;
  double max_contraction() const;
};

}  // namespace dws
