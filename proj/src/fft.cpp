#include "dws/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace dws::fft {
namespace {

enum class Kind { c2c_fwd, c2c_inv, r2c, c2r };

struct PlanCache {
  std::mutex mu;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [k, p] : plans) fftw_destroy_plan(p);
  }

  fftw_plan get(Kind kind, int nz, int nx) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(int(kind), nz, nx);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    // planning never touches data with FFTW_ESTIMATE, scratch buffers only fix the shape
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = nullptr;
    const long n = long(nz) * nx, nh = long(nz) * (nx / 2 + 1);
    switch (kind) {
      case Kind::c2c_fwd:
      case Kind::c2c_inv: {
        auto* a = fftw_alloc_complex(n);
        auto* b = fftw_alloc_complex(n);
        p = fftw_plan_dft_2d(nz, nx, a, b, kind == Kind::c2c_fwd ? FFTW_FORWARD : FFTW_BACKWARD, flags);
        fftw_free(a);
        fftw_free(b);
        break;
      }
      case Kind::r2c: {
        auto* a = fftw_alloc_real(n);
        auto* b = fftw_alloc_complex(nh);
        p = fftw_plan_dft_r2c_2d(nz, nx, a, b, flags);
        fftw_free(a);
        fftw_free(b);
        break;
      }
      case Kind::c2r: {
        auto* a = fftw_alloc_complex(nh);
        auto* b = fftw_alloc_real(n);
        p = fftw_plan_dft_c2r_2d(nz, nx, a, b, flags);
        fftw_free(a);
        fftw_free(b);
        break;
      }
    }
    if (!p) throw std::runtime_error("fftw planning failed");
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

fftw_complex* fc(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* fc(const cplx* p) { return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p)); }

}  // namespace

CArray forward(const CArray& values) {
  const int nz = int(values.rows()), nx = int(values.cols());
  CArray out(nz, nx);
  fftw_execute_dft(cache().get(Kind::c2c_fwd, nz, nx), fc(values.data()), fc(out.data()));
  return out;
}

CArray inverse(const CArray& coeffs) {
  const int nz = int(coeffs.rows()), nx = int(coeffs.cols());
  CArray out(nz, nx);
  fftw_execute_dft(cache().get(Kind::c2c_inv, nz, nx), fc(coeffs.data()), fc(out.data()));
  out /= double(nz) * nx;
  return out;
}

void forward_real(const double* in, cplx* out, int nz, int nx) {
  fftw_execute_dft_r2c(cache().get(Kind::r2c, nz, nx), const_cast<double*>(in), fc(out));
}

void inverse_real(const cplx* in, double* out, int nz, int nx) {
  // c2r overwrites its input
  CArray tmp = Eigen::Map<const CArray>(in, nz, nx / 2 + 1);
  fftw_execute_dft_c2r(cache().get(Kind::c2r, nz, nx), fc(tmp.data()), out);
  const double s = 1.0 / (double(nz) * nx);
  for (long i = 0; i < long(nz) * nx; ++i) out[i] *= s;
}

CArray forward_real(const RArray& values) {
  const int nz = int(values.rows()), nx = int(values.cols());
  CArray out(nz, nx / 2 + 1);
  forward_real(values.data(), out.data(), nz, nx);
  return out;
}

RArray inverse_real(const CArray& half_coeffs, int nx) {
  const int nz = int(half_coeffs.rows());
  RArray out(nz, nx);
  inverse_real(half_coeffs.data(), out.data(), nz, nx);
  return out;
}

}  // namespace dws::fft
