#pragma once

#include "dws/types.hpp"

namespace dws::fft {

// 2-D transforms over (nz, nx) row-major arrays. Forward is unnormalized;
// inverse divides by nz*nx. Plans are cached per shape behind a mutex and
// executed through the new-array interface, so concurrent calls are safe.
CArray forward(const CArray& values);
CArray inverse(const CArray& coeffs);

// Real transforms with the x axis halved: coeffs have shape (nz, nx/2+1).
CArray forward_real(const RArray& values);
RArray inverse_real(const CArray& half_coeffs, int nx);

// in-place variants on raw buffers, used by the half-space solver
void forward_real(const double* in, cplx* out, int nz, int nx);
void inverse_real(const cplx* in, double* out, int nz, int nx);  // `in` is preserved

}  // namespace dws::fft
