// Hot data-parallel kernels. Every kernel has a serial reference
// implementation and an OpenMP variant that parallelizes over independent
// output elements only, so the two produce bit-identical results; tests
// assert that equality and tools/bench compares their throughput.
// MAGSTAR_THREADS caps the team size (0 or unset = hardware default).

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace magstar::kernels {

using cplx = std::complex<double>;

int thread_cap();

// in-place radix-2 FFT, sign = +1 or -1 in exp(sign * 2 pi i j k / n)
void fft_inplace(cplx* data, std::size_t n, int sign);

// independent rows of length len, contiguous
void fft_rows_serial(cplx* data, std::size_t rows, std::size_t len, int sign);
void fft_rows_parallel(cplx* data, std::size_t rows, std::size_t len, int sign);
void fft_rows(cplx* data, std::size_t rows, std::size_t len, int sign);

// dense row-major complex matmul C = A * B (square)
void zgemm_serial(const cplx* A, const cplx* B, cplx* C, int n);
void zgemm_parallel(const cplx* A, const cplx* B, cplx* C, int n);
void zgemm(const cplx* A, const cplx* B, cplx* C, int n);

// saddle-groupoid convolution on the (q, u) grid, n = 1 (no magnetic phase;
// a 2-form on R^1 vanishes):
//   out[iq, m] = du * sum_{k} a[(iq + k - N/2) mod N, m - k + N/2]
//                           * b[(iq - (m - k)) mod N ... ], see star_grid.cpp
// The index conventions are fixed by the caller through this kernel's
// definition; out must not alias a or b.
void convolve1_serial(cplx* out, const cplx* a, const cplx* b, int N, double du);
void convolve1_parallel(cplx* out, const cplx* a, const cplx* b, int N, double du);
void convolve1(cplx* out, const cplx* a, const cplx* b, int N, double du);

// n = 2 with magnetic phase tables: the flux through the convolution
// triangle separates as Phi(q, u, u1) = sum_t qmono[t][iq] * table[t][u, u1]
// over the q-monomials of the flux polynomial. Tables are indexed by
// (u, u1) as ((m1 N + m2) N + k1) N + k2 and qmono by iq1 * N + iq2;
// ntab = 0 means zero phase.
void convolve2_serial(cplx* out, const cplx* a, const cplx* b, int N, double du2,
                      int ntab, const double* const* tables, const double* const* qmono);
void convolve2_parallel(cplx* out, const cplx* a, const cplx* b, int N, double du2,
                        int ntab, const double* const* tables, const double* const* qmono);
void convolve2(cplx* out, const cplx* a, const cplx* b, int N, double du2,
               int ntab, const double* const* tables, const double* const* qmono);

// q-independent cocycle (constant fields): the phase factor is precomputed
// as one complex table over (u, u1)
void convolve2_phase_serial(cplx* out, const cplx* a, const cplx* b, int N, double du2,
                            const cplx* phase);
void convolve2_phase_parallel(cplx* out, const cplx* a, const cplx* b, int N, double du2,
                              const cplx* phase);
void convolve2_phase(cplx* out, const cplx* a, const cplx* b, int N, double du2,
                     const cplx* phase);

} // namespace magstar::kernels
