#include "magstar/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace magstar::kernels {

int thread_cap() {
    static int cap = [] {
        if (const char* env = std::getenv("MAGSTAR_THREADS")) {
            int v = std::atoi(env);
            if (v > 0) return v;
        }
#ifdef _OPENMP
        return omp_get_max_threads();
#else
        return 1;
#endif
    }();
    return cap;
}

void fft_inplace(cplx* a, std::size_t n, int sign) {
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft: length must be a power of two");
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = sign * 2.0 * std::numbers::pi / (double)len;
        cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

void fft_rows_serial(cplx* data, std::size_t rows, std::size_t len, int sign) {
    for (std::size_t r = 0; r < rows; ++r) fft_inplace(data + r * len, len, sign);
}

void fft_rows_parallel(cplx* data, std::size_t rows, std::size_t len, int sign) {
#pragma omp parallel for schedule(static) num_threads(thread_cap())
    for (long long r = 0; r < (long long)rows; ++r)
        fft_inplace(data + (std::size_t)r * len, len, sign);
}

void fft_rows(cplx* data, std::size_t rows, std::size_t len, int sign) {
    if (thread_cap() > 1 && rows > 1) fft_rows_parallel(data, rows, len, sign);
    else fft_rows_serial(data, rows, len, sign);
}

namespace {

inline void zgemm_row_range(const cplx* A, const cplx* B, cplx* C, int n, int r0, int r1) {
    // blocked over k for cache reuse; row-major
    for (int i = r0; i < r1; ++i) {
        cplx* Ci = C + (std::size_t)i * n;
        for (int j = 0; j < n; ++j) Ci[j] = cplx(0.0, 0.0);
        const cplx* Ai = A + (std::size_t)i * n;
        for (int k = 0; k < n; ++k) {
            cplx aik = Ai[k];
            if (aik == cplx(0.0, 0.0)) continue;
            const cplx* Bk = B + (std::size_t)k * n;
            for (int j = 0; j < n; ++j) Ci[j] += aik * Bk[j];
        }
    }
}

} // namespace

void zgemm_serial(const cplx* A, const cplx* B, cplx* C, int n) {
    zgemm_row_range(A, B, C, n, 0, n);
}

void zgemm_parallel(const cplx* A, const cplx* B, cplx* C, int n) {
#pragma omp parallel for schedule(static) num_threads(thread_cap())
    for (int i = 0; i < n; ++i) zgemm_row_range(A, B, C, n, i, i + 1);
}

void zgemm(const cplx* A, const cplx* B, cplx* C, int n) {
    if (thread_cap() > 1 && n > 32) zgemm_parallel(A, B, C, n);
    else zgemm_serial(A, B, C, n);
}

// --- saddle convolutions -----------------------------------------------------
//
// Index conventions (see star_grid.cpp): grids are periodic with N points per
// axis; u_m = (m - N/2) * 2 dq. The product a (.) b at (iq, m) gathers
//   a at q-index iq + (k - N/2), u-index (m - k + N/2) mod N
//   b at q-index iq - (m - k),   u-index k
// which realizes q + u1/2 and q - (u - u1)/2 on the lattice.

namespace {

inline int wrap(int i, int N) { return ((i % N) + N) % N; }

inline void conv1_point(cplx* out, const cplx* a, const cplx* b, int N, double du, int iq,
                        int m) {
    cplx acc(0.0, 0.0);
    for (int k = 0; k < N; ++k) {
        int mu = wrap(m - k + N / 2, N); // u - u1 on the periodic u-window
        int qa = wrap(iq + k - N / 2, N);
        int qb = wrap(iq - (m - k), N);
        acc += a[qa * N + mu] * b[qb * N + k];
    }
    out[iq * N + m] = acc * du;
}

} // namespace

void convolve1_serial(cplx* out, const cplx* a, const cplx* b, int N, double du) {
    for (int iq = 0; iq < N; ++iq)
        for (int m = 0; m < N; ++m) conv1_point(out, a, b, N, du, iq, m);
}

void convolve1_parallel(cplx* out, const cplx* a, const cplx* b, int N, double du) {
#pragma omp parallel for schedule(static) num_threads(thread_cap())
    for (int iq = 0; iq < N; ++iq)
        for (int m = 0; m < N; ++m) conv1_point(out, a, b, N, du, iq, m);
}

void convolve1(cplx* out, const cplx* a, const cplx* b, int N, double du) {
    if (thread_cap() > 1) convolve1_parallel(out, a, b, N, du);
    else convolve1_serial(out, a, b, N, du);
}

namespace {

// n = 2: flattened index (i1, i2) -> i1 * N + i2 per axis pair
inline void conv2_point(cplx* out, const cplx* a, const cplx* b, int N, double du2,
                        int ntab, const double* const* tables, const double* const* qmono,
                        int iq1, int iq2, int m1, int m2) {
    cplx acc(0.0, 0.0);
    const int iq = iq1 * N + iq2;
    for (int k1 = 0; k1 < N; ++k1) {
        int mu1 = wrap(m1 - k1 + N / 2, N);
        int qa1 = wrap(iq1 + k1 - N / 2, N);
        int qb1 = wrap(iq1 - (m1 - k1), N);
        for (int k2 = 0; k2 < N; ++k2) {
            int mu2 = wrap(m2 - k2 + N / 2, N);
            int qa2 = wrap(iq2 + k2 - N / 2, N);
            int qb2 = wrap(iq2 - (m2 - k2), N);
            cplx av = a[((std::size_t)(qa1 * N + qa2) * N + mu1) * N + mu2];
            cplx bv = b[((std::size_t)(qb1 * N + qb2) * N + k1) * N + k2];
            cplx term = av * bv;
            if (ntab) {
                std::size_t ti = ((std::size_t)(m1 * N + m2) * N + k1) * N + k2;
                double phi = 0.0;
                for (int t = 0; t < ntab; ++t) phi += qmono[t][iq] * tables[t][ti];
                term *= cplx(std::cos(phi), std::sin(phi));
            }
            acc += term;
        }
    }
    out[((std::size_t)(iq1 * N + iq2) * N + m1) * N + m2] = acc * du2;
}

} // namespace

void convolve2_serial(cplx* out, const cplx* a, const cplx* b, int N, double du2,
                      int ntab, const double* const* tables, const double* const* qmono) {
    for (int iq1 = 0; iq1 < N; ++iq1)
        for (int iq2 = 0; iq2 < N; ++iq2)
            for (int m1 = 0; m1 < N; ++m1)
                for (int m2 = 0; m2 < N; ++m2)
                    conv2_point(out, a, b, N, du2, ntab, tables, qmono, iq1, iq2, m1, m2);
}

void convolve2_parallel(cplx* out, const cplx* a, const cplx* b, int N, double du2,
                        int ntab, const double* const* tables, const double* const* qmono) {
#pragma omp parallel for schedule(static) collapse(2) num_threads(thread_cap())
    for (int iq1 = 0; iq1 < N; ++iq1)
        for (int iq2 = 0; iq2 < N; ++iq2)
            for (int m1 = 0; m1 < N; ++m1)
                for (int m2 = 0; m2 < N; ++m2)
                    conv2_point(out, a, b, N, du2, ntab, tables, qmono, iq1, iq2, m1, m2);
}

void convolve2(cplx* out, const cplx* a, const cplx* b, int N, double du2, int ntab,
               const double* const* tables, const double* const* qmono) {
    if (thread_cap() > 1) convolve2_parallel(out, a, b, N, du2, ntab, tables, qmono);
    else convolve2_serial(out, a, b, N, du2, ntab, tables, qmono);
}

namespace {

inline void conv2_phase_point(cplx* out, const cplx* a, const cplx* b, int N, double du2,
                              const cplx* phase, int iq1, int iq2, int m1, int m2) {
    cplx acc(0.0, 0.0);
    for (int k1 = 0; k1 < N; ++k1) {
        int mu1 = wrap(m1 - k1 + N / 2, N);
        int qa1 = wrap(iq1 + k1 - N / 2, N);
        int qb1 = wrap(iq1 - (m1 - k1), N);
        for (int k2 = 0; k2 < N; ++k2) {
            int mu2 = wrap(m2 - k2 + N / 2, N);
            int qa2 = wrap(iq2 + k2 - N / 2, N);
            int qb2 = wrap(iq2 - (m2 - k2), N);
            cplx av = a[((std::size_t)(qa1 * N + qa2) * N + mu1) * N + mu2];
            cplx bv = b[((std::size_t)(qb1 * N + qb2) * N + k1) * N + k2];
            cplx term = av * bv;
            if (phase) term *= phase[((std::size_t)(m1 * N + m2) * N + k1) * N + k2];
            acc += term;
        }
    }
    out[((std::size_t)(iq1 * N + iq2) * N + m1) * N + m2] = acc * du2;
}

} // namespace

void convolve2_phase_serial(cplx* out, const cplx* a, const cplx* b, int N, double du2,
                            const cplx* phase) {
    for (int iq1 = 0; iq1 < N; ++iq1)
        for (int iq2 = 0; iq2 < N; ++iq2)
            for (int m1 = 0; m1 < N; ++m1)
                for (int m2 = 0; m2 < N; ++m2)
                    conv2_phase_point(out, a, b, N, du2, phase, iq1, iq2, m1, m2);
}

void convolve2_phase_parallel(cplx* out, const cplx* a, const cplx* b, int N, double du2,
                              const cplx* phase) {
#pragma omp parallel for schedule(static) collapse(2) num_threads(thread_cap())
    for (int iq1 = 0; iq1 < N; ++iq1)
        for (int iq2 = 0; iq2 < N; ++iq2)
            for (int m1 = 0; m1 < N; ++m1)
                for (int m2 = 0; m2 < N; ++m2)
                    conv2_phase_point(out, a, b, N, du2, phase, iq1, iq2, m1, m2);
}

void convolve2_phase(cplx* out, const cplx* a, const cplx* b, int N, double du2,
                     const cplx* phase) {
    if (thread_cap() > 1) convolve2_phase_parallel(out, a, b, N, du2, phase);
    else convolve2_phase_serial(out, a, b, N, du2, phase);
}

} // namespace magstar::kernels
