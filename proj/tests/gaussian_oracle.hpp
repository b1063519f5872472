// Test-only reference for star products of Gaussian symbols. For quadratic
// membrane phases (constant F) the integral product formula is an exact
// complex Gaussian integral over (x2, x1); it is evaluated here with dense
// 8x8 complex linear algebra. The membrane area quadratic form is measured
// from the library's own area primitive on basis vectors, so this reference
// is independent of the convolution/Fourier machinery it referees.

#pragma once

#include "magstar/geometry.hpp"

#include <array>
#include <complex>
#include <numbers>
#include <vector>

namespace gaussian_oracle {

using namespace magstar;
using cplx = std::complex<double>;

// LDL^T for complex symmetric M with positive-definite real part; returns
// the diagonal pivots (each with positive real part), in-place lower factor
inline std::vector<cplx> ldlt(std::vector<std::vector<cplx>>& M) {
    const int d = (int)M.size();
    std::vector<cplx> D(d);
    for (int j = 0; j < d; ++j) {
        cplx acc = M[j][j];
        for (int k = 0; k < j; ++k) acc -= M[j][k] * M[j][k] * D[k];
        D[j] = acc;
        for (int i = j + 1; i < d; ++i) {
            cplx v = M[i][j];
            for (int k = 0; k < j; ++k) v -= M[i][k] * M[j][k] * D[k];
            M[i][j] = v / D[j];
        }
    }
    return D;
}

// int exp(-1/2 z^T M z + b^T z) dz over R^d, branch-safe for Re(M) > 0
inline cplx gaussian_integral(std::vector<std::vector<cplx>> M, std::vector<cplx> b) {
    const int d = (int)M.size();
    auto Mc = M;
    auto D = ldlt(Mc);
    // solve M y = b via the factors: L D L^T y = b
    std::vector<cplx> y = b;
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < i; ++k) y[i] -= Mc[i][k] * y[k];
    for (int i = 0; i < d; ++i) y[i] /= D[i];
    for (int i = d - 1; i >= 0; --i)
        for (int k = i + 1; k < d; ++k) y[i] -= Mc[k][i] * y[k];
    cplx quad(0.0, 0.0);
    for (int i = 0; i < d; ++i) quad += b[i] * y[i];
    cplx pref(1.0, 0.0);
    for (int i = 0; i < d; ++i) pref *= std::sqrt(2.0 * std::numbers::pi / D[i]);
    return pref * std::exp(0.5 * quad);
}

// membrane area of the midpoint triangle for (x, x+y2, x+y1), as a function
// of (y2, y1); quadratic with no linear/constant part for constant F, but we
// measure constant/linear/quadratic parts numerically so any pinned sign
// convention in the library flows through
struct AreaForm {
    int d;                       // 2n
    std::vector<std::vector<double>> Q; // symmetric 2d x 2d quadratic part
    std::vector<double> L;       // linear part
    double C;                    // constant

    static double area(const geom::ChordGeometry& g, const std::vector<double>& x,
                       const std::vector<double>& y2, const std::vector<double>& y1) {
        const int d = (int)x.size();
        std::vector<double> A0(d), A1(d), A2(d);
        for (int i = 0; i < d; ++i) {
            A0[i] = x[i] + y1[i] - y2[i];
            A1[i] = x[i] + y1[i] + y2[i];
            A2[i] = x[i] + y2[i] - y1[i];
        }
        return geom::triangle_area_omega_F(geom::Triangle{{A0, A1, A2}}, g);
    }

    static AreaForm measure(const geom::ChordGeometry& g, const std::vector<double>& x) {
        const int d = g.dim() * 2;
        AreaForm f;
        f.d = d;
        const int D = 2 * d;
        auto at = [&](const std::vector<double>& z) {
            std::vector<double> y2(z.begin(), z.begin() + d), y1(z.begin() + d, z.end());
            return area(g, x, y2, y1);
        };
        std::vector<double> zero(D, 0.0);
        f.C = at(zero);
        f.L.assign(D, 0.0);
        f.Q.assign(D, std::vector<double>(D, 0.0));
        for (int i = 0; i < D; ++i) {
            auto e = zero; e[i] = 1.0;
            auto em = zero; em[i] = -1.0;
            double fp = at(e), fm = at(em);
            f.L[i] = 0.5 * (fp - fm);
            f.Q[i][i] = fp + fm - 2.0 * f.C;
        }
        for (int i = 0; i < D; ++i)
            for (int j = i + 1; j < D; ++j) {
                auto e = zero; e[i] = 1.0; e[j] = 1.0;
                double v = at(e) - f.C - f.L[i] - f.L[j] -
                           0.5 * f.Q[i][i] - 0.5 * f.Q[j][j];
                f.Q[i][j] = f.Q[j][i] = v; // off-diagonal pair sums to v
            }
        // symmetric split: Q[i][j] stored so that area = C + L.z + 1/2 z^T Q z
        return f;
    }
};

// (f * g)(x) for f = exp(-(x-c2)^T A (x-c2)), g = exp(-(x-c1)^T B (x-c1)),
// constant-coefficient F (the area form must be exactly quadratic, which
// holds for fields of degree 0; degree-1 fields give a cubic area and are
// outside this oracle)
inline cplx product_at(const geom::ChordGeometry& g, double hbar,
                       const std::vector<std::vector<double>>& A,
                       const std::vector<std::vector<double>>& B,
                       const std::vector<double>& c2, const std::vector<double>& c1,
                       const std::vector<double>& x) {
    const int d = (int)x.size();
    const int D = 2 * d;
    AreaForm af = AreaForm::measure(g, x);
    // exponent: (i/hbar)(C + L.z + 1/2 z Q z) - (x + y2 - c2)A(...) - (x + y1 - c1)B(...)
    std::vector<std::vector<cplx>> M(D, std::vector<cplx>(D, cplx(0, 0)));
    std::vector<cplx> b(D, cplx(0, 0));
    cplx c0(0.0, 0.0);
    const cplx ih(0.0, 1.0 / hbar);
    for (int i = 0; i < D; ++i) {
        b[i] += ih * af.L[i];
        for (int j = 0; j < D; ++j) M[i][j] -= ih * af.Q[i][j];
    }
    c0 += ih * af.C;
    std::vector<double> dx2(d), dx1(d);
    for (int i = 0; i < d; ++i) { dx2[i] = x[i] - c2[i]; dx1[i] = x[i] - c1[i]; }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            M[i][j] += 2.0 * A[i][j];
            M[d + i][d + j] += 2.0 * B[i][j];
            b[i] -= 2.0 * A[i][j] * dx2[j];
            b[d + i] -= 2.0 * B[i][j] * dx1[j];
            c0 -= dx2[i] * A[i][j] * dx2[j] + dx1[i] * B[i][j] * dx1[j];
        }
    cplx integral = gaussian_integral(M, b);
    double norm = std::pow(std::numbers::pi * hbar, -d);
    return norm * std::exp(c0) * integral;
}

} // namespace gaussian_oracle
