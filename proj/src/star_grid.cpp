#include "magstar/star_grid.hpp"

#include "magstar/geometry.hpp"

#include <cmath>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif
#include <numbers>

namespace magstar::star {

using kernels::cplx;

GridSymbol grid_magnetic_product(const GridSymbol& f, const GridSymbol& g,
                                 const MagneticForm& F) {
    if (!f.compatible(g))
        throw std::invalid_argument("grid_magnetic_product: grid mismatch between f and g");
    if (f.space() != GridSymbol::Space::QP)
        throw std::invalid_argument("grid_magnetic_product: expected (q,p) symbols");
    const int n = f.dim();
    if (F.dim() != n)
        throw std::invalid_argument("grid_magnetic_product: field dimension mismatch");
    if (F.time_dependent())
        throw std::invalid_argument("grid_magnetic_product: specialize the field in t first");

    GridSymbol ft = f.wigner_fourier();
    GridSymbol gt = g.wigner_fourier();
    GridSymbol ht(n, f.points(), f.q_origin(), f.dq(), f.hbar(), GridSymbol::Space::QU);

    const int N = f.points();
    if (n == 1) {
        kernels::convolve1(ht.data().data(), ft.data().data(), gt.data().data(), N, f.du());
        return ht.wigner_fourier_inverse();
    }

    // n = 2: build the cocycle phase tables. phi(q, u2, u1) with u2 = u - u1,
    // decomposed over q-monomials; each table holds the (u, u1) part / hbar.
    std::vector<std::vector<double>> tables;
    std::vector<std::vector<double>> qmono;
    if (!F.is_zero()) {
        // scratch layout: q at [0, n), u2 at [n, 2n), u1 at [2n, 3n)
        std::vector<Poly> qv(n), u2v(n), u1v(n);
        for (int i = 0; i < n; ++i) {
            qv[i] = Poly::var(i);
            u2v[i] = Poly::var(n + i);
            u1v[i] = Poly::var(2 * n + i);
        }
        Poly phi = geom::phi_midpoint_compose(F, qv, u2v, u1v, Poly(), 3 * n, 3 * n + 1);

        // split by q-exponent pair
        std::map<std::pair<int, int>, Poly> parts;
        for (const auto& t : phi.terms()) {
            std::pair<int, int> key{t.exp[0], t.exp[1]};
            Term stripped = t;
            stripped.exp[0] = stripped.exp[1] = 0;
            parts[key] += Poly::from_terms({stripped});
        }

        const double hb = f.hbar();
        for (auto& [key, poly] : parts) {
            std::vector<double> tab((std::size_t)N * N * N * N);
            std::vector<double> x(kMaxVars, 0.0);
            for (int m1 = 0; m1 < N; ++m1)
                for (int m2 = 0; m2 < N; ++m2)
                    for (int k1 = 0; k1 < N; ++k1)
                        for (int k2 = 0; k2 < N; ++k2) {
                            double u1a = f.u_value(k1), u1b = f.u_value(k2);
                            x[n + 0] = f.u_value(m1) - u1a; // u2 = u - u1
                            x[n + 1] = f.u_value(m2) - u1b;
                            x[2 * n + 0] = u1a;
                            x[2 * n + 1] = u1b;
                            tab[((std::size_t)(m1 * N + m2) * N + k1) * N + k2] =
                                poly.eval_real(x) / hb;
                        }
            std::vector<double> qm((std::size_t)N * N);
            for (int i1 = 0; i1 < N; ++i1)
                for (int i2 = 0; i2 < N; ++i2)
                    qm[(std::size_t)i1 * N + i2] = std::pow(f.q_value(0, i1), key.first) *
                                                   std::pow(f.q_value(1, i2), key.second);
            tables.push_back(std::move(tab));
            qmono.push_back(std::move(qm));
        }
    }

    // constant fields have a q-independent phase: fold it into one complex
    // table and skip the trigonometry in the hot loop
    if (tables.size() == 1 && qmono.size() == 1) {
        bool constq = true;
        for (double v : qmono[0])
            if (v != qmono[0][0]) { constq = false; break; }
        if (constq) {
            std::vector<kernels::cplx> phase(tables[0].size());
            for (std::size_t i = 0; i < phase.size(); ++i)
                phase[i] = std::polar(1.0, qmono[0][0] * tables[0][i]);
            kernels::convolve2_phase(ht.data().data(), ft.data().data(), gt.data().data(),
                                     N, f.du() * f.du(), phase.data());
            return ht.wigner_fourier_inverse();
        }
    }
    if (tables.empty()) {
        kernels::convolve2_phase(ht.data().data(), ft.data().data(), gt.data().data(), N,
                                 f.du() * f.du(), nullptr);
        return ht.wigner_fourier_inverse();
    }
    std::vector<const double*> tp, qp;
    for (std::size_t t = 0; t < tables.size(); ++t) {
        tp.push_back(tables[t].data());
        qp.push_back(qmono[t].data());
    }
    kernels::convolve2(ht.data().data(), ft.data().data(), gt.data().data(), N,
                       f.du() * f.du(), (int)tables.size(), tp.data(), qp.data());
    return ht.wigner_fourier_inverse();
}

// --- direct integral form -----------------------------------------------------

namespace {

// compiled flux evaluator: terms of the three-point flux polynomial with the
// vertex coordinates packed as 3n contiguous slots
struct FluxTerms {
    struct T {
        double c;
        std::uint8_t e[12];
    };
    int nv = 0;
    std::vector<T> terms;

    static FluxTerms compile(const MagneticForm& F) {
        FluxTerms out;
        const int n = F.dim();
        out.nv = 3 * n;
        Poly flux = geom::flux_symbolic(F);
        for (const auto& t : flux.terms()) {
            T ct;
            ct.c = t.coef.re.to_double();
            for (int v = 0; v < 12; ++v) ct.e[v] = 0;
            for (int v = 0; v < 3 * n; ++v) ct.e[v] = t.exp[v];
            out.terms.push_back(ct);
        }
        return out;
    }
    // x = [q of vertex-as-q, q', q''] in the chord convention
    double eval(const double* v) const {
        double acc = 0;
        for (const auto& t : terms) {
            double m = t.c;
            for (int i = 0; i < nv; ++i)
                for (int e = 0; e < t.e[i]; ++e) m *= v[i];
            acc += m;
        }
        return acc;
    }
};

} // namespace

cplx integral_product_at(const std::function<cplx(const std::vector<double>&)>& f,
                         const std::function<cplx(const std::vector<double>&)>& g,
                         const MagneticForm& F, double hbar, const std::vector<double>& x,
                         const std::vector<double>& window_center, double window_halfwidth,
                         int points_per_axis, bool via_wing_membrane) {
    const int n = F.dim();
    const int d = 2 * n;
    if ((int)x.size() != d || (int)window_center.size() != d)
        throw std::invalid_argument("integral_product_at: bad point dimension");
    geom::ChordGeometry geometry(F);

    const int W = points_per_axis;
    const double h = 2.0 * window_halfwidth / (W - 1);
    const std::size_t total_x2 = [&] {
        std::size_t t = 1;
        for (int i = 0; i < d; ++i) t *= W;
        return t;
    }();

    if (via_wing_membrane) {
        // hexagon route through the groupoid vertex construction (exact but
        // allocation-heavy); meant for modest windows
        std::vector<double> x2(d), x1(d);
        std::vector<int> idx(2 * d, 0);
        cplx acc(0, 0);
        while (true) {
            for (int i = 0; i < d; ++i) {
                x2[i] = window_center[i] - window_halfwidth + idx[i] * h;
                x1[i] = window_center[i] - window_halfwidth + idx[d + i] * h;
            }
            acc += std::polar(1.0, geom::hexagon_membrane_area(geometry, x, x2, x1) / hbar) *
                   f(x2) * g(x1);
            int pos = 0;
            while (pos < 2 * d && ++idx[pos] == W) idx[pos++] = 0;
            if (pos == 2 * d) break;
        }
        return acc * (std::pow(h, 2 * d) / std::pow(std::numbers::pi * hbar, d));
    }

    FluxTerms flux = FluxTerms::compile(F);
    const bool has_flux = !F.is_zero();

    std::vector<cplx> partial((std::size_t)kernels::thread_cap(), cplx(0, 0));
#pragma omp parallel num_threads(kernels::thread_cap())
    {
#ifdef _OPENMP
        const int tid = omp_get_thread_num();
        const int nth = omp_get_num_threads();
#else
        const int tid = 0;
        const int nth = 1;
#endif
        std::vector<double> x2(d), x1(d), A0(d), A1(d), A2(d);
        std::vector<double> vbuf(12, 0.0);
        std::vector<int> idx(d, 0);
        cplx acc(0, 0);
        for (std::size_t outer = tid; outer < total_x2; outer += nth) {
            std::size_t rem = outer;
            for (int i = 0; i < d; ++i) {
                x2[i] = window_center[i] - window_halfwidth + (double)(rem % W) * h;
                rem /= W;
            }
            std::fill(idx.begin(), idx.end(), 0);
            while (true) {
                for (int i = 0; i < d; ++i)
                    x1[i] = window_center[i] - window_halfwidth + idx[i] * h;
                // triangle with side midpoints (x, x2, x1)
                for (int i = 0; i < d; ++i) {
                    A0[i] = x[i] + x1[i] - x2[i];
                    A1[i] = x1[i] + x2[i] - x[i];
                    A2[i] = x[i] + x2[i] - x1[i];
                }
                double area = 0.0;
                for (int j = 0; j < n; ++j) {
                    double u_q = A1[j] - A0[j], u_p = A1[n + j] - A0[n + j];
                    double v_q = A2[j] - A0[j], v_p = A2[n + j] - A0[n + j];
                    area += 0.5 * (u_p * v_q - u_q * v_p);
                }
                if (has_flux) {
                    for (int j = 0; j < n; ++j) {
                        vbuf[j] = A2[j];          // q
                        vbuf[n + j] = A1[j];      // q'
                        vbuf[2 * n + j] = A0[j];  // q''
                    }
                    area += flux.eval(vbuf.data());
                }
                acc += std::polar(1.0, area / hbar) * f(x2) * g(x1);
                int pos = 0;
                while (pos < d && ++idx[pos] == W) idx[pos++] = 0;
                if (pos == d) break;
            }
        }
        partial[tid] = acc;
    }
    cplx acc(0, 0);
    for (const auto& v : partial) acc += v;
    return acc * (std::pow(h, 2 * d) / std::pow(std::numbers::pi * hbar, d));
}

} // namespace magstar::star
