#include "magstar/wkb.hpp"

#include "magstar/star_grid.hpp"

#include <cmath>

namespace magstar::dyn {

namespace {

// LU determinant of a small dense matrix
double det_small(Mat A) {
    const int d = (int)A.size();
    double det = 1.0;
    for (int c = 0; c < d; ++c) {
        int piv = c;
        for (int r = c + 1; r < d; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        if (A[piv][c] == 0.0) return 0.0;
        if (piv != c) { std::swap(A[piv], A[c]); det = -det; }
        det *= A[c][c];
        for (int r = c + 1; r < d; ++r) {
            double f = A[r][c] / A[c][c];
            for (int k = c; k < d; ++k) A[r][k] -= f * A[c][k];
        }
    }
    return det;
}

Vec solve_small(Mat A, Vec b) {
    const int d = (int)A.size();
    for (int c = 0; c < d; ++c) {
        int piv = c;
        for (int r = c + 1; r < d; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        if (A[piv][c] == 0.0) throw std::runtime_error("wkb: singular Newton Jacobian");
        if (piv != c) { std::swap(A[piv], A[c]); std::swap(b[piv], b[c]); }
        for (int r = c + 1; r < d; ++r) {
            double f = A[r][c] / A[c][c];
            for (int k = c; k < d; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    Vec x(d);
    for (int r = d - 1; r >= 0; --r) {
        double acc = b[r];
        for (int k = r + 1; k < d; ++k) acc -= A[r][k] * x[k];
        x[r] = acc / A[r][r];
    }
    return x;
}

double simpson_samples(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    if (n < 2) return 0.0;
    double acc = 0.0;
    std::size_t i = 0;
    while (i + 2 < n) { acc += (f[i] + 4 * f[i + 1] + f[i + 2]) * h / 3.0; i += 2; }
    if (i + 1 < n) acc += 0.5 * (f[i] + f[i + 1]) * h;
    return acc;
}

struct Problem {
    const Hamiltonian& H;
    const MagneticForm& F;
    const EMField* em; // null for the pure magnetic case
    int n;
    geom::ChordGeometry geometry;

    Problem(const Hamiltonian& H_, const MagneticForm& F_, const EMField* em_)
        : H(H_), F(F_), em(em_), n(F_.dim()), geometry(F_) {}

    FlowResult flow(const Vec& x0, double t, int steps) const {
        return em ? em_flow(H, *em, x0, t, steps) : magnetic_flow(H, F, x0, t, steps);
    }

    Vec lambda_at(const Vec& x0, double t) const {
        if (!em) return x0;
        return VirtualFlow(*em).at(x0, t);
    }
    Mat lambda_tangent(const Vec& x0, double t) const {
        Mat D(2 * n, Vec(2 * n, 0.0));
        if (!em) {
            for (int i = 0; i < 2 * n; ++i) D[i][i] = 1.0;
            return D;
        }
        return VirtualFlow(*em).tangent(x0, t);
    }

    // endpoint map Phi(x0) = (gamma + lambda)/2 + (0; alpha^s(t, gamma_q, lambda_q))
    Vec endpoint(const FlowResult& fl, const Vec& x0, double t) const {
        const Vec& g = fl.endpoint();
        Vec lam = lambda_at(x0, t);
        Vec gq(g.begin(), g.begin() + n), lq(lam.begin(), lam.begin() + n);
        auto A1 = geometry.valatin(gq, lq, t);
        auto A2 = geometry.valatin(lq, gq, t);
        Vec X(2 * n);
        for (int j = 0; j < n; ++j) {
            X[j] = 0.5 * (g[j] + lam[j]);
            X[n + j] = 0.5 * (g[n + j] + lam[n + j]) + 0.5 * (A1[j] + A2[j]);
        }
        return X;
    }

    Mat endpoint_jacobian(const FlowResult& fl, const Vec& x0, double t) const {
        const Vec& g = fl.endpoint();
        const Mat& dg = fl.endpoint_tangent();
        Vec lam = lambda_at(x0, t);
        Mat dl = lambda_tangent(x0, t);
        Vec gq(g.begin(), g.begin() + n), lq(lam.begin(), lam.begin() + n);
        auto dA1_dq = geometry.valatin_dq(gq, lq, t);   // d A_j(gq, lq) / d gq_k
        auto dA1_dqp = geometry.valatin_dqp(gq, lq, t); // d A_j(gq, lq) / d lq_k
        auto dA2_dq = geometry.valatin_dq(lq, gq, t);   // d A_j(lq, gq) / d lq_k
        auto dA2_dqp = geometry.valatin_dqp(lq, gq, t); // d A_j(lq, gq) / d gq_k
        Mat J(2 * n, Vec(2 * n, 0.0));
        for (int j = 0; j < n; ++j)
            for (int b = 0; b < 2 * n; ++b) {
                J[j][b] = 0.5 * (dg[j][b] + dl[j][b]);
                double acc = 0.5 * (dg[n + j][b] + dl[n + j][b]);
                for (int k = 0; k < n; ++k) {
                    acc += 0.5 * (dA1_dq[j][k] + dA2_dqp[j][k]) * dg[k][b];
                    acc += 0.5 * (dA1_dqp[j][k] + dA2_dq[j][k]) * dl[k][b];
                }
                J[n + j][b] = acc;
            }
        return J;
    }
};

// action route: int (Y . X' - e beta - H) dt over the flow samples
void assemble_phase(const Problem& P, const FlowResult& fl, const Vec& x0, WkbData& out) {
    const int n = P.n;
    const std::size_t ns = fl.times.size();
    std::vector<double> yxdot(ns), hval(ns), beta(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        double tc = fl.times[s];
        const Vec& g = fl.gamma[s];
        Vec lam = P.em ? fl.lambda[s] : x0;
        Vec ldot = P.em ? fl.lambda_dot[s] : Vec(2 * n, 0.0);
        Vec gq(g.begin(), g.begin() + n), lq(lam.begin(), lam.begin() + n);
        auto A1 = P.geometry.valatin(gq, lq, tc);
        auto A2 = P.geometry.valatin(lq, gq, tc);
        auto dA1q = P.geometry.valatin_dq(gq, lq, tc);
        auto dA1qp = P.geometry.valatin_dqp(gq, lq, tc);
        auto dA2q = P.geometry.valatin_dq(lq, gq, tc);
        auto dA2qp = P.geometry.valatin_dqp(lq, gq, tc);
        auto dA1t = P.geometry.valatin_dt(gq, lq, tc);
        auto dA2t = P.geometry.valatin_dt(lq, gq, tc);

        // Y = J(gamma - lambda) + (alpha^a; 0)
        Vec Y(2 * n);
        for (int j = 0; j < n; ++j) {
            Y[j] = (g[n + j] - lam[n + j]) + (A1[j] - A2[j]);
            Y[n + j] = -(g[j] - lam[j]);
        }
        // X' = (gamma' + lambda')/2 + d/dt (0; alpha^s)
        Vec Xd(2 * n);
        for (int j = 0; j < n; ++j) Xd[j] = 0.5 * (fl.gamma_dot[s][j] + ldot[j]);
        for (int j = 0; j < n; ++j) {
            double d = 0.5 * (fl.gamma_dot[s][n + j] + ldot[n + j]);
            d += 0.5 * (dA1t[j] + dA2t[j]);
            for (int k = 0; k < n; ++k) {
                d += 0.5 * (dA1q[j][k] + dA2qp[j][k]) * fl.gamma_dot[s][k];
                d += 0.5 * (dA1qp[j][k] + dA2q[j][k]) * ldot[k];
            }
            Xd[n + j] = d;
        }
        double v = 0.0;
        for (int j = 0; j < 2 * n; ++j) v += Y[j] * Xd[j];
        yxdot[s] = v;
        Vec gp(g.begin() + n, g.end());
        hval[s] = P.H.value(gq, gp, tc);
        beta[s] = P.em ? geom::electric_potential(*P.em, tc, gq, lq) : 0.0;
    }
    double h = fl.step;
    double Iy = simpson_samples(yxdot, h);
    double Ih = simpson_samples(hval, h);
    double Ib = simpson_samples(beta, h);
    out.action_H = Ih;
    out.area_E = -Ib;
    out.S_action = Iy - Ib - Ih;

    // membrane route: theta loop + frozen-time magnetic flux of the
    // q-projection, boundary = gamma arc, wing segments through x, reversed
    // lambda line
    double tf = fl.times.back();
    Vec lam_f = P.em ? fl.lambda.back() : x0;
    std::vector<geom::PathPiece> boundary;
    boundary.push_back(geom::PathPiece::arc(fl.gamma, fl.gamma_dot, h, fl.times));
    boundary.push_back(geom::PathPiece::segment(fl.gamma.back(), out.x));
    boundary.push_back(geom::PathPiece::segment(out.x, lam_f));
    if (P.em) {
        std::vector<Vec> lrev(fl.lambda.rbegin(), fl.lambda.rend());
        std::vector<double> trev(fl.times.rbegin(), fl.times.rend());
        std::vector<Vec> ldrev;
        for (auto it = fl.lambda_dot.rbegin(); it != fl.lambda_dot.rend(); ++it) {
            Vec v = *it;
            for (auto& c : v) c = -c;
            ldrev.push_back(v);
        }
        boundary.push_back(geom::PathPiece::arc(lrev, ldrev, h, trev));
    } else {
        boundary.push_back(geom::PathPiece::segment(lam_f, x0));
    }
    out.theta_loop = geom::membrane_area_omega0(boundary);
    double with_flux = geom::membrane_area_omega_F(boundary, P.geometry, tf);
    out.flux_B = with_flux - out.theta_loop;
    out.S = with_flux - Ib - Ih;
}

WkbData wkb_core(const Problem& P, double t, const Vec& x, const WkbOptions& opt) {
    const int n = P.n;
    if ((int)x.size() != 2 * n) throw std::invalid_argument("wkb_symbol: bad point dimension");
    WkbData out;
    out.t = t;
    out.x = x;

    // damped Newton on the endpoint map, starting from x (exact at t = 0)
    Vec x0 = x;
    FlowResult fl = P.flow(x0, t, opt.steps);
    auto residual = [&](const FlowResult& f, const Vec& z) {
        Vec r = P.endpoint(f, z, t);
        for (int i = 0; i < 2 * n; ++i) r[i] -= x[i];
        return r;
    };
    Vec r = residual(fl, x0);
    auto norm = [](const Vec& v) {
        double s = 0;
        for (double c : v) s += c * c;
        return std::sqrt(s);
    };
    double rn = norm(r);
    int it = 0;
    while (rn > opt.newton_tol) {
        if (++it > opt.max_newton)
            throw std::runtime_error("wkb: Newton did not converge on the endpoint map");
        Mat J = P.endpoint_jacobian(fl, x0, t);
        Vec dx = solve_small(J, r);
        double damp = 1.0;
        for (;;) {
            Vec trial(2 * n);
            for (int i = 0; i < 2 * n; ++i) trial[i] = x0[i] - damp * dx[i];
            FlowResult ftrial = P.flow(trial, t, opt.steps);
            Vec rt = residual(ftrial, trial);
            double rtn = norm(rt);
            if (rtn < rn || damp < 1.0 / 1024.0) {
                x0 = trial;
                fl = std::move(ftrial);
                r = rt;
                rn = rtn;
                break;
            }
            damp *= 0.5;
        }
    }
    out.x0 = x0;
    out.jacobian = det_small(P.endpoint_jacobian(fl, x0, t));
    if (!(out.jacobian >= opt.caustic_delta)) throw CausticError(out.jacobian);
    out.amplitude = 1.0 / std::sqrt(out.jacobian);
    out.flow = fl;
    assemble_phase(P, fl, x0, out);
    return out;
}

} // namespace

WkbData wkb_symbol(const Hamiltonian& H, const MagneticForm& F, double t, const Vec& x,
                   const WkbOptions& opt) {
    if (F.time_dependent())
        throw std::invalid_argument("wkb_symbol: time-dependent fields need the EMField overload");
    Problem P(H, F, nullptr);
    return wkb_core(P, t, x, opt);
}

WkbData wkb_symbol(const Hamiltonian& H, const EMField& em, double t, const Vec& x,
                   const WkbOptions& opt) {
    Problem P(H, em.magnetic(), &em);
    return wkb_core(P, t, x, opt);
}

std::complex<double> wkb_value(const WkbData& w, double hbar) {
    return w.amplitude * std::polar(1.0, w.S / hbar);
}

double marinov_defect(const Hamiltonian& H, const MagneticForm& F, double t1, double t2,
                      const Vec& x0, const WkbOptions& opt) {
    Problem P(H, F, nullptr);
    geom::ChordGeometry& G = P.geometry;
    const int n = P.n;

    // classically matched composition: leg 1 from x0, leg 2 continues from
    // gamma^{t1}
    FlowResult f1 = magnetic_flow(H, F, x0, t1, opt.steps);
    Vec mid = f1.endpoint();
    FlowResult f2 = magnetic_flow(H, F, mid, t2, opt.steps);
    FlowResult f12 = magnetic_flow(H, F, x0, t1 + t2, 2 * opt.steps);

    auto wing_point = [&](const Vec& a, const Vec& b) {
        // x = (a + b)/2 + (0; A^s(a_q, b_q))
        Vec aq(a.begin(), a.begin() + n), bq(b.begin(), b.begin() + n);
        auto A1 = G.valatin(aq, bq);
        auto A2 = G.valatin(bq, aq);
        Vec xx(2 * n);
        for (int j = 0; j < n; ++j) {
            xx[j] = 0.5 * (a[j] + b[j]);
            xx[n + j] = 0.5 * (a[n + j] + b[n + j]) + 0.5 * (A1[j] + A2[j]);
        }
        return xx;
    };
    Vec x1 = wing_point(f1.endpoint(), x0);
    Vec x2 = wing_point(f2.endpoint(), mid);
    Vec xc = wing_point(f12.endpoint(), x0);

    auto leg_area = [&](const FlowResult& fl, const Vec& xw, const Vec& start) {
        std::vector<geom::PathPiece> boundary;
        boundary.push_back(geom::PathPiece::arc(fl.gamma, fl.gamma_dot, fl.step));
        boundary.push_back(geom::PathPiece::segment(fl.gamma.back(), xw));
        boundary.push_back(geom::PathPiece::segment(xw, start));
        return geom::membrane_area_omega_F(boundary, G);
    };
    double S1 = leg_area(f1, x1, x0);
    double S2 = leg_area(f2, x2, mid);
    double S12 = leg_area(f12, xc, x0);
    double hexagon = geom::hexagon_membrane_area(G, xc, x2, x1);
    return std::abs(S2 + S1 + hexagon - S12);
}

double phase_blowup_route(const WkbData& w, const Hamiltonian& H, const EMField& em) {
    // S = [theta loop + frozen-time B flux] + e E-area + loop of p0 dt with
    // gamma on p0 = -H and lambda on p0 = 0; only the gamma world line
    // contributes to the last piece
    const int n = em.dim();
    std::vector<double> p0(w.flow.times.size());
    for (std::size_t s = 0; s < w.flow.times.size(); ++s) {
        const Vec& g = w.flow.gamma[s];
        Vec q(g.begin(), g.begin() + n), p(g.begin() + n, g.end());
        p0[s] = -H.value(q, p, w.flow.times[s]);
    }
    double p0dt = simpson_samples(p0, w.flow.step);
    return w.theta_loop + w.flux_B + w.area_E + p0dt;
}

GridSymbol trotter_symbol(const PolySymbol& H, const MagneticForm& F, double t, int N,
                          int grid_points, const std::vector<double>& q0, double dq,
                          double hbar) {
    if (N < 1) throw std::invalid_argument("trotter_symbol: N must be positive");
    const int n = H.dim();
    GridSymbol step = GridSymbol::sample(n, grid_points, q0, dq, hbar,
                                         [&](const Vec& q, const Vec& p) {
                                             double e = H.eval_c(q, p, hbar).real();
                                             return std::polar(1.0, -t * e / (hbar * N));
                                         });
    GridSymbol acc = step;
    for (int k = 1; k < N; ++k) acc = star::grid_magnetic_product(acc, step, F);
    return acc;
}

KleinGordonSymbol klein_gordon_symbol(int n, double mass, double t, const Vec& x,
                                      const EMField& em, const WkbOptions& opt) {
    RelativisticHamiltonian plus(n, +1, mass), minus(n, -1, mass);
    KleinGordonSymbol out{wkb_symbol(plus, em, t, x, opt), wkb_symbol(minus, em, t, x, opt)};
    return out;
}

} // namespace magstar::dyn
