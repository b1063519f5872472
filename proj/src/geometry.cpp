#include "magstar/geometry.hpp"

namespace magstar::geom {

namespace {

// args vector for composing a field component F_jk (PolySymbol layout of
// dimension n) with q -> q_args and t -> t_poly
std::vector<Poly> field_args(int n, const std::vector<Poly>& q_args, const Poly& t_poly) {
    std::vector<Poly> args(kMaxVars);
    for (int j = 0; j < n; ++j) args[j] = q_args[j];
    args[2 * n + 1] = t_poly;
    return args;
}

Poly integrate_01(const Poly& p, int aux) {
    return p.integrate(aux).eval_var(aux, GRat(1));
}

std::vector<Poly> point_vars(const TwoPointVars& L, int which) {
    std::vector<Poly> v(L.n);
    for (int j = 0; j < L.n; ++j)
        v[j] = Poly::var(which == 0 ? L.q(j) : which == 1 ? L.qp(j) : L.qpp(j));
    return v;
}

} // namespace

std::vector<Poly> valatin_compose(const MagneticForm& F,
                                  const std::vector<Poly>& a,
                                  const std::vector<Poly>& b,
                                  const Poly& t_poly, int aux_slot) {
    const int n = F.dim();
    Poly s = Poly::var(aux_slot);
    std::vector<Poly> arg(n);
    for (int k = 0; k < n; ++k) arg[k] = b[k] + s * (a[k] - b[k]);
    auto args = field_args(n, arg, t_poly);

    std::vector<Poly> A(n);
    for (int j = 0; j < n; ++j) {
        Poly acc;
        for (int k = 0; k < n; ++k) {
            const Poly& comp = F.comp(j, k).poly();
            if (comp.is_zero()) continue;
            acc += comp.compose(args) * s * (a[k] - b[k]);
        }
        A[j] = integrate_01(acc, aux_slot);
    }
    return A;
}

std::vector<Poly> valatin_symbolic(const MagneticForm& F) {
    TwoPointVars L{F.dim()};
    return valatin_compose(F, point_vars(L, 0), point_vars(L, 1), Poly::var(L.t()), L.aux1());
}

Poly flux_symbolic(const MagneticForm& F) {
    // Flux_{q''}(q, q') = int_0^1 ds  A(q' + s(q - q'), q'') . (q - q')
    TwoPointVars L{F.dim()};
    const int n = L.n;
    Poly s = Poly::var(L.aux1());
    std::vector<Poly> chord(n);
    auto q = point_vars(L, 0), qp = point_vars(L, 1), qpp = point_vars(L, 2);
    for (int j = 0; j < n; ++j) chord[j] = qp[j] + s * (q[j] - qp[j]);
    auto A = valatin_compose(F, chord, qpp, Poly::var(L.t()), L.aux2());
    Poly acc;
    for (int j = 0; j < n; ++j) acc += A[j] * (q[j] - qp[j]);
    return integrate_01(acc, L.aux1());
}

Poly flux_symbolic_direct(const MagneticForm& F) {
    // x(u, v) = q'' + u (q' - q'') + v (q - q''), region 0 <= u, v, u + v <= 1;
    // integrand (q - q'')^T F(x) (q' - q'')
    TwoPointVars L{F.dim()};
    const int n = L.n;
    Poly u = Poly::var(L.aux1()), v = Poly::var(L.aux2());
    auto q = point_vars(L, 0), qp = point_vars(L, 1), qpp = point_vars(L, 2);
    std::vector<Poly> x(n);
    for (int j = 0; j < n; ++j)
        x[j] = qpp[j] + u * (qp[j] - qpp[j]) + v * (q[j] - qpp[j]);
    auto args = field_args(n, x, Poly::var(L.t()));
    Poly integrand;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const Poly& comp = F.comp(j, k).poly();
            if (comp.is_zero()) continue;
            integrand += (q[j] - qpp[j]) * comp.compose(args) * (qp[k] - qpp[k]);
        }
    // inner: int_0^{1-u} dv, outer: int_0^1 du
    Poly inner = integrand.integrate(L.aux2());
    std::vector<Poly> sub(kMaxVars);
    for (int vv = 0; vv < kMaxVars; ++vv) sub[vv] = Poly::var(vv);
    sub[L.aux2()] = Poly(GRat(1)) - u;
    Poly evaluated = inner.compose(sub); // v := 1 - u (lower bound 0 contributes nothing)
    return integrate_01(evaluated, L.aux1());
}

Poly phi_midpoint_compose(const MagneticForm& F,
                          const std::vector<Poly>& q,
                          const std::vector<Poly>& u2,
                          const std::vector<Poly>& u1,
                          const Poly& t_poly, int aux_mu, int aux_nu) {
    const int n = F.dim();
    Poly mu = Poly::var(aux_mu), nu = Poly::var(aux_nu);
    GRat half(Rat(1, 2));
    std::vector<Poly> arg(n);
    for (int k = 0; k < n; ++k)
        arg[k] = q[k] + (mu - Poly(half)) * u1[k] + (nu - Poly(half)) * u2[k];
    auto args = field_args(n, arg, t_poly);
    Poly integrand;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const Poly& comp = F.comp(j, k).poly();
            if (comp.is_zero()) continue;
            integrand += u2[j] * comp.compose(args) * u1[k];
        }
    // int_0^mu dnu: antiderivative in nu, then nu := mu
    Poly inner = integrand.integrate(aux_nu);
    std::vector<Poly> sub(kMaxVars);
    for (int v = 0; v < kMaxVars; ++v) sub[v] = Poly::var(v);
    sub[aux_nu] = mu;
    Poly outer = inner.compose(sub);
    return integrate_01(outer, aux_mu);
}

double flux_midpoint_triangle(const MagneticForm& F, const std::vector<double>& q,
                              const std::vector<double>& u2, const std::vector<double>& u1,
                              double t) {
    TwoPointVars L{F.dim()};
    const int n = L.n;
    Poly phi = phi_midpoint_compose(F, point_vars(L, 0), point_vars(L, 1), point_vars(L, 2),
                                    Poly::var(L.t()), L.aux1(), L.aux2());
    std::vector<double> x(kMaxVars, 0.0);
    for (int j = 0; j < n; ++j) { x[j] = q[j]; x[n + j] = u2[j]; x[2 * n + j] = u1[j]; }
    x[3 * n] = t;
    return phi.eval_real(x);
}

Lemma2Residuals lemma2_residuals(const MagneticForm& F) {
    TwoPointVars L{F.dim()};
    const int n = L.n;
    auto q = point_vars(L, 0), qp = point_vars(L, 1);
    Poly t = Poly::var(L.t());
    auto A = valatin_compose(F, q, qp, t, L.aux1());       // A(q, q')
    auto Asw = valatin_compose(F, qp, q, t, L.aux1());     // A(q', q)

    Lemma2Residuals R;
    // d_{q'_a} A_b(q,q') + d_{q_b} A_a(q',q) = 0
    R.mixed_derivative.assign(n, std::vector<Poly>(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            R.mixed_derivative[a][b] = A[b].diff(L.qp(a)) + Asw[a].diff(L.q(b));

    // A(q,q') - A(q',q) = int_{q'}^q F dq
    Poly s = Poly::var(L.aux1());
    std::vector<Poly> chord(n);
    for (int j = 0; j < n; ++j) chord[j] = qp[j] + s * (q[j] - qp[j]);
    auto args = field_args(n, chord, t);
    for (int j = 0; j < n; ++j) {
        Poly line;
        for (int k = 0; k < n; ++k) {
            const Poly& comp = F.comp(j, k).poly();
            if (comp.is_zero()) continue;
            line += comp.compose(args) * (q[k] - qp[k]);
        }
        R.difference.push_back(A[j] - Asw[j] - integrate_01(line, L.aux1()));
    }

    // A(q,q') + A(q',q) = int_0^1 s [F(qm + s d) - F(qm - s d)] ds . d,
    // d = (q - q')/2, qm = (q + q')/2
    GRat half(Rat(1, 2));
    std::vector<Poly> plus(n), minus(n);
    for (int j = 0; j < n; ++j) {
        Poly qm = (q[j] + qp[j]).scaled(half), d = (q[j] - qp[j]).scaled(half);
        plus[j] = qm + s * d;
        minus[j] = qm - s * d;
    }
    auto args_p = field_args(n, plus, t);
    auto args_m = field_args(n, minus, t);
    for (int j = 0; j < n; ++j) {
        Poly line;
        for (int k = 0; k < n; ++k) {
            const Poly& comp = F.comp(j, k).poly();
            if (comp.is_zero()) continue;
            line += (comp.compose(args_p) - comp.compose(args_m)) * s *
                    (q[k] - qp[k]).scaled(half);
        }
        R.symmetric.push_back(A[j] + Asw[j] - integrate_01(line, L.aux1()));
    }
    return R;
}

bool Lemma2Residuals::all_zero() const {
    for (auto& row : mixed_derivative)
        for (auto& p : row)
            if (!p.is_zero()) return false;
    for (auto& p : difference)
        if (!p.is_zero()) return false;
    for (auto& p : symmetric)
        if (!p.is_zero()) return false;
    return true;
}

std::vector<Poly> lemma3_residuals(const MagneticForm& F) {
    TwoPointVars L{F.dim()};
    const int n = L.n;
    Poly flux = flux_symbolic(F);
    Poly t = Poly::var(L.t());
    auto q = point_vars(L, 0), qp = point_vars(L, 1), qpp = point_vars(L, 2);
    auto A_qpp = valatin_compose(F, q, qpp, t, L.aux1()); // A(q, q'')
    auto A_qp = valatin_compose(F, q, qp, t, L.aux1());   // A(q, q')
    std::vector<Poly> out(n);
    for (int j = 0; j < n; ++j)
        out[j] = flux.diff(L.q(j)) - A_qpp[j] + A_qp[j];
    return out;
}

// --- ChordGeometry ---------------------------------------------------------

ChordGeometry::ChordGeometry(const MagneticForm& F) : n_(F.dim()), F_(F) {
    TwoPointVars L{n_};
    A_ = valatin_symbolic(F);
    Adq_.assign(n_, std::vector<Poly>(n_));
    Adqp_.assign(n_, std::vector<Poly>(n_));
    Adt_.resize(n_);
    for (int j = 0; j < n_; ++j) {
        for (int k = 0; k < n_; ++k) {
            Adq_[j][k] = A_[j].diff(L.q(k));
            Adqp_[j][k] = A_[j].diff(L.qp(k));
        }
        Adt_[j] = A_[j].diff(L.t());
    }
    flux_ = flux_symbolic(F);
    flux_direct_ = flux_symbolic_direct(F);
}

namespace {

std::vector<double> pack2(int n, const std::vector<double>& q, const std::vector<double>& qp,
                          double t) {
    std::vector<double> x(kMaxVars, 0.0);
    for (int j = 0; j < n; ++j) { x[j] = q[j]; x[n + j] = qp[j]; }
    x[3 * n] = t;
    return x;
}

std::vector<double> pack3(int n, const std::vector<double>& q, const std::vector<double>& qp,
                          const std::vector<double>& qpp, double t) {
    auto x = pack2(n, q, qp, t);
    for (int j = 0; j < n; ++j) x[2 * n + j] = qpp[j];
    return x;
}

} // namespace

std::vector<double> ChordGeometry::valatin(const std::vector<double>& q,
                                           const std::vector<double>& qp, double t) const {
    if ((int)q.size() != n_ || (int)qp.size() != n_)
        throw std::invalid_argument("valatin: dimension mismatch between field and points");
    auto x = pack2(n_, q, qp, t);
    std::vector<double> out(n_);
    for (int j = 0; j < n_; ++j) out[j] = A_[j].eval_real(x);
    return out;
}

std::vector<Rat> ChordGeometry::valatin_rat(const std::vector<Rat>& q,
                                            const std::vector<Rat>& qp, const Rat& t) const {
    if ((int)q.size() != n_ || (int)qp.size() != n_)
        throw std::invalid_argument("valatin: dimension mismatch between field and points");
    std::vector<Rat> x(kMaxVars, Rat(0));
    for (int j = 0; j < n_; ++j) { x[j] = q[j]; x[n_ + j] = qp[j]; }
    x[3 * n_] = t;
    std::vector<Rat> out(n_);
    for (int j = 0; j < n_; ++j) out[j] = A_[j].eval_rat(x);
    return out;
}

std::vector<std::vector<double>> ChordGeometry::valatin_dq(const std::vector<double>& q,
                                                           const std::vector<double>& qp,
                                                           double t) const {
    auto x = pack2(n_, q, qp, t);
    std::vector<std::vector<double>> out(n_, std::vector<double>(n_));
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) out[j][k] = Adq_[j][k].eval_real(x);
    return out;
}

std::vector<std::vector<double>> ChordGeometry::valatin_dqp(const std::vector<double>& q,
                                                            const std::vector<double>& qp,
                                                            double t) const {
    auto x = pack2(n_, q, qp, t);
    std::vector<std::vector<double>> out(n_, std::vector<double>(n_));
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) out[j][k] = Adqp_[j][k].eval_real(x);
    return out;
}

std::vector<double> ChordGeometry::valatin_dt(const std::vector<double>& q,
                                              const std::vector<double>& qp, double t) const {
    auto x = pack2(n_, q, qp, t);
    std::vector<double> out(n_);
    for (int j = 0; j < n_; ++j) out[j] = Adt_[j].eval_real(x);
    return out;
}

double ChordGeometry::flux(const std::vector<double>& q, const std::vector<double>& qp,
                           const std::vector<double>& qpp, double t) const {
    return flux_.eval_real(pack3(n_, q, qp, qpp, t));
}

Rat ChordGeometry::flux_rat(const std::vector<Rat>& q, const std::vector<Rat>& qp,
                            const std::vector<Rat>& qpp, const Rat& t) const {
    std::vector<Rat> x(kMaxVars, Rat(0));
    for (int j = 0; j < n_; ++j) { x[j] = q[j]; x[n_ + j] = qp[j]; x[2 * n_ + j] = qpp[j]; }
    x[3 * n_] = t;
    return flux_.eval_rat(x);
}

double ChordGeometry::flux_direct(const std::vector<double>& q, const std::vector<double>& qp,
                                  const std::vector<double>& qpp, double t) const {
    return flux_direct_.eval_real(pack3(n_, q, qp, qpp, t));
}

// --- membranes --------------------------------------------------------------

namespace {

double theta_segment(const Vec& a, const Vec& b) { return 0.5 * symp_pair(a, b); }

double simpson(const std::vector<double>& f, double h) {
    // composite Simpson; needs an even number of intervals, falls back to
    // trapezoid on the final interval otherwise
    const std::size_t n = f.size();
    if (n < 2) return 0.0;
    double acc = 0.0;
    std::size_t i = 0;
    while (i + 2 < n) { acc += (f[i] + 4.0 * f[i + 1] + f[i + 2]) * h / 3.0; i += 2; }
    if (i + 1 < n) acc += 0.5 * (f[i] + f[i + 1]) * h;
    return acc;
}

} // namespace

double membrane_area_omega0(const std::vector<PathPiece>& boundary) {
    double area = 0.0;
    for (const auto& piece : boundary) {
        if (piece.is_segment) {
            area += theta_segment(piece.a, piece.b);
        } else {
            const std::size_t n2 = piece.samples.front().size();
            const std::size_t n = n2 / 2;
            std::vector<double> f(piece.samples.size());
            for (std::size_t i = 0; i < piece.samples.size(); ++i) {
                const Vec& x = piece.samples[i];
                const Vec& dx = piece.derivatives[i];
                double v = 0;
                for (std::size_t j = 0; j < n; ++j)
                    v += x[n + j] * dx[j] - x[j] * dx[n + j];
                f[i] = 0.5 * v;
            }
            area += simpson(f, piece.param_step);
        }
    }
    return area;
}

double membrane_area_omega_F(const std::vector<PathPiece>& boundary,
                             const ChordGeometry& geom, double t) {
    double area = membrane_area_omega0(boundary);
    if (geom.field().is_zero()) return area;

    const int n = geom.dim();
    // cone apex for the q-projection flux
    Vec apex(n);
    const auto& first = boundary.front();
    const Vec& p0 = first.is_segment ? first.a : first.samples.front();
    for (int j = 0; j < n; ++j) apex[j] = p0[j];

    for (const auto& piece : boundary) {
        if (piece.is_segment) {
            Vec aq(piece.a.begin(), piece.a.begin() + n);
            Vec bq(piece.b.begin(), piece.b.begin() + n);
            area += geom.flux(bq, aq, apex, t); // path apex -> a_q -> b_q
        } else {
            // world-line arcs carry their own times: the swept surface sees
            // the field at the sweep instant
            std::vector<double> f(piece.samples.size());
            for (std::size_t i = 0; i < piece.samples.size(); ++i) {
                Vec xq(piece.samples[i].begin(), piece.samples[i].begin() + n);
                Vec dq(piece.derivatives[i].begin(), piece.derivatives[i].begin() + n);
                double ts = piece.sample_times.empty() ? t : piece.sample_times[i];
                auto A = geom.valatin(xq, apex, ts);
                double v = 0;
                for (int j = 0; j < n; ++j) v += A[j] * dq[j];
                f[i] = v;
            }
            area += simpson(f, piece.param_step);
        }
    }
    return area;
}

double triangle_area_omega_F(const Triangle& tri, const ChordGeometry& geom, double t) {
    double area = tri_area_omega0(tri.v[0], tri.v[1], tri.v[2]);
    if (!geom.field().is_zero()) {
        const int n = geom.dim();
        Vec q0(tri.v[0].begin(), tri.v[0].begin() + n);
        Vec q1(tri.v[1].begin(), tri.v[1].begin() + n);
        Vec q2(tri.v[2].begin(), tri.v[2].begin() + n);
        area += geom.flux(q2, q1, q0, t); // path v0 -> v1 -> v2
    }
    return area;
}

double membrane_area_omega_F(const WingMembrane& m, const ChordGeometry& geom, double t) {
    double area = 0.0;
    for (const auto& tri : m.base) area += triangle_area_omega_F(tri, geom, t);
    for (const auto& tri : m.wings) area += triangle_area_omega_F(tri, geom, t);
    return area;
}

Triangle vertical_magnetic_wing(const Vec& l, const Vec& r, const ChordGeometry& geom, double t) {
    const int n = geom.dim();
    Vec lq(l.begin(), l.begin() + n), rq(r.begin(), r.begin() + n);
    auto Alr = geom.valatin(lq, rq, t);
    auto Arl = geom.valatin(rq, lq, t);
    Vec x(2 * n);
    for (int j = 0; j < n; ++j) {
        x[j] = 0.5 * (l[j] + r[j]);
        x[n + j] = 0.5 * (l[n + j] + r[n + j]) + 0.5 * (Alr[j] + Arl[j]);
    }
    return Triangle{{l, x, r}};
}

std::array<Vec, 3> midpoint_triangle_vertices(const Vec& x, const Vec& x2, const Vec& x1) {
    const std::size_t d = x.size();
    std::array<Vec, 3> A{Vec(d), Vec(d), Vec(d)};
    for (std::size_t i = 0; i < d; ++i) {
        A[0][i] = x[i] + x1[i] - x2[i];
        A[1][i] = x1[i] + x2[i] - x[i];
        A[2][i] = x[i] + x2[i] - x1[i];
    }
    return A;
}

std::array<Vec, 3> midpoint_triangle_vertices_winged(const ChordGeometry& geom, const Vec& x,
                                                     const Vec& x2, const Vec& x1, double t) {
    const int n = geom.dim();
    auto A = midpoint_triangle_vertices(x, x2, x1); // q parts are final
    auto As = [&](const Vec& a, const Vec& b) {
        Vec aq(a.begin(), a.begin() + n), bq(b.begin(), b.begin() + n);
        auto A1v = geom.valatin(aq, bq, t);
        auto A2v = geom.valatin(bq, aq, t);
        for (int j = 0; j < n; ++j) A1v[j] = 0.5 * (A1v[j] + A2v[j]);
        return A1v;
    };
    auto s01 = As(A[1], A[0]), s12 = As(A[2], A[1]), s02 = As(A[2], A[0]);
    for (int j = 0; j < n; ++j) {
        double u1 = x1[n + j] - s01[j];
        double u2 = x2[n + j] - s12[j];
        double u0 = x[n + j] - s02[j];
        A[0][n + j] = u1 - u2 + u0;
        A[1][n + j] = u1 + u2 - u0;
        A[2][n + j] = u2 + u0 - u1;
    }
    return A;
}

double hexagon_membrane_area(const ChordGeometry& geom, const Vec& x, const Vec& x2,
                             const Vec& x1, double t) {
    auto A = midpoint_triangle_vertices_winged(geom, x, x2, x1, t);
    double area = triangle_area_omega_F(Triangle{{A[0], A[1], A[2]}}, geom, t);
    area += triangle_area_omega_F(Triangle{{A[1], x1, A[0]}}, geom, t);
    area += triangle_area_omega_F(Triangle{{A[2], x2, A[1]}}, geom, t);
    area -= triangle_area_omega_F(Triangle{{A[2], x, A[0]}}, geom, t);
    return area;
}

// --- electric sector ---------------------------------------------------------

Poly electric_potential_symbolic(const EMField& em) {
    TwoPointVars L{em.dim()};
    const int n = L.n;
    Poly s = Poly::var(L.aux1()), t = Poly::var(L.t());
    auto q = point_vars(L, 0), qp = point_vars(L, 1);
    std::vector<Poly> chord(n);
    for (int k = 0; k < n; ++k) chord[k] = q[k] + s * (qp[k] - q[k]);
    auto args = field_args(n, chord, t);
    Poly acc;
    for (int k = 0; k < n; ++k) {
        const Poly& E = em.electric()[k].poly();
        if (E.is_zero()) continue;
        acc += E.compose(args) * (qp[k] - q[k]);
    }
    return integrate_01(acc, L.aux1());
}

double electric_potential(const EMField& em, double t,
                          const std::vector<double>& q, const std::vector<double>& qp) {
    Poly beta = electric_potential_symbolic(em);
    return beta.eval_real(pack2(em.dim(), q, qp, t));
}

std::vector<Poly> lemma8_residuals(const EMField& em) {
    TwoPointVars L{em.dim()};
    const int n = L.n;
    Poly beta = electric_potential_symbolic(em);
    auto alpha = valatin_compose(em.magnetic(), point_vars(L, 0), point_vars(L, 1),
                                 Poly::var(L.t()), L.aux1());
    auto args = field_args(n, point_vars(L, 0), Poly::var(L.t()));
    std::vector<Poly> out(n);
    for (int j = 0; j < n; ++j)
        out[j] = -beta.diff(L.q(j)) - alpha[j].diff(L.t()) - em.electric()[j].poly().compose(args);
    return out;
}

} // namespace magstar::geom
