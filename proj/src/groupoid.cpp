#include "magstar/groupoid.hpp"
#include "magstar/star_exact.hpp"

#include <cmath>

namespace magstar::grpd {

namespace {

template <class T>
std::vector<T> valatin_of(const geom::ChordGeometry& g, const std::vector<T>& a,
                          const std::vector<T>& b, double t) {
    if constexpr (std::is_same_v<T, double>) return g.valatin(a, b, t);
    else return g.valatin_rat(a, b);
}

template <class T>
T from_rat(const Rat& r) {
    if constexpr (std::is_same_v<T, double>) return r.to_double();
    else return r;
}

// shared implementation over double / Rat
template <class T>
std::pair<std::vector<T>, std::vector<T>> lr_impl(const geom::ChordGeometry& g,
                                                  const std::vector<T>& x,
                                                  const std::vector<T>& y, const Rat& tau,
                                                  double t) {
    const int n = g.dim();
    if ((int)x.size() != 2 * n || (int)y.size() != 2 * n)
        throw std::invalid_argument("left_right_maps: bad point dimension");
    T tv = from_rat<T>(tau), one_m = from_rat<T>(Rat(1) - tau);
    std::vector<T> lq(n), rq(n), l(2 * n), r(2 * n);
    for (int j = 0; j < n; ++j) {
        lq[j] = x[j] - tv * y[n + j];
        rq[j] = x[j] + one_m * y[n + j];
    }
    auto Alr = valatin_of(g, lq, rq, t);
    auto Arl = valatin_of(g, rq, lq, t);
    for (int j = 0; j < n; ++j) {
        l[j] = lq[j];
        r[j] = rq[j];
        l[n + j] = x[n + j] + one_m * y[j] - Alr[j];
        r[n + j] = x[n + j] - tv * y[j] - Arl[j];
    }
    return {l, r};
}

template <class T>
Element<T> reconstruct_impl(const geom::ChordGeometry& g, const std::vector<T>& l,
                            const std::vector<T>& r, const Rat& tau, double t) {
    const int n = g.dim();
    if ((int)l.size() != 2 * n || (int)r.size() != 2 * n)
        throw std::invalid_argument("reconstruct: bad point dimension");
    std::vector<T> lq(l.begin(), l.begin() + n), rq(r.begin(), r.begin() + n);
    auto Alr = valatin_of(g, lq, rq, t);
    auto Arl = valatin_of(g, rq, lq, t);
    T half = from_rat<T>(Rat(1, 2)), shear = from_rat<T>(Rat(1, 2) - tau);
    Element<T> m;
    m.x.assign(2 * n, T(0));
    m.y.assign(2 * n, T(0));
    for (int j = 0; j < n; ++j) {
        T Vq = l[j] - r[j], Vp = l[n + j] - r[n + j];
        // x = (l + r)/2 + (0; A^s) + M V + M (0; A^a); the cross term
        // M (0; A^a) = (0; -shear A^a) is what makes this map the exact
        // inverse of the left/right maps for every tau (it vanishes in the
        // Weyl case)
        m.x[j] = half * (l[j] + r[j]) + shear * Vq;
        m.x[n + j] = half * (l[n + j] + r[n + j]) + half * (Alr[j] + Arl[j]) - shear * Vp -
                     shear * (Alr[j] - Arl[j]);
        // y = J V + (A^a; 0), J v = (v_p, -v_q)
        m.y[j] = Vp + (Alr[j] - Arl[j]);
        m.y[n + j] = T(0) - Vq;
    }
    return m;
}

} // namespace

std::pair<std::vector<double>, std::vector<double>> left_right_maps(
    const geom::ChordGeometry& g, const std::vector<double>& x, const std::vector<double>& y,
    const Rat& tau, double t) {
    return lr_impl<double>(g, x, y, tau, t);
}
std::pair<std::vector<Rat>, std::vector<Rat>> left_right_maps(const geom::ChordGeometry& g,
                                                              const std::vector<Rat>& x,
                                                              const std::vector<Rat>& y,
                                                              const Rat& tau) {
    return lr_impl<Rat>(g, x, y, tau, 0.0);
}

ElementD reconstruct(const geom::ChordGeometry& g, const std::vector<double>& l,
                     const std::vector<double>& r, const Rat& tau, double t) {
    return reconstruct_impl<double>(g, l, r, tau, t);
}
ElementR reconstruct(const geom::ChordGeometry& g, const std::vector<Rat>& l,
                     const std::vector<Rat>& r, const Rat& tau) {
    return reconstruct_impl<Rat>(g, l, r, tau, 0.0);
}

ElementD multiply(const geom::ChordGeometry& g, const ElementD& m2, const ElementD& m1,
                  const Rat& tau, double eps) {
    auto [l2, r2] = left_right_maps(g, m2.x, m2.y, tau);
    auto [l1, r1] = left_right_maps(g, m1.x, m1.y, tau);
    double defect = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < r2.size(); ++i) {
        defect = std::max(defect, std::abs(r2[i] - l1[i]));
        scale = std::max({scale, std::abs(r2[i]), std::abs(l1[i])});
    }
    if (defect > eps * scale) throw NotMultiplicable(defect);
    return reconstruct(g, l2, r1, tau);
}

ElementR multiply(const geom::ChordGeometry& g, const ElementR& m2, const ElementR& m1,
                  const Rat& tau) {
    auto [l2, r2] = left_right_maps(g, m2.x, m2.y, tau);
    auto [l1, r1] = left_right_maps(g, m1.x, m1.y, tau);
    for (std::size_t i = 0; i < r2.size(); ++i)
        if (r2[i] != l1[i])
            throw NotMultiplicable((r2[i] - l1[i]).to_double());
    return reconstruct(g, l2, r1, tau);
}

std::vector<Rat> y_rule_correction(const MagneticForm& F, const std::vector<Rat>& q,
                                   const std::vector<Rat>& q2, const std::vector<Rat>& q1) {
    const int n = F.dim();
    // vertices of the q-space triangle with middle points (q, q2, q1); same
    // assignment as the product membrane: A0 = q + q1 - q2 (r side),
    // A1 = q1 + q2 - q, A2 = q + q2 - q1 (l side)
    std::vector<Rat> A0(n), A1(n), A2(n);
    for (int j = 0; j < n; ++j) {
        A0[j] = q[j] + q1[j] - q2[j];
        A1[j] = q1[j] + q2[j] - q[j];
        A2[j] = q[j] + q2[j] - q1[j];
    }
    std::vector<Rat> corr(n, Rat(0));
    for (int l = 0; l < n; ++l) {
        // component form (grad F)_l = (1/2) d_l F_jk dq^k ^ dq^j is closed
        std::vector<std::vector<PolySymbol>> comps(n, std::vector<PolySymbol>(n, PolySymbol(n)));
        bool nonzero = false;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                comps[j][k] = F.comp(j, k).diff_q(l);
                nonzero = nonzero || !comps[j][k].is_zero();
            }
        if (!nonzero) continue;
        MagneticForm dF(n, std::move(comps));
        geom::ChordGeometry gl(dF);
        corr[l] = gl.flux_rat(A2, A1, A0); // path A0 -> A1 -> A2
    }
    return corr;
}

PoissonCheck poisson_map_check(const MagneticForm& F, const PolySymbol& f, const PolySymbol& g,
                               bool drop_valatin_term) {
    const int n = F.dim();
    if (f.dim() != n || g.dim() != n)
        throw std::invalid_argument("poisson_map_check: dimension mismatch");
    // layout: x at [0, 2n), y at [2n, 4n), valatin aux at 4n
    const int xo = 0, yo = 2 * n, aux = 4 * n;
    std::vector<Poly> lparts(2 * n), rparts(2 * n);
    std::vector<Poly> lq(n), rq(n);
    GRat half(Rat(1, 2));
    for (int j = 0; j < n; ++j) {
        lq[j] = Poly::var(xo + j) - Poly::var(yo + n + j).scaled(half);
        rq[j] = Poly::var(xo + j) + Poly::var(yo + n + j).scaled(half);
    }
    auto Alr = geom::valatin_compose(F, lq, rq, Poly(), aux);
    auto Arl = geom::valatin_compose(F, rq, lq, Poly(), aux);
    for (int j = 0; j < n; ++j) {
        lparts[j] = lq[j];
        rparts[j] = rq[j];
        lparts[n + j] = Poly::var(xo + n + j) + Poly::var(yo + j).scaled(half);
        rparts[n + j] = Poly::var(xo + n + j) - Poly::var(yo + j).scaled(half);
        if (!drop_valatin_term) {
            lparts[n + j] -= Alr[j];
            rparts[n + j] -= Arl[j];
        }
    }

    auto compose_map = [&](const PolySymbol& s, const std::vector<Poly>& map) {
        std::vector<Poly> args(kMaxVars);
        for (int j = 0; j < 2 * n; ++j) args[j] = map[j];
        args[2 * n] = Poly();     // hbar must not appear in test functions
        args[2 * n + 1] = Poly(); // t likewise
        return s.poly().compose(args);
    };
    // bracket on E = T*R^{2n}: {a,b} = sum_i d_{y_i} a d_{x_i} b - d_{x_i} a d_{y_i} b
    auto bracket_E = [&](const Poly& a, const Poly& b) {
        Poly acc;
        for (int i = 0; i < 2 * n; ++i)
            acc += a.diff(yo + i) * b.diff(xo + i) - a.diff(xo + i) * b.diff(yo + i);
        return acc;
    };

    PolySymbol fg = star::poisson_bracket_F(f, g, F);
    PoissonCheck out;
    out.left_residual =
        bracket_E(compose_map(f, lparts), compose_map(g, lparts)) - compose_map(fg, lparts);
    out.right_residual =
        bracket_E(compose_map(f, rparts), compose_map(g, rparts)) + compose_map(fg, rparts);
    return out;
}

} // namespace magstar::grpd
