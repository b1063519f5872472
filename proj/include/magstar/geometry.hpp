// Geometric primitives of the magnetic calculus: the two-point (Valatin)
// potential, triangle and membrane fluxes, symplectic areas, and the
// two-point electric/magnetic potentials of the time-dependent theory.
//
// Symbolic results live in the "two-point layout" over n <= 4:
//   q  -> slots [0, n)        q'  -> slots [n, 2n)      q'' -> slots [2n, 3n)
//   t  -> slot 3n             integration parameters -> slots 3n+1, 3n+2
//
// Orientation convention, pinned once and used everywhere: the flux through
// the triangle (q'', q', q) is taken along the boundary path q'' -> q' -> q,
// so that Flux_{q''}(q, q') = int_{q'}^{q} A(., q'') d(.)  (the chord form).
// With F_12 = B on R^2 this gives Flux_{(0,1)}((0,0),(1,0)) = +B/2.

#pragma once

#include "magstar/magnetic_form.hpp"

#include <array>
#include <functional>
#include <vector>

namespace magstar::geom {

struct TwoPointVars {
    int n;
    int q(int j) const { return j; }
    int qp(int j) const { return n + j; }
    int qpp(int j) const { return 2 * n + j; }
    int t() const { return 3 * n; }
    int aux1() const { return 3 * n + 1; }
    int aux2() const { return 3 * n + 2; }
};

// A_j(a, b) = sum_k [ int_0^1 s F_jk(b + s(a-b), t) ds ] (a_k - b_k),
// with a, b vectors of polynomials in an arbitrary caller layout and a free
// slot for the integration parameter. This is Eq.-level exact for polynomial
// fields; the norm factors of the defining integral cancel along the chord.
std::vector<Poly> valatin_compose(const MagneticForm& F,
                                  const std::vector<Poly>& a,
                                  const std::vector<Poly>& b,
                                  const Poly& t_poly, int aux_slot);

// A(q, q') in the two-point layout
std::vector<Poly> valatin_symbolic(const MagneticForm& F);

// chord-route flux Flux_{q''}(q, q') in the two-point layout
Poly flux_symbolic(const MagneticForm& F);
// independent route: direct iterated integration over the simplex
Poly flux_symbolic_direct(const MagneticForm& F);

// phi(q, u2, u1) of the midpoint-triangle membrane, through the iterated
// integral  phi = int_0^1 dmu int_0^mu dnu  u2 . F(q + (mu-1/2) u1 + (nu-1/2) u2) . u1.
// q, u2, u1 are polynomial vectors in a caller layout; two free aux slots.
Poly phi_midpoint_compose(const MagneticForm& F,
                          const std::vector<Poly>& q,
                          const std::vector<Poly>& u2,
                          const std::vector<Poly>& u1,
                          const Poly& t_poly, int aux_mu, int aux_nu);

// numeric phi(q, u2, u1); equals the flux through the vertex triple
// (V0, V0+u1, V0+u1+u2), V0 = q - (u1+u2)/2, in the pinned orientation
double flux_midpoint_triangle(const MagneticForm& F, const std::vector<double>& q,
                              const std::vector<double>& u2, const std::vector<double>& u1,
                              double t = 0.0);

// residuals of the three Lemma-2 identities; all must be identically zero
struct Lemma2Residuals {
    std::vector<std::vector<Poly>> mixed_derivative; // [a][b]
    std::vector<Poly> difference;                    // A(q,q') - A(q',q) - int F
    std::vector<Poly> symmetric;                     // A(q,q') + A(q',q) - midpoint integral
    bool all_zero() const;
};
Lemma2Residuals lemma2_residuals(const MagneticForm& F);

// residuals of Lemma 3: d/dq Flux_{q''}(q,q') - A(q,q'') + A(q,q')
std::vector<Poly> lemma3_residuals(const MagneticForm& F);

// Cached numeric evaluators built once per field.
class ChordGeometry {
public:
    explicit ChordGeometry(const MagneticForm& F);

    int dim() const { return n_; }
    const MagneticForm& field() const { return F_; }

    std::vector<double> valatin(const std::vector<double>& q,
                                const std::vector<double>& qp, double t = 0.0) const;
    std::vector<Rat> valatin_rat(const std::vector<Rat>& q,
                                 const std::vector<Rat>& qp, const Rat& t = Rat(0)) const;

    // d A_j(q, q') / d q_k and / d q'_k
    std::vector<std::vector<double>> valatin_dq(const std::vector<double>& q,
                                                const std::vector<double>& qp, double t = 0.0) const;
    std::vector<std::vector<double>> valatin_dqp(const std::vector<double>& q,
                                                 const std::vector<double>& qp, double t = 0.0) const;
    // d A_j(q, q') / dt
    std::vector<double> valatin_dt(const std::vector<double>& q,
                                   const std::vector<double>& qp, double t = 0.0) const;

    double flux(const std::vector<double>& q, const std::vector<double>& qp,
                const std::vector<double>& qpp, double t = 0.0) const;
    Rat flux_rat(const std::vector<Rat>& q, const std::vector<Rat>& qp,
                 const std::vector<Rat>& qpp, const Rat& t = Rat(0)) const;
    double flux_direct(const std::vector<double>& q, const std::vector<double>& qp,
                       const std::vector<double>& qpp, double t = 0.0) const;

private:
    int n_;
    MagneticForm F_;
    std::vector<Poly> A_;                 // A(q, q'), two-point layout
    std::vector<std::vector<Poly>> Adq_, Adqp_;
    std::vector<Poly> Adt_;
    Poly flux_, flux_direct_;
};

// ---------------------------------------------------------------------------
// Numeric membranes in phase space R^{2n}. A membrane is described by its
// boundary path; areas are evaluated through primitives (Stokes), which is
// exact for the straight pieces and Simpson-accurate along trajectory arcs.

using Vec = std::vector<double>;

inline double symp_pair(const Vec& a, const Vec& b) {
    // <J a, b> with x = (q, p), J(v) = (v_p, -v_q)
    const std::size_t n = a.size() / 2;
    double s = 0;
    for (std::size_t j = 0; j < n; ++j) s += a[n + j] * b[j] - a[j] * b[n + j];
    return s;
}

// omega_0 area of the flat triangle along the path X0 -> X1 -> X2
inline double tri_area_omega0(const Vec& X0, const Vec& X1, const Vec& X2) {
    Vec u(X0.size()), v(X0.size());
    for (std::size_t i = 0; i < X0.size(); ++i) { u[i] = X1[i] - X0[i]; v[i] = X2[i] - X0[i]; }
    return 0.5 * symp_pair(u, v);
}

struct PathPiece {
    // either a straight segment [a -> b] in R^{2n}, or a sampled arc with
    // right-hand-side derivatives at the sample nodes (uniform parameter step)
    bool is_segment = true;
    Vec a, b;
    std::vector<Vec> samples;      // arc points
    std::vector<Vec> derivatives;  // d(sample)/d(parameter)
    std::vector<double> sample_times; // optional: field time per sample (world lines)
    double param_step = 0.0;

    static PathPiece segment(Vec a_, Vec b_) {
        PathPiece p; p.a = std::move(a_); p.b = std::move(b_); return p;
    }
    static PathPiece arc(std::vector<Vec> s, std::vector<Vec> d, double h,
                         std::vector<double> times = {}) {
        PathPiece p; p.is_segment = false;
        p.samples = std::move(s); p.derivatives = std::move(d); p.param_step = h;
        p.sample_times = std::move(times);
        return p;
    }
};

// omega_F area of the membrane spanned by a closed path (pieces joined head
// to tail): the omega_0 part via the primitive theta = (p dq - q dp)/2, the
// F part as the flux through the cone over the q-projection. For the
// time-dependent field the flux is taken at frozen time t.
double membrane_area_omega_F(const std::vector<PathPiece>& boundary,
                             const ChordGeometry& geom, double t = 0.0);
double membrane_area_omega0(const std::vector<PathPiece>& boundary);

// omega_F area of a triangulated membrane: sum of flat-triangle omega_0
// areas plus the F flux of each triangle's q-projection.
struct Triangle {
    std::array<Vec, 3> v;
};
double triangle_area_omega_F(const Triangle& tri, const ChordGeometry& geom, double t = 0.0);

struct WingMembrane {
    std::vector<Triangle> base;   // triangulated base membrane
    std::vector<Triangle> wings;  // wing triangles [l, x, r]
};
double membrane_area_omega_F(const WingMembrane& m, const ChordGeometry& geom, double t = 0.0);

// vertical magnetic wing over the pair (l, r): vertices [l, x, r] with
// x = (l + r)/2 + (0; A^s(l_q, r_q)); its omega_F area vanishes (Lemma 5)
Triangle vertical_magnetic_wing(const Vec& l, const Vec& r, const ChordGeometry& geom, double t = 0.0);

// vertices (A0, A1, A2) of the triangle whose side midpoints are (x, x2, x1):
// A0 = x + x1 - x2 and cyclically (plain), or with the V_F-shifted midpoint
// relations of the magnetic groupoid (winged); the q parts coincide
std::array<Vec, 3> midpoint_triangle_vertices(const Vec& x, const Vec& x2, const Vec& x1);
std::array<Vec, 3> midpoint_triangle_vertices_winged(const ChordGeometry& geom, const Vec& x,
                                                     const Vec& x2, const Vec& x1,
                                                     double t = 0.0);

// omega_F area of the six-segment wing membrane over (x, x2, x1): base
// triangle from the winged vertices plus the three (null) magnetic wings
double hexagon_membrane_area(const ChordGeometry& geom, const Vec& x, const Vec& x2,
                             const Vec& x1, double t = 0.0);

// ---------------------------------------------------------------------------
// Two-point electric potential beta(t, q, q') = int_q^{q'} E dq and the
// Lemma-8 compatibility residuals -d_q beta - d_t alpha - E = 0.

Poly electric_potential_symbolic(const EMField& em);          // two-point layout
double electric_potential(const EMField& em, double t,
                          const std::vector<double>& q, const std::vector<double>& qp);
std::vector<Poly> lemma8_residuals(const EMField& em);

} // namespace magstar::geom
