// Symplectic-groupoid layer on T*(T*R^n): left/right reduction maps, the
// closed-form reconstruction (l, r) -> (x, y), multiplication with the
// Lorentz-momentum y-rule, and the Poisson / anti-Poisson map residuals.
// The tau-ordered variants use the same machinery with the tau shear; the
// Weyl case is tau = 1/2. All maps are closed-form (the Valatin term depends
// only on l_q, r_q, which are explicit), so the exact-rational path is exact
// for every polynomial field.

#pragma once

#include "magstar/geometry.hpp"
#include "magstar/polysymbol.hpp"

namespace magstar::grpd {

template <class T>
struct Element {
    std::vector<T> x, y; // each of length 2n
};

using ElementD = Element<double>;
using ElementR = Element<Rat>;

// left/right maps at ordering tau (Weyl: tau = 1/2)
std::pair<std::vector<double>, std::vector<double>> left_right_maps(
    const geom::ChordGeometry& g, const std::vector<double>& x, const std::vector<double>& y,
    const Rat& tau = Rat(1, 2), double t = 0.0);
std::pair<std::vector<Rat>, std::vector<Rat>> left_right_maps(
    const geom::ChordGeometry& g, const std::vector<Rat>& x, const std::vector<Rat>& y,
    const Rat& tau = Rat(1, 2));

// reconstruction x = (l+r)/2 + V_F + M V, y = J V + Y_F
ElementD reconstruct(const geom::ChordGeometry& g, const std::vector<double>& l,
                     const std::vector<double>& r, const Rat& tau = Rat(1, 2), double t = 0.0);
ElementR reconstruct(const geom::ChordGeometry& g, const std::vector<Rat>& l,
                     const std::vector<Rat>& r, const Rat& tau = Rat(1, 2));

struct NotMultiplicable : std::runtime_error {
    double defect;
    explicit NotMultiplicable(double d)
        : std::runtime_error("groupoid: elements are not multiplicable, |r(m2) - l(m1)| = " +
                             std::to_string(d)),
          defect(d) {}
};

// m = m2 o m1; requires r(m2) = l(m1) (exact in the rational version, within
// eps relative in the floating version)
ElementD multiply(const geom::ChordGeometry& g, const ElementD& m2, const ElementD& m1,
                  const Rat& tau = Rat(1, 2), double eps = 1e-9);
ElementR multiply(const geom::ChordGeometry& g, const ElementR& m2, const ElementR& m1,
                  const Rat& tau = Rat(1, 2));

// the inhomogeneous y-rule correction (int_triangle grad F; 0) for the
// q-space triangle with middle points (q, q2, q1)
std::vector<Rat> y_rule_correction(const MagneticForm& F, const std::vector<Rat>& q,
                                   const std::vector<Rat>& q2, const std::vector<Rat>& q1);

// Poisson / anti-Poisson residuals of the reduction maps on symbolic test
// functions: {f o l, g o l}_E - {f, g}_F o l and {f o r, g o r}_E + {f, g}_F o r.
// drop_valatin_term is a negative control that deliberately breaks l and r.
struct PoissonCheck {
    Poly left_residual, right_residual;
};
PoissonCheck poisson_map_check(const MagneticForm& F, const PolySymbol& f, const PolySymbol& g,
                               bool drop_valatin_term = false);

} // namespace magstar::grpd
