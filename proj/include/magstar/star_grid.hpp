// Grid路 star product: Fourier to (q, u), saddle-groupoid convolution with
// the magnetic cocycle phase, Fourier back. The cocycle is the flux of F
// through the triangle whose side midpoints are the three convolution
// arguments, evaluated exactly (closed polynomial form) per lattice point
// through precomputed q-monomial tables.

#pragma once

#include "magstar/grid_symbol.hpp"
#include "magstar/magnetic_form.hpp"

#include <functional>

namespace magstar::star {

GridSymbol grid_magnetic_product(const GridSymbol& f, const GridSymbol& g,
                                 const MagneticForm& F);

// Direct integral-form product evaluated at one phase-space point by brute
//窗 summation: (pi hbar)^{-2n} int int exp{(i/hbar) Area(x, x2, x1)} f(x2)
// g(x1) dx2 dx1 with the membrane area in closed form. Independent of the
// convolution path; used for the wing-membrane consistency checks.
// f and g are callables on phase-space points (length-2n vectors).
kernels::cplx integral_product_at(
    const std::function<kernels::cplx(const std::vector<double>&)>& f,
    const std::function<kernels::cplx(const std::vector<double>&)>& g,
    const MagneticForm& F, double hbar, const std::vector<double>& x,
    const std::vector<double>& window_center, double window_halfwidth, int points_per_axis,
    bool via_wing_membrane = false);

} // namespace magstar::star
