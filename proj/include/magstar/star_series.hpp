// Formal hbar power-series route to the magnetic Weyl product: the flux
// exponent is replaced by its Taylor series in the derivatives of F with the
// combinatorial coefficients c_{s,m}. On polynomial symbols the truncated
// series must agree with the exact product through the truncation order;
// the exact product is the ground truth for any mismatch.

#pragma once

#include "magstar/polysymbol.hpp"
#include "magstar/magnetic_form.hpp"

namespace magstar::star {

// c_{s,m} = e[m+1]/((s+1)(m+1)) - e[s+m]/((s+1)(s+m+2)),  e[l] = l mod 2
Rat series_coefficient(int s, int m);

HbarSeries hbar_series_product(const PolySymbol& f, const PolySymbol& g,
                               const MagneticForm& F, int order);

} // namespace magstar::star
