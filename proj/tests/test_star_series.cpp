#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "magstar/star_exact.hpp"
#include "magstar/star_series.hpp"

using namespace magstar;
using namespace magstar::star;

namespace {

std::uint64_t st = 0xc0ffee123456789ull;
i64 rnd(i64 lo, i64 hi) {
    st ^= st << 13; st ^= st >> 7; st ^= st << 17;
    return lo + (i64)(st % (std::uint64_t)(hi - lo + 1));
}
PolySymbol random_symbol(int n, int deg) {
    PolySymbol s(n);
    for (int t = 0; t < 5; ++t) {
        Poly mono(GRat(Rat(rnd(-3, 3))));
        int budget = deg;
        for (int v = 0; v < 2 * n && budget > 0; ++v) {
            int e = (int)rnd(0, budget);
            if (e) { mono *= Poly::var(v, e); budget -= e; }
        }
        s += PolySymbol(n, mono);
    }
    return s;
}

} // namespace

TEST_CASE("series coefficients c_{s,m}") {
    CHECK(series_coefficient(0, 0) == Rat(1));
    CHECK(series_coefficient(0, 1) == Rat(-1, 3));
    CHECK(series_coefficient(1, 1) == Rat(0));
    CHECK(series_coefficient(1, 0) == Rat(1, 3));
    CHECK_THROWS_AS(series_coefficient(-1, 0), std::invalid_argument);
}

TEST_CASE("order 0/1 terms: f g and the magnetic poisson bracket") {
    MagneticForm F = MagneticForm::planar(PolySymbol::parse(2, "q1 + q2^2"));
    PolySymbol f = random_symbol(2, 3), g = random_symbol(2, 3);
    auto series = hbar_series_product(f, g, F, 1);
    CHECK(series.coeff[0] == f * g);
    CHECK(series.coeff[1] == poisson_bracket_F(f, g, F).scaled(GRat(Rat(0), Rat(-1, 2))));
}

TEST_CASE("truncated series equals the exact product coefficient-wise") {
    for (const MagneticForm& F :
         {MagneticForm::planar_constant(Rat(2)),
          MagneticForm::planar(PolySymbol::parse(2, "3 q1 - q2")),
          MagneticForm::planar(PolySymbol::parse(2, "q1 q2"))}) {
        MagneticStar star(F);
        for (int it = 0; it < 4; ++it) {
            PolySymbol f = random_symbol(2, 3), g = random_symbol(2, 3);
            PolySymbol exact = star.weyl(f, g);
            const int order = 4;
            auto series = hbar_series_product(f, g, F, order);
            for (int k = 0; k <= order; ++k)
                CHECK(series.coeff[k] == exact.hbar_coefficient(k));
        }
    }
}

TEST_CASE("negative order rejected") {
    MagneticForm F = MagneticForm::zero(2);
    PolySymbol f = random_symbol(2, 2);
    CHECK_THROWS_AS(hbar_series_product(f, f, F, -1), std::invalid_argument);
}
