#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "magstar/groupoid.hpp"
#include "magstar/star_exact.hpp"

using namespace magstar;
using namespace magstar::grpd;

namespace {

std::uint64_t st = 77777;
Rat rrat() {
    st ^= st << 13; st ^= st >> 7; st ^= st << 17;
    return Rat((i64)(st % 13) - 6, 1 + (i64)(st % 4));
}
std::vector<Rat> rvec(int d) {
    std::vector<Rat> v(d);
    for (auto& x : v) x = rrat();
    return v;
}

MagneticForm linear_planar() { return MagneticForm::planar(PolySymbol::q(2, 0)); }
MagneticForm quadratic_planar() {
    return MagneticForm::planar(PolySymbol::parse(2, "q1^2 - q2"));
}

} // namespace

TEST_CASE("left/right maps: F = 0 chord-midpoint relations and unit element") {
    geom::ChordGeometry g0(MagneticForm::zero(2));
    std::vector<double> x{1.0, -2.0, 0.5, 3.0}, y{0.2, 0.4, -0.6, 0.8};
    auto [l, r] = left_right_maps(g0, x, y);
    // l = x + (1/2) J^{-1} y, J^{-1} v = (-v_p, v_q)
    CHECK(l[0] == doctest::Approx(x[0] - 0.5 * y[2]));
    CHECK(l[1] == doctest::Approx(x[1] - 0.5 * y[3]));
    CHECK(l[2] == doctest::Approx(x[2] + 0.5 * y[0]));
    CHECK(l[3] == doctest::Approx(x[3] + 0.5 * y[1]));
    CHECK(r[0] == doctest::Approx(x[0] + 0.5 * y[2]));
    CHECK(r[2] == doctest::Approx(x[2] - 0.5 * y[0]));

    std::vector<double> y0(4, 0.0);
    auto [l0, r0] = left_right_maps(g0, x, y0);
    for (int i = 0; i < 4; ++i) {
        CHECK(l0[i] == doctest::Approx(x[i]));
        CHECK(r0[i] == doctest::Approx(x[i]));
    }
}

TEST_CASE("left/right maps: constant F relation l_p - r_p = y_q - F (l_q - r_q)") {
    Rat b(4, 3);
    geom::ChordGeometry g(MagneticForm::planar_constant(b));
    auto x = rvec(4), y = rvec(4);
    auto [l, r] = left_right_maps(g, x, y);
    // F v = (b v2, -b v1)
    Rat d0 = l[2] - r[2], d1 = l[3] - r[3];
    CHECK(d0 == y[0] - b * (l[1] - r[1]));
    CHECK(d1 == y[1] + b * (l[0] - r[0]));
}

TEST_CASE("reconstruct: F = 0 triangle rule and l = r unit") {
    geom::ChordGeometry g0(MagneticForm::zero(2));
    std::vector<double> l{1, 2, 3, 4}, r{-1, 0.5, 2, -3};
    ElementD m = reconstruct(g0, l, r);
    for (int j = 0; j < 4; ++j) CHECK(m.x[j] == doctest::Approx(0.5 * (l[j] + r[j])));
    CHECK(m.y[0] == doctest::Approx(l[2] - r[2]));
    CHECK(m.y[1] == doctest::Approx(l[3] - r[3]));
    CHECK(m.y[2] == doctest::Approx(-(l[0] - r[0])));
    CHECK(m.y[3] == doctest::Approx(-(l[1] - r[1])));

    ElementD u = reconstruct(g0, l, l);
    for (int j = 0; j < 4; ++j) {
        CHECK(u.x[j] == doctest::Approx(l[j]));
        CHECK(u.y[j] == doctest::Approx(0.0));
    }
}

TEST_CASE("round trip (l,r) <-> (x,y) is exact in rational arithmetic") {
    for (const MagneticForm& F : {linear_planar(), quadratic_planar()}) {
        geom::ChordGeometry g(F);
        for (Rat tau : {Rat(1, 2), Rat(0), Rat(1, 4)}) {
            for (int it = 0; it < 10; ++it) {
                auto l = rvec(4), r = rvec(4);
                ElementR m = reconstruct(g, l, r, tau);
                auto [l2, r2] = left_right_maps(g, m.x, m.y, tau);
                for (int j = 0; j < 4; ++j) {
                    CHECK(l2[j] == l[j]);
                    CHECK(r2[j] == r[j]);
                }
            }
        }
    }
}

TEST_CASE("multiplication: F = 0 and constant F keep y = y1 + y2") {
    for (const MagneticForm& F :
         {MagneticForm::zero(2), MagneticForm::planar_constant(Rat(2))}) {
        geom::ChordGeometry g(F);
        auto a = rvec(4), b = rvec(4), c = rvec(4);
        ElementR m2 = reconstruct(g, a, b), m1 = reconstruct(g, b, c);
        ElementR m = multiply(g, m2, m1);
        for (int j = 0; j < 4; ++j) CHECK(m.y[j] == m1.y[j] + m2.y[j]);
    }
}

TEST_CASE("magnetic y-rule: correction equals the grad-F triangle flux, two ways") {
    MagneticForm F = linear_planar();
    geom::ChordGeometry g(F);
    for (int it = 0; it < 8; ++it) {
        auto a = rvec(4), b = rvec(4), c = rvec(4);
        ElementR m2 = reconstruct(g, a, b), m1 = reconstruct(g, b, c);
        ElementR m = multiply(g, m2, m1);
        std::vector<Rat> q{m.x[0], m.x[1]}, q2{m2.x[0], m2.x[1]}, q1{m1.x[0], m1.x[1]};
        auto corr = y_rule_correction(F, q, q2, q1);
        for (int j = 0; j < 2; ++j)
            CHECK(m.y[j] == m1.y[j] + m2.y[j] + corr[j]);
        for (int j = 2; j < 4; ++j)
            CHECK(m.y[j] == m1.y[j] + m2.y[j]);
    }
}

TEST_CASE("non-multiplicable pairs raise with the defect") {
    geom::ChordGeometry g(MagneticForm::zero(2));
    ElementD m2{{0, 0, 0, 0}, {0.5, 0, 0, 0}};
    ElementD m1{{5, 5, 5, 5}, {0, 0, 0, 0}};
    CHECK_THROWS_AS(multiply(g, m2, m1), NotMultiplicable);
    try {
        multiply(g, m2, m1);
    } catch (const NotMultiplicable& e) {
        CHECK(e.defect > 1.0);
    }
    // exact mode demands equality
    MagneticForm F = linear_planar();
    geom::ChordGeometry gf(F);
    auto a = rvec(4), b = rvec(4), c = rvec(4);
    auto bb = b;
    bb[0] += Rat(1, 7);
    ElementR e2 = reconstruct(gf, a, b), e1 = reconstruct(gf, bb, c);
    CHECK_THROWS_AS(multiply(gf, e2, e1), NotMultiplicable);
}

TEST_CASE("associativity and identities on composable triples, exact") {
    MagneticForm F = quadratic_planar();
    geom::ChordGeometry g(F);
    for (int it = 0; it < 6; ++it) {
        auto a = rvec(4), b = rvec(4), c = rvec(4), d = rvec(4);
        ElementR m3 = reconstruct(g, a, b), m2 = reconstruct(g, b, c), m1 = reconstruct(g, c, d);
        ElementR lhs = multiply(g, multiply(g, m3, m2), m1);
        ElementR rhs = multiply(g, m3, multiply(g, m2, m1));
        for (int j = 0; j < 4; ++j) {
            CHECK(lhs.x[j] == rhs.x[j]);
            CHECK(lhs.y[j] == rhs.y[j]);
        }
        // units: m o (r(m), r(m)) = m and (l(m), l(m)) o m = m
        ElementR ur = reconstruct(g, b, b);
        ElementR prod = multiply(g, m3, ur);
        for (int j = 0; j < 4; ++j) {
            CHECK(prod.x[j] == m3.x[j]);
            CHECK(prod.y[j] == m3.y[j]);
        }
        // inverse: swapping l and r gives l(m o m^{-1}) = r(m o m^{-1}) = l(m)
        ElementR inv = reconstruct(g, b, a);
        ElementR e = multiply(g, m3, inv);
        auto [le, re] = left_right_maps(g, e.x, e.y);
        for (int j = 0; j < 4; ++j) {
            CHECK(le[j] == a[j]);
            CHECK(re[j] == a[j]);
        }
    }
}

TEST_CASE("poisson and anti-poisson residuals of the reduction maps") {
    // F = 0, f = q, g = p
    MagneticForm F0 = MagneticForm::zero(2);
    auto r0 = poisson_map_check(F0, PolySymbol::q(2, 0), PolySymbol::p(2, 0));
    CHECK(r0.left_residual.is_zero());
    CHECK(r0.right_residual.is_zero());

    // constant F, f = p1, g = p2
    MagneticForm Fc = MagneticForm::planar_constant(Rat(3));
    auto rc = poisson_map_check(Fc, PolySymbol::p(2, 0), PolySymbol::p(2, 1));
    CHECK(rc.left_residual.is_zero());
    CHECK(rc.right_residual.is_zero());

    // degree <= 2 test functions, linear and quadratic field
    for (const MagneticForm& F : {linear_planar(), quadratic_planar()}) {
        for (auto& [fs, gs] : std::vector<std::pair<const char*, const char*>>{
                 {"q1 p1", "p2^2"}, {"q2^2 + p1", "q1 q2"}, {"p1 p2", "q1 + p2"}}) {
            auto r = poisson_map_check(F, PolySymbol::parse(2, fs), PolySymbol::parse(2, gs));
            CHECK(r.left_residual.is_zero());
            CHECK(r.right_residual.is_zero());
        }
    }

    // negative control: dropping the Valatin term breaks the Poisson property
    auto broken = poisson_map_check(linear_planar(), PolySymbol::p(2, 0), PolySymbol::p(2, 1),
                                    /*drop_valatin_term=*/true);
    CHECK(!broken.left_residual.is_zero());
}

TEST_CASE("lemma 6: magnetic tau-wing area is invariant under the V_F shift") {
    MagneticForm F = quadratic_planar();
    geom::ChordGeometry g(F);
    for (Rat tau : {Rat(0), Rat(1, 4), Rat(1)}) {
        std::vector<double> l{0.7, -0.2, 0.4, 1.1}, r{-0.5, 0.9, -1.0, 0.3};
        ElementD m = reconstruct(g, l, r, tau);
        // x^tau = x - V_F; V_F = (0; A^s(l_q, r_q))
        auto Al = g.valatin({l[0], l[1]}, {r[0], r[1]});
        auto Ar = g.valatin({r[0], r[1]}, {l[0], l[1]});
        std::vector<double> xtau = m.x;
        for (int j = 0; j < 2; ++j) xtau[2 + j] -= 0.5 * (Al[j] + Ar[j]);
        geom::Triangle wing{{l, m.x, r}}, wing_tau{{l, xtau, r}};
        double a1 = geom::triangle_area_omega_F(wing, g);
        double a2 = geom::triangle_area_omega_F(wing_tau, g);
        CHECK(std::abs(a1 - a2) < 1e-10);
    }
}
