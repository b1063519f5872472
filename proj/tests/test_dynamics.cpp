#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "magstar/contact.hpp"
#include "magstar/wkb.hpp"

#include <numbers>

using namespace magstar;
using namespace magstar::dyn;

namespace {

PolynomialHamiltonian free_particle(int n, double mass = 1.0) {
    PolySymbol H(n);
    for (int j = 0; j < n; ++j) H += PolySymbol::p(n, j) * PolySymbol::p(n, j);
    // p^2 / 2m with rational 1/(2m) only for m = 1 or 2 in tests
    GRat c = mass == 1.0 ? GRat(Rat(1, 2)) : GRat(Rat(1, 4));
    return PolynomialHamiltonian(H.scaled(c));
}

} // namespace

TEST_CASE("flow: free particle is a straight line") {
    auto H = free_particle(2);
    MagneticForm F0 = MagneticForm::zero(2);
    Vec x0{0.3, -0.5, 1.2, 0.4};
    FlowResult fl = magnetic_flow(H, F0, x0, 1.7, 100);
    const Vec& g = fl.endpoint();
    CHECK(g[0] == doctest::Approx(x0[0] + 1.7 * x0[2]).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(x0[1] + 1.7 * x0[3]).epsilon(1e-12));
    CHECK(g[2] == doctest::Approx(x0[2]));
    CHECK(g[3] == doctest::Approx(x0[3]));
}

TEST_CASE("flow: constant-B cyclotron orbit matches the closed form to 1e-8") {
    const double B = 1.3, m = 1.0;
    auto H = free_particle(2, m);
    MagneticForm F = MagneticForm::planar_constant(Rat(13, 10));
    Vec x0{0.2, -0.1, 0.8, 0.3};
    const double omega = B / m;
    const double T = 2.0 * std::numbers::pi / omega;
    FlowResult fl = magnetic_flow(H, F, x0, T, 4000);

    // dp/dt = -F p / m: (p1 + i p2)' = i omega (p1 + i p2)
    auto analytic = [&](double t) {
        std::complex<double> z0(x0[2], x0[3]);
        std::complex<double> z = z0 * std::polar(1.0, omega * t);
        std::complex<double> qc(x0[0], x0[1]);
        qc += (z - z0) / std::complex<double>(0.0, m * omega);
        return Vec{qc.real(), qc.imag(), z.real(), z.imag()};
    };
    Vec ref = analytic(T);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(fl.endpoint()[i] - ref[i]) < 1e-8);
    // |p| conserved along the samples
    for (std::size_t s = 0; s < fl.gamma.size(); s += 500) {
        double pn = std::hypot(fl.gamma[s][2], fl.gamma[s][3]);
        CHECK(pn == doctest::Approx(std::hypot(x0[2], x0[3])).epsilon(1e-9));
    }
    // energy conserved
    Vec qf(fl.endpoint().begin(), fl.endpoint().begin() + 2);
    Vec pf(fl.endpoint().begin() + 2, fl.endpoint().end());
    CHECK(H.value(qf, pf, 0) == doctest::Approx(H.value({x0[0], x0[1]}, {x0[2], x0[3]}, 0))
                                    .epsilon(1e-10));
}

TEST_CASE("flow: constant E accelerates linearly; virtual flow is exact") {
    // B = 0, E = (1/2, 0, 0) on R^3
    std::vector<PolySymbol> E{PolySymbol::constant(3, GRat(Rat(1, 2))), PolySymbol(3),
                              PolySymbol(3)};
    EMField em(MagneticForm::zero(3), E);
    auto H = free_particle(3);
    Vec x0{0, 0, 0, 0.3, 0, 0};
    FlowResult fl = em_flow(H, em, x0, 2.0, 200);
    CHECK(fl.endpoint()[3] == doctest::Approx(0.3 + 0.5 * 2.0).epsilon(1e-12));

    // E = (t, 0, 0): lambda_p1 = p0 + t^2/2 exactly
    std::vector<PolySymbol> Et{PolySymbol::t_var(3), PolySymbol(3), PolySymbol(3)};
    EMField emt(MagneticForm::zero(3), Et);
    VirtualFlow vf(emt);
    Vec lam = vf.at(x0, 2.0);
    CHECK(lam[3] == doctest::Approx(0.3 + 2.0).epsilon(1e-14)); // t^2/2 = 2
    CHECK(lam[0] == x0[0]);
    // E = 0: lambda stays at x0
    VirtualFlow vf0(EMField::zero(3));
    Vec lam0 = vf0.at(x0, 5.0);
    for (int i = 0; i < 6; ++i) CHECK(lam0[i] == x0[i]);
}

TEST_CASE("lifted flow: representation through gamma and conservation of r") {
    auto H = free_particle(2);
    // F = 0
    CHECK(lifted_flow_residual(H, MagneticForm::zero(2), {0.1, 0.2, 0.5, -0.3}, 0.8, 400) <
          1e-8);
    // constant B over half a period
    MagneticForm F = MagneticForm::planar_constant(Rat(1));
    CHECK(lifted_flow_residual(H, F, {0.2, -0.1, 0.6, 0.2}, std::numbers::pi / 2, 800) < 1e-8);
    // t = 0 sanity is exact by construction
    CHECK(lifted_flow_residual(H, F, {0.2, -0.1, 0.6, 0.2}, 1e-9, 1) < 1e-8);
}

TEST_CASE("wkb: free particle symbol is exact") {
    auto H = free_particle(1);
    MagneticForm F0 = MagneticForm::zero(1);
    WkbOptions opt;
    opt.steps = 200;
    const double t = 0.9;
    for (double p : {0.4, -1.1}) {
        Vec x{0.7, p};
        WkbData w = wkb_symbol(H, F0, t, x, opt);
        CHECK(std::abs(w.S - (-t * p * p / 2)) < 1e-10);
        CHECK(std::abs(w.S_action - w.S) < 1e-12);
        CHECK(std::abs(w.jacobian - 1.0) < 1e-12);
        CHECK(std::abs(w.amplitude - 1.0) < 1e-12);
        // against exp(-i t p^2 / (2 m hbar))
        double hbar = 0.3;
        auto sym = wkb_value(w, hbar);
        auto exact = std::polar(1.0, -t * p * p / (2 * hbar));
        CHECK(std::abs(sym - exact) < 1e-10);
    }
    // t -> 0: S = O(t), J -> 1
    WkbData w0 = wkb_symbol(H, F0, 1e-6, {0.3, 0.5}, opt);
    CHECK(std::abs(w0.S) < 1e-6);
    CHECK(w0.jacobian == doctest::Approx(1.0));
}

TEST_CASE("wkb: constant B, phase routes agree and jacobian matches cos^2(wt/2)") {
    auto H = free_particle(2);
    MagneticForm F = MagneticForm::planar_constant(Rat(1));
    WkbOptions opt;
    opt.steps = 400;
    const double t = 0.5;
    Vec x{0.4, -0.2, 0.25, 0.15};
    WkbData w = wkb_symbol(H, F, t, x, opt);
    CHECK(std::abs(w.S - w.S_action) < 1e-9);
    // for constant F and H = p^2/2m the endpoint-map determinant is
    // cos^2(omega t / 2) (v^t vanishes, d gamma is a block rotation)
    CHECK(w.jacobian == doctest::Approx(std::pow(std::cos(0.5 * t), 2)).epsilon(1e-9));
    CHECK(w.valid);

    // inhomogeneous field: routes still agree
    MagneticForm Flin = MagneticForm::planar(
        PolySymbol::parse(2, "1 + 1/4 q1"));
    WkbData wl = wkb_symbol(H, Flin, 0.4, x, opt);
    CHECK(std::abs(wl.S - wl.S_action) < 1e-9);
}

TEST_CASE("wkb: caustic raises past the validity window") {
    auto H = free_particle(2);
    MagneticForm F = MagneticForm::planar_constant(Rat(1));
    WkbOptions opt;
    opt.steps = 600;
    // J = cos^2(t/2) hits zero at t = pi
    CHECK_THROWS_AS(wkb_symbol(H, F, 3.1, {0.1, 0.0, 0.2, 0.1}, opt), CausticError);
}

TEST_CASE("marinov phase addition") {
    WkbOptions opt;
    opt.steps = 400;
    // t2 = 0 is trivial
    auto Hfree = free_particle(2);
    MagneticForm F = MagneticForm::planar_constant(Rat(1));
    CHECK(marinov_defect(Hfree, F, 0.4, 0.0, {0.2, 0.1, 0.3, -0.2}, opt) < 1e-12);

    // F = 0 with quadratic H (harmonic): Marinov's original rule
    PolySymbol Hh(1);
    Hh += PolySymbol::p(1, 0) * PolySymbol::p(1, 0);
    Hh += PolySymbol::q(1, 0) * PolySymbol::q(1, 0);
    PolynomialHamiltonian Hharm(Hh.scaled(GRat(Rat(1, 2))));
    CHECK(marinov_defect(Hharm, MagneticForm::zero(1), 0.35, 0.25, {0.5, -0.3}, opt) < 1e-10);

    // constant B
    CHECK(marinov_defect(Hfree, F, 0.3, 0.2, {0.2, 0.1, 0.3, -0.2}, opt) < 1e-8);
    // inhomogeneous B
    MagneticForm Flin = MagneticForm::planar(PolySymbol::parse(2, "1 + 1/4 q1"));
    CHECK(marinov_defect(Hfree, Flin, 0.3, 0.2, {0.2, 0.1, 0.3, -0.2}, opt) < 1e-8);
}

TEST_CASE("section 8: two-route phase equality for a time-dependent field") {
    // B = (0,0,b t), E = b (q2/2, -q1/2, 0); Maxwell-consistent
    Rat b(1, 2);
    std::vector<PolySymbol> B{PolySymbol(3), PolySymbol(3),
                              PolySymbol::t_var(3).scaled(GRat(b))};
    std::vector<PolySymbol> E{PolySymbol::q(3, 1).scaled(GRat(b * Rat(1, 2))),
                              PolySymbol::q(3, 0).scaled(GRat(-b * Rat(1, 2))),
                              PolySymbol(3)};
    EMField em(MagneticForm::from_B(B), E);
    auto H = free_particle(3);
    WkbOptions opt;
    opt.steps = 600;
    const double t = 0.6;
    Vec x{0.3, -0.2, 0.1, 0.25, 0.1, -0.15};
    WkbData w = wkb_symbol(H, em, t, x, opt);
    CHECK(std::abs(w.S - w.S_action) < 1e-9);
    CHECK(w.jacobian > 0.5);

    // blown-up space-time membrane reproduces the phase
    double s8 = phase_blowup_route(w, H, em);
    CHECK(std::abs(s8 - w.S_action) < 1e-9);

    // pure electric field: exact leading behavior survives
    EMField constE(MagneticForm::zero(3),
                   {PolySymbol::constant(3, GRat(Rat(1, 4))), PolySymbol(3), PolySymbol(3)});
    WkbData we = wkb_symbol(H, constE, 0.5, x, opt);
    CHECK(std::abs(we.S - we.S_action) < 1e-9);
}

TEST_CASE("contact structure residuals") {
    PolySymbol H(3);
    for (int j = 0; j < 3; ++j) H += PolySymbol::p(3, j) * PolySymbol::p(3, j);
    H = H.scaled(GRat(Rat(1, 2)));

    // E = 0, static B: v0 = d_t, residuals reduce to dF = 0
    std::vector<PolySymbol> B{PolySymbol(3), PolySymbol(3), PolySymbol::parse(3, "q1 + 2 q2")};
    EMField stat(MagneticForm::from_B(B), {PolySymbol(3), PolySymbol(3), PolySymbol(3)});
    CHECK(contact_checks(stat, H).all_zero());

    // constant E
    EMField constE(MagneticForm::zero(3),
                   {PolySymbol::constant(3, GRat(Rat(2))), PolySymbol(3), PolySymbol(3)});
    CHECK(contact_checks(constE, H).all_zero());

    // time-dependent Maxwell pair
    Rat b(3, 2);
    std::vector<PolySymbol> Bt{PolySymbol(3), PolySymbol(3),
                               PolySymbol::t_var(3).scaled(GRat(b))};
    std::vector<PolySymbol> Et{PolySymbol::q(3, 1).scaled(GRat(b * Rat(1, 2))),
                               PolySymbol::q(3, 0).scaled(GRat(-b * Rat(1, 2))),
                               PolySymbol(3)};
    CHECK(contact_checks(EMField(MagneticForm::from_B(Bt), Et), H).all_zero());

    // negative control: non-closed magnetic part (div B != 0)
    std::vector<std::vector<PolySymbol>> bad(3, std::vector<PolySymbol>(3, PolySymbol(3)));
    bad[0][1] = PolySymbol::q(3, 2); // F_12 = q3 is not closed
    bad[1][0] = -bad[0][1];
    auto res = contact_checks_raw(3, bad, {PolySymbol(3), PolySymbol(3), PolySymbol(3)}, H);
    CHECK(!res.all_zero());
}

TEST_CASE("klein-gordon branches") {
    const double m = 1.0;
    EMField none = EMField::zero(3);
    WkbOptions opt;
    opt.steps = 200;
    const double t = 0.7;
    Vec x{0.1, 0.2, -0.1, 0.3, -0.2, 0.1};
    auto kg = klein_gordon_symbol(3, m, t, x, none, opt);
    double p2 = x[3] * x[3] + x[4] * x[4] + x[5] * x[5];
    double Ep = std::sqrt(p2 + m * m);
    CHECK(std::abs(kg.plus.S - (-t * Ep)) < 1e-9);
    CHECK(std::abs(kg.minus.S - (t * Ep)) < 1e-9);
    CHECK(kg.plus.amplitude == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(kg.minus.amplitude == doctest::Approx(1.0).epsilon(1e-10));
    // t = 0: branch sum is 1 (Cauchy data)
    auto kg0 = klein_gordon_symbol(3, m, 1e-9, x, none, opt);
    CHECK(std::abs(kg0.value(0.5) - std::complex<double>(1.0, 0.0)) < 1e-6);

    // m -> infinity: S_+/t -> -(m + p^2/(2m)) to the displayed orders
    const double M = 40.0;
    auto kgM = klein_gordon_symbol(3, M, t, x, none, opt);
    double expand = -(M + p2 / (2 * M)) * t;
    CHECK(std::abs(kgM.plus.S - expand) < t * p2 * p2 / (4 * M * M * M));
}

TEST_CASE("trotter: N = 1 is the plain exponential; error decays with N") {
    PolySymbol H = PolySymbol::p(1, 0) * PolySymbol::p(1, 0);
    H = H.scaled(GRat(Rat(1, 2)));
    MagneticForm F0 = MagneticForm::zero(1);
    const int N = 64;
    const double hbar = 0.4, dq = 0.18, t = 0.5;
    std::vector<double> q0{-0.5 * N * dq};

    GridSymbol one_step = trotter_symbol(H, F0, t, 1, N, q0, dq, hbar);
    GridSymbol plain = GridSymbol::sample(1, N, q0, dq, hbar,
                                          [&](const Vec& q, const Vec& p) {
                                              (void)q;
                                              return std::polar(1.0, -t * p[0] * p[0] / (2 * hbar));
                                          });
    CHECK(GridSymbol::interior_max_diff(one_step, plain) < 1e-12);

    // free evolution: p-only symbols multiply pointwise under the product,
    // so every finite-N symbol already equals the exact exponential
    for (int nn : {2, 4, 8}) {
        GridSymbol s = trotter_symbol(H, F0, t, nn, N, q0, dq, hbar);
        CHECK(GridSymbol::interior_max_diff(s, plain) < 1e-12);
    }
    CHECK_THROWS_AS(trotter_symbol(H, F0, t, 0, N, q0, dq, hbar), std::invalid_argument);
}
