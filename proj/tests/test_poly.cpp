#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "magstar/polysymbol.hpp"

#include <random>

using namespace magstar;

namespace {

// deterministic small random symbols for property checks
PolySymbol random_symbol(int n, int deg, std::uint64_t& state) {
    auto next = [&state]() {
        state ^= state << 13; state ^= state >> 7; state ^= state << 17;
        return state;
    };
    PolySymbol s(n);
    for (int tcount = 0; tcount < 6; ++tcount) {
        Poly mono(GRat(Rat((i64)(next() % 9) - 4)));
        int budget = deg;
        for (int v = 0; v < 2 * n; ++v) {
            int e = (int)(next() % (budget + 1));
            budget -= e;
            if (e) mono *= Poly::var(v, e);
        }
        s += PolySymbol(n, mono);
    }
    return s;
}

} // namespace

TEST_CASE("poly ring basics") {
    Poly x = Poly::var(0), y = Poly::var(1);
    Poly p = x * x + y.scaled(GRat(Rat(2)));
    CHECK(p.degree_in(0) == 2);
    CHECK(p.total_degree() == 2);
    CHECK((p - p).is_zero());
    CHECK(p * Poly(GRat(1)) == p);

    // (x + y)^2 = x^2 + 2xy + y^2
    Poly s = x + y;
    Poly sq = s * s;
    CHECK(sq == x * x + (x * y).scaled(GRat(Rat(2))) + y * y);
}

TEST_CASE("differentiation, integration, evaluation") {
    Poly x = Poly::var(0), y = Poly::var(1);
    Poly p = x * x * y; // x^2 y
    CHECK(p.diff(0) == (x * y).scaled(GRat(Rat(2))));
    CHECK(p.diff(1) == x * x);
    CHECK(p.integrate(0).diff(0) == p);

    std::vector<double> pt(kMaxVars, 0.0);
    pt[0] = 2.0; pt[1] = 3.0;
    CHECK(p.eval_real(pt) == doctest::Approx(12.0));

    std::vector<Rat> rpt(kMaxVars, Rat(0));
    rpt[0] = Rat(1, 2); rpt[1] = Rat(4);
    CHECK(p.eval_rat(rpt) == Rat(1));
}

TEST_CASE("composition") {
    Poly x = Poly::var(0), y = Poly::var(1);
    Poly p = x * x + y;
    std::vector<Poly> args(kMaxVars);
    args[0] = y;            // x := y
    args[1] = Poly(GRat(Rat(3))); // y := 3
    CHECK(p.compose(args) == y * y + Poly(GRat(Rat(3))));
}

TEST_CASE("ring axioms on random symbols (exact)") {
    std::uint64_t st = 0x9e3779b97f4a7c15ull;
    for (int it = 0; it < 20; ++it) {
        PolySymbol f = random_symbol(2, 3, st);
        PolySymbol g = random_symbol(2, 3, st);
        PolySymbol h = random_symbol(2, 3, st);
        CHECK(f * g == g * f);
        CHECK((f * g) * h == f * (g * h));
        CHECK((f + g) * h == f * h + g * h);
    }
}

TEST_CASE("symbol parser round-trips the grammar") {
    PolySymbol s = PolySymbol::parse(2, "3/7 q1^2 p2 - 1/2 i hbar + p1 p2 t");
    PolySymbol expect =
        PolySymbol::q(2, 0, 2) * PolySymbol::p(2, 1).scaled(GRat(Rat(3, 7))) -
        PolySymbol::hbar(2).scaled(GRat(Rat(0), Rat(1, 2))) +
        PolySymbol::p(2, 0) * PolySymbol::p(2, 1) * PolySymbol::t_var(2);
    CHECK(s == expect);
    CHECK(PolySymbol::parse(2, s.str()) == s);

    // spec examples
    CHECK(PolySymbol::parse(1, "q p").diff_p(0) == PolySymbol::q(1, 0));
    PolySymbol e = PolySymbol::parse(1, "q^2 + p");
    CHECK(e.eval({Rat(2)}, {Rat(3)}) == GRat(Rat(7)));

    CHECK_THROWS_AS(PolySymbol::parse(1, "q3"), std::invalid_argument);
    CHECK_THROWS_AS(PolySymbol::parse(1, "q +"), std::invalid_argument);
    CHECK_THROWS_AS(PolySymbol::parse(1, "w"), std::invalid_argument);
}

TEST_CASE("hbar bookkeeping") {
    PolySymbol s = PolySymbol::parse(1, "q^2 p - 3/2 hbar + 2 hbar^2 q");
    CHECK(s.hbar_degree() == 2);
    CHECK(s.hbar_coefficient(0) == PolySymbol::parse(1, "q^2 p"));
    CHECK(s.hbar_coefficient(1) == PolySymbol::parse(1, "-3/2"));
    CHECK(s.truncate_hbar(1) == PolySymbol::parse(1, "q^2 p - 3/2 hbar"));
    auto series = HbarSeries::from_symbol(s, 2);
    CHECK(series.to_symbol() == s);
}
