#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "magstar/star_exact.hpp"
#include "operator_oracle.hpp"

using namespace magstar;
using namespace magstar::star;

namespace {

PolySymbol Q(int n, int j) { return PolySymbol::q(n, j); }
PolySymbol P(int n, int j) { return PolySymbol::p(n, j); }
PolySymbol HB(int n) { return PolySymbol::hbar(n); }
GRat ihalf() { return GRat(Rat(0), Rat(1, 2)); }

MagneticForm planar_linear() { return MagneticForm::planar(PolySymbol::q(2, 0)); }
MagneticForm planar_quadratic() {
    return MagneticForm::planar(PolySymbol::parse(2, "q1^2 + 2 q1 q2 - q2^2"));
}

std::uint64_t rng_state = 0x853c49e6748fea9bull;
i64 rnd(i64 lo, i64 hi) {
    rng_state ^= rng_state << 13; rng_state ^= rng_state >> 7; rng_state ^= rng_state << 17;
    return lo + (i64)(rng_state % (std::uint64_t)(hi - lo + 1));
}

PolySymbol random_symbol(int n, int deg, int nterms = 5) {
    PolySymbol s(n);
    for (int t = 0; t < nterms; ++t) {
        Poly mono(GRat(Rat(rnd(-4, 4))));
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

TEST_CASE("moyal: commutator, unit, symmetrized-square example") {
    int n = 1;
    PolySymbol q = Q(n, 0), p = P(n, 0), one = PolySymbol::constant(n, GRat(1));
    CHECK(moyal_product(q, p) - moyal_product(p, q) == HB(n).scaled(GRat::i_unit()));
    CHECK(moyal_product(q, p) == q * p + HB(n).scaled(ihalf()));

    PolySymbol f = PolySymbol::parse(1, "q^2 p - 3 p^3 + q");
    CHECK(moyal_product(f, one) == f);
    CHECK(moyal_product(one, f) == f);

    // (q^2) * (p^2) - (p^2) * (q^2) = 4 i hbar q p
    PolySymbol lhs = moyal_product(q * q, p * p) - moyal_product(p * p, q * q);
    CHECK(lhs == (q * p * HB(n)).scaled(GRat(Rat(0), Rat(4))));
}

TEST_CASE("moyal vs independent operator oracle, n = 1 and n = 2") {
    for (int n : {1, 2}) {
        for (int it = 0; it < 8; ++it) {
            PolySymbol f = random_symbol(n, 3), g = random_symbol(n, 3);
            CHECK(moyal_product(f, g) == oracle_ops::moyal_oracle(f, g));
        }
    }
}

TEST_CASE("magnetic commutation relations (1.3) for every product") {
    for (const MagneticForm& F :
         {MagneticForm::planar_constant(Rat(3, 2)), planar_linear(), planar_quadratic()}) {
        const int n = F.dim();
        MagneticStar st(F);
        auto check_product = [&](auto&& prod) {
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    PolySymbol qq = prod(Q(n, j), Q(n, k)) - prod(Q(n, k), Q(n, j));
                    CHECK(qq.is_zero());
                    PolySymbol qp = prod(Q(n, j), P(n, k)) - prod(P(n, k), Q(n, j));
                    PolySymbol expect_qp =
                        j == k ? HB(n).scaled(GRat::i_unit()) : PolySymbol(n);
                    CHECK(qp == expect_qp);
                    PolySymbol pp = prod(P(n, j), P(n, k)) - prod(P(n, k), P(n, j));
                    CHECK(pp == F.comp(k, j) * HB(n).scaled(GRat::i_unit()));
                }
        };
        check_product([&](const PolySymbol& a, const PolySymbol& b) { return st.weyl(a, b); });
        for (Rat tau : {Rat(0), Rat(1, 4), Rat(1)})
            check_product([&](const PolySymbol& a, const PolySymbol& b) {
                return st.tau_product(a, b, tau);
            });
    }
}

TEST_CASE("F = 0 reduction and unit for the magnetic product") {
    MagneticForm F0 = MagneticForm::zero(2);
    MagneticStar st(F0);
    for (int it = 0; it < 6; ++it) {
        PolySymbol f = random_symbol(2, 4), g = random_symbol(2, 4);
        CHECK(st.weyl(f, g) == moyal_product(f, g));
    }
}

TEST_CASE("magnetic product: associativity on random triples") {
    for (const MagneticForm& F : {planar_linear(), planar_quadratic()}) {
        MagneticStar st(F);
        for (int it = 0; it < 4; ++it) {
            PolySymbol f = random_symbol(2, 3), g = random_symbol(2, 3), h = random_symbol(2, 3);
            CHECK(st.weyl(st.weyl(f, g), h) == st.weyl(f, st.weyl(g, h)));
        }
    }
}

TEST_CASE("magnetic product via the U_F conjugation route") {
    for (const MagneticForm& F : {planar_linear(), planar_quadratic()}) {
        MagneticStar st(F);
        for (int it = 0; it < 4; ++it) {
            PolySymbol f = random_symbol(2, 3), g = random_symbol(2, 3);
            PolySymbol via_conj = ordering_transform_UF(
                moyal_product(ordering_transform_UF(f, F), ordering_transform_UF(g, F)), F,
                /*inverse=*/true);
            CHECK(st.weyl(f, g) == via_conj);
        }
    }
}

TEST_CASE("ordering transforms: identities and inverses") {
    MagneticForm F = planar_quadratic();
    PolySymbol f = random_symbol(2, 4);
    CHECK(ordering_transform_UF(f, MagneticForm::zero(2)) == f);
    CHECK(ordering_transform_UM(f, OrderingMatrix::zero(2)) == f);
    CHECK(ordering_transform_UM(f, OrderingMatrix::tau(2, Rat(1, 2))) == f);

    CHECK(ordering_transform_UF(ordering_transform_UF(f, F), F, true) == f);
    for (Rat tau : {Rat(0), Rat(1, 4), Rat(1)})
        CHECK(ordering_transform_Utau(ordering_transform_Utau(f, tau), tau, true) == f);

    // U^tau on qp = qp + (1/2 - tau) i hbar
    PolySymbol qp = Q(1, 0) * P(1, 0);
    Rat tau(1, 4);
    CHECK(ordering_transform_Utau(qp, tau) ==
          qp + HB(1).scaled(GRat(Rat(0), Rat(1, 2) - tau)));
}

TEST_CASE("M-ordered product: M = 0, standard ordering, two routes, associativity") {
    const int n = 1;
    PolySymbol q = Q(n, 0), p = P(n, 0);
    OrderingMatrix M0 = OrderingMatrix::zero(n);
    PolySymbol f = random_symbol(n, 3), g = random_symbol(n, 3);
    CHECK(m_ordered_product(f, g, M0) == moyal_product(f, g));
    CHECK(m_ordered_product_direct(f, g, M0) == moyal_product(f, g));

    // tau = 0 (standard ordering): p *M q = pq - i hbar, q *M p = qp
    OrderingMatrix Mstd = OrderingMatrix::tau(n, Rat(0));
    CHECK(m_ordered_product(p, q, Mstd) == q * p - HB(n).scaled(GRat::i_unit()));
    CHECK(m_ordered_product(q, p, Mstd) == q * p);
    CHECK(m_ordered_product_direct(p, q, Mstd) == q * p - HB(n).scaled(GRat::i_unit()));

    // against the standard-ordered operator oracle
    for (int it = 0; it < 6; ++it) {
        PolySymbol a = random_symbol(n, 3), b = random_symbol(n, 3);
        CHECK(m_ordered_product(a, b, Mstd) == oracle_ops::tau_product_oracle(a, b, Rat(0)));
        CHECK(m_ordered_product_direct(a, b, Mstd) == m_ordered_product(a, b, Mstd));
    }

    // random admissible M (rational blocks, K and S symmetric), n = 2
    OrderingMatrix::Mat Nb(2, std::vector<Rat>(2)), Kb = Nb, Sb = Nb;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) Nb[a][b] = Rat(rnd(-2, 2), 3);
    Kb[0][0] = Rat(1, 2); Kb[1][1] = Rat(-1, 3); Kb[0][1] = Kb[1][0] = Rat(1, 5);
    Sb[0][0] = Rat(2, 7); Sb[1][1] = Rat(1); Sb[0][1] = Sb[1][0] = Rat(-1, 2);
    OrderingMatrix M(2, Nb, Kb, Sb);
    PolySymbol a2 = random_symbol(2, 3), b2 = random_symbol(2, 3), c2 = random_symbol(2, 3);
    CHECK(m_ordered_product(a2, b2, M) == m_ordered_product_direct(a2, b2, M));
    CHECK(m_ordered_product(m_ordered_product(a2, b2, M), c2, M) ==
          m_ordered_product(a2, m_ordered_product(b2, c2, M), M));
}

TEST_CASE("tau-magnetic product: Weyl reduction and code-path consistency") {
    MagneticForm F = planar_linear();
    MagneticStar st(F);
    for (int it = 0; it < 4; ++it) {
        PolySymbol f = random_symbol(2, 3), g = random_symbol(2, 3);
        CHECK(st.tau_product(f, g, Rat(1, 2)) == st.weyl(f, g));
        // (U^tau)^{-1} (U^tau f *_F U^tau g)
        for (Rat tau : {Rat(0), Rat(1, 4), Rat(1)}) {
            PolySymbol via_conj = ordering_transform_Utau(
                st.weyl(ordering_transform_Utau(f, tau), ordering_transform_Utau(g, tau)), tau,
                /*inverse=*/true);
            CHECK(st.tau_product(f, g, tau) == via_conj);
        }
    }
    // F = 0, tau = 0 route matches the M-ordered product
    MagneticStar st0(MagneticForm::zero(2));
    PolySymbol f = random_symbol(2, 3), g = random_symbol(2, 3);
    CHECK(st0.tau_product(f, g, Rat(0)) ==
          m_ordered_product(f, g, OrderingMatrix::tau(2, Rat(0))));
    // tau-product associativity with magnetic field
    PolySymbol h = random_symbol(2, 3);
    CHECK(st.tau_product(st.tau_product(f, g, Rat(1, 4)), h, Rat(1, 4)) ==
          st.tau_product(f, st.tau_product(g, h, Rat(1, 4)), Rat(1, 4)));
}

TEST_CASE("N-factor polygon product equals iterated binary product") {
    // N = 2 reduces to the binary product
    MagneticForm F = planar_linear();
    MagneticStar st(F);
    PolySymbol f = random_symbol(2, 3), g = random_symbol(2, 3), h = random_symbol(2, 2),
               k = random_symbol(2, 2);
    CHECK(st.n_factor({f, g}) == st.weyl(f, g));

    // N = 3 with F = 0: Moyal
    MagneticStar st0(MagneticForm::zero(2));
    CHECK(st0.n_factor({f, g, h}) == moyal_product(moyal_product(f, g), h));

    // N = 3, 4 with linear F
    CHECK(st.n_factor({f, g, h}) == st.weyl(st.weyl(f, g), h));
    CHECK(st.n_factor({f, g, h, k}) == st.weyl(st.weyl(st.weyl(f, g), h), k));

    CHECK_THROWS_AS(st.n_factor({}), std::invalid_argument);
}

TEST_CASE("mixed-ordering products") {
    const int n = 1;
    OrderingMatrix W = OrderingMatrix::zero(n);
    OrderingMatrix T0 = OrderingMatrix::tau(n, Rat(0));
    OrderingMatrix T1 = OrderingMatrix::tau(n, Rat(1));
    PolySymbol f = random_symbol(n, 3), g = random_symbol(n, 3);

    // all orderings equal -> N-factor product in that ordering
    CHECK(mixed_ordering_product({f, g}, {T0, T0}, T0) == m_ordered_product(f, g, T0));
    // N = 1: pure transform between orderings
    CHECK(mixed_ordering_product({f}, {T0}, W) ==
          ordering_transform_UM(ordering_transform_UM(f, T0), W, true));

    // N = 2, standard then anti-standard, expressed as Weyl: operator oracle
    using namespace oracle_ops;
    StdOp composed = mul(tau_quantize(f, Rat(0)), tau_quantize(g, Rat(1)));
    CHECK(mixed_ordering_product({f, g}, {T0, T1}, W) == weyl_symbol(composed));

    CHECK_THROWS_AS(mixed_ordering_product({f}, {T0, T1}, W), std::invalid_argument);
}

TEST_CASE("ordering matrix admissibility") {
    OrderingMatrix::Mat bad(2, std::vector<Rat>(2, Rat(0)));
    bad[0][1] = Rat(1); // K block 1x1 case: n=1, M = [[0,1],[0,0]] is admissible (K sym)
    CHECK(OrderingMatrix::admissibility_residual(bad).is_zero());
    OrderingMatrix::Mat bad2(2, std::vector<Rat>(2, Rat(0)));
    bad2[0][0] = Rat(1); bad2[1][1] = Rat(1); // M = I violates M^T J + J M = 0
    CHECK(!OrderingMatrix::admissibility_residual(bad2).is_zero());
    CHECK_THROWS_AS(OrderingMatrix::from_matrix(bad2), std::invalid_argument);
    // tau(1/2) = 0
    CHECK(OrderingMatrix::tau(2, Rat(1, 2)).is_zero());
    // K/S symmetry enforced
    OrderingMatrix::Mat z(2, std::vector<Rat>(2, Rat(0))), Ksym = z;
    Ksym[0][1] = Rat(1);
    CHECK_THROWS_AS(OrderingMatrix(2, z, Ksym, z), std::invalid_argument);
}

TEST_CASE("poisson bracket: pinned signs, antisymmetry, jacobi") {
    MagneticForm F = planar_linear();
    const int n = 2;
    PolySymbol q1 = Q(n, 0), p1 = P(n, 0), p2 = P(n, 1);
    // {q, p}_F = -1 in this sign convention
    CHECK(poisson_bracket_F(q1, p1, F) == PolySymbol::constant(n, GRat(Rat(-1))));
    // {p_j, p_k}_F = F_jk
    CHECK(poisson_bracket_F(p1, p2, F) == F.comp(0, 1));

    PolySymbol f = random_symbol(n, 2), g = random_symbol(n, 2), h = random_symbol(n, 2);
    CHECK(poisson_bracket_F(f, g, F) == -poisson_bracket_F(g, f, F));
    CHECK(jacobi_residual(f, g, h, F).is_zero());
    CHECK(jacobi_residual(f, g, h, planar_quadratic()).is_zero());
}

TEST_CASE("bracket-product compatibility at order hbar") {
    // f *_F g - g *_F f = -i hbar {f,g}_F + O(hbar^3)
    MagneticForm F = planar_quadratic();
    MagneticStar st(F);
    PolySymbol f = random_symbol(2, 3), g = random_symbol(2, 3);
    PolySymbol comm = st.weyl(f, g) - st.weyl(g, f);
    CHECK(comm.hbar_coefficient(0).is_zero());
    CHECK(comm.hbar_coefficient(1) == poisson_bracket_F(f, g, F).scaled(GRat(Rat(0), Rat(-1))));
    // Weyl-type bracket is odd in hbar (its even-hbar coefficients vanish)
    CHECK(comm.hbar_coefficient(2).is_zero());
    CHECK(comm.hbar_coefficient(4).is_zero());
}

TEST_CASE("complex conjugation symmetry of the weyl-type product") {
    MagneticForm F = planar_linear();
    MagneticStar st(F);
    PolySymbol f = random_symbol(2, 3) + random_symbol(2, 2).scaled(GRat::i_unit());
    PolySymbol g = random_symbol(2, 3);
    CHECK(st.weyl(f, g).conj() == st.weyl(g.conj(), f.conj()));
}

TEST_CASE("regular representation: lemma 4 and theorem 1") {
    for (const MagneticForm& F : {MagneticForm::planar_constant(Rat(2)), planar_linear()}) {
        const int n = F.dim();
        RegularRep rep(F);
        MagneticStar st(F);
        PolySymbol test = random_symbol(n, 3);
        // [L_q^j, L_p_k] = i hbar delta_jk; [L_p_j, L_p_k] = i hbar F_kj(L_q)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                PolySymbol c1 = rep.L_q(j, rep.L_p(k, test)) - rep.L_p(k, rep.L_q(j, test));
                PolySymbol expect =
                    j == k ? (test * HB(n)).scaled(GRat::i_unit()) : PolySymbol(n);
                CHECK(c1 == expect);
                // L commutes with R
                PolySymbol c2 = rep.L_p(j, rep.R_p(k, test)) - rep.R_p(k, rep.L_p(j, test));
                CHECK(c2.is_zero());
                PolySymbol c3 = rep.L_q(j, rep.R_p(k, test)) - rep.R_p(k, rep.L_q(j, test));
                CHECK(c3.is_zero());
                // R satisfies the sign-reversed relations
                PolySymbol c4 = rep.R_q(j, rep.R_p(k, test)) - rep.R_p(k, rep.R_q(j, test));
                PolySymbol expect4 =
                    j == k ? (test * HB(n)).scaled(-GRat::i_unit()) : PolySymbol(n);
                CHECK(c4 == expect4);
            }
        // [L_p_j, L_p_k] = i hbar F_kj(L_q): RHS as symmetrized function of L_q
        if (n == 2) {
            PolySymbol c5 = rep.L_p(0, rep.L_p(1, test)) - rep.L_p(1, rep.L_p(0, test));
            // F_kj(L_q) test: F_{10}(q) composed with L_q generators
            PolySymbol rhs(n);
            for (const auto& tm : F.comp(1, 0).poly().terms()) {
                PolySymbol cur = test.scaled(tm.coef * GRat::i_unit());
                for (int i = 0; i < n; ++i)
                    for (unsigned e = 0; e < tm.exp[i]; ++e) cur = rep.L_q(i, cur);
                rhs += cur * HB(n);
            }
            CHECK(c5 == rhs);
        }
        // Theorem 1: f *_F g = f(L) g = g(R) f on polynomial f, g
        PolySymbol f = random_symbol(n, 3), g = random_symbol(n, 3);
        CHECK(rep.product_via_left(f, g) == st.weyl(f, g));
        CHECK(rep.product_via_right(f, g) == st.weyl(f, g));
    }
}

TEST_CASE("tau regular representation satisfies the same relations") {
    MagneticForm F = planar_linear();
    Rat tau(1, 4);
    RegularRep rep(F, tau);
    PolySymbol test = random_symbol(2, 3);
    PolySymbol c = rep.L_q(0, rep.L_p(0, test)) - rep.L_p(0, rep.L_q(0, test));
    CHECK(c == (test * HB(2)).scaled(GRat::i_unit()));
    PolySymbol c2 = rep.L_q(0, rep.R_q(1, test)) - rep.R_q(1, rep.L_q(0, test));
    CHECK(c2.is_zero());
}
