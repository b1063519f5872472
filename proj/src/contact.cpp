#include "magstar/contact.hpp"

#include <map>

namespace magstar::dyn {

// Coordinates of the extended space: z_0..z_{n-1} = q, z_n..z_{2n-1} = p,
// z_{2n} = t. Coefficients are Polys in the PolySymbol layout of dimension n
// (slot 2n+1 holds t), so diff-by-coordinate maps to the right slot.

namespace {

struct Calculus {
    int n;
    int ncoord() const { return 2 * n + 1; }
    int slot(int c) const { return c < 2 * n ? c : 2 * n + 1; } // t lives at 2n+1

    using OneForm = std::vector<Poly>;                    // [coord]
    using TwoForm = std::map<std::pair<int, int>, Poly>;  // a < b
    using ThreeForm = std::map<std::array<int, 3>, Poly>; // a < b < c

    static void add2(TwoForm& f, int a, int b, const Poly& p) {
        if (p.is_zero() || a == b) return;
        if (a < b) f[{a, b}] += p;
        else f[{b, a}] -= p;
    }
    static void add3(ThreeForm& f, int a, int b, int c, const Poly& p) {
        if (p.is_zero() || a == b || b == c || a == c) return;
        int v[3] = {a, b, c};
        int sign = 1;
        // sort with parity
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2 - i; ++j)
                if (v[j] > v[j + 1]) { std::swap(v[j], v[j + 1]); sign = -sign; }
        Poly q = sign > 0 ? p : -p;
        f[{v[0], v[1], v[2]}] += q;
    }

    Poly diffc(const Poly& p, int c) const { return p.diff(slot(c)); }

    TwoForm d(const OneForm& w) const {
        TwoForm out;
        for (int a = 0; a < ncoord(); ++a)
            for (int c = 0; c < ncoord(); ++c) add2(out, c, a, diffc(w[a], c));
        return out;
    }
    ThreeForm d(const TwoForm& w) const {
        ThreeForm out;
        for (const auto& [ab, p] : w)
            for (int c = 0; c < ncoord(); ++c) add3(out, c, ab.first, ab.second, diffc(p, c));
        return out;
    }

    // contraction in the convention of the checks: (v | w)(u, ...) =
    // w(u, ..., v), the field inserted in the LAST slot. For a 2-form this is
    // minus the standard interior product, for a 3-form it coincides with it.
    OneForm contract(const TwoForm& w, const OneForm& v) const {
        OneForm out(ncoord());
        for (const auto& [ab, p] : w) {
            auto [a, b] = ab;
            out[a] += p * v[b];
            out[b] -= p * v[a];
        }
        return out;
    }
    TwoForm contract(const ThreeForm& w, const OneForm& v) const {
        TwoForm out;
        for (const auto& [abc, p] : w) {
            auto [a, b, c] = abc;
            add2(out, a, b, p * v[c]);
            add2(out, b, c, p * v[a]);
            add2(out, c, a, p * v[b]);
        }
        return out;
    }

    // standard Lie derivative via Cartan with the standard interior product;
    // in the last-slot convention above this reads, for a 2-form,
    //   L_v w = -d(v | w) + v | dw.
    TwoForm lie(const TwoForm& w, const OneForm& v) const {
        TwoForm out = d(contract(w, v));
        for (auto& [k, p] : out) p = -p;
        TwoForm second = contract(d(w), v);
        for (auto& [k, p] : second) out[k] += p;
        return out;
    }
};

std::vector<Poly> flatten(const Calculus::TwoForm& f) {
    std::vector<Poly> out;
    for (const auto& [k, p] : f) out.push_back(p);
    if (out.empty()) out.push_back(Poly());
    return out;
}

} // namespace

ContactResiduals contact_checks_raw(int n, const std::vector<std::vector<PolySymbol>>& Fc,
                                    const std::vector<PolySymbol>& E, const PolySymbol& H) {
    Calculus C{n};
    const int T = 2 * n; // coordinate index of t

    // omega~_F = sum_j dp_j ^ dq_j + (1/2) F_jk dq^k ^ dq^j + E_j dq^j ^ dt
    Calculus::TwoForm w;
    for (int j = 0; j < n; ++j) Calculus::add2(w, n + j, j, Poly(GRat(1)));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            Calculus::add2(w, k, j, Fc[j][k].poly().scaled(GRat(Rat(1, 2))));
    for (int j = 0; j < n; ++j) Calculus::add2(w, j, T, E[j].poly());

    // v0 = d_t + E_j d_{p_j};  v_H = d_t + H_p d_q + (E - F H_p - H_q) d_p
    Calculus::OneForm v0(C.ncoord()), vH(C.ncoord());
    v0[T] = Poly(GRat(1));
    vH[T] = Poly(GRat(1));
    std::vector<Poly> Hp(n), Hq(n);
    for (int j = 0; j < n; ++j) {
        Hp[j] = H.diff_p(j).poly();
        Hq[j] = H.diff_q(j).poly();
        v0[n + j] = E[j].poly();
        vH[j] = Hp[j];
    }
    for (int j = 0; j < n; ++j) {
        Poly acc = E[j].poly() - Hq[j];
        for (int k = 0; k < n; ++k) acc -= Fc[j][k].poly() * Hp[k];
        vH[n + j] = acc;
    }

    ContactResiduals out;
    out.v0_contraction = C.contract(w, v0);
    out.v0_lie = flatten(C.lie(w, v0));

    // v_H | w = dH - v0(H) dt
    Calculus::OneForm rhs1(C.ncoord());
    for (int c = 0; c < C.ncoord(); ++c) rhs1[c] = C.diffc(H.poly(), c);
    Poly v0H = C.diffc(H.poly(), T);
    for (int j = 0; j < n; ++j) v0H += E[j].poly() * Hp[j];
    rhs1[T] -= v0H;
    auto lhs1 = C.contract(w, vH);
    out.vH_contraction.resize(C.ncoord());
    for (int c = 0; c < C.ncoord(); ++c) out.vH_contraction[c] = lhs1[c] - rhs1[c];

    // L_{v_H} w = d(v0(H)) ^ dt
    Calculus::TwoForm rhs2;
    for (int c = 0; c < C.ncoord(); ++c) Calculus::add2(rhs2, c, T, C.diffc(v0H, c));
    Calculus::TwoForm lhs2 = C.lie(w, vH);
    for (auto& [k, p] : rhs2) lhs2[k] -= p;
    out.vH_lie = flatten(lhs2);
    return out;
}

ContactResiduals contact_checks(const EMField& em, const PolySymbol& H) {
    const int n = em.dim();
    std::vector<std::vector<PolySymbol>> Fc(n, std::vector<PolySymbol>(n, PolySymbol(n)));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) Fc[j][k] = em.magnetic().comp(j, k);
    return contact_checks_raw(n, Fc, em.electric(), H);
}

} // namespace magstar::dyn
