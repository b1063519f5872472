#include "magstar/star_series.hpp"

namespace magstar::star {

Rat series_coefficient(int s, int m) {
    if (s < 0 || m < 0) throw std::invalid_argument("series_coefficient: negative index");
    auto odd = [](int l) { return l % 2 != 0; };
    Rat c(0);
    if (odd(m + 1)) c += Rat(1, i64(s + 1) * (m + 1));
    if (odd(s + m)) c -= Rat(1, i64(s + 1) * (s + m + 2));
    return c;
}

namespace {

struct SeriesOp {
    GRat coef;
    int hpow;
    ExpKey mult{};
    ExpKey deriv{};
};

// enumerate multi-indices of dimension n with |alpha| = w
void enumerate_multi(int n, int w, std::vector<std::vector<int>>& out,
                     std::vector<int>& cur, int pos) {
    if (pos == n - 1) {
        cur[pos] = w;
        out.push_back(cur);
        return;
    }
    for (int k = 0; k <= w; ++k) {
        cur[pos] = k;
        enumerate_multi(n, w - k, out, cur, pos + 1);
    }
}

std::vector<std::vector<int>> multi_indices(int n, int w) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(n, 0);
    enumerate_multi(n, w, out, cur, 0);
    return out;
}

i64 factorial(int k) {
    i64 f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

} // namespace

HbarSeries hbar_series_product(const PolySymbol& f, const PolySymbol& g,
                               const MagneticForm& F, int order) {
    if (order < 0) throw std::invalid_argument("hbar_series_product: negative order");
    const int n = f.dim();
    if (g.dim() != n || F.dim() != n)
        throw std::invalid_argument("hbar_series_product: dimension mismatch");
    if (F.time_dependent())
        throw std::invalid_argument("hbar_series_product: specialize the field in t first");
    if (f.depends_on_t() || g.depends_on_t())
        throw std::invalid_argument("hbar_series_product: specialize t in symbols first");

    // product space layout: q_c [0,n), q2/p2, q1/p1, hbar
    const int q2 = n, p2 = 2 * n, q1 = 3 * n, p1 = 4 * n, hb = 5 * n;

    std::vector<SeriesOp> ops;
    // Janus exponent (i hbar / 2)(d_{q2} d_{p1} - d_{p2} d_{q1})
    for (int i = 0; i < n; ++i) {
        SeriesOp a;
        a.coef = GRat(Rat(0), Rat(1, 2));
        a.hpow = 1;
        a.deriv[q2 + i] = 1;
        a.deriv[p1 + i] = 1;
        ops.push_back(a);
        SeriesOp b;
        b.coef = GRat(Rat(0), Rat(-1, 2));
        b.hpow = 1;
        b.deriv[p2 + i] = 1;
        b.deriv[q1 + i] = 1;
        ops.push_back(b);
    }
    // magnetic exponent: for multi-indices alpha, beta
    //   -(i/2) c_{|a|,|b|} / (a! b!) (-i/2)^{|a|+|b|} hbar^{1+|a|+|b|}
    //     [d_q^{a+b} F_jk](q_c) d_{p2}^{a+e_j} d_{p1}^{b+e_k}
    GRat minus_half_i(Rat(0), Rat(-1, 2));
    for (int wa = 0; wa + 1 <= order; ++wa)
        for (int wb = 0; wa + wb + 1 <= order; ++wb) {
            Rat c = series_coefficient(wa, wb);
            if (c.is_zero()) continue;
            for (auto& alpha : multi_indices(n, wa))
                for (auto& beta : multi_indices(n, wb)) {
                    i64 fact = 1;
                    for (int i = 0; i < n; ++i) fact *= factorial(alpha[i]) * factorial(beta[i]);
                    GRat base = minus_half_i * GRat(c) * minus_half_i.pow(wa + wb) *
                                GRat(Rat(1, fact));
                    for (int j = 0; j < n; ++j)
                        for (int k = 0; k < n; ++k) {
                            PolySymbol dF = F.comp(j, k);
                            if (dF.is_zero()) continue;
                            for (int i = 0; i < n; ++i)
                                for (int r = 0; r < alpha[i] + beta[i]; ++r) dF = dF.diff_q(i);
                            if (dF.is_zero()) continue;
                            for (const auto& term : dF.poly().terms()) {
                                SeriesOp o;
                                o.coef = base * term.coef;
                                o.hpow = 1 + wa + wb;
                                for (int i = 0; i < n; ++i) {
                                    o.mult[i] = term.exp[i];
                                    o.deriv[p2 + i] = (std::uint8_t)alpha[i];
                                    o.deriv[p1 + i] = (std::uint8_t)beta[i];
                                }
                                o.deriv[p2 + j] = (std::uint8_t)(o.deriv[p2 + j] + 1);
                                o.deriv[p1 + k] = (std::uint8_t)(o.deriv[p1 + k] + 1);
                                ops.push_back(o);
                            }
                        }
                }
        }

    // inject f as factor 2, g as factor 1
    std::array<int, kMaxVars> fmap, gmap, merge;
    fmap.fill(-1); gmap.fill(-1); merge.fill(-1);
    for (int i = 0; i < n; ++i) {
        fmap[i] = q2 + i; fmap[n + i] = p2 + i;
        gmap[i] = q1 + i; gmap[n + i] = p1 + i;
        merge[i] = i;
        merge[q2 + i] = i; merge[p2 + i] = n + i;
        merge[q1 + i] = i; merge[p1 + i] = n + i;
    }
    fmap[2 * n] = hb; gmap[2 * n] = hb; merge[hb] = 2 * n;

    Poly P = f.poly().remap_vars(fmap) * g.poly().remap_vars(gmap);

    // exponential series with hbar truncation
    Poly acc = P, cur = P;
    for (int k = 1; !cur.is_zero(); ++k) {
        if (k > 64) throw std::runtime_error("hbar_series_product: runaway series");
        std::vector<Term> next;
        for (const auto& t : cur.terms()) {
            for (const auto& o : ops) {
                if (t.exp[hb] + o.hpow > (unsigned)order) continue;
                i64 fall = 1;
                bool dead = false;
                for (int v = 0; v < kMaxVars; ++v) {
                    unsigned d = o.deriv[v];
                    if (!d) continue;
                    unsigned e = t.exp[v];
                    if (e < d) { dead = true; break; }
                    for (unsigned r = 0; r < d; ++r) fall *= (i64)(e - r);
                }
                if (dead) continue;
                Term nt;
                nt.coef = t.coef * o.coef;
                if (fall != 1) nt.coef *= GRat(Rat(fall));
                for (int v = 0; v < kMaxVars; ++v)
                    nt.exp[v] = (std::uint8_t)(t.exp[v] - o.deriv[v] + o.mult[v]);
                nt.exp[hb] = (std::uint8_t)(nt.exp[hb] + o.hpow);
                next.push_back(nt);
            }
        }
        cur = Poly::from_terms(std::move(next));
        if (k > 1) cur = cur.scaled(GRat(Rat(1, k)));
        acc += cur;
    }

    PolySymbol result(n, acc.remap_vars(merge));
    return HbarSeries::from_symbol(result.truncate_hbar(order), order);
}

} // namespace magstar::star
