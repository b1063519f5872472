#include "magstar/star_exact.hpp"

namespace magstar::star {

// ---------------------------------------------------------------------------
// Generic exponential-operator machinery. An OpTerm is
//   coef * hbar^hpow * x^mult * d^deriv
// acting on a Poly in some slot layout; within one exponent all terms
// commute (multiplications and derivatives touch disjoint variable groups),
// so exp{E} is evaluated by the plain series, which terminates because every
// term strictly lowers the degree it differentiates.

namespace {

struct OpTerm {
    GRat coef;
    int hpow = 0;
    ExpKey mult{};
    ExpKey deriv{};
};

Poly apply_ops(const std::vector<OpTerm>& E, const Poly& P, int hbar_slot) {
    std::vector<Term> out;
    out.reserve(P.size() * E.size() / 2 + 8);
    for (const auto& t : P.terms()) {
        for (const auto& o : E) {
            i64 fall = 1;
            bool dead = false;
            for (int v = 0; v < kMaxVars; ++v) {
                unsigned d = o.deriv[v];
                if (!d) continue;
                unsigned e = t.exp[v];
                if (e < d) { dead = true; break; }
                for (unsigned k = 0; k < d; ++k) fall *= (i64)(e - k);
            }
            if (dead) continue;
            Term nt;
            nt.coef = t.coef * o.coef;
            if (fall != 1) nt.coef *= GRat(Rat(fall));
            for (int v = 0; v < kMaxVars; ++v)
                nt.exp[v] = (std::uint8_t)(t.exp[v] - o.deriv[v] + o.mult[v]);
            nt.exp[hbar_slot] = (std::uint8_t)(nt.exp[hbar_slot] + o.hpow);
            out.push_back(nt);
        }
    }
    return Poly::from_terms(std::move(out));
}

Poly exp_apply(const std::vector<OpTerm>& E, Poly P, int hbar_slot, int hbar_cap = -1) {
    Poly acc = P;
    Poly cur = std::move(P);
    for (int k = 1; !cur.is_zero(); ++k) {
        if (k > 64)
            throw std::runtime_error("exp_apply: series did not terminate (non-polynomial path?)");
        cur = apply_ops(E, cur, hbar_slot);
        if (hbar_cap >= 0) {
            std::vector<Term> kept;
            for (const auto& t : cur.terms())
                if (t.exp[hbar_slot] <= (unsigned)hbar_cap) kept.push_back(t);
            cur = Poly::from_terms(std::move(kept));
        }
        if (k > 1) cur = cur.scaled(GRat(Rat(1, k))); // accumulate E^k / k!
        acc += cur;
    }
    return acc;
}

// N-factor product space layout: q_c at [0, n); factor j (j = N leftmost)
// occupies q at [n + 2n(N-j), +n) and p right after; hbar at the end.
struct ProductSpace {
    int n, N;
    int qc(int i) const { return i; }
    int q(int factor, int i) const { return n + 2 * n * (N - factor) + i; }
    int p(int factor, int i) const { return n + 2 * n * (N - factor) + n + i; }
    int hbar() const { return n + 2 * n * N; }
    int aux1() const { return hbar() + 1; }
    int aux2() const { return hbar() + 2; }

    ProductSpace(int n_, int N_) : n(n_), N(N_) {
        if (aux2() >= kMaxVars)
            throw std::invalid_argument("product space exceeds variable budget (reduce N or n)");
    }

    // embed a symbol as factor j
    Poly inject(const PolySymbol& f, int factor) const {
        if (f.dim() != n) throw std::invalid_argument("star product: dimension mismatch");
        if (f.depends_on_t())
            throw std::invalid_argument("star product: specialize t in symbols first");
        std::array<int, kMaxVars> map;
        map.fill(-1);
        for (int i = 0; i < n; ++i) { map[i] = q(factor, i); map[n + i] = p(factor, i); }
        map[2 * n] = hbar();
        return f.poly().remap_vars(map);
    }

    // set q_c = q_j = q, p_j = p: collapse to the symbol layout
    PolySymbol merge(const Poly& P) const {
        std::array<int, kMaxVars> map;
        map.fill(-1);
        for (int i = 0; i < n; ++i) map[qc(i)] = i;
        for (int j = 1; j <= N; ++j)
            for (int i = 0; i < n; ++i) { map[q(j, i)] = i; map[p(j, i)] = n + i; }
        map[hbar()] = 2 * n;
        return PolySymbol(n, P.remap_vars(map));
    }
};

// convert a flux polynomial in (q_c, u_N..u_1) -- u powers recorded on the
// p-slots -- into operator terms via u_j -> i hbar d_{p_j}, with the overall
// (i/hbar) prefactor of the exponent
std::vector<OpTerm> flux_to_ops(const Poly& flux, const ProductSpace& S) {
    std::vector<OpTerm> ops;
    for (const auto& t : flux.terms()) {
        OpTerm o;
        int upow = 0;
        for (int j = 1; j <= S.N; ++j)
            for (int i = 0; i < S.n; ++i) {
                unsigned e = t.exp[S.p(j, i)];
                o.deriv[S.p(j, i)] = (std::uint8_t)e;
                upow += e;
            }
        for (int i = 0; i < S.n; ++i) o.mult[S.qc(i)] = t.exp[S.qc(i)];
        if (upow < 2)
            throw std::logic_error("magnetic flux term with fewer than two u factors");
        o.hpow = upow - 1;
        o.coef = t.coef * GRat::i_unit().pow(1 + upow);
        ops.push_back(o);
    }
    return ops;
}

void append_janus(std::vector<OpTerm>& ops, const ProductSpace& S, int left, int right,
                  const GRat& coef) {
    // coef * hbar * sum_i d_{q_left, i} d_{p_right, i}
    for (int i = 0; i < S.n; ++i) {
        OpTerm o;
        o.coef = coef;
        o.hpow = 1;
        o.deriv[S.q(left, i)] = 1;
        o.deriv[S.p(right, i)] = 1;
        ops.push_back(o);
    }
}

GRat i_times(const Rat& r) { return GRat(Rat(0), r); }

std::vector<Poly> qc_vars(const ProductSpace& S) {
    std::vector<Poly> v(S.n);
    for (int i = 0; i < S.n; ++i) v[i] = Poly::var(S.qc(i));
    return v;
}
std::vector<Poly> u_vars(const ProductSpace& S, int factor) {
    std::vector<Poly> v(S.n);
    for (int i = 0; i < S.n; ++i) v[i] = Poly::var(S.p(factor, i));
    return v;
}

// shared core of the Weyl and tau-ordered binary magnetic products; the Weyl
// case is tau = 1/2 (Janus (i hbar/2)(dq, dp - dp, dq), flux argument q)
PolySymbol binary_product(const PolySymbol& f, const PolySymbol& g, const MagneticForm* F,
                          const Rat& tau) {
    const int n = f.dim();
    if (g.dim() != n) throw std::invalid_argument("star product: dimension mismatch");
    ProductSpace S(n, 2);
    std::vector<OpTerm> ops;
    // tau u1 d_{q2} - (1 - tau) u2 d_{q1}, u = i hbar d_p; tau = 1/2 is Weyl
    append_janus(ops, S, 2, 1, i_times(tau));                  // d_{q2} d_{p1}
    append_janus(ops, S, 1, 2, i_times(-(Rat(1) - tau)));      // d_{q1} d_{p2}
    if (F && !F->is_zero()) {
        if (F->dim() != n) throw std::invalid_argument("star product: field dimension mismatch");
        if (F->time_dependent())
            throw std::invalid_argument("star product: specialize the field in t first");
        auto q = qc_vars(S);
        auto u1 = u_vars(S, 1), u2 = u_vars(S, 2);
        if (tau != Rat(1, 2)) {
            GRat shift(tau - Rat(1, 2));
            for (int i = 0; i < n; ++i) q[i] += (u1[i] + u2[i]).scaled(shift);
        }
        Poly phi = geom::phi_midpoint_compose(*F, q, u2, u1, Poly(), S.aux1(), S.aux2());
        auto fops = flux_to_ops(phi, S);
        ops.insert(ops.end(), fops.begin(), fops.end());
    }
    Poly P = S.inject(f, 2) * S.inject(g, 1);
    return S.merge(exp_apply(ops, std::move(P), S.hbar()));
}

} // namespace

// --- OrderingMatrix ----------------------------------------------------------

OrderingMatrix::OrderingMatrix(int n, Mat Nb, Mat Kb, Mat Sb)
    : n_(n), N_(std::move(Nb)), K_(std::move(Kb)), S_(std::move(Sb)) {
    auto check = [n](const Mat& m, const char* what) {
        if ((int)m.size() != n) throw std::invalid_argument(std::string("OrderingMatrix: bad ") + what);
        for (auto& row : m)
            if ((int)row.size() != n)
                throw std::invalid_argument(std::string("OrderingMatrix: bad ") + what);
    };
    check(N_, "N block"); check(K_, "K block"); check(S_, "S block");
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (K_[a][b] != K_[b][a])
                throw std::invalid_argument("OrderingMatrix: K block must be symmetric");
            if (S_[a][b] != S_[b][a])
                throw std::invalid_argument("OrderingMatrix: S block must be symmetric");
        }
}

OrderingMatrix OrderingMatrix::zero(int n) {
    Mat z(n, std::vector<Rat>(n, Rat(0)));
    return OrderingMatrix(n, z, z, z);
}

OrderingMatrix OrderingMatrix::tau(int n, const Rat& tau) {
    Mat Nb(n, std::vector<Rat>(n, Rat(0))), z = Nb;
    for (int i = 0; i < n; ++i) Nb[i][i] = Rat(1, 2) - tau;
    return OrderingMatrix(n, Nb, z, z);
}

Rat OrderingMatrix::admissibility_residual(const Mat& M) {
    const int d = (int)M.size();
    const int n = d / 2;
    if (d != 2 * n || d == 0) throw std::invalid_argument("OrderingMatrix: matrix must be 2n x 2n");
    // J M with J = [[0, I], [-I, 0]]; M^T J + J M = 0 <=> J M symmetric
    auto JM = [&](int a, int b) { return a < n ? M[n + a][b] : -M[a - n][b]; };
    Rat worst(0);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            Rat r = (JM(a, b) - JM(b, a)).abs();
            if (worst < r) worst = r;
        }
    return worst;
}

OrderingMatrix OrderingMatrix::from_matrix(const Mat& M) {
    if (!admissibility_residual(M).is_zero())
        throw std::invalid_argument("OrderingMatrix: M^T J + J M != 0");
    const int n = (int)M.size() / 2;
    Mat Nb(n, std::vector<Rat>(n)), Kb = Nb, Sb = Nb;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            Nb[a][b] = M[a][b];
            Kb[a][b] = M[a][n + b];
            Sb[a][b] = M[n + a][b];
        }
    return OrderingMatrix(n, Nb, Kb, Sb);
}

OrderingMatrix OrderingMatrix::from_matrix(const std::vector<std::vector<double>>& M) {
    const int d = (int)M.size();
    Mat R(d, std::vector<Rat>(d));
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            // exact dyadic conversion of the double entry
            double v = M[a][b];
            i64 den = 1;
            while (v != (double)(i64)v && den < (i64(1) << 40)) { v *= 2; den *= 2; }
            R[a][b] = Rat((i64)v, den);
        }
    Rat res = admissibility_residual(R);
    if (res.to_double() > 1e-12)
        throw std::invalid_argument("OrderingMatrix: M^T J + J M exceeds 1e-12");
    if (!res.is_zero())
        throw std::invalid_argument(
            "OrderingMatrix: floating matrix is only approximately admissible; "
            "symmetrize the K and S blocks first");
    return from_matrix(R);
}

Rat OrderingMatrix::entry(int a, int b) const {
    bool ar = a >= n_, br = b >= n_;
    int i = ar ? a - n_ : a, j = br ? b - n_ : b;
    if (!ar && !br) return N_[i][j];
    if (!ar && br) return K_[i][j];
    if (ar && !br) return S_[i][j];
    return -N_[j][i];
}

bool OrderingMatrix::is_zero() const {
    for (int a = 0; a < 2 * n_; ++a)
        for (int b = 0; b < 2 * n_; ++b)
            if (!entry(a, b).is_zero()) return false;
    return true;
}

OrderingMatrix OrderingMatrix::negated() const {
    Mat Nb = N_, Kb = K_, Sb = S_;
    for (auto* m : {&Nb, &Kb, &Sb})
        for (auto& row : *m)
            for (auto& v : row) v = -v;
    return OrderingMatrix(n_, Nb, Kb, Sb);
}

// --- products ----------------------------------------------------------------

PolySymbol moyal_product(const PolySymbol& f, const PolySymbol& g) {
    return binary_product(f, g, nullptr, Rat(1, 2));
}

MagneticStar::MagneticStar(MagneticForm F, int n) : n_(n), F_(std::move(F)) {
    if (F_.dim() != n_) throw std::invalid_argument("MagneticStar: dimension mismatch");
}

PolySymbol MagneticStar::weyl(const PolySymbol& f, const PolySymbol& g) const {
    return binary_product(f, g, &F_, Rat(1, 2));
}

PolySymbol MagneticStar::tau_product(const PolySymbol& f, const PolySymbol& g,
                                     const Rat& tau) const {
    return binary_product(f, g, &F_, tau);
}

PolySymbol MagneticStar::n_factor(const std::vector<PolySymbol>& fs) const {
    if (fs.empty()) throw std::invalid_argument("n_factor_product: empty factor list");
    if (fs.size() == 1) return fs[0];
    const int n = n_;
    const int N = (int)fs.size();
    ProductSpace S(n, N);
    std::vector<OpTerm> ops;
    for (int a = 2; a <= N; ++a)
        for (int b = 1; b < a; ++b) {
            append_janus(ops, S, a, b, i_times(Rat(1, 2)));
            append_janus(ops, S, b, a, i_times(Rat(-1, 2)));
        }
    if (!F_.is_zero()) {
        if (F_.time_dependent())
            throw std::invalid_argument("star product: specialize the field in t first");
        // polygon membrane: fan of triangles (V0, A_{k-1}, A_k),
        // A_m = V0 + u_1 + ... + u_m, V0 = q_c - (sum u)/2
        auto qc = qc_vars(S);
        std::vector<std::vector<Poly>> A(N + 1, std::vector<Poly>(n));
        for (int i = 0; i < n; ++i) {
            Poly sum;
            for (int j = 1; j <= N; ++j) sum += Poly::var(S.p(j, i));
            A[0][i] = qc[i] - sum.scaled(GRat(Rat(1, 2)));
            for (int m = 1; m <= N; ++m) A[m][i] = A[m - 1][i] + Poly::var(S.p(m, i));
        }
        Poly flux_sym = geom::flux_symbolic(F_);
        Poly total;
        for (int k = 2; k <= N; ++k) {
            std::vector<Poly> args(kMaxVars);
            for (int i = 0; i < n; ++i) {
                args[i] = A[k][i];           // q
                args[n + i] = A[k - 1][i];   // q'
                args[2 * n + i] = A[0][i];   // q''
            }
            args[3 * n] = Poly();            // frozen time
            total += flux_sym.compose(args);
        }
        auto fops = flux_to_ops(total, S);
        ops.insert(ops.end(), fops.begin(), fops.end());
    }
    Poly P(GRat(1));
    for (int j = 1; j <= N; ++j) P *= S.inject(fs[N - j], j); // fs[0] is leftmost = factor N
    return S.merge(exp_apply(ops, std::move(P), S.hbar()));
}

PolySymbol magnetic_weyl_product(const PolySymbol& f, const PolySymbol& g,
                                 const MagneticForm& F) {
    return MagneticStar(F).weyl(f, g);
}

PolySymbol n_factor_product(const std::vector<PolySymbol>& fs, const MagneticForm& F) {
    return MagneticStar(F).n_factor(fs);
}

PolySymbol tau_magnetic_product(const PolySymbol& f, const PolySymbol& g, const Rat& tau,
                                const MagneticForm& F) {
    return MagneticStar(F).tau_product(f, g, tau);
}

PolySymbol m_ordered_product(const PolySymbol& f, const PolySymbol& g, const OrderingMatrix& M) {
    PolySymbol uf = ordering_transform_UM(f, M);
    PolySymbol ug = ordering_transform_UM(g, M);
    return ordering_transform_UM(moyal_product(uf, ug), M, /*inverse=*/true);
}

PolySymbol m_ordered_product_direct(const PolySymbol& f, const PolySymbol& g,
                                    const OrderingMatrix& M) {
    // (f *M g)(x) = f(x - i hbar C d->) g(x). The shift matrix in blocks is
    //   C = [[ K, N - 1/2 ], [ 1/2 + N^T, -S ]];
    // the N block is the (1/2 - M) J^{-1} shear, while K and S enter with the
    // sign pinned by the tau-ordered operator oracle and the U^M route (the
    // two must produce one and the same product).
    const int n = f.dim();
    if (M.dim() != n) throw std::invalid_argument("m_ordered_product: dimension mismatch");
    ProductSpace S(n, 2);
    auto C = [&](int a, int b) {
        bool ap = a >= n, bp = b >= n;
        int i = ap ? a - n : a, j = bp ? b - n : b;
        if (!ap && !bp) return M.entry(i, n + j);                            // K
        if (!ap && bp) return M.entry(i, j) - (i == j ? Rat(1, 2) : Rat(0)); // N - 1/2
        if (ap && !bp) return M.entry(j, i) + (i == j ? Rat(1, 2) : Rat(0)); // N^T + 1/2
        return -M.entry(n + i, j);                                           // -S
    };
    auto slot = [&](int factor, int a) { return a < n ? S.q(factor, a) : S.p(factor, a - n); };
    std::vector<OpTerm> ops;
    for (int a = 0; a < 2 * n; ++a)
        for (int b = 0; b < 2 * n; ++b) {
            Rat c = C(a, b);
            if (c.is_zero()) continue;
            OpTerm o;
            o.coef = i_times(-c); // -i hbar C_{ab}
            o.hpow = 1;
            o.deriv[slot(2, a)] += 1; // d_{x_a} on f
            o.deriv[slot(1, b)] += 1; // d_{x_b} on g
            ops.push_back(o);
        }
    Poly P = S.inject(f, 2) * S.inject(g, 1);
    return S.merge(exp_apply(ops, std::move(P), S.hbar()));
}

PolySymbol mixed_ordering_product(const std::vector<PolySymbol>& fs,
                                  const std::vector<OrderingMatrix>& Ms,
                                  const OrderingMatrix& M_out) {
    if (fs.size() != Ms.size())
        throw std::invalid_argument("mixed_ordering_product: list length mismatch");
    if (fs.empty()) throw std::invalid_argument("mixed_ordering_product: empty factor list");
    std::vector<PolySymbol> transformed;
    transformed.reserve(fs.size());
    for (std::size_t j = 0; j < fs.size(); ++j)
        transformed.push_back(ordering_transform_UM(fs[j], Ms[j]));
    PolySymbol prod = transformed[0];
    for (std::size_t j = 1; j < transformed.size(); ++j)
        prod = moyal_product(prod, transformed[j]);
    return ordering_transform_UM(prod, M_out, /*inverse=*/true);
}

// --- ordering transforms -----------------------------------------------------

PolySymbol ordering_transform_UF(const PolySymbol& f, const MagneticForm& F, bool inverse) {
    const int n = f.dim();
    if (F.dim() != n) throw std::invalid_argument("U_F: dimension mismatch");
    if (F.is_zero()) return f;
    if (F.time_dependent()) throw std::invalid_argument("U_F: specialize the field in t first");
    // Flux_0(q + eps, q - eps) with eps_i carrying (i hbar / 2) d_{p_i}.
    // Scratch layout: X at [0, n), eps at [n, 2n).
    geom::TwoPointVars L{n};
    Poly flux = geom::flux_symbolic(F);
    for (int i = 0; i < n; ++i) flux = flux.eval_var(L.qpp(i), GRat(0));
    std::vector<Poly> args(kMaxVars);
    for (int i = 0; i < n; ++i) {
        args[L.q(i)] = Poly::var(i) + Poly::var(n + i);
        args[L.qp(i)] = Poly::var(i) - Poly::var(n + i);
    }
    args[L.t()] = Poly();
    Poly sub = flux.compose(args);

    std::vector<OpTerm> ops;
    for (const auto& t : sub.terms()) {
        OpTerm o;
        int epow = 0;
        for (int i = 0; i < n; ++i) {
            o.mult[i] = t.exp[i];
            o.deriv[f.p_slot(i)] = t.exp[n + i];
            epow += t.exp[n + i];
        }
        if (epow < 1) throw std::logic_error("U_F exponent term without p-derivative");
        o.hpow = epow - 1;
        GRat c = t.coef * GRat::i_unit().pow(1 + epow) * GRat(Rat(1, i64(1) << epow));
        o.coef = inverse ? -c : c;
        ops.push_back(o);
    }
    return PolySymbol(n, exp_apply(ops, f.poly(), f.hbar_slot()));
}

PolySymbol ordering_transform_UM(const PolySymbol& f, const OrderingMatrix& M, bool inverse) {
    const int n = f.dim();
    if (M.dim() != n) throw std::invalid_argument("U^M: dimension mismatch");
    if (M.is_zero()) return f;
    // exponent (i/hbar) S^M(V-hat) = -(i hbar / 2) sum (JM)_{ab} D_b D_a,
    // with V-hat slot map: index a in the q-block -> d_p, p-block -> d_q
    auto JM = [&](int a, int b) { return a < n ? M.entry(n + a, b) : -M.entry(a - n, b); };
    auto dslot = [&](int a) { return a < n ? f.p_slot(a) : f.q_slot(a - n); };
    std::vector<OpTerm> ops;
    for (int a = 0; a < 2 * n; ++a)
        for (int b = 0; b < 2 * n; ++b) {
            Rat c = JM(a, b);
            if (c.is_zero()) continue;
            if (inverse) c = -c;
            OpTerm o;
            o.coef = i_times(-c * Rat(1, 2));
            o.hpow = 1;
            o.deriv[dslot(a)] = (std::uint8_t)(o.deriv[dslot(a)] + 1);
            o.deriv[dslot(b)] = (std::uint8_t)(o.deriv[dslot(b)] + 1);
            ops.push_back(o);
        }
    return PolySymbol(n, exp_apply(ops, f.poly(), f.hbar_slot()));
}

PolySymbol ordering_transform_Utau(const PolySymbol& f, const Rat& tau, bool inverse) {
    return ordering_transform_UM(f, OrderingMatrix::tau(f.dim(), tau), inverse);
}

// --- magnetic Poisson bracket --------------------------------------------------

PolySymbol poisson_bracket_F(const PolySymbol& f, const PolySymbol& g, const MagneticForm& F) {
    const int n = f.dim();
    if (g.dim() != n || F.dim() != n)
        throw std::invalid_argument("poisson_bracket_F: dimension mismatch");
    PolySymbol acc(n);
    for (int j = 0; j < n; ++j) {
        acc += f.diff_p(j) * g.diff_q(j) - f.diff_q(j) * g.diff_p(j);
        for (int k = 0; k < n; ++k) {
            const PolySymbol& Fjk = F.comp(j, k);
            if (Fjk.is_zero()) continue;
            acc += f.diff_p(j) * Fjk * g.diff_p(k);
        }
    }
    return acc;
}

PolySymbol jacobi_residual(const PolySymbol& f, const PolySymbol& g, const PolySymbol& h,
                           const MagneticForm& F) {
    return poisson_bracket_F(f, poisson_bracket_F(g, h, F), F) +
           poisson_bracket_F(g, poisson_bracket_F(h, f, F), F) +
           poisson_bracket_F(h, poisson_bracket_F(f, g, F), F);
}

// --- regular representation ----------------------------------------------------

RegularRep::RegularRep(const MagneticForm& F, const Rat& tau)
    : n_(F.dim()), tau_(tau), A_(geom::valatin_symbolic(F)) {
    for (auto& a : A_)
        if (a.degree_in(geom::TwoPointVars{n_}.t()) > 0)
            throw std::invalid_argument("RegularRep: specialize the field in t first");
}

PolySymbol RegularRep::L_q(int j, const PolySymbol& f) const {
    // q_j + tau * i hbar d_{p_j}
    return PolySymbol::q(n_, j) * f +
           (f.diff_p(j) * PolySymbol::hbar(n_)).scaled(GRat(Rat(0), tau_));
}

PolySymbol RegularRep::R_q(int j, const PolySymbol& f) const {
    // q_j - (1 - tau) i hbar d_{p_j}
    return PolySymbol::q(n_, j) * f -
           (f.diff_p(j) * PolySymbol::hbar(n_)).scaled(GRat(Rat(0), Rat(1) - tau_));
}

PolySymbol RegularRep::apply_A(int j, const PolySymbol& f, bool swapped) const {
    // A_j(L_q, R_q) f, or A_j(R_q, L_q) f when swapped; the generators commute
    PolySymbol acc(n_);
    geom::TwoPointVars L{n_};
    for (const auto& t : A_[j].terms()) {
        PolySymbol cur = f.scaled(t.coef);
        for (int i = 0; i < n_; ++i) {
            for (unsigned e = 0; e < t.exp[L.q(i)]; ++e)
                cur = swapped ? R_q(i, cur) : L_q(i, cur);
            for (unsigned e = 0; e < t.exp[L.qp(i)]; ++e)
                cur = swapped ? L_q(i, cur) : R_q(i, cur);
        }
        acc += cur;
    }
    return acc;
}

PolySymbol RegularRep::L_p(int j, const PolySymbol& f) const {
    // p_j - (1 - tau) i hbar d_{q_j} - A_j(L_q, R_q)
    return PolySymbol::p(n_, j) * f -
           (f.diff_q(j) * PolySymbol::hbar(n_)).scaled(GRat(Rat(0), Rat(1) - tau_)) -
           apply_A(j, f, false);
}

PolySymbol RegularRep::R_p(int j, const PolySymbol& f) const {
    // p_j + tau * i hbar d_{q_j} - A_j(R_q, L_q)
    return PolySymbol::p(n_, j) * f +
           (f.diff_q(j) * PolySymbol::hbar(n_)).scaled(GRat(Rat(0), tau_)) -
           apply_A(j, f, true);
}

PolySymbol RegularRep::apply_generator(int gen, const PolySymbol& f, bool left) const {
    int j = gen % n_;
    bool is_q = gen < n_;
    if (left) return is_q ? L_q(j, f) : L_p(j, f);
    return is_q ? R_q(j, f) : R_p(j, f);
}

PolySymbol RegularRep::apply_symmetrized(const std::vector<int>& multiset, const PolySymbol& g,
                                         bool left) const {
    // Weyl symmetrization: S(X_1 .. X_d) g = sum over distinct X (mult/d) X S(rest) g
    if (multiset.empty()) return g;
    const int d = (int)multiset.size();
    PolySymbol acc(n_);
    std::size_t i = 0;
    while (i < multiset.size()) {
        std::size_t j = i;
        while (j < multiset.size() && multiset[j] == multiset[i]) ++j;
        int mult = (int)(j - i);
        std::vector<int> rest;
        rest.reserve(multiset.size() - 1);
        rest.insert(rest.end(), multiset.begin(), multiset.begin() + i);
        rest.insert(rest.end(), multiset.begin() + i + 1, multiset.end());
        acc += apply_generator(multiset[i], apply_symmetrized(rest, g, left), left)
                   .scaled(GRat(Rat(mult, d)));
        i = j;
    }
    return acc;
}

PolySymbol RegularRep::product_via_left(const PolySymbol& f, const PolySymbol& g) const {
    PolySymbol acc(n_);
    for (const auto& t : f.poly().terms()) {
        std::vector<int> multiset;
        for (int i = 0; i < n_; ++i) {
            for (unsigned e = 0; e < t.exp[i]; ++e) multiset.push_back(i);
            for (unsigned e = 0; e < t.exp[n_ + i]; ++e) multiset.push_back(n_ + i);
        }
        PolySymbol extra(n_, Poly::var(f.hbar_slot(), t.exp[f.hbar_slot()]));
        acc += (apply_symmetrized(multiset, g, true) * extra).scaled(t.coef);
    }
    return acc;
}

PolySymbol RegularRep::product_via_right(const PolySymbol& f, const PolySymbol& g) const {
    PolySymbol acc(n_);
    for (const auto& t : g.poly().terms()) {
        std::vector<int> multiset;
        for (int i = 0; i < n_; ++i) {
            for (unsigned e = 0; e < t.exp[i]; ++e) multiset.push_back(i);
            for (unsigned e = 0; e < t.exp[n_ + i]; ++e) multiset.push_back(n_ + i);
        }
        PolySymbol extra(n_, Poly::var(g.hbar_slot(), t.exp[g.hbar_slot()]));
        acc += (apply_symmetrized(multiset, f, false) * extra).scaled(t.coef);
    }
    return acc;
}

} // namespace magstar::star
