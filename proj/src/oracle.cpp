#include "magstar/oracle.hpp"

#include "magstar/geometry.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace magstar::oracle {

namespace {

std::vector<Poly> chart_args(int n, const std::vector<Poly>& q) {
    std::vector<Poly> args(kMaxVars);
    for (int j = 0; j < n; ++j) args[j] = q[j];
    args[2 * n + 1] = Poly(); // static potentials only on the chart
    return args;
}

} // namespace

GaugeChart::GaugeChart(MagneticForm F, std::vector<PolySymbol> A, int N, double dq,
                       double hbar)
    : n_(F.dim()), N_(N), dq_(dq), hbar_(hbar), F_(std::move(F)), A_(std::move(A)) {
    if (n_ < 1 || n_ > 2) throw std::invalid_argument("GaugeChart: physical dimension 1 or 2");
    if (N < 8 || (N & (N - 1)) || N % 4)
        throw std::invalid_argument("GaugeChart: N must be a power of two divisible by 4");
    if ((int)A_.size() != n_) throw std::invalid_argument("GaugeChart: bad potential");
    dim_ = 1;
    for (int j = 0; j < n_; ++j) dim_ *= N_;
    if (F_.time_dependent())
        throw std::invalid_argument("GaugeChart: specialize the field in t first");
    // d(A dq) = F: d_j A_k - d_k A_j = F_kj, checked symbolically
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) {
            PolySymbol r = A_[k].diff_q(j) - A_[j].diff_q(k) - F_.comp(k, j);
            if (!r.is_zero())
                throw std::invalid_argument("GaugeChart: potential does not reproduce F");
        }
    // chord integral int_0^1 A_j(q - u/2 + s u) u_j ds in the layout
    // q -> [0, n), u -> [n, 2n), aux s -> 2n
    Poly s = Poly::var(2 * n_);
    std::vector<Poly> arg(n_);
    for (int j = 0; j < n_; ++j)
        arg[j] = Poly::var(j) + (s - Poly(GRat(Rat(1, 2)))) * Poly::var(n_ + j);
    auto args = chart_args(n_, arg);
    Poly acc;
    for (int j = 0; j < n_; ++j) {
        if (A_[j].is_zero()) continue;
        acc += A_[j].poly().compose(args) * Poly::var(n_ + j);
    }
    chord_ = acc.integrate(2 * n_).eval_var(2 * n_, GRat(1));
}

GaugeChart GaugeChart::valatin_gauge(const MagneticForm& F, int N, double dq, double hbar) {
    // A(q, 0) from the two-point potential: a primitive of F by Lemma-1
    auto A2 = geom::valatin_symbolic(F);
    const int n = F.dim();
    std::vector<PolySymbol> A;
    for (int j = 0; j < n; ++j) {
        Poly p = A2[j];
        geom::TwoPointVars L{n};
        for (int k = 0; k < n; ++k) p = p.eval_var(L.qp(k), GRat(0));
        // remap two-point q slots onto the symbol layout (identical indices)
        A.push_back(PolySymbol(n, p));
    }
    return GaugeChart(F, std::move(A), N, dq, hbar);
}

GaugeChart GaugeChart::landau_constant(const Rat& B, int N, double dq, double hbar) {
    // d_1 A_2 - d_2 A_1 = F_21 = -B
    std::vector<PolySymbol> A{PolySymbol::q(2, 1).scaled(GRat(B)), PolySymbol(2)};
    return GaugeChart(MagneticForm::planar_constant(B), std::move(A), N, dq, hbar);
}

GaugeChart GaugeChart::symmetric_constant(const Rat& B, int N, double dq, double hbar) {
    std::vector<PolySymbol> A{PolySymbol::q(2, 1).scaled(GRat(B * Rat(1, 2))),
                              PolySymbol::q(2, 0).scaled(GRat(-B * Rat(1, 2)))};
    return GaugeChart(MagneticForm::planar_constant(B), std::move(A), N, dq, hbar);
}

std::vector<int> GaugeChart::unpack(int r) const {
    std::vector<int> idx(n_);
    for (int j = n_ - 1; j >= 0; --j) { idx[j] = r % N_; r /= N_; }
    return idx;
}

double GaugeChart::potential_value(int j, const std::vector<double>& q) const {
    std::vector<double> pv(n_, 0.0);
    return A_[j].eval_c(q, pv, hbar_).real();
}

double GaugeChart::chord_phase(const std::vector<double>& q, const std::vector<double>& u) const {
    std::vector<double> x(kMaxVars, 0.0);
    for (int j = 0; j < n_; ++j) { x[j] = q[j]; x[n_ + j] = u[j]; }
    return chord_.eval_real(x) / hbar_;
}

OperatorMatrix OperatorMatrix::identity(const GaugeChart& chart) {
    OperatorMatrix M;
    M.n = chart.dim_space();
    M.N = chart.points();
    M.dim = chart.dim();
    M.a.assign((std::size_t)M.dim * M.dim, cplx(0, 0));
    for (int r = 0; r < M.dim; ++r) M.at(r, r) = cplx(1, 0);
    return M;
}

OperatorMatrix OperatorMatrix::zero(const GaugeChart& chart) {
    OperatorMatrix M = identity(chart);
    std::fill(M.a.begin(), M.a.end(), cplx(0, 0));
    return M;
}

OperatorMatrix multiply(const OperatorMatrix& A, const OperatorMatrix& B) {
    if (A.dim != B.dim) throw std::invalid_argument("oracle: matrix dimension mismatch");
    OperatorMatrix C = A;
    kernels::zgemm(A.a.data(), B.a.data(), C.a.data(), A.dim);
    C.label = A.label + "*" + B.label;
    return C;
}

OperatorMatrix commutator(const OperatorMatrix& A, const OperatorMatrix& B) {
    OperatorMatrix AB = multiply(A, B), BA = multiply(B, A);
    for (std::size_t i = 0; i < AB.a.size(); ++i) AB.a[i] -= BA.a[i];
    return AB;
}

double max_abs(const OperatorMatrix& A) {
    double m = 0;
    for (const auto& v : A.a) m = std::max(m, std::abs(v));
    return m;
}

double hermiticity_defect(const OperatorMatrix& A) {
    double worst = 0;
    for (int r = 0; r < A.dim; ++r)
        for (int c = r; c < A.dim; ++c)
            worst = std::max(worst, std::abs(A.at(r, c) - std::conj(A.at(c, r))));
    return worst;
}

void apply_position(const GaugeChart& chart, int j, OperatorMatrix& M) {
    for (int r = 0; r < M.dim; ++r) {
        double qv = chart.q_value(chart.unpack(r)[j]);
        cplx* row = M.a.data() + (std::size_t)r * M.dim;
        for (int c = 0; c < M.dim; ++c) row[c] *= qv;
    }
}

namespace {

// returns p_j M without destroying M
OperatorMatrix momentum_applied(const GaugeChart& chart, int j, const OperatorMatrix& M) {
    const int N = M.N, dim = M.dim, n = M.n;
    const double hbar = chart.hbar();
    std::vector<double> pk(N);
    for (int m = 0; m < N; ++m) {
        int ms = m < N / 2 ? m : m - N;
        pk[m] = hbar * 2.0 * std::numbers::pi * ms / (N * chart.dq());
    }
    OperatorMatrix out = M;
    const std::size_t line_stride = (n == 2 && j == 0) ? (std::size_t)N * dim : (std::size_t)dim;
    std::vector<cplx> buf(N);
    const std::size_t total = (std::size_t)dim * dim;
    for (std::size_t base = 0; base < total; ++base) {
        int r = (int)(base / dim);
        auto idx = chart.unpack(r);
        if (idx[j] != 0) continue;
        for (int m = 0; m < N; ++m) buf[m] = out.a[base + m * line_stride];
        kernels::fft_inplace(buf.data(), N, -1);
        for (int m = 0; m < N; ++m) buf[m] *= pk[m] / (double)N;
        kernels::fft_inplace(buf.data(), N, +1);
        for (int m = 0; m < N; ++m) out.a[base + m * line_stride] = buf[m];
    }
    // subtract A_j(q) M
    for (int r = 0; r < dim; ++r) {
        auto idx = chart.unpack(r);
        std::vector<double> q(n);
        for (int k = 0; k < n; ++k) q[k] = chart.q_value(idx[k]);
        double Aj = chart.potential_value(j, q);
        const cplx* src = M.a.data() + (std::size_t)r * dim;
        cplx* dst = out.a.data() + (std::size_t)r * dim;
        for (int c = 0; c < dim; ++c) dst[c] -= Aj * src[c];
    }
    return out;
}

OperatorMatrix position_applied(const GaugeChart& chart, int j, const OperatorMatrix& M) {
    OperatorMatrix out = M;
    apply_position(chart, j, out);
    return out;
}

} // namespace

void apply_momentum(const GaugeChart& chart, int j, OperatorMatrix& M) {
    M = momentum_applied(chart, j, M);
}

namespace {

// memoized Weyl symmetrization over generator multisets; generators are
// 0..n-1 = q_j, n..2n-1 = p_j
struct Symmetrizer {
    const GaugeChart& chart;
    std::map<std::vector<int>, OperatorMatrix> memo;

    OperatorMatrix run(const std::vector<int>& multiset) {
        if (multiset.empty()) return OperatorMatrix::identity(chart);
        auto it = memo.find(multiset);
        if (it != memo.end()) return it->second;
        const int d = (int)multiset.size();
        OperatorMatrix acc = OperatorMatrix::zero(chart);
        std::size_t i = 0;
        while (i < multiset.size()) {
            std::size_t j = i;
            while (j < multiset.size() && multiset[j] == multiset[i]) ++j;
            std::vector<int> rest(multiset.begin(), multiset.begin() + i);
            rest.insert(rest.end(), multiset.begin() + i + 1, multiset.end());
            OperatorMatrix sub = run(rest);
            int gen = multiset[i];
            OperatorMatrix applied = gen < chart.dim_space()
                                         ? position_applied(chart, gen, sub)
                                         : momentum_applied(chart, gen - chart.dim_space(), sub);
            double w = double(j - i) / d;
            for (std::size_t k = 0; k < acc.a.size(); ++k) acc.a[k] += w * applied.a[k];
            i = j;
        }
        memo.emplace(multiset, acc);
        return acc;
    }
};

} // namespace

OperatorMatrix quantize(const PolySymbol& f, const GaugeChart& chart, std::optional<Rat> tau) {
    const int n = chart.dim_space();
    if (f.dim() != n) throw std::invalid_argument("quantize: dimension mismatch");
    if (f.depends_on_t()) throw std::invalid_argument("quantize: specialize t first");
    Symmetrizer sym{chart, {}};
    OperatorMatrix acc = OperatorMatrix::zero(chart);
    acc.label = "Q[" + f.str() + "]";
    for (const auto& term : f.poly().terms()) {
        cplx coef(term.coef.re.to_double(), term.coef.im.to_double());
        coef *= std::pow(chart.hbar(), (double)term.exp[2 * n]);
        OperatorMatrix piece;
        if (!tau) {
            std::vector<int> multiset;
            for (int v = 0; v < 2 * n; ++v)
                for (unsigned e = 0; e < term.exp[v]; ++e) multiset.push_back(v);
            piece = sym.run(multiset);
        } else {
            // tau-ordering: sum_k binom tau^k (1-tau)^{a-k} q^{a-k} S(p^b) q^k,
            // componentwise in the commuting position factors
            std::vector<int> pms;
            for (int v = 0; v < n; ++v)
                for (unsigned e = 0; e < term.exp[n + v]; ++e) pms.push_back(n + v);
            OperatorMatrix pblock = sym.run(pms);
            double tv = tau->to_double();
            // enumerate split exponents k_j = 0..a_j
            std::vector<int> a(n), k(n, 0);
            for (int v = 0; v < n; ++v) a[v] = term.exp[v];
            OperatorMatrix tacc = OperatorMatrix::zero(chart);
            for (;;) {
                double w = 1.0;
                for (int v = 0; v < n; ++v) {
                    double binom = 1;
                    for (int i = 0; i < k[v]; ++i)
                        binom = binom * (a[v] - i) / (i + 1);
                    w *= binom * std::pow(tv, k[v]) * std::pow(1.0 - tv, a[v] - k[v]);
                }
                if (w != 0.0) {
                    OperatorMatrix piece2 = pblock;
                    // left factor q^{a-k}, right factor q^k (diagonal scalings)
                    for (int r = 0; r < piece2.dim; ++r) {
                        auto idx = chart.unpack(r);
                        double lw = 1.0;
                        for (int v = 0; v < n; ++v)
                            lw *= std::pow(chart.q_value(idx[v]), a[v] - k[v]);
                        cplx* row = piece2.a.data() + (std::size_t)r * piece2.dim;
                        for (int c = 0; c < piece2.dim; ++c) row[c] *= lw;
                    }
                    for (int c = 0; c < piece2.dim; ++c) {
                        auto idx = chart.unpack(c);
                        double rw = 1.0;
                        for (int v = 0; v < n; ++v) rw *= std::pow(chart.q_value(idx[v]), k[v]);
                        for (int r = 0; r < piece2.dim; ++r) piece2.at(r, c) *= rw;
                    }
                    for (std::size_t i = 0; i < tacc.a.size(); ++i)
                        tacc.a[i] += w * piece2.a[i];
                }
                int pos = 0;
                while (pos < n && ++k[pos] > a[pos]) k[pos++] = 0;
                if (pos == n) break;
            }
            piece = tacc;
        }
        for (std::size_t i = 0; i < acc.a.size(); ++i) acc.a[i] += coef * piece.a[i];
    }
    return acc;
}

// --- faithful chord-lattice extraction -----------------------------------------

namespace {

int wrap_sep(int d, int N) {
    d = ((d % N) + N) % N;
    return d >= N / 2 ? d - N : d;
}

} // namespace

double OracleSymbol::interior_max_abs() const {
    double worst = 0;
    for (const auto& v : data) worst = std::max(worst, std::abs(v));
    return worst;
}

double OracleSymbol::interior_diff(
    const std::function<cplx(const std::vector<double>&, const std::vector<double>&)>& ref)
    const {
    double worst = 0;
    auto see = [&](std::size_t i, const std::vector<double>& q, const std::vector<double>& p) {
        worst = std::max(worst, std::abs(data[i] - ref(q, p)));
    };
    if (n == 1) {
        for (int iq = N / 4; iq < 3 * N / 4; ++iq)
            for (int k = Np / 4; k < 3 * Np / 4; ++k)
                see(index1(iq, k), {q_value(iq)}, {p_value(k)});
    } else {
        for (int i1 = N / 4; i1 < 3 * N / 4; ++i1)
            for (int i2 = N / 4; i2 < 3 * N / 4; ++i2)
                for (int k1 = Np / 4; k1 < 3 * Np / 4; ++k1)
                    for (int k2 = Np / 4; k2 < 3 * Np / 4; ++k2)
                        see(index2(i1, i2, k1, k2), {q_value(i1), q_value(i2)},
                            {p_value(k1), p_value(k2)});
    }
    return worst;
}

double OracleSymbol::interior_diff(const OracleSymbol& o) const {
    if (n != o.n || N != o.N || Np != o.Np)
        throw std::invalid_argument("OracleSymbol: incompatible lattices");
    double worst = 0;
    auto see = [&](std::size_t i) { worst = std::max(worst, std::abs(data[i] - o.data[i])); };
    if (n == 1) {
        for (int iq = N / 4; iq < 3 * N / 4; ++iq)
            for (int k = Np / 4; k < 3 * Np / 4; ++k) see(index1(iq, k));
    } else {
        for (int i1 = N / 4; i1 < 3 * N / 4; ++i1)
            for (int i2 = N / 4; i2 < 3 * N / 4; ++i2)
                for (int k1 = Np / 4; k1 < 3 * Np / 4; ++k1)
                    for (int k2 = Np / 4; k2 < 3 * Np / 4; ++k2) see(index2(i1, i2, k1, k2));
    }
    return worst;
}

OracleSymbol extract_symbol(const OperatorMatrix& Op, const GaugeChart& chart,
                            bool gauge_phase, const Rat& tau) {
    const int n = chart.dim_space(), N = chart.points();
    const double dq = chart.dq(), hbar = chart.hbar();
    // separations step 2 for Weyl (integer midpoints), 1 for tau in {0, 1}
    Rat two_tau = tau * Rat(2);
    if (two_tau.den() != 1)
        throw std::invalid_argument("extract_symbol: tau must be 0, 1/2 or 1 on the lattice");
    const bool weyl = tau == Rat(1, 2);
    const int dstep = weyl ? 2 : 1;
    const int Np = N / dstep;
    const double du = dstep * dq;
    const double dp = 2.0 * std::numbers::pi * hbar / (N * dq) * (weyl ? 1.0 : 0.5);
    // eval point e = row - tau * d; row shift tau*d, column shift (1-tau)*d
    const double tv = tau.to_double();

    OracleSymbol sym;
    sym.n = n; sym.N = N; sym.Np = Np; sym.dq = dq; sym.dp = dp; sym.hbar = hbar;
    sym.data.assign(n == 1 ? (std::size_t)N * Np : (std::size_t)N * N * Np * Np, cplx(0, 0));

    auto wrapi = [N](int i) { return ((i % N) + N) % N; };
    if (n == 1) {
        std::vector<cplx> chord(Np);
        for (int iq = 0; iq < N; ++iq) {
            for (int j = 0; j < Np; ++j) {
                int d = wrap_sep(dstep * (j - Np / 2), N);
                int ra, rb;
                if (weyl) { ra = wrapi(iq + d / 2); rb = wrapi(iq - d / 2); }
                else if (tau == Rat(0)) { ra = iq; rb = wrapi(iq - d); }
                else { ra = wrapi(iq + d); rb = iq; }
                cplx v = Op.at(ra, rb);
                if (gauge_phase) {
                    double u = (j - Np / 2) * du;
                    double psi = chart.chord_phase({chart.q_value(iq) + (tv - 0.5) * u}, {u});
                    v *= std::polar(1.0, -psi);
                }
                chord[j] = v;
            }
            for (int k = 0; k < Np; ++k) {
                cplx acc(0, 0);
                double p = sym.p_value(k);
                for (int j = 0; j < Np; ++j) {
                    double u = (j - Np / 2) * du;
                    acc += chord[j] * std::polar(1.0, -u * p / hbar);
                }
                sym.data[sym.index1(iq, k)] = acc * (std::pow(du, n) / std::pow(dq, n));
            }
        }
    } else {
        std::vector<cplx> chord((std::size_t)Np * Np);
        for (int i1 = 0; i1 < N; ++i1)
            for (int i2 = 0; i2 < N; ++i2) {
                for (int j1 = 0; j1 < Np; ++j1)
                    for (int j2 = 0; j2 < Np; ++j2) {
                        int d1 = wrap_sep(dstep * (j1 - Np / 2), N);
                        int d2 = wrap_sep(dstep * (j2 - Np / 2), N);
                        int ra1, rb1, ra2, rb2;
                        if (weyl) {
                            ra1 = wrapi(i1 + d1 / 2); rb1 = wrapi(i1 - d1 / 2);
                            ra2 = wrapi(i2 + d2 / 2); rb2 = wrapi(i2 - d2 / 2);
                        } else if (tau == Rat(0)) {
                            ra1 = i1; rb1 = wrapi(i1 - d1);
                            ra2 = i2; rb2 = wrapi(i2 - d2);
                        } else {
                            ra1 = wrapi(i1 + d1); rb1 = i1;
                            ra2 = wrapi(i2 + d2); rb2 = i2;
                        }
                        cplx v = Op.at(ra1 * N + ra2, rb1 * N + rb2);
                        if (gauge_phase) {
                            double u1 = (j1 - Np / 2) * du, u2 = (j2 - Np / 2) * du;
                            double psi = chart.chord_phase(
                                {chart.q_value(i1) + (tv - 0.5) * u1,
                                 chart.q_value(i2) + (tv - 0.5) * u2},
                                {u1, u2});
                            v *= std::polar(1.0, -psi);
                        }
                        chord[(std::size_t)j1 * Np + j2] = v;
                    }
                for (int k1 = 0; k1 < Np; ++k1)
                    for (int k2 = 0; k2 < Np; ++k2) {
                        cplx acc(0, 0);
                        double p1 = sym.p_value(k1), p2 = sym.p_value(k2);
                        for (int j1 = 0; j1 < Np; ++j1) {
                            double u1 = (j1 - Np / 2) * du;
                            cplx ph1 = std::polar(1.0, -u1 * p1 / hbar);
                            for (int j2 = 0; j2 < Np; ++j2) {
                                double u2 = (j2 - Np / 2) * du;
                                acc += chord[(std::size_t)j1 * Np + j2] * ph1 *
                                       std::polar(1.0, -u2 * p2 / hbar);
                            }
                        }
                        sym.data[sym.index2(i1, i2, k1, k2)] =
                            acc * (std::pow(du, n) / std::pow(dq, n));
                    }
            }
    }
    return sym;
}

OperatorMatrix quantize_grid(
    const std::function<cplx(const std::vector<double>&, const std::vector<double>&)>& f,
    const GaugeChart& chart, bool gauge_phase) {
    const int n = chart.dim_space(), N = chart.points();
    const double dq = chart.dq(), hbar = chart.hbar();
    const int Np = N / 2;
    const double dp = 2.0 * std::numbers::pi * hbar / (N * dq);
    OperatorMatrix Op = OperatorMatrix::zero(chart);
    Op.label = "Qgrid";
    // kernel K(x, y) = (2 pi hbar)^{-n} sum_p f((x+y)/2, p) e^{i p (x-y)/hbar} dp,
    // matrix element = K dq^n; midpoints may sit on the half lattice
    const double norm = std::pow(dp * dq / (2.0 * std::numbers::pi * hbar), n);
    if (n == 1) {
        for (int ra = 0; ra < N; ++ra)
            for (int rb = 0; rb < N; ++rb) {
                int d = wrap_sep(ra - rb, N);
                double u = d * dq;
                double qm = 0.5 * (chart.q_value(ra) + chart.q_value(rb));
                // wrapped chords measure the midpoint of the short arc
                if (std::abs(ra - rb) > N / 2) qm += 0.5 * N * dq * (ra < rb ? 1 : -1);
                cplx acc(0, 0);
                for (int k = 0; k < Np; ++k) {
                    double p = (k - Np / 2) * dp;
                    acc += f({qm}, {p}) * std::polar(1.0, p * u / hbar);
                }
                cplx v = acc * norm;
                if (gauge_phase) v *= std::polar(1.0, chart.chord_phase({qm}, {u}));
                Op.at(ra, rb) = v;
            }
    } else {
        for (int ra1 = 0; ra1 < N; ++ra1)
            for (int ra2 = 0; ra2 < N; ++ra2)
                for (int rb1 = 0; rb1 < N; ++rb1)
                    for (int rb2 = 0; rb2 < N; ++rb2) {
                        int d1 = wrap_sep(ra1 - rb1, N), d2 = wrap_sep(ra2 - rb2, N);
                        double u1 = d1 * dq, u2 = d2 * dq;
                        double q1 = 0.5 * (chart.q_value(ra1) + chart.q_value(rb1));
                        double q2 = 0.5 * (chart.q_value(ra2) + chart.q_value(rb2));
                        if (std::abs(ra1 - rb1) > N / 2) q1 += 0.5 * N * dq * (ra1 < rb1 ? 1 : -1);
                        if (std::abs(ra2 - rb2) > N / 2) q2 += 0.5 * N * dq * (ra2 < rb2 ? 1 : -1);
                        cplx acc(0, 0);
                        for (int k1 = 0; k1 < Np; ++k1) {
                            double p1 = (k1 - Np / 2) * dp;
                            cplx ph1 = std::polar(1.0, p1 * u1 / hbar);
                            for (int k2 = 0; k2 < Np; ++k2) {
                                double p2 = (k2 - Np / 2) * dp;
                                acc += f({q1, q2}, {p1, p2}) * ph1 *
                                       std::polar(1.0, p2 * u2 / hbar);
                            }
                        }
                        cplx v = acc * norm;
                        if (gauge_phase)
                            v *= std::polar(1.0, chart.chord_phase({q1, q2}, {u1, u2}));
                        Op.at(ra1 * N + ra2, rb1 * N + rb2) = v;
                    }
    }
    return Op;
}

OperatorMatrix band_project(const GaugeChart& chart, const OperatorMatrix& M) {
    const int N = M.N, dim = M.dim, n = M.n;
    auto filter_axis = [&](OperatorMatrix& X, int axis, bool rows) {
        const std::size_t line_stride =
            rows ? ((n == 2 && axis == 0) ? (std::size_t)N * dim : (std::size_t)dim)
                 : ((n == 2 && axis == 0) ? (std::size_t)N : 1);
        std::vector<cplx> buf(N);
        const std::size_t total = (std::size_t)dim * dim;
        for (std::size_t base = 0; base < total; ++base) {
            int rc = rows ? (int)(base / dim) : (int)(base % dim);
            auto idx = chart.unpack(rc);
            if (idx[axis] != 0) continue;
            for (int m = 0; m < N; ++m) buf[m] = X.a[base + m * line_stride];
            kernels::fft_inplace(buf.data(), N, -1);
            for (int m = 0; m < N; ++m) {
                int ms = std::abs(m < N / 2 ? m : m - N);
                double w;
                if (ms <= N / 8) w = 1.0;
                else if (ms >= 3 * N / 8) w = 0.0;
                else {
                    // Planck taper: smooth with all derivatives vanishing at
                    // both ends, so the filtered kernel decays fast in u
                    double x = double(ms - N / 8) / (N / 4.0);
                    w = 1.0 / (1.0 + std::exp(1.0 / x - 1.0 / (1.0 - x)));
                }
                buf[m] *= w / (double)N;
            }
            kernels::fft_inplace(buf.data(), N, +1);
            for (int m = 0; m < N; ++m) X.a[base + m * line_stride] = buf[m];
        }
    };
    OperatorMatrix out = M;
    for (int axis = 0; axis < n; ++axis) filter_axis(out, axis, true);
    for (int axis = 0; axis < n; ++axis) filter_axis(out, axis, false);
    out.label = "P[" + M.label + "]P";
    return out;
}

double state_defect(const GaugeChart& chart, const OperatorMatrix& A, const OperatorMatrix& B,
                    double width) {
    const int n = chart.dim_space();
    if (width <= 0.0) width = chart.points() * chart.dq() / 16.0;
    std::vector<cplx> psi(chart.dim());
    for (int r = 0; r < chart.dim(); ++r) {
        auto idx = chart.unpack(r);
        double r2 = 0;
        for (int j = 0; j < n; ++j) {
            double q = chart.q_value(idx[j]);
            r2 += q * q;
        }
        // mild phase-space tilt so the state is not an accidental symmetry eigenvector
        double ph = 0.3 * chart.q_value(idx[0]) / chart.hbar();
        psi[r] = std::polar(std::exp(-r2 / (2 * width * width)), ph);
    }
    double worst = 0, scale = 0;
    for (int r = 0; r < chart.dim(); ++r) {
        cplx va(0, 0), vb(0, 0);
        const cplx* ra = A.a.data() + (std::size_t)r * A.dim;
        const cplx* rb = B.a.data() + (std::size_t)r * B.dim;
        for (int c = 0; c < chart.dim(); ++c) {
            va += ra[c] * psi[c];
            vb += rb[c] * psi[c];
        }
        worst = std::max(worst, std::abs(va - vb));
        scale = std::max(scale, std::abs(vb));
    }
    return worst / std::max(scale, 1e-300);
}

// --- matrix exponential ---------------------------------------------------------

namespace {

double norm1(const std::vector<cplx>& a, int dim) {
    double worst = 0;
    for (int c = 0; c < dim; ++c) {
        double s = 0;
        for (int r = 0; r < dim; ++r) s += std::abs(a[(std::size_t)r * dim + c]);
        worst = std::max(worst, s);
    }
    return worst;
}

// X <- A^{-1} X by LU with partial pivoting (A overwritten)
void lu_solve_inplace(std::vector<cplx>& A, std::vector<cplx>& X, int dim) {
    std::vector<int> piv(dim);
    for (int c = 0; c < dim; ++c) {
        int p = c;
        for (int r = c + 1; r < dim; ++r)
            if (std::abs(A[(std::size_t)r * dim + c]) > std::abs(A[(std::size_t)p * dim + c]))
                p = r;
        piv[c] = p;
        if (p != c)
            for (int k = 0; k < dim; ++k)
                std::swap(A[(std::size_t)p * dim + k], A[(std::size_t)c * dim + k]);
        cplx d = A[(std::size_t)c * dim + c];
        if (d == cplx(0, 0)) throw std::runtime_error("expm: singular Pade denominator");
        for (int r = c + 1; r < dim; ++r) {
            cplx f = A[(std::size_t)r * dim + c] / d;
            A[(std::size_t)r * dim + c] = f;
            if (f == cplx(0, 0)) continue;
            for (int k = c + 1; k < dim; ++k)
                A[(std::size_t)r * dim + k] -= f * A[(std::size_t)c * dim + k];
        }
    }
    // apply to each column of X: forward elimination then back substitution
    for (int c = 0; c < dim; ++c)
        if (piv[c] != c)
            for (int k = 0; k < dim; ++k)
                std::swap(X[(std::size_t)piv[c] * dim + k], X[(std::size_t)c * dim + k]);
    for (int r = 1; r < dim; ++r)
        for (int c = 0; c < r; ++c) {
            cplx f = A[(std::size_t)r * dim + c];
            if (f == cplx(0, 0)) continue;
            for (int k = 0; k < dim; ++k)
                X[(std::size_t)r * dim + k] -= f * X[(std::size_t)c * dim + k];
        }
    for (int r = dim - 1; r >= 0; --r) {
        cplx d = A[(std::size_t)r * dim + r];
        for (int c = r + 1; c < dim; ++c) {
            cplx f = A[(std::size_t)r * dim + c];
            if (f == cplx(0, 0)) continue;
            for (int k = 0; k < dim; ++k)
                X[(std::size_t)r * dim + k] -= f * X[(std::size_t)c * dim + k];
        }
        for (int k = 0; k < dim; ++k) X[(std::size_t)r * dim + k] /= d;
    }
}

} // namespace

OperatorMatrix evolution_operator(const OperatorMatrix& H, double t, double hbar) {
    const int dim = H.dim;
    // A = -i t H / hbar
    std::vector<cplx> A(H.a.size());
    cplx f = cplx(0, -t / hbar);
    for (std::size_t i = 0; i < A.size(); ++i) A[i] = f * H.a[i];

    // scaling
    const double theta13 = 5.371920351148152;
    double nrm = norm1(A, dim);
    int s = 0;
    while (nrm / std::pow(2.0, s) > theta13) ++s;
    double scale = std::pow(2.0, -s);
    for (auto& v : A) v *= scale;

    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    auto mm = [&](const std::vector<cplx>& X, const std::vector<cplx>& Y) {
        std::vector<cplx> Z(X.size());
        kernels::zgemm(X.data(), Y.data(), Z.data(), dim);
        return Z;
    };
    std::vector<cplx> I(A.size(), cplx(0, 0));
    for (int r = 0; r < dim; ++r) I[(std::size_t)r * dim + r] = cplx(1, 0);

    auto A2 = mm(A, A);
    auto A4 = mm(A2, A2);
    auto A6 = mm(A2, A4);

    auto lin = [&](double c0, const std::vector<cplx>& X0, double c1,
                   const std::vector<cplx>& X1, double c2, const std::vector<cplx>& X2,
                   double c3, const std::vector<cplx>& X3) {
        std::vector<cplx> Z(A.size());
        for (std::size_t i = 0; i < Z.size(); ++i)
            Z[i] = c0 * X0[i] + c1 * X1[i] + c2 * X2[i] + c3 * X3[i];
        return Z;
    };

    // U = A (A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I)
    auto W1 = lin(b[13], A6, b[11], A4, b[9], A2, 0.0, I);
    auto W = mm(A6, W1);
    auto W2 = lin(b[7], A6, b[5], A4, b[3], A2, b[1], I);
    for (std::size_t i = 0; i < W.size(); ++i) W[i] += W2[i];
    auto U = mm(A, W);
    // V = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    auto Z1 = lin(b[12], A6, b[10], A4, b[8], A2, 0.0, I);
    auto V = mm(A6, Z1);
    auto Z2 = lin(b[6], A6, b[4], A4, b[2], A2, b[0], I);
    for (std::size_t i = 0; i < V.size(); ++i) V[i] += Z2[i];

    // r13 = (V - U)^{-1} (V + U)
    std::vector<cplx> VmU(A.size()), VpU(A.size());
    for (std::size_t i = 0; i < A.size(); ++i) {
        VmU[i] = V[i] - U[i];
        VpU[i] = V[i] + U[i];
    }
    lu_solve_inplace(VmU, VpU, dim);
    for (int k = 0; k < s; ++k) VpU = mm(VpU, VpU);

    OperatorMatrix out = H;
    out.a = std::move(VpU);
    out.label = "exp(-itH/hbar)";
    return out;
}

} // namespace magstar::oracle
