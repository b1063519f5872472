// Phase-space symbols: polynomials in (q, p) with Gaussian-rational
// coefficients that may carry powers of the formal deformation parameter
// hbar and of time t. Variable layout inside the underlying Poly:
//   slots [0, n)      q_1 .. q_n
//   slots [n, 2n)     p_1 .. p_n
//   slot  2n          hbar (formal)
//   slot  2n+1        t

#pragma once

#include "magstar/poly.hpp"

#include <string>
#include <vector>

namespace magstar {

class PolySymbol {
public:
    PolySymbol() : n_(1) {}
    explicit PolySymbol(int n) : n_(n) { check_dim(n); }
    PolySymbol(int n, Poly p) : n_(n), poly_(std::move(p)) { check_dim(n); }

    static PolySymbol q(int n, int j, unsigned e = 1) { return {n, Poly::var(j, e)}; }
    static PolySymbol p(int n, int j, unsigned e = 1) { return {n, Poly::var(n + j, e)}; }
    static PolySymbol hbar(int n, unsigned e = 1) { return {n, Poly::var(2 * n, e)}; }
    static PolySymbol t_var(int n, unsigned e = 1) { return {n, Poly::var(2 * n + 1, e)}; }
    static PolySymbol constant(int n, const GRat& c) { return {n, Poly(c)}; }

    int dim() const { return n_; }
    const Poly& poly() const { return poly_; }
    Poly& poly() { return poly_; }

    int q_slot(int j) const { return j; }
    int p_slot(int j) const { return n_ + j; }
    int hbar_slot() const { return 2 * n_; }
    int t_slot() const { return 2 * n_ + 1; }

    bool is_zero() const { return poly_.is_zero(); }
    int deg_q() const { return poly_.degree_over(0, n_); }
    int deg_p() const { return poly_.degree_over(n_, 2 * n_); }
    bool depends_on_p() const { return deg_p() > 0; }
    bool depends_on_hbar() const { return poly_.degree_in(hbar_slot()) > 0; }
    bool depends_on_t() const { return poly_.degree_in(t_slot()) > 0; }

    friend PolySymbol operator+(const PolySymbol& a, const PolySymbol& b) {
        a.check_same(b);
        return {a.n_, a.poly_ + b.poly_};
    }
    friend PolySymbol operator-(const PolySymbol& a, const PolySymbol& b) {
        a.check_same(b);
        return {a.n_, a.poly_ - b.poly_};
    }
    friend PolySymbol operator*(const PolySymbol& a, const PolySymbol& b) {
        a.check_same(b);
        return {a.n_, a.poly_ * b.poly_};
    }
    PolySymbol operator-() const { return {n_, -poly_}; }
    PolySymbol& operator+=(const PolySymbol& o) { *this = *this + o; return *this; }
    PolySymbol& operator-=(const PolySymbol& o) { *this = *this - o; return *this; }
    PolySymbol& operator*=(const PolySymbol& o) { *this = *this * o; return *this; }
    friend bool operator==(const PolySymbol& a, const PolySymbol& b) {
        return a.n_ == b.n_ && a.poly_ == b.poly_;
    }
    friend bool operator!=(const PolySymbol& a, const PolySymbol& b) { return !(a == b); }

    PolySymbol scaled(const GRat& c) const { return {n_, poly_.scaled(c)}; }
    PolySymbol diff_q(int j) const { return {n_, poly_.diff(q_slot(j))}; }
    PolySymbol diff_p(int j) const { return {n_, poly_.diff(p_slot(j))}; }

    // evaluate at rational phase-space point (hbar and t stay formal unless given)
    GRat eval(const std::vector<Rat>& qv, const std::vector<Rat>& pv,
              const Rat& hb = Rat(0), const Rat& tv = Rat(0)) const {
        std::vector<GRat> x(kMaxVars, GRat(0));
        for (int j = 0; j < n_; ++j) { x[j] = GRat(qv[j]); x[n_ + j] = GRat(pv[j]); }
        x[hbar_slot()] = GRat(hb);
        x[t_slot()] = GRat(tv);
        return poly_.eval_grat(x);
    }

    std::complex<double> eval_c(const std::vector<double>& qv, const std::vector<double>& pv,
                                double hb, double tv = 0.0) const {
        std::vector<std::complex<double>> x(kMaxVars, 0.0);
        for (int j = 0; j < n_; ++j) { x[j] = qv[j]; x[n_ + j] = pv[j]; }
        x[hbar_slot()] = hb;
        x[t_slot()] = tv;
        return poly_.eval_complex(x);
    }

    // coefficient of hbar^k, as a symbol with that power removed
    PolySymbol hbar_coefficient(int k) const {
        std::vector<Term> ts;
        for (const auto& t : poly_.terms())
            if (t.exp[hbar_slot()] == (unsigned)k) {
                Term d = t;
                d.exp[hbar_slot()] = 0;
                ts.push_back(d);
            }
        return {n_, Poly::from_terms(std::move(ts))};
    }
    int hbar_degree() const { return poly_.degree_in(hbar_slot()); }

    PolySymbol truncate_hbar(int order) const {
        std::vector<Term> ts;
        for (const auto& t : poly_.terms())
            if (t.exp[hbar_slot()] <= (unsigned)order) ts.push_back(t);
        return {n_, Poly::from_terms(std::move(ts))};
    }

    // conjugation of the symbol: i -> -i, variables (incl. formal hbar) untouched
    PolySymbol conj() const { return {n_, poly_.conj_coeffs()}; }

    std::string str() const;

    // text grammar, e.g. "3/7 q1^2 p2 hbar - 1/2 i p1^3 + 4"
    static PolySymbol parse(int n, const std::string& text);

private:
    int n_;
    Poly poly_;

    static void check_dim(int n) {
        if (n < 1 || n > 4) throw std::invalid_argument("PolySymbol: n must be in 1..4");
    }
    void check_same(const PolySymbol& o) const {
        if (n_ != o.n_) throw std::invalid_argument("PolySymbol: dimension mismatch");
    }
};

// Truncated power series in hbar with PolySymbol coefficients.
struct HbarSeries {
    int order = 0;                    // powers 0..order kept
    std::vector<PolySymbol> coeff;    // coeff[k] multiplies hbar^k

    static HbarSeries from_symbol(const PolySymbol& s, int order) {
        HbarSeries r;
        r.order = order;
        for (int k = 0; k <= order; ++k) r.coeff.push_back(s.hbar_coefficient(k));
        return r;
    }
    PolySymbol to_symbol() const {
        if (coeff.empty()) return PolySymbol();
        PolySymbol acc(coeff[0].dim());
        for (int k = 0; k <= order; ++k)
            acc += coeff[k] * PolySymbol::hbar(coeff[0].dim(), k ? k : 0);
        return acc;
    }
};

} // namespace magstar
