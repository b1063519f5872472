// Sparse multivariate polynomial over Gaussian rationals.
//
// Terms are kept in a flat vector sorted by exponent key (degrevlex would do
// as well; plain lexicographic on the exponent array is enough since we only
// need a canonical order). The variable meaning is assigned by the caller:
// different layers of the library use different layouts (phase-space symbols,
// two-point geometry, product spaces).

#pragma once

#include "magstar/rational.hpp"

#include <array>
#include <complex>
#include <cstring>
#include <algorithm>
#include <functional>
#include <vector>

namespace magstar {

constexpr int kMaxVars = 24;

using ExpKey = std::array<std::uint8_t, kMaxVars>;

struct Term {
    ExpKey exp{};
    GRat coef;
};

inline bool key_less(const ExpKey& a, const ExpKey& b) {
    return std::memcmp(a.data(), b.data(), kMaxVars) < 0;
}

class Poly {
public:
    Poly() {}
    explicit Poly(const GRat& c) { if (!c.is_zero()) terms_.push_back({ExpKey{}, c}); }

    static Poly var(int v, unsigned e = 1) {
        Poly p;
        Term t; t.coef = GRat(1); t.exp[v] = (std::uint8_t)e;
        p.terms_.push_back(t);
        return p;
    }
    static Poly constant(const GRat& c) { return Poly(c); }

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    int total_degree() const {
        int d = 0;
        for (const auto& t : terms_) {
            int s = 0;
            for (int v = 0; v < kMaxVars; ++v) s += t.exp[v];
            d = std::max(d, s);
        }
        return d;
    }
    int degree_in(int v) const {
        int d = 0;
        for (const auto& t : terms_) d = std::max(d, (int)t.exp[v]);
        return d;
    }
    // max total degree over a set of variables
    int degree_over(int v0, int v1) const {
        int d = 0;
        for (const auto& t : terms_) {
            int s = 0;
            for (int v = v0; v < v1; ++v) s += t.exp[v];
            d = std::max(d, s);
        }
        return d;
    }

    GRat coeff(const ExpKey& k) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
            [](const Term& t, const ExpKey& key) { return key_less(t.exp, key); });
        if (it != terms_.end() && it->exp == k) return it->coef;
        return GRat();
    }
    GRat constant_term() const { return coeff(ExpKey{}); }

    friend Poly operator+(const Poly& a, const Poly& b) { return merged(a, b, false); }
    friend Poly operator-(const Poly& a, const Poly& b) { return merged(a, b, true); }
    Poly operator-() const {
        Poly r = *this;
        for (auto& t : r.terms_) t.coef = -t.coef;
        return r;
    }
    Poly& operator+=(const Poly& o) { *this = *this + o; return *this; }
    Poly& operator-=(const Poly& o) { *this = *this - o; return *this; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly r;
        if (a.is_zero() || b.is_zero()) return r;
        r.terms_.reserve(a.size() * b.size());
        for (const auto& ta : a.terms_)
            for (const auto& tb : b.terms_) {
                Term t;
                t.coef = ta.coef * tb.coef;
                t.exp = add_exp(ta.exp, tb.exp);
                r.terms_.push_back(t);
            }
        r.normalize();
        return r;
    }
    Poly& operator*=(const Poly& o) { *this = *this * o; return *this; }

    friend bool operator==(const Poly& a, const Poly& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a.terms_[i].exp != b.terms_[i].exp || a.terms_[i].coef != b.terms_[i].coef)
                return false;
        return true;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    Poly scaled(const GRat& c) const {
        if (c.is_zero()) return Poly();
        Poly r = *this;
        for (auto& t : r.terms_) t.coef *= c;
        return r;
    }

    Poly diff(int v) const {
        Poly r;
        r.terms_.reserve(size());
        for (const auto& t : terms_) {
            if (t.exp[v] == 0) continue;
            Term d = t;
            d.coef = t.coef * GRat(Rat((i64)t.exp[v]));
            d.exp[v] -= 1;
            r.terms_.push_back(d);
        }
        r.normalize();
        return r;
    }

    // antiderivative in variable v (no constant)
    Poly integrate(int v) const {
        Poly r;
        r.terms_.reserve(size());
        for (const auto& t : terms_) {
            Term d = t;
            d.exp[v] += 1;
            d.coef = t.coef * GRat(Rat(1, (i64)d.exp[v]));
            r.terms_.push_back(d);
        }
        r.normalize();
        return r;
    }

    // substitute variable v := value (exact), other variables untouched
    Poly eval_var(int v, const GRat& value) const {
        Poly r;
        r.terms_.reserve(size());
        for (const auto& t : terms_) {
            Term d = t;
            d.coef = t.coef * value.pow(t.exp[v]);
            d.exp[v] = 0;
            r.terms_.push_back(d);
        }
        r.normalize();
        return r;
    }

    // full composition: variable v of *this is replaced by args[v].
    // Variables with no entry (args[v] empty) must not occur.
    Poly compose(const std::vector<Poly>& args) const {
        Poly r;
        for (const auto& t : terms_) {
            Poly m(t.coef);
            for (int v = 0; v < kMaxVars; ++v)
                for (unsigned e = 0; e < t.exp[v]; ++e)
                    m *= args.at(v);
            r += m;
        }
        return r;
    }

    double eval_real(const std::vector<double>& x) const {
        double acc = 0;
        for (const auto& t : terms_) {
            if (!t.coef.im.is_zero())
                throw std::domain_error("Poly::eval_real on complex polynomial");
            double m = t.coef.re.to_double();
            for (int v = 0; v < kMaxVars; ++v)
                for (unsigned e = 0; e < t.exp[v]; ++e) m *= x[v];
            acc += m;
        }
        return acc;
    }

    Rat eval_rat(const std::vector<Rat>& x) const {
        Rat acc(0);
        for (const auto& t : terms_) {
            if (!t.coef.im.is_zero())
                throw std::domain_error("Poly::eval_rat on complex polynomial");
            Rat m = t.coef.re;
            for (int v = 0; v < kMaxVars; ++v)
                if (t.exp[v]) m *= x[v].pow(t.exp[v]);
            acc += m;
        }
        return acc;
    }

    GRat eval_grat(const std::vector<GRat>& x) const {
        GRat acc;
        for (const auto& t : terms_) {
            GRat m = t.coef;
            for (int v = 0; v < kMaxVars; ++v)
                if (t.exp[v]) m *= x[v].pow(t.exp[v]);
            acc += m;
        }
        return acc;
    }

    std::complex<double> eval_complex(const std::vector<std::complex<double>>& x) const {
        std::complex<double> acc = 0;
        for (const auto& t : terms_) {
            std::complex<double> m(t.coef.re.to_double(), t.coef.im.to_double());
            for (int v = 0; v < kMaxVars; ++v)
                for (unsigned e = 0; e < t.exp[v]; ++e) m *= x[v];
            acc += m;
        }
        return acc;
    }

    Poly conj_coeffs() const {
        Poly r = *this;
        for (auto& t : r.terms_) t.coef = t.coef.conj();
        return r;
    }

    // remap variable indices: new_exp[map[v]] = old_exp[v]; map[v] = -1 forbids v
    Poly remap_vars(const std::array<int, kMaxVars>& map) const {
        Poly r;
        r.terms_.reserve(size());
        for (const auto& t : terms_) {
            Term d;
            d.coef = t.coef;
            for (int v = 0; v < kMaxVars; ++v) {
                if (!t.exp[v]) continue;
                if (map[v] < 0) throw std::domain_error("Poly::remap_vars: forbidden variable present");
                d.exp[map[v]] = (std::uint8_t)(d.exp[map[v]] + t.exp[v]);
            }
            r.terms_.push_back(d);
        }
        r.normalize();
        return r;
    }

    // raw construction support for performance-sensitive callers
    static Poly from_terms(std::vector<Term>&& ts) {
        Poly r;
        r.terms_ = std::move(ts);
        r.normalize();
        return r;
    }
    static ExpKey add_exp(const ExpKey& a, const ExpKey& b) {
        ExpKey r;
        for (int v = 0; v < kMaxVars; ++v) r[v] = (std::uint8_t)(a[v] + b[v]);
        return r;
    }

    void normalize() {
        std::sort(terms_.begin(), terms_.end(),
                  [](const Term& a, const Term& b) { return key_less(a.exp, b.exp); });
        std::size_t w = 0;
        for (std::size_t i = 0; i < terms_.size();) {
            ExpKey k = terms_[i].exp;
            GRat c = terms_[i].coef;
            std::size_t j = i + 1;
            while (j < terms_.size() && terms_[j].exp == k) { c += terms_[j].coef; ++j; }
            if (!c.is_zero()) { terms_[w].exp = k; terms_[w].coef = c; ++w; }
            i = j;
        }
        terms_.resize(w);
    }

private:
    std::vector<Term> terms_;

    static Poly merged(const Poly& a, const Poly& b, bool subtract) {
        Poly r;
        r.terms_.reserve(a.size() + b.size());
        std::size_t i = 0, j = 0;
        while (i < a.size() || j < b.size()) {
            bool take_a;
            if (i == a.size()) take_a = false;
            else if (j == b.size()) take_a = true;
            else if (a.terms_[i].exp == b.terms_[j].exp) {
                GRat c = subtract ? a.terms_[i].coef - b.terms_[j].coef
                                  : a.terms_[i].coef + b.terms_[j].coef;
                if (!c.is_zero()) r.terms_.push_back({a.terms_[i].exp, c});
                ++i; ++j;
                continue;
            } else take_a = key_less(a.terms_[i].exp, b.terms_[j].exp);
            if (take_a) { r.terms_.push_back(a.terms_[i]); ++i; }
            else {
                Term t = b.terms_[j];
                if (subtract) t.coef = -t.coef;
                r.terms_.push_back(t);
                ++j;
            }
        }
        return r;
    }
};

} // namespace magstar
