// Exact rational and Gaussian-rational scalars.
//
// Storage is int64 with all intermediates widened to 128 bits; any result
// that cannot be reduced back into int64 throws std::overflow_error rather
// than wrapping. The symbolic layer keeps coefficients small (gcd reduction
// after every operation), so the 64-bit window is ample for the polynomial
// degrees this library handles.

#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <iosfwd>

namespace magstar {

using i64 = std::int64_t;
using i128 = __int128;

class Rat {
public:
    Rat() : num_(0), den_(1) {}
    Rat(i64 n) : num_(n), den_(1) {}
    Rat(i64 n, i64 d) { assign(i128(n), i128(d)); }

    static Rat from_i128(i128 n, i128 d) { Rat r; r.assign(n, d); return r; }

    i64 num() const { return num_; }
    i64 den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_one() const { return num_ == 1 && den_ == 1; }
    int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

    friend Rat operator+(const Rat& a, const Rat& b) {
        return from_i128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                         i128(a.den_) * b.den_);
    }
    friend Rat operator-(const Rat& a, const Rat& b) {
        return from_i128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                         i128(a.den_) * b.den_);
    }
    friend Rat operator*(const Rat& a, const Rat& b) {
        // cross-reduce before multiplying to keep intermediates small
        i64 g1 = gcd64(a.num_, b.den_);
        i64 g2 = gcd64(b.num_, a.den_);
        return from_i128(i128(a.num_ / g1) * (b.num_ / g2),
                         i128(a.den_ / g2) * (b.den_ / g1));
    }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.num_ == 0) throw std::domain_error("Rat: division by zero");
        i64 g1 = gcd64(a.num_, b.num_);
        i64 g2 = gcd64(b.den_, a.den_);
        return from_i128(i128(a.num_ / g1) * (b.den_ / g2),
                         i128(a.den_ / g2) * (b.num_ / g1));
    }
    Rat operator-() const { Rat r; r.num_ = -num_; r.den_ = den_; return r; }
    Rat& operator+=(const Rat& o) { *this = *this + o; return *this; }
    Rat& operator-=(const Rat& o) { *this = *this - o; return *this; }
    Rat& operator*=(const Rat& o) { *this = *this * o; return *this; }
    Rat& operator/=(const Rat& o) { *this = *this / o; return *this; }

    friend bool operator==(const Rat& a, const Rat& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }
    friend bool operator>(const Rat& a, const Rat& b) { return b < a; }

    double to_double() const { return double(num_) / double(den_); }

    Rat abs() const { return num_ < 0 ? -*this : *this; }

    Rat pow(unsigned k) const {
        Rat r(1), b = *this;
        while (k) { if (k & 1) r *= b; b *= b; k >>= 1; }
        return r;
    }

    std::string str() const {
        std::string s = std::to_string(num_);
        if (den_ != 1) s += "/" + std::to_string(den_);
        return s;
    }

    // parses "n" or "n/d" with optional sign
    static Rat parse(const std::string& s);

private:
    i64 num_, den_;

    static i64 gcd64(i64 a, i64 b) {
        std::uint64_t ua = a < 0 ? -(std::uint64_t)a : a;
        std::uint64_t ub = b < 0 ? -(std::uint64_t)b : b;
        std::uint64_t g = std::gcd(ua, ub);
        return g == 0 ? 1 : (i64)g;
    }
    static i128 gcd128(i128 a, i128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b) { i128 t = a % b; a = b; b = t; }
        return a == 0 ? 1 : a;
    }

    void assign(i128 n, i128 d) {
        if (d == 0) throw std::domain_error("Rat: zero denominator");
        if (d < 0) { n = -n; d = -d; }
        i128 g = gcd128(n, d);
        n /= g; d /= g;
        constexpr i128 lo = -i128(INT64_MAX) - 1, hi = i128(INT64_MAX);
        if (n < lo || n > hi || d > hi)
            throw std::overflow_error("Rat: value exceeds 64-bit storage");
        num_ = (i64)n;
        den_ = (i64)d;
    }
};

inline Rat Rat::parse(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(std::stoll(s));
        return Rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("Rat: cannot parse '" + s + "'");
    }
}

std::ostream& operator<<(std::ostream& os, const Rat& r);

// Gaussian rational: re + im*i with exact components.
class GRat {
public:
    Rat re, im;

    GRat() {}
    GRat(i64 n) : re(n) {}
    GRat(const Rat& r) : re(r) {}
    GRat(const Rat& r, const Rat& i) : re(r), im(i) {}

    static GRat i_unit() { return GRat(Rat(0), Rat(1)); }

    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    bool is_real() const { return im.is_zero(); }

    friend GRat operator+(const GRat& a, const GRat& b) { return {a.re + b.re, a.im + b.im}; }
    friend GRat operator-(const GRat& a, const GRat& b) { return {a.re - b.re, a.im - b.im}; }
    friend GRat operator*(const GRat& a, const GRat& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GRat operator/(const GRat& a, const GRat& b) {
        Rat n2 = b.re * b.re + b.im * b.im;
        if (n2.is_zero()) throw std::domain_error("GRat: division by zero");
        return {(a.re * b.re + a.im * b.im) / n2, (a.im * b.re - a.re * b.im) / n2};
    }
    GRat operator-() const { return {-re, -im}; }
    GRat& operator+=(const GRat& o) { re += o.re; im += o.im; return *this; }
    GRat& operator-=(const GRat& o) { re -= o.re; im -= o.im; return *this; }
    GRat& operator*=(const GRat& o) { *this = *this * o; return *this; }

    friend bool operator==(const GRat& a, const GRat& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const GRat& a, const GRat& b) { return !(a == b); }

    GRat conj() const { return {re, -im}; }

    GRat pow(unsigned k) const {
        GRat r(1), b = *this;
        while (k) { if (k & 1) r *= b; b *= b; k >>= 1; }
        return r;
    }

    std::string str() const;
};

std::ostream& operator<<(std::ostream& os, const GRat& z);

} // namespace magstar
