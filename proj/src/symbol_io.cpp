// Text grammar for polynomial symbols.
//
// A symbol is a sum of terms; a term is an optional coefficient (exact
// rational, optionally followed by 'i') and factors qK, pK, t, hbar, each
// with an optional ^exponent. '*' between factors is optional. Examples:
//   "q1 p1 + 1/2 i hbar", "3/7 q1^2 p2 t", "-p1^3".

#include "magstar/polysymbol.hpp"

#include <cctype>
#include <sstream>

namespace magstar {

namespace {

struct Lexer {
    const std::string& s;
    std::size_t i = 0;
    explicit Lexer(const std::string& str) : s(str) {}

    void skip_ws() { while (i < s.size() && (std::isspace((unsigned char)s[i]) || s[i] == '*')) ++i; }
    bool done() { skip_ws(); return i >= s.size(); }
    char peek() { skip_ws(); return i < s.size() ? s[i] : '\0'; }

    long read_int() {
        skip_ws();
        std::size_t j = i;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        std::size_t k = j;
        while (k < s.size() && std::isdigit((unsigned char)s[k])) ++k;
        if (k == j) throw std::invalid_argument("symbol parse: expected integer at '" + s.substr(i) + "'");
        long v = std::stol(s.substr(i, k - i));
        i = k;
        return v;
    }

    Rat read_rational() {
        long n = read_int();
        skip_ws();
        if (i < s.size() && s[i] == '/') {
            ++i;
            long d = read_int();
            return Rat(n, d);
        }
        return Rat(n);
    }
};

} // namespace

PolySymbol PolySymbol::parse(int n, const std::string& text) {
    Lexer lx(text);
    PolySymbol acc(n);
    bool first = true;
    while (!lx.done()) {
        int sgn = 1;
        char c = lx.peek();
        if (c == '+') { ++lx.i; }
        else if (c == '-') { sgn = -1; ++lx.i; }
        else if (!first)
            throw std::invalid_argument("symbol parse: expected '+' or '-' at '" + text.substr(lx.i) + "'");
        first = false;

        GRat coef{Rat(sgn)};
        Poly mono{GRat(1)};
        bool saw_factor = false;

        while (!lx.done()) {
            char ch = lx.peek();
            if (ch == '+' || ch == '-') break;
            if (std::isdigit((unsigned char)ch)) {
                coef *= GRat(lx.read_rational());
                saw_factor = true;
                continue;
            }
            if (ch == 'i' && !(lx.i + 1 < text.size() && std::isalnum((unsigned char)text[lx.i + 1]))) {
                coef *= GRat::i_unit();
                ++lx.i;
                saw_factor = true;
                continue;
            }
            int slot = -1;
            if (text.compare(lx.i, 4, "hbar") == 0) { slot = 2 * n; lx.i += 4; }
            else if (ch == 'q' || ch == 'p') {
                ++lx.i;
                int idx = 1;
                if (lx.i < text.size() && std::isdigit((unsigned char)text[lx.i])) idx = (int)lx.read_int();
                if (idx < 1 || idx > n)
                    throw std::invalid_argument("symbol parse: variable index out of range for n=" + std::to_string(n));
                slot = (ch == 'q' ? 0 : n) + idx - 1;
            }
            else if (ch == 't') { slot = 2 * n + 1; ++lx.i; }
            else
                throw std::invalid_argument("symbol parse: unexpected character '" + std::string(1, ch) + "'");
            unsigned e = 1;
            if (lx.peek() == '^') { ++lx.i; long v = lx.read_int();
                if (v < 0 || v > 200) throw std::invalid_argument("symbol parse: bad exponent");
                e = (unsigned)v; }
            mono *= Poly::var(slot, e);
            saw_factor = true;
        }
        if (!saw_factor) throw std::invalid_argument("symbol parse: empty term");
        acc += PolySymbol(n, mono.scaled(coef));
    }
    return acc;
}

std::string PolySymbol::str() const {
    if (poly_.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : poly_.terms()) {
        GRat c = t.coef;
        std::string sign;
        if (c.is_real() && c.re.sign() < 0) { sign = "- "; c = -c; }
        else sign = "+ ";
        if (first) { if (sign == "+ ") sign = ""; else sign = "-"; }
        os << (first ? sign : " " + sign);
        first = false;

        std::string factors;
        auto emit = [&](const std::string& name, unsigned e) {
            if (!e) return;
            if (!factors.empty()) factors += " ";
            factors += name;
            if (e > 1) factors += "^" + std::to_string(e);
        };
        for (int j = 0; j < n_; ++j) emit("q" + std::to_string(j + 1), t.exp[j]);
        for (int j = 0; j < n_; ++j) emit("p" + std::to_string(j + 1), t.exp[n_ + j]);
        emit("hbar", t.exp[2 * n_]);
        emit("t", t.exp[2 * n_ + 1]);

        bool unit = (c == GRat(1));
        if (unit && factors.empty()) os << "1";
        else if (unit) os << factors;
        else {
            os << c.str();
            if (!factors.empty()) os << " " << factors;
        }
    }
    return os.str();
}

} // namespace magstar
