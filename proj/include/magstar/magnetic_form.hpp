// Closed 2-form F on R^n with polynomial components, optionally
// time-dependent. Components are stored as PolySymbols depending on q
// (and t); p and hbar must not appear. Conventions:
//   F = (1/2) F_{jk}(q) dq^k ^ dq^j,   (F v)_j = F_{jk} v_k,
//   n = 3 magnetic dictionary: F v = B x v  (i.e. F_{jk} = eps_{kjl} B^l).

#pragma once

#include "magstar/polysymbol.hpp"

#include <string>
#include <vector>

namespace magstar {

class MagneticForm {
public:
    MagneticForm() : n_(1) { comps_.assign(1, {PolySymbol(1)}); }

    // antisymmetric component matrix, comps[j][k] = F_{jk}
    MagneticForm(int n, std::vector<std::vector<PolySymbol>> comps);

    static MagneticForm zero(int n);
    // n = 2 with F_12 = f (f a symbol in q1, q2 and optionally t)
    static MagneticForm planar(const PolySymbol& f12);
    static MagneticForm planar_constant(const Rat& b);
    // n = 3 from magnetic field components B^l(q, t):  F v = B x v
    static MagneticForm from_B(const std::vector<PolySymbol>& B);

    int dim() const { return n_; }
    const PolySymbol& comp(int j, int k) const { return comps_[j][k]; }
    bool is_zero() const;
    bool time_dependent() const;
    int degree() const;

    // cyclic residuals d_l F_jk + d_j F_kl + d_k F_lj for j<k<l; used by the
    // constructor and by negative-control tests
    static std::vector<PolySymbol> closedness_residuals(
        int n, const std::vector<std::vector<PolySymbol>>& comps);

    // F(q) as a numeric matrix
    std::vector<std::vector<double>> eval(const std::vector<double>& q, double t = 0.0) const;
    std::vector<std::vector<Rat>> eval_rat(const std::vector<Rat>& q, const Rat& t = Rat(0)) const;

    // grad F: out[l][j][k] = d F_jk / d q_l
    std::vector<std::vector<std::vector<double>>> eval_grad(
        const std::vector<double>& q, double t = 0.0) const;

    MagneticForm scaled(const Rat& c) const;
    // freeze the time variable (products and fluxes of the time-dependent
    // theory act at a fixed t)
    MagneticForm specialize_t(const Rat& t) const;

private:
    int n_;
    std::vector<std::vector<PolySymbol>> comps_;
};

// Time-dependent electromagnetic field record on R^3 for the space-time
// sections: magnetic part as a MagneticForm (possibly t-dependent), electric
// field E_j(t, q). Construction enforces the Maxwell pair
//   div B = 0          (closedness of the spatial part)
//   d_t F_jk = d_j E_k - d_k E_j.
class EMField {
public:
    EMField(MagneticForm magnetic, std::vector<PolySymbol> electric);

    static EMField zero(int n);

    const MagneticForm& magnetic() const { return mag_; }
    const std::vector<PolySymbol>& electric() const { return el_; }
    int dim() const { return mag_.dim(); }

    std::vector<double> eval_E(const std::vector<double>& q, double t) const;

    static std::vector<PolySymbol> maxwell_residuals(
        const MagneticForm& mag, const std::vector<PolySymbol>& el);

private:
    MagneticForm mag_;
    std::vector<PolySymbol> el_;
};

// JSON (de)serialization, schema documented in docs/formats.md:
//   {"n": int, "F": [[poly-string]], "E": [poly-string], "time_dependent": bool}
std::string field_to_json(const MagneticForm& F, const std::vector<PolySymbol>* E = nullptr);
MagneticForm field_from_json(const std::string& text, std::vector<PolySymbol>* E_out = nullptr);
MagneticForm load_field_file(const std::string& path, std::vector<PolySymbol>* E_out = nullptr);

} // namespace magstar
