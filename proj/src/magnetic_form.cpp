#include "magstar/magnetic_form.hpp"

namespace magstar {

namespace {

void require_field_component(const PolySymbol& s) {
    if (s.deg_p() > 0 || s.depends_on_hbar())
        throw std::invalid_argument("MagneticForm: components must depend on q (and t) only");
}

} // namespace

MagneticForm::MagneticForm(int n, std::vector<std::vector<PolySymbol>> comps)
    : n_(n), comps_(std::move(comps)) {
    if (n < 1 || n > 4) throw std::invalid_argument("MagneticForm: n must be in 1..4");
    if ((int)comps_.size() != n) throw std::invalid_argument("MagneticForm: bad component matrix");
    for (int j = 0; j < n; ++j) {
        if ((int)comps_[j].size() != n) throw std::invalid_argument("MagneticForm: bad component matrix");
        for (int k = 0; k < n; ++k) {
            require_field_component(comps_[j][k]);
            if (comps_[j][k].dim() != n)
                throw std::invalid_argument("MagneticForm: component dimension mismatch");
        }
    }
    for (int j = 0; j < n; ++j)
        for (int k = 0; k <= j; ++k)
            if (comps_[j][k] != -comps_[k][j])
                throw std::invalid_argument("MagneticForm: components are not antisymmetric");
    for (auto& r : closedness_residuals(n_, comps_))
        if (!r.is_zero())
            throw std::invalid_argument("MagneticForm: dF != 0 (form is not closed)");
}

std::vector<PolySymbol> MagneticForm::closedness_residuals(
    int n, const std::vector<std::vector<PolySymbol>>& comps) {
    std::vector<PolySymbol> out;
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
            for (int l = k + 1; l < n; ++l)
                out.push_back(comps[j][k].diff_q(l) + comps[k][l].diff_q(j) +
                              comps[l][j].diff_q(k));
    return out;
}

MagneticForm MagneticForm::zero(int n) {
    std::vector<std::vector<PolySymbol>> c(n, std::vector<PolySymbol>(n, PolySymbol(n)));
    return MagneticForm(n, std::move(c));
}

MagneticForm MagneticForm::planar(const PolySymbol& f12) {
    if (f12.dim() != 2) throw std::invalid_argument("MagneticForm::planar: component must have n=2");
    std::vector<std::vector<PolySymbol>> c(2, std::vector<PolySymbol>(2, PolySymbol(2)));
    c[0][1] = f12;
    c[1][0] = -f12;
    return MagneticForm(2, std::move(c));
}

MagneticForm MagneticForm::planar_constant(const Rat& b) {
    return planar(PolySymbol::constant(2, GRat(b)));
}

MagneticForm MagneticForm::from_B(const std::vector<PolySymbol>& B) {
    if (B.size() != 3) throw std::invalid_argument("MagneticForm::from_B: need 3 components");
    const int n = 3;
    std::vector<std::vector<PolySymbol>> c(n, std::vector<PolySymbol>(n, PolySymbol(n)));
    // (F v)_j = (B x v)_j  =>  F_12 = -B3, F_13 = B2, F_23 = -B1
    c[0][1] = -B[2]; c[1][0] = B[2];
    c[0][2] = B[1];  c[2][0] = -B[1];
    c[1][2] = -B[0]; c[2][1] = B[0];
    return MagneticForm(n, std::move(c));
}

bool MagneticForm::is_zero() const {
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
            if (!comps_[j][k].is_zero()) return false;
    return true;
}

bool MagneticForm::time_dependent() const {
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
            if (comps_[j][k].depends_on_t()) return true;
    return false;
}

int MagneticForm::degree() const {
    int d = 0;
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
            d = std::max(d, comps_[j][k].poly().total_degree());
    return d;
}

std::vector<std::vector<double>> MagneticForm::eval(const std::vector<double>& q, double t) const {
    std::vector<std::vector<double>> m(n_, std::vector<double>(n_, 0.0));
    std::vector<double> pv(n_, 0.0);
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
            m[j][k] = comps_[j][k].eval_c(q, pv, 0.0, t).real();
    return m;
}

std::vector<std::vector<Rat>> MagneticForm::eval_rat(const std::vector<Rat>& q, const Rat& t) const {
    std::vector<std::vector<Rat>> m(n_, std::vector<Rat>(n_, Rat(0)));
    std::vector<Rat> pv(n_, Rat(0));
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) {
            GRat v = comps_[j][k].eval(q, pv, Rat(0), t);
            m[j][k] = v.re;
        }
    return m;
}

std::vector<std::vector<std::vector<double>>> MagneticForm::eval_grad(
    const std::vector<double>& q, double t) const {
    std::vector<std::vector<std::vector<double>>> g(
        n_, std::vector<std::vector<double>>(n_, std::vector<double>(n_, 0.0)));
    std::vector<double> pv(n_, 0.0);
    for (int l = 0; l < n_; ++l)
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k)
                g[l][j][k] = comps_[j][k].diff_q(l).eval_c(q, pv, 0.0, t).real();
    return g;
}

MagneticForm MagneticForm::scaled(const Rat& c) const {
    auto comps = comps_;
    for (auto& row : comps)
        for (auto& s : row) s = s.scaled(GRat(c));
    return MagneticForm(n_, std::move(comps));
}

MagneticForm MagneticForm::specialize_t(const Rat& t) const {
    auto comps = comps_;
    for (auto& row : comps)
        for (auto& s : row) s = PolySymbol(n_, s.poly().eval_var(2 * n_ + 1, GRat(t)));
    return MagneticForm(n_, std::move(comps));
}

EMField::EMField(MagneticForm magnetic, std::vector<PolySymbol> electric)
    : mag_(std::move(magnetic)), el_(std::move(electric)) {
    if ((int)el_.size() != mag_.dim())
        throw std::invalid_argument("EMField: electric component count mismatch");
    for (auto& e : el_) require_field_component(e);
    for (auto& r : maxwell_residuals(mag_, el_))
        if (!r.is_zero())
            throw std::invalid_argument("EMField: fields violate the Maxwell constraint");
}

EMField EMField::zero(int n) {
    return EMField(MagneticForm::zero(n), std::vector<PolySymbol>(n, PolySymbol(n)));
}

std::vector<PolySymbol> EMField::maxwell_residuals(
    const MagneticForm& mag, const std::vector<PolySymbol>& el) {
    // d_t F_jk - d_j E_k + d_k E_j must vanish; div B = 0 is carried by
    // the MagneticForm closedness check.
    std::vector<PolySymbol> out;
    const int n = mag.dim();
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            PolySymbol r(n, mag.comp(j, k).poly().diff(2 * n + 1));
            r -= el[k].diff_q(j);
            r += el[j].diff_q(k);
            out.push_back(r);
        }
    return out;
}

std::vector<double> EMField::eval_E(const std::vector<double>& q, double t) const {
    const int n = dim();
    std::vector<double> e(n, 0.0), pv(n, 0.0);
    for (int j = 0; j < n; ++j) e[j] = el_[j].eval_c(q, pv, 0.0, t).real();
    return e;
}

} // namespace magstar
