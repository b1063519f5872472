#include "magstar/flow.hpp"

#include <cmath>

namespace magstar::dyn {

namespace {

std::vector<double> pack_phase(int n, const Vec& q, const Vec& p, double t) {
    std::vector<double> x(kMaxVars, 0.0);
    for (int j = 0; j < n; ++j) { x[j] = q[j]; x[n + j] = p[j]; }
    x[2 * n + 1] = t;
    return x;
}

} // namespace

PolynomialHamiltonian::PolynomialHamiltonian(PolySymbol H)
    : n_(H.dim()), td_(H.depends_on_t()), H_(std::move(H)) {
    if (H_.depends_on_hbar())
        throw std::invalid_argument("PolynomialHamiltonian: hbar must not appear");
    for (int j = 0; j < n_; ++j) {
        dq_.push_back(H_.diff_q(j));
        dp_.push_back(H_.diff_p(j));
    }
    hess_.assign(2 * n_, std::vector<PolySymbol>());
    for (int a = 0; a < 2 * n_; ++a) {
        PolySymbol da = a < n_ ? H_.diff_q(a) : H_.diff_p(a - n_);
        for (int b = 0; b < 2 * n_; ++b)
            hess_[a].push_back(b < n_ ? da.diff_q(b) : da.diff_p(b - n_));
    }
}

double PolynomialHamiltonian::value(const Vec& q, const Vec& p, double t) const {
    return H_.poly().eval_real(pack_phase(n_, q, p, t));
}
Vec PolynomialHamiltonian::grad_q(const Vec& q, const Vec& p, double t) const {
    auto x = pack_phase(n_, q, p, t);
    Vec g(n_);
    for (int j = 0; j < n_; ++j) g[j] = dq_[j].poly().eval_real(x);
    return g;
}
Vec PolynomialHamiltonian::grad_p(const Vec& q, const Vec& p, double t) const {
    auto x = pack_phase(n_, q, p, t);
    Vec g(n_);
    for (int j = 0; j < n_; ++j) g[j] = dp_[j].poly().eval_real(x);
    return g;
}
Mat PolynomialHamiltonian::hessian(const Vec& q, const Vec& p, double t) const {
    auto x = pack_phase(n_, q, p, t);
    Mat h(2 * n_, Vec(2 * n_));
    for (int a = 0; a < 2 * n_; ++a)
        for (int b = 0; b < 2 * n_; ++b) h[a][b] = hess_[a][b].poly().eval_real(x);
    return h;
}

RelativisticHamiltonian::RelativisticHamiltonian(int n, int sign, double mass, double c,
                                                 Vec metric_diag)
    : n_(n), sign_(sign >= 0 ? 1 : -1), m_(mass), c_(c), g_(std::move(metric_diag)) {
    if (g_.empty()) g_.assign(n_, 1.0);
    for (double v : g_)
        if (v <= 0) throw std::invalid_argument("RelativisticHamiltonian: metric must be positive");
}

double RelativisticHamiltonian::root(const Vec& p) const {
    double s = m_ * m_ * c_ * c_;
    for (int j = 0; j < n_; ++j) s += g_[j] * p[j] * p[j];
    if (s <= 0) throw std::domain_error("RelativisticHamiltonian: square root domain violation");
    return std::sqrt(s);
}

double RelativisticHamiltonian::value(const Vec&, const Vec& p, double) const {
    return sign_ * c_ * root(p);
}
Vec RelativisticHamiltonian::grad_q(const Vec&, const Vec&, double) const {
    return Vec(n_, 0.0);
}
Vec RelativisticHamiltonian::grad_p(const Vec&, const Vec& p, double) const {
    double r = root(p);
    Vec g(n_);
    for (int j = 0; j < n_; ++j) g[j] = sign_ * c_ * g_[j] * p[j] / r;
    return g;
}
Mat RelativisticHamiltonian::hessian(const Vec&, const Vec& p, double) const {
    double r = root(p);
    Mat h(2 * n_, Vec(2 * n_, 0.0));
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) {
            double v = (j == k ? g_[j] / r : 0.0) - g_[j] * p[j] * g_[k] * p[k] / (r * r * r);
            h[n_ + j][n_ + k] = sign_ * c_ * v;
        }
    return h;
}

// --- flows ---------------------------------------------------------------------

namespace {

struct Rhs {
    const Hamiltonian& H;
    const MagneticForm* F;
    const EMField* em;
    int n;

    // velocity at (x, t)
    Vec operator()(const Vec& x, double t) const {
        Vec q(x.begin(), x.begin() + n), p(x.begin() + n, x.end());
        Vec hp = H.grad_p(q, p, t), hq = H.grad_q(q, p, t);
        Vec v(2 * n);
        const MagneticForm& mf = em ? em->magnetic() : *F;
        auto Fm = mf.eval(q, t);
        for (int j = 0; j < n; ++j) {
            v[j] = hp[j];
            double acc = -hq[j];
            for (int k = 0; k < n; ++k) acc -= Fm[j][k] * hp[k];
            v[n + j] = acc;
        }
        if (em) {
            auto E = em->eval_E(q, t);
            for (int j = 0; j < n; ++j) v[n + j] += E[j];
        }
        return v;
    }

    // Jacobian of the velocity field
    Mat jacobian(const Vec& x, double t) const {
        Vec q(x.begin(), x.begin() + n), p(x.begin() + n, x.end());
        Vec hp = H.grad_p(q, p, t);
        Mat hess = H.hessian(q, p, t);
        const MagneticForm& mf = em ? em->magnetic() : *F;
        auto Fm = mf.eval(q, t);
        auto dF = mf.eval_grad(q, t);
        Mat J(2 * n, Vec(2 * n, 0.0));
        for (int j = 0; j < n; ++j)
            for (int b = 0; b < 2 * n; ++b) {
                J[j][b] = hess[n + j][b]; // d(dH/dp_j)/dx_b
                double acc = -hess[j][b]; // -d(dH/dq_j)/dx_b
                for (int k = 0; k < n; ++k) {
                    acc -= Fm[j][k] * hess[n + k][b];
                    if (b < n) acc -= dF[b][j][k] * hp[k];
                }
                J[n + j][b] = acc;
            }
        if (em) {
            std::vector<double> pv(n, 0.0);
            for (int j = 0; j < n; ++j)
                for (int b = 0; b < n; ++b)
                    J[n + j][b] += em->electric()[j].diff_q(b).eval_c(q, pv, 0.0, t).real();
        }
        return J;
    }
};

Mat mat_add_scaled(const Mat& A, const Mat& B, double s) {
    Mat C = A;
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < A.size(); ++j) C[i][j] += s * B[i][j];
    return C;
}

Mat mat_mul(const Mat& A, const Mat& B) {
    const std::size_t d = A.size();
    Mat C(d, Vec(d, 0.0));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k) {
            double a = A[i][k];
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < d; ++j) C[i][j] += a * B[k][j];
        }
    return C;
}

FlowResult integrate(const Rhs& rhs, const Vec& x0, double t0, double t, int steps) {
    const int n = rhs.n;
    const int d = 2 * n;
    if (steps < 1) throw std::invalid_argument("flow: need at least one step");
    double h = t / steps;
    if (!(std::abs(h) > 0.0) && t != 0.0)
        throw std::runtime_error("flow: step underflow");

    FlowResult out;
    out.n = n;
    out.t0 = t0;
    out.step = h;

    Vec x = x0;
    Mat D(d, Vec(d, 0.0));
    for (int i = 0; i < d; ++i) D[i][i] = 1.0;

    auto record = [&](double tc) {
        out.times.push_back(tc);
        out.gamma.push_back(x);
        out.gamma_dot.push_back(rhs(x, tc));
        out.tangent.push_back(D);
    };
    record(t0);

    for (int s = 0; s < steps; ++s) {
        double tc = t0 + s * h;
        // RK4 on the state and the tangent map together
        Vec k1 = rhs(x, tc);
        Mat J1 = rhs.jacobian(x, tc);
        Mat K1 = mat_mul(J1, D);

        Vec x2(d);
        for (int i = 0; i < d; ++i) x2[i] = x[i] + 0.5 * h * k1[i];
        Mat D2 = mat_add_scaled(D, K1, 0.5 * h);
        Vec k2 = rhs(x2, tc + 0.5 * h);
        Mat K2 = mat_mul(rhs.jacobian(x2, tc + 0.5 * h), D2);

        Vec x3(d);
        for (int i = 0; i < d; ++i) x3[i] = x[i] + 0.5 * h * k2[i];
        Mat D3 = mat_add_scaled(D, K2, 0.5 * h);
        Vec k3 = rhs(x3, tc + 0.5 * h);
        Mat K3 = mat_mul(rhs.jacobian(x3, tc + 0.5 * h), D3);

        Vec x4(d);
        for (int i = 0; i < d; ++i) x4[i] = x[i] + h * k3[i];
        Mat D4 = mat_add_scaled(D, K3, h);
        Vec k4 = rhs(x4, tc + h);
        Mat K4 = mat_mul(rhs.jacobian(x4, tc + h), D4);

        for (int i = 0; i < d; ++i)
            x[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                D[i][j] += h / 6.0 * (K1[i][j] + 2 * K2[i][j] + 2 * K3[i][j] + K4[i][j]);
        record(tc + h);
    }
    return out;
}

} // namespace

FlowResult magnetic_flow(const Hamiltonian& H, const MagneticForm& F, const Vec& x0, double t,
                         int steps) {
    if ((int)x0.size() != 2 * F.dim())
        throw std::invalid_argument("magnetic_flow: bad initial point");
    Rhs rhs{H, &F, nullptr, F.dim()};
    return integrate(rhs, x0, 0.0, t, steps);
}

FlowResult em_flow(const Hamiltonian& H, const EMField& em, const Vec& x0, double t,
                   int steps) {
    if ((int)x0.size() != 2 * em.dim())
        throw std::invalid_argument("em_flow: bad initial point");
    Rhs rhs{H, nullptr, &em, em.dim()};
    FlowResult out = integrate(rhs, x0, 0.0, t, steps);
    VirtualFlow vf(em);
    for (double tc : out.times) {
        out.lambda.push_back(vf.at(x0, tc));
        out.lambda_dot.push_back(vf.velocity(x0, tc));
    }
    return out;
}

VirtualFlow::VirtualFlow(const EMField& em) : n_(em.dim()), E_(em.electric()) {
    for (const auto& e : E_) {
        // antiderivative in t of the field component
        Eint_.push_back(PolySymbol(n_, e.poly().integrate(2 * n_ + 1)));
    }
}

Vec VirtualFlow::at(const Vec& x0, double t) const {
    Vec q0(x0.begin(), x0.begin() + n_), pv(n_, 0.0);
    Vec out = x0;
    for (int j = 0; j < n_; ++j)
        out[n_ + j] += Eint_[j].eval_c(q0, pv, 0.0, t).real();
    return out;
}

Vec VirtualFlow::velocity(const Vec& x0, double t) const {
    Vec q0(x0.begin(), x0.begin() + n_), pv(n_, 0.0);
    Vec v(2 * n_, 0.0);
    for (int j = 0; j < n_; ++j) v[n_ + j] = E_[j].eval_c(q0, pv, 0.0, t).real();
    return v;
}

Mat VirtualFlow::tangent(const Vec& x0, double t) const {
    Vec q0(x0.begin(), x0.begin() + n_), pv(n_, 0.0);
    Mat D(2 * n_, Vec(2 * n_, 0.0));
    for (int i = 0; i < 2 * n_; ++i) D[i][i] = 1.0;
    for (int j = 0; j < n_; ++j)
        for (int b = 0; b < n_; ++b)
            D[n_ + j][b] = Eint_[j].diff_q(b).eval_c(q0, pv, 0.0, t).real();
    return D;
}

double lifted_flow_residual(const Hamiltonian& H, const MagneticForm& F, const Vec& x0,
                            double t, int steps) {
    const int n = F.dim();
    const int d = 2 * n;
    geom::ChordGeometry geom(F);

    // H0(x, y) = H(l(x, y)); integrate X' = dH0/dy, Y' = -dH0/dx numerically
    auto lmap = [&](const Vec& X, const Vec& Y) {
        std::vector<double> x(X), y(Y);
        Vec lq(n), l(2 * n);
        for (int j = 0; j < n; ++j) lq[j] = x[j] - 0.5 * y[n + j];
        Vec rq(n);
        for (int j = 0; j < n; ++j) rq[j] = x[j] + 0.5 * y[n + j];
        auto A = geom.valatin(lq, rq);
        for (int j = 0; j < n; ++j) {
            l[j] = lq[j];
            l[n + j] = x[n + j] + 0.5 * y[j] - A[j];
        }
        return l;
    };
    auto H0 = [&](const Vec& X, const Vec& Y) {
        Vec l = lmap(X, Y);
        Vec q(l.begin(), l.begin() + n), p(l.begin() + n, l.end());
        return H.value(q, p, 0.0);
    };
    // gradients by central differences (the check tolerance is 1e-8; the
    // reference side below is the analytically lifted trajectory)
    const double eps = 1e-6;
    auto rhs = [&](const Vec& XY) {
        Vec v(2 * d);
        for (int i = 0; i < d; ++i) {
            Vec Xp(XY.begin(), XY.begin() + d), Yp(XY.begin() + d, XY.end());
            Vec Xm = Xp, Ym = Yp;
            Vec X2 = Xp, Y2 = Yp;
            Y2[i] += eps; Ym[i] -= eps;
            v[i] = (H0(Xp, Y2) - H0(Xp, Ym)) / (2 * eps);
            X2 = Xp; X2[i] += eps;
            Xm = Xp; Xm[i] -= eps;
            v[d + i] = -(H0(X2, Yp) - H0(Xm, Yp)) / (2 * eps);
        }
        return v;
    };

    Vec XY(2 * d, 0.0);
    for (int i = 0; i < d; ++i) XY[i] = x0[i];
    double h = t / steps;
    for (int s = 0; s < steps; ++s) {
        Vec k1 = rhs(XY), z(2 * d);
        for (int i = 0; i < 2 * d; ++i) z[i] = XY[i] + 0.5 * h * k1[i];
        Vec k2 = rhs(z);
        for (int i = 0; i < 2 * d; ++i) z[i] = XY[i] + 0.5 * h * k2[i];
        Vec k3 = rhs(z);
        for (int i = 0; i < 2 * d; ++i) z[i] = XY[i] + h * k3[i];
        Vec k4 = rhs(z);
        for (int i = 0; i < 2 * d; ++i)
            XY[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }

    // reference: X = (gamma + x0)/2 + v^t, Y = J(gamma - x0) + y^t
    FlowResult fl = magnetic_flow(H, F, x0, t, steps);
    const Vec& g = fl.endpoint();
    Vec gq(g.begin(), g.begin() + n), q0(x0.begin(), x0.begin() + n);
    auto Agq = geom.valatin(gq, q0);
    auto Aqg = geom.valatin(q0, gq);
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        double X = 0.5 * (g[j] + x0[j]);
        double Xp = 0.5 * (g[n + j] + x0[n + j]) + 0.5 * (Agq[j] + Aqg[j]);
        double Yq = (g[n + j] - x0[n + j]) + (Agq[j] - Aqg[j]);
        double Yp = -(g[j] - x0[j]);
        worst = std::max({worst, std::abs(XY[j] - X), std::abs(XY[n + j] - Xp),
                          std::abs(XY[d + j] - Yq), std::abs(XY[d + n + j] - Yp)});
    }
    // conservation of r(X, Y) along the lifted flow
    Vec X(XY.begin(), XY.begin() + d), Y(XY.begin() + d, XY.end());
    Vec rq(n), r(2 * n);
    for (int j = 0; j < n; ++j) rq[j] = X[j] + 0.5 * Y[n + j];
    Vec lq(n);
    for (int j = 0; j < n; ++j) lq[j] = X[j] - 0.5 * Y[n + j];
    auto Arl = geom.valatin(rq, lq);
    for (int j = 0; j < n; ++j) {
        worst = std::max(worst, std::abs(rq[j] - x0[j]));
        double rp = X[n + j] - 0.5 * Y[j] - Arl[j];
        worst = std::max(worst, std::abs(rp - x0[n + j]));
    }
    return worst;
}

} // namespace magstar::dyn
