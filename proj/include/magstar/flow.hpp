// Classical flows in magnetic / electromagnetic fields: fixed-step RK4 for
// the kinetic-momentum system
//   dq/dt = dH/dp,   dp/dt = -dH/dq - F(t,q) dH/dp + e E(t,q),
// with the tangent map integrated alongside through the variational
// equations, plus the frozen-position "virtual" companion flow whose momentum
// integral is exact for polynomial E.

#pragma once

#include "magstar/geometry.hpp"
#include "magstar/polysymbol.hpp"

#include <memory>

namespace magstar::dyn {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;

class Hamiltonian {
public:
    virtual ~Hamiltonian() = default;
    virtual int dim() const = 0;
    virtual double value(const Vec& q, const Vec& p, double t) const = 0;
    virtual Vec grad_q(const Vec& q, const Vec& p, double t) const = 0;
    virtual Vec grad_p(const Vec& q, const Vec& p, double t) const = 0;
    // Hessian blocks as a full 2n x 2n matrix over (q, p)
    virtual Mat hessian(const Vec& q, const Vec& p, double t) const = 0;
    virtual bool time_dependent() const { return false; }
};

// polynomial Hamiltonian; derivatives are precomputed symbol polynomials
class PolynomialHamiltonian : public Hamiltonian {
public:
    explicit PolynomialHamiltonian(PolySymbol H);
    int dim() const override { return n_; }
    double value(const Vec& q, const Vec& p, double t) const override;
    Vec grad_q(const Vec& q, const Vec& p, double t) const override;
    Vec grad_p(const Vec& q, const Vec& p, double t) const override;
    Mat hessian(const Vec& q, const Vec& p, double t) const override;
    bool time_dependent() const override { return td_; }
    const PolySymbol& symbol() const { return H_; }

private:
    int n_;
    bool td_;
    PolySymbol H_;
    std::vector<PolySymbol> dq_, dp_;
    std::vector<std::vector<PolySymbol>> hess_;
};

// H = sign * c sqrt(g^jk p_j p_k + m^2 c^2), diagonal constant metric
class RelativisticHamiltonian : public Hamiltonian {
public:
    RelativisticHamiltonian(int n, int sign, double mass, double c = 1.0,
                            Vec metric_diag = {});
    int dim() const override { return n_; }
    double value(const Vec& q, const Vec& p, double t) const override;
    Vec grad_q(const Vec& q, const Vec& p, double t) const override;
    Vec grad_p(const Vec& q, const Vec& p, double t) const override;
    Mat hessian(const Vec& q, const Vec& p, double t) const override;

private:
    int n_, sign_;
    double m_, c_;
    Vec g_;
    double root(const Vec& p) const;
};

struct FlowResult {
    int n = 0;
    double t0 = 0.0, step = 0.0;
    std::vector<double> times;
    std::vector<Vec> gamma;      // phase-space samples, length 2n
    std::vector<Vec> gamma_dot;  // RHS at the samples
    std::vector<Mat> tangent;    // d gamma / d x0, 2n x 2n
    std::vector<Vec> lambda;     // virtual companion (time-dependent runs)
    std::vector<Vec> lambda_dot;

    const Vec& endpoint() const { return gamma.back(); }
    const Mat& endpoint_tangent() const { return tangent.back(); }
};

// charge is absorbed into F and E (e = c = 1 internally)
FlowResult magnetic_flow(const Hamiltonian& H, const MagneticForm& F, const Vec& x0, double t,
                         int steps);
FlowResult em_flow(const Hamiltonian& H, const EMField& em, const Vec& x0, double t, int steps);

// lambda_q(t) = q0, lambda_p(t) = p0 + int_0^t E(s, q0) ds, exact in t for
// polynomial E
struct VirtualFlow {
    explicit VirtualFlow(const EMField& em);
    Vec at(const Vec& x0, double t) const;
    Vec velocity(const Vec& x0, double t) const;   // d lambda / dt
    Mat tangent(const Vec& x0, double t) const;    // d lambda / d x0 (exact)

private:
    int n_;
    std::vector<PolySymbol> E_, Eint_; // Eint = antiderivative of E in t
};

// residual of the lifted-flow identity: integrate the Hamiltonian system for
// H0 = H(l(x,y)) (+ electric term) directly on T*R^{2n} and compare with the
// representation X = (gamma + lambda)/2 + v^t, Y = J(gamma - lambda) + y^t;
// also checks conservation of r(X, Y). Returns the max residual.
double lifted_flow_residual(const Hamiltonian& H, const MagneticForm& F, const Vec& x0,
                            double t, int steps);

} // namespace magstar::dyn
