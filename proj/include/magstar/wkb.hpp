// Semiclassical symbols of the evolution operator via membrane areas: the
// endpoint map x0 -> (gamma^t + lambda^t)/2 + v^t is inverted by damped
// Newton, the phase is assembled both from the direct action integral and
// from the membrane decomposition (theta loop + magnetic flux + electric
// space-time area), and the amplitude is the inverse square root of the
// endpoint-map Jacobian. The Marinov composition rule, the finite-N Trotter
// symbol, and the two-branch relativistic symbol build on the same pieces.

#pragma once

#include "magstar/flow.hpp"
#include "magstar/grid_symbol.hpp"

namespace magstar::dyn {

struct CausticError : std::runtime_error {
    double jacobian;
    explicit CausticError(double j)
        : std::runtime_error("wkb: endpoint-map Jacobian " + std::to_string(j) +
                             " fell below the caustic threshold"),
          jacobian(j) {}
};

struct WkbOptions {
    int steps = 400;            // RK4 steps (Simpson shares the grid; keep even)
    double caustic_delta = 0.1; // validity window J >= delta
    int max_newton = 50;
    double newton_tol = 1e-12;
};

struct WkbData {
    double t = 0.0;
    Vec x, x0;
    double S = 0.0;          // phase, membrane route
    double S_action = 0.0;   // phase, direct action route (cross-check)
    double jacobian = 1.0;
    double amplitude = 1.0;  // J^{-1/2}
    bool valid = true;
    // membrane decomposition (for reports and plots)
    double theta_loop = 0.0; // omega_0 part of the membrane area
    double flux_B = 0.0;     // magnetic flux of the q-projection, frozen t
    double area_E = 0.0;     // electric space-time area
    double action_H = 0.0;   // int H dt along the trajectory
    FlowResult flow;
};

// pure magnetic, time independent (lambda == x0)
WkbData wkb_symbol(const Hamiltonian& H, const MagneticForm& F, double t, const Vec& x,
                   const WkbOptions& opt = {});
// time-dependent electromagnetic field, virtual companion flow
WkbData wkb_symbol(const Hamiltonian& H, const EMField& em, double t, const Vec& x,
                   const WkbOptions& opt = {});

std::complex<double> wkb_value(const WkbData& w, double hbar);

// defect of the phase-addition rule: membranes of the two legs plus the
// hexagon wing membrane of the composition point versus the combined leg
double marinov_defect(const Hamiltonian& H, const MagneticForm& F, double t1, double t2,
                      const Vec& x0, const WkbOptions& opt = {});

// the phase through the blown-up space-time membrane (the trajectory placed
// on the level p0 = -H, the virtual line on p0 = 0); equals S
double phase_blowup_route(const WkbData& w, const Hamiltonian& H, const EMField& em);

// finite-N truncation of the exponential-splitting formula: the N-fold grid
// product of exp(-i t H / (hbar N)) samples
GridSymbol trotter_symbol(const PolySymbol& H, const MagneticForm& F, double t, int N,
                          int grid_points, const std::vector<double>& q0, double dq,
                          double hbar);

// two-branch relativistic symbol; Cauchy data psi_t(0) = 0 gives the equal
// 1/2 weights
struct KleinGordonSymbol {
    WkbData plus, minus;
    std::complex<double> value(double hbar) const {
        return 0.5 * (wkb_value(plus, hbar) + wkb_value(minus, hbar));
    }
};
KleinGordonSymbol klein_gordon_symbol(int n, double mass, double t, const Vec& x,
                                      const EMField& em, const WkbOptions& opt = {});

} // namespace magstar::dyn
