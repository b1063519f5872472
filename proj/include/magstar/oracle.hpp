// Brute-force operator referee: gauge-fixed matrices on a periodic position
// grid (n = 1 or 2 physical dimensions), Weyl/tau quantization by explicit
// symmetrization, matrix exponentials, and gauge-invariant symbol extraction
// through the chord-phase Wigner transform. Everything here is independent
// of the star-product engine it checks: products are literal matrix
// products, the only shared ingredient is the grid convention.

#pragma once

#include "magstar/grid_symbol.hpp"
#include "magstar/magnetic_form.hpp"

#include <optional>

namespace magstar::oracle {

using kernels::cplx;

class GaugeChart {
public:
    // A_j(q) polynomial components with d(A dq) = F (checked symbolically)
    GaugeChart(MagneticForm F, std::vector<PolySymbol> A, int N, double dq, double hbar);

    // the Valatin primitive anchored at the origin (symmetric-like gauge)
    static GaugeChart valatin_gauge(const MagneticForm& F, int N, double dq, double hbar);
    // Landau gauge for constant B on R^2: A = (-B q2, 0)
    static GaugeChart landau_constant(const Rat& B, int N, double dq, double hbar);
    // symmetric gauge for constant B on R^2: A = (-B q2 / 2, B q1 / 2)
    static GaugeChart symmetric_constant(const Rat& B, int N, double dq, double hbar);

    int dim_space() const { return n_; }
    int points() const { return N_; }
    int dim() const { return dim_; }
    double dq() const { return dq_; }
    double hbar() const { return hbar_; }
    double q_value(int idx) const { return (idx - N_ / 2) * dq_; }
    std::vector<double> q_origin() const { return std::vector<double>(n_, q_value(0)); }
    const MagneticForm& field() const { return F_; }
    const std::vector<PolySymbol>& potential() const { return A_; }

    // row index -> position multi-index
    std::vector<int> unpack(int r) const;
    double potential_value(int j, const std::vector<double>& q) const;

    // chord phase psi(q, u) = (1/hbar) int_{q-u/2}^{q+u/2} A . dq
    double chord_phase(const std::vector<double>& q, const std::vector<double>& u) const;

private:
    int n_, N_, dim_;
    double dq_, hbar_;
    MagneticForm F_;
    std::vector<PolySymbol> A_;
    Poly chord_; // symbolic chord integral in the two-point layout (q, u)
};

struct OperatorMatrix {
    int n = 1, N = 0, dim = 0;
    std::vector<cplx> a; // row-major dim x dim
    std::string label;

    static OperatorMatrix identity(const GaugeChart& chart);
    static OperatorMatrix zero(const GaugeChart& chart);
    cplx& at(int r, int c) { return a[(std::size_t)r * dim + c]; }
    const cplx& at(int r, int c) const { return a[(std::size_t)r * dim + c]; }
};

OperatorMatrix multiply(const OperatorMatrix& A, const OperatorMatrix& B);
OperatorMatrix commutator(const OperatorMatrix& A, const OperatorMatrix& B);
double max_abs(const OperatorMatrix& A);
double hermiticity_defect(const OperatorMatrix& A);

// in-place generator applications, M <- q_j M and M <- p_j M
void apply_position(const GaugeChart& chart, int j, OperatorMatrix& M);
void apply_momentum(const GaugeChart& chart, int j, OperatorMatrix& M);

// Weyl (tau absent) or tau-ordered quantization of a polynomial symbol;
// formal hbar powers become the chart's numeric hbar
OperatorMatrix quantize(const PolySymbol& f, const GaugeChart& chart,
                        std::optional<Rat> tau = std::nullopt);

// Symbol on the faithful chord lattice of the chart: the map
// (midpoint, separation) <-> (row, column) is a bijection per parity class,
// so extraction is exact (no discrete-Wigner ghosts). The Weyl case reads
// even separations at integer midpoints, giving N/2 momentum points on the
// half band; tau in {0, 1} reads all N separations.
struct OracleSymbol {
    int n = 1, N = 0, Np = 0;
    double dq = 0, dp = 0, hbar = 1;
    std::vector<cplx> data; // n=1: [iq * Np + k]; n=2: [((i1 N + i2) Np + k1) Np + k2]

    double q_value(int i) const { return (i - N / 2) * dq; }
    double p_value(int k) const { return (k - Np / 2) * dp; }
    std::size_t index1(int iq, int k) const { return (std::size_t)iq * Np + k; }
    std::size_t index2(int i1, int i2, int k1, int k2) const {
        return (((std::size_t)i1 * N + i2) * Np + k1) * Np + k2;
    }

    // max |data - ref(q, p)| over interior q and the inner p half-window
    double interior_diff(
        const std::function<cplx(const std::vector<double>&, const std::vector<double>&)>& ref)
        const;
    double interior_diff(const OracleSymbol& other) const;
    double interior_max_abs() const;
};

// gauge-invariant symbol extraction; gauge_phase = false gives the raw
// (gauge-dependent) Wigner symbol for negative controls; tau in {0, 1/2, 1}
OracleSymbol extract_symbol(const OperatorMatrix& Op, const GaugeChart& chart,
                            bool gauge_phase = true, const Rat& tau = Rat(1, 2));

// inverse chord map: the operator whose gauge-invariant symbol samples the
// given phase-space function; extract_symbol inverts it exactly on the
// half-band class. Conjugation by exp(i chi / hbar) maps it between charts
// of the same field.
OperatorMatrix quantize_grid(
    const std::function<cplx(const std::vector<double>&, const std::vector<double>&)>& f,
    const GaugeChart& chart, bool gauge_phase = true);

// sample a polynomial symbol on the chart's phase-space lattice
GridSymbol sample_on_chart(const PolySymbol& f, const GaugeChart& chart);

// exp(-i t H / hbar) by scaling and squaring (Pade-13)
OperatorMatrix evolution_operator(const OperatorMatrix& H, double t, double hbar);

// P M P with P a smooth momentum-band filter per axis: exactly 1 on
// |mode| <= N/8, cosine rolloff to 0 at |mode| >= 3N/8. The half-band chord
// lattice folds momenta mod pi hbar / dq; filtering keeps the fold partner
// of the comparison window identically zero, and the flat passband leaves
// interior symbols untouched. Evolution referees filter the Hamiltonian.
OperatorMatrix band_project(const GaugeChart& chart, const OperatorMatrix& M);

// Operator-side referee: max |(A - B) psi| / max |psi| over an interior
// Gaussian state of the given width. This is the Theorem-1 comparison
// (operator product vs quantized star product) without any symbol
// transform in the loop.
double state_defect(const GaugeChart& chart, const OperatorMatrix& A, const OperatorMatrix& B,
                    double width = 0.0);

} // namespace magstar::oracle
