// Exact star products on polynomial symbols: the Groenewold-Moyal product,
// the magnetic Weyl product driven by the midpoint-triangle flux, the
// N-factor polygon product, tau- and M-ordered products, and the ordering
// transforms relating them. All series terminate on symbols polynomial in p
// (every exponent term carries at least one p-derivative per factor), so
// results are exact in Gaussian-rational arithmetic.

#pragma once

#include "magstar/geometry.hpp"
#include "magstar/polysymbol.hpp"

namespace magstar::star {

// Real 2n x 2n ordering matrix M with blocks [[N, K], [S, -N^T]].
// M^T J + J M = 0 holds iff K and S are symmetric, which the constructor
// enforces, so every instance is admissible by construction.
class OrderingMatrix {
public:
    using Mat = std::vector<std::vector<Rat>>;

    OrderingMatrix(int n, Mat Nb, Mat Kb, Mat Sb);

    static OrderingMatrix zero(int n);
    static OrderingMatrix tau(int n, const Rat& tau); // (1/2 - tau) diag(I, -I)
    // general 2n x 2n matrix; throws if the admissibility condition fails
    static OrderingMatrix from_matrix(const Mat& M);
    // doubles are converted exactly (dyadic rationals) after a 1e-12 check
    static OrderingMatrix from_matrix(const std::vector<std::vector<double>>& M);

    int dim() const { return n_; }
    Rat entry(int a, int b) const;
    bool is_zero() const;
    OrderingMatrix negated() const;

    // residual max-entry of M^T J + J M for an arbitrary square matrix
    static Rat admissibility_residual(const Mat& M);

private:
    int n_;
    Mat N_, K_, S_;
};

// --- binary and N-factor products -------------------------------------------

PolySymbol moyal_product(const PolySymbol& f, const PolySymbol& g);

// Cached engine for one magnetic field (the flux polynomials are reused
// across calls). Fields with a time variable must be specialized first.
class MagneticStar {
public:
    MagneticStar(MagneticForm F, int n);
    explicit MagneticStar(const MagneticForm& F) : MagneticStar(F, F.dim()) {}

    const MagneticForm& field() const { return F_; }
    int dim() const { return n_; }

    PolySymbol weyl(const PolySymbol& f, const PolySymbol& g) const;
    PolySymbol n_factor(const std::vector<PolySymbol>& fs) const;
    PolySymbol tau_product(const PolySymbol& f, const PolySymbol& g, const Rat& tau) const;

private:
    int n_;
    MagneticForm F_;
};

PolySymbol magnetic_weyl_product(const PolySymbol& f, const PolySymbol& g,
                                 const MagneticForm& F);
PolySymbol n_factor_product(const std::vector<PolySymbol>& fs, const MagneticForm& F);
PolySymbol tau_magnetic_product(const PolySymbol& f, const PolySymbol& g, const Rat& tau,
                                const MagneticForm& F);

// Non-magnetic M-ordered product, both routes (they agree exactly):
// conjugation U^{-M} (U^M f * U^M g) and the direct pseudodifferential form.
PolySymbol m_ordered_product(const PolySymbol& f, const PolySymbol& g, const OrderingMatrix& M);
PolySymbol m_ordered_product_direct(const PolySymbol& f, const PolySymbol& g,
                                    const OrderingMatrix& M);

// Product of differently ordered multipliers; the result is expressed in the
// ordering M_out.
PolySymbol mixed_ordering_product(const std::vector<PolySymbol>& fs,
                                  const std::vector<OrderingMatrix>& Ms,
                                  const OrderingMatrix& M_out);

// --- ordering transforms -----------------------------------------------------

// U_F: magnetic-Weyl symbol -> Heisenberg-Weyl symbol (Prop.-1 transform)
PolySymbol ordering_transform_UF(const PolySymbol& f, const MagneticForm& F, bool inverse = false);
// U^M = exp{(i/hbar) S^M(V-hat)}
PolySymbol ordering_transform_UM(const PolySymbol& f, const OrderingMatrix& M, bool inverse = false);
// U^tau = exp{(1/2 - tau) u-hat d_q}
PolySymbol ordering_transform_Utau(const PolySymbol& f, const Rat& tau, bool inverse = false);

// --- magnetic Poisson bracket -----------------------------------------------

// {f,g}_F = d_p f d_q g - d_q f d_p g + <d_p f, F d_p g>
PolySymbol poisson_bracket_F(const PolySymbol& f, const PolySymbol& g, const MagneticForm& F);
// Jacobi cyclic sum {f,{g,h}} + {g,{h,f}} + {h,{f,g}} (zero iff F closed)
PolySymbol jacobi_residual(const PolySymbol& f, const PolySymbol& g, const PolySymbol& h,
                           const MagneticForm& F);

// --- left/right regular representation (Eq. 2.10 and tau variants) -----------

class RegularRep {
public:
    RegularRep(const MagneticForm& F, const Rat& tau = Rat(1, 2));

    PolySymbol L_q(int j, const PolySymbol& f) const;
    PolySymbol R_q(int j, const PolySymbol& f) const;
    PolySymbol L_p(int j, const PolySymbol& f) const;
    PolySymbol R_p(int j, const PolySymbol& f) const;

    // Weyl-symmetrized f(L_q, L_p) applied to g (resp. g(R_q, R_p) to f)
    PolySymbol product_via_left(const PolySymbol& f, const PolySymbol& g) const;
    PolySymbol product_via_right(const PolySymbol& f, const PolySymbol& g) const;

private:
    int n_;
    Rat tau_;
    std::vector<Poly> A_;  // Valatin potential, two-point layout

    PolySymbol apply_A(int j, const PolySymbol& f, bool swapped) const;
    PolySymbol apply_symmetrized(const std::vector<int>& multiset, const PolySymbol& g,
                                 bool left) const;
    PolySymbol apply_generator(int gen, const PolySymbol& f, bool left) const;
};

} // namespace magstar::star
