// Complex symbols sampled on a uniform phase-space grid (n = 1 or 2), with
// the Fourier partner representation in (q, u). Grid conventions, shared by
// the convolution path and the operator oracle:
//   - N points per axis, N a power of two (and divisible by 4),
//     the same N and spacing dq for every q axis;
//   - q_j = q0 + j dq,  p_k = (k - N/2) dp with dp = pi hbar / (N dq),
//     u_m = (m - N/2) 2 dq,
// so that q +/- u/2 lands on the q lattice and p<->u transforms are exact
// discrete inverses of each other.

#pragma once

#include "magstar/kernels.hpp"
#include "magstar/polysymbol.hpp"

#include <string>

namespace magstar {

using kernels::cplx;

class GridSymbol {
public:
    enum class Space { QP, QU };

    GridSymbol() = default;
    GridSymbol(int n, int N, std::vector<double> q0, double dq, double hbar,
               Space space = Space::QP);

    static GridSymbol sample(int n, int N, const std::vector<double>& q0, double dq,
                             double hbar,
                             const std::function<cplx(const std::vector<double>& q,
                                                      const std::vector<double>& p)>& f);
    // sample a polynomial symbol at a numeric hbar, optionally damped by a
    // Gaussian cutoff exp(-|x - c|^2 / (2 w^2)) centered at the grid center
    static GridSymbol sample_poly(const PolySymbol& f, int N, const std::vector<double>& q0,
                                  double dq, double hbar, double cutoff_width = 0.0);

    int dim() const { return n_; }
    int points() const { return N_; }
    double dq() const { return dq_; }
    double dp() const { return dp_; }
    double du() const { return 2.0 * dq_; }
    double hbar() const { return hbar_; }
    Space space() const { return space_; }
    const std::vector<double>& q_origin() const { return q0_; }

    double q_value(int j) const { return q0_[0] + j * dq_; } // axis origin shared
    double q_value(int axis, int j) const { return q0_[axis] + j * dq_; }
    double p_value(int k) const { return (k - N_ / 2) * dp_; }
    double u_value(int m) const { return (m - N_ / 2) * 2.0 * dq_; }

    std::size_t size() const { return data_.size(); }
    cplx& at(std::size_t i) { return data_[i]; }
    const cplx& at(std::size_t i) const { return data_[i]; }
    std::vector<cplx>& data() { return data_; }
    const std::vector<cplx>& data() const { return data_; }

    // flattened index: n=1 [iq*N + k]; n=2 [((iq1*N + iq2)*N + k1)*N + k2]
    std::size_t index1(int iq, int k) const { return (std::size_t)iq * N_ + k; }
    std::size_t index2(int iq1, int iq2, int k1, int k2) const {
        return (((std::size_t)iq1 * N_ + iq2) * N_ + k1) * N_ + k2;
    }

    // p -> u partner (forward) and u -> p (inverse); exact discrete inverses
    GridSymbol wigner_fourier() const;
    GridSymbol wigner_fourier_inverse() const;

    bool compatible(const GridSymbol& o) const;

    // max |a - b| over the interior window (indices in [N/4, 3N/4) on every
    // axis), the region unaffected by periodic wrap artifacts
    static double interior_max_diff(const GridSymbol& a, const GridSymbol& b);
    double interior_max_abs() const;

    // binary serialization (little-endian f64 payload, documented header)
    std::string to_bytes() const;
    static GridSymbol from_bytes(const std::string& bytes);
    void save(const std::string& path) const;
    static GridSymbol load(const std::string& path);

private:
    int n_ = 1;
    int N_ = 0;
    std::vector<double> q0_;
    double dq_ = 0.0, dp_ = 0.0, hbar_ = 1.0;
    Space space_ = Space::QP;
    std::vector<cplx> data_;

    void transform_pu(int sign);
};

} // namespace magstar
