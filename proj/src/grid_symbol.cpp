#include "magstar/grid_symbol.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

namespace magstar {

namespace {

constexpr char kMagic[4] = {'M', 'G', 'S', 'Y'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& s, std::uint32_t v) { s.append((const char*)&v, 4); }
void put_f64(std::string& s, double v) { s.append((const char*)&v, 8); }

std::uint32_t get_u32(const std::string& s, std::size_t& off) {
    std::uint32_t v;
    std::memcpy(&v, s.data() + off, 4);
    off += 4;
    return v;
}
double get_f64(const std::string& s, std::size_t& off) {
    double v;
    std::memcpy(&v, s.data() + off, 8);
    off += 8;
    return v;
}

} // namespace

GridSymbol::GridSymbol(int n, int N, std::vector<double> q0, double dq, double hbar,
                       Space space)
    : n_(n), N_(N), q0_(std::move(q0)), dq_(dq), hbar_(hbar), space_(space) {
    if (n != 1 && n != 2) throw std::invalid_argument("GridSymbol: n must be 1 or 2");
    if (N < 8 || (N & (N - 1)) != 0 || N % 4 != 0)
        throw std::invalid_argument("GridSymbol: N must be a power of two divisible by 4");
    if ((int)q0_.size() != n) throw std::invalid_argument("GridSymbol: bad origin");
    if (dq <= 0 || hbar <= 0) throw std::invalid_argument("GridSymbol: bad dq or hbar");
    dp_ = std::numbers::pi * hbar_ / (N_ * dq_);
    data_.assign(n == 1 ? (std::size_t)N_ * N_ : (std::size_t)N_ * N_ * N_ * N_,
                 cplx(0.0, 0.0));
}

GridSymbol GridSymbol::sample(int n, int N, const std::vector<double>& q0, double dq,
                              double hbar,
                              const std::function<cplx(const std::vector<double>&,
                                                       const std::vector<double>&)>& f) {
    GridSymbol g(n, N, q0, dq, hbar);
    if (n == 1) {
        for (int iq = 0; iq < N; ++iq)
            for (int k = 0; k < N; ++k)
                g.data_[g.index1(iq, k)] = f({g.q_value(0, iq)}, {g.p_value(k)});
    } else {
        for (int i1 = 0; i1 < N; ++i1)
            for (int i2 = 0; i2 < N; ++i2)
                for (int k1 = 0; k1 < N; ++k1)
                    for (int k2 = 0; k2 < N; ++k2)
                        g.data_[g.index2(i1, i2, k1, k2)] =
                            f({g.q_value(0, i1), g.q_value(1, i2)},
                              {g.p_value(k1), g.p_value(k2)});
    }
    return g;
}

GridSymbol GridSymbol::sample_poly(const PolySymbol& f, int N, const std::vector<double>& q0,
                                   double dq, double hbar, double cutoff_width) {
    const int n = f.dim();
    if (n > 2) throw std::invalid_argument("GridSymbol: polynomial symbol must have n <= 2");
    std::vector<double> qc(n), pc(n, 0.0);
    for (int j = 0; j < n; ++j) qc[j] = q0[j] + 0.5 * (N - 1) * dq;
    return sample(n, N, q0, dq, hbar, [&](const std::vector<double>& q,
                                          const std::vector<double>& p) {
        cplx v = f.eval_c(q, p, hbar);
        if (cutoff_width > 0.0) {
            double r2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double dqj = q[j] - qc[j];
                r2 += dqj * dqj + p[j] * p[j];
            }
            v *= std::exp(-r2 / (2.0 * cutoff_width * cutoff_width));
        }
        return v;
    });
}

bool GridSymbol::compatible(const GridSymbol& o) const {
    return n_ == o.n_ && N_ == o.N_ && q0_ == o.q0_ && dq_ == o.dq_ && hbar_ == o.hbar_;
}

// The p <-> u transform per p-axis:
//   f~(q, u_m) = (dp / 2 pi hbar)^n (-1)^m sum_k (-1)^k f(q, p_k) e^{+2 pi i m k / N}
// (for N divisible by 4; the inverse carries du^n and the opposite DFT sign).
void GridSymbol::transform_pu(int sign) {
    const int N = N_;
    const std::size_t rows = data_.size() / (n_ == 1 ? N : (std::size_t)N * N);
    const double scale_axis =
        sign > 0 ? dp_ / (2.0 * std::numbers::pi * hbar_) : 2.0 * dq_;

    auto one_axis_pass = [&](std::vector<cplx>& buf) {
        // buf holds contiguous rows of length N along the transforming axis
        const std::size_t nrows = buf.size() / N;
        for (std::size_t r = 0; r < nrows; ++r)
            for (int k = 0; k < N; ++k)
                if (k & 1) buf[r * N + k] = -buf[r * N + k];
        kernels::fft_rows(buf.data(), nrows, N, sign);
        for (std::size_t r = 0; r < nrows; ++r)
            for (int k = 0; k < N; ++k) {
                cplx v = buf[r * N + k] * scale_axis;
                buf[r * N + k] = (k & 1) ? -v : v;
            }
    };

    if (n_ == 1) {
        one_axis_pass(data_);
    } else {
        // last axis (k2) is contiguous
        one_axis_pass(data_);
        // transpose k1 <-> k2 within each q-block, transform, transpose back
        std::vector<cplx> tmp((std::size_t)N * N);
        for (std::size_t blk = 0; blk < rows; ++blk) {
            cplx* base = data_.data() + blk * N * N;
            for (int a = 0; a < N; ++a)
                for (int b = 0; b < N; ++b) tmp[(std::size_t)b * N + a] = base[(std::size_t)a * N + b];
            one_axis_pass(tmp);
            for (int a = 0; a < N; ++a)
                for (int b = 0; b < N; ++b) base[(std::size_t)a * N + b] = tmp[(std::size_t)b * N + a];
        }
    }
}

GridSymbol GridSymbol::wigner_fourier() const {
    if (space_ != Space::QP)
        throw std::invalid_argument("wigner_fourier: symbol is already in (q,u) space");
    GridSymbol out = *this;
    out.transform_pu(+1);
    out.space_ = Space::QU;
    return out;
}

GridSymbol GridSymbol::wigner_fourier_inverse() const {
    if (space_ != Space::QU)
        throw std::invalid_argument("wigner_fourier_inverse: symbol is in (q,p) space");
    GridSymbol out = *this;
    out.transform_pu(-1);
    out.space_ = Space::QP;
    return out;
}

double GridSymbol::interior_max_diff(const GridSymbol& a, const GridSymbol& b) {
    if (!a.compatible(b)) throw std::invalid_argument("interior_max_diff: grid mismatch");
    const int N = a.N_;
    double worst = 0.0;
    auto upd = [&](std::size_t i) { worst = std::max(worst, std::abs(a.data_[i] - b.data_[i])); };
    if (a.n_ == 1) {
        for (int iq = N / 4; iq < 3 * N / 4; ++iq)
            for (int k = N / 4; k < 3 * N / 4; ++k) upd(a.index1(iq, k));
    } else {
        for (int i1 = N / 4; i1 < 3 * N / 4; ++i1)
            for (int i2 = N / 4; i2 < 3 * N / 4; ++i2)
                for (int k1 = N / 4; k1 < 3 * N / 4; ++k1)
                    for (int k2 = N / 4; k2 < 3 * N / 4; ++k2) upd(a.index2(i1, i2, k1, k2));
    }
    return worst;
}

double GridSymbol::interior_max_abs() const {
    const int N = N_;
    double worst = 0.0;
    auto upd = [&](std::size_t i) { worst = std::max(worst, std::abs(data_[i])); };
    if (n_ == 1) {
        for (int iq = N / 4; iq < 3 * N / 4; ++iq)
            for (int k = N / 4; k < 3 * N / 4; ++k) upd(index1(iq, k));
    } else {
        for (int i1 = N / 4; i1 < 3 * N / 4; ++i1)
            for (int i2 = N / 4; i2 < 3 * N / 4; ++i2)
                for (int k1 = N / 4; k1 < 3 * N / 4; ++k1)
                    for (int k2 = N / 4; k2 < 3 * N / 4; ++k2) upd(index2(i1, i2, k1, k2));
    }
    return worst;
}

std::string GridSymbol::to_bytes() const {
    std::string s;
    s.append(kMagic, 4);
    put_u32(s, kVersion);
    put_u32(s, (std::uint32_t)n_);
    put_u32(s, (std::uint32_t)N_);
    put_u32(s, space_ == Space::QP ? 0u : 1u);
    for (int j = 0; j < n_; ++j) put_f64(s, q0_[j]);
    put_f64(s, dq_);
    put_f64(s, hbar_);
    for (const cplx& v : data_) { put_f64(s, v.real()); put_f64(s, v.imag()); }
    return s;
}

GridSymbol GridSymbol::from_bytes(const std::string& s) {
    if (s.size() < 20 || std::memcmp(s.data(), kMagic, 4) != 0)
        throw std::invalid_argument("GridSymbol: bad magic bytes");
    std::size_t off = 4;
    std::uint32_t ver = get_u32(s, off);
    if (ver != kVersion) throw std::invalid_argument("GridSymbol: unsupported version");
    int n = (int)get_u32(s, off);
    int N = (int)get_u32(s, off);
    Space sp = get_u32(s, off) == 0 ? Space::QP : Space::QU;
    std::vector<double> q0(n);
    for (int j = 0; j < n; ++j) q0[j] = get_f64(s, off);
    double dq = get_f64(s, off);
    double hbar = get_f64(s, off);
    GridSymbol g(n, N, q0, dq, hbar, sp);
    if (s.size() - off != g.data_.size() * 16)
        throw std::invalid_argument("GridSymbol: truncated payload");
    for (auto& v : g.data_) {
        double re = get_f64(s, off), im = get_f64(s, off);
        v = cplx(re, im);
    }
    return g;
}

void GridSymbol::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("GridSymbol: cannot open " + path);
    std::string s = to_bytes();
    f.write(s.data(), (std::streamsize)s.size());
}

GridSymbol GridSymbol::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("GridSymbol: cannot open " + path);
    std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return from_bytes(s);
}

} // namespace magstar
