// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EIK_FFT_HPP
#define EIK_FFT_HPP

#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <vector>

namespace eik {

struct Cplx {
    double re = 0.0;
    double im = 0.0;
};

inline Cplx cadd(Cplx a, Cplx b) { return {a.re + b.re, a.im + b.im}; }
inline Cplx csub(Cplx a, Cplx b) { return {a.re - b.re, a.im - b.im}; }
inline Cplx cmul(Cplx a, Cplx b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline Cplx conj(Cplx a) { return {a.re, -a.im}; }
inline double cabs2(Cplx a) { return a.re * a.re + a.im * a.im; }

/// Planned 1D complex FFT. Power-of-two lengths use iterative radix-2;
/// anything else goes through Bluestein's chirp transform.
class Fft {
  public:
    explicit Fft(std::size_t n) : n_(n) {
        if (n == 0) throw std::invalid_argument("fft: empty transform");
        pow2_ = (n & (n - 1)) == 0;
        if (pow2_) {
            init_radix2(n);
        } else {
            init_bluestein();
        }
    }

    std::size_t size() const { return n_; }

    void forward(Cplx* a) const { transform(a, false); }
    /// Inverse transform, scaled by 1/n.
    void inverse(Cplx* a) const {
        transform(a, true);
        const double s = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            a[i].re *= s;
            a[i].im *= s;
        }
    }

  private:
    std::size_t n_;
    bool pow2_ = true;

    // radix-2 tables
    std::vector<std::size_t> rev_;
    std::vector<Cplx> tw_; // per-stage twiddles, concatenated

    // Bluestein state
    std::vector<Cplx> chirp_;   // exp(-i pi k^2 / n)
    std::vector<Cplx> bhat_;    // FFT of the chirp kernel, length m
    std::size_t m_ = 0;         // padded power-of-two size
    std::unique_ptr<Fft> sub_;

    void init_radix2(std::size_t n) {
        rev_.resize(n);
        rev_[0] = 0;
        for (std::size_t i = 1; i < n; ++i)
            rev_[i] = (rev_[i >> 1] >> 1) | ((i & 1) ? n >> 1 : 0);
        tw_.reserve(n);
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const double ang = -2.0 * M_PI / static_cast<double>(len);
            for (std::size_t k = 0; k < len / 2; ++k)
                tw_.push_back({std::cos(ang * k), std::sin(ang * k)});
        }
    }

    void radix2(Cplx* a, bool inv) const {
        const std::size_t n = n_;
        for (std::size_t i = 0; i < n; ++i)
            if (i < rev_[i]) std::swap(a[i], a[rev_[i]]);
        std::size_t toff = 0;
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const std::size_t half = len / 2;
            for (std::size_t i = 0; i < n; i += len) {
                for (std::size_t k = 0; k < half; ++k) {
                    Cplx w = tw_[toff + k];
                    if (inv) w.im = -w.im;
                    const Cplx u = a[i + k];
                    const Cplx v = cmul(a[i + k + half], w);
                    a[i + k] = cadd(u, v);
                    a[i + k + half] = csub(u, v);
                }
            }
            toff += half;
        }
    }

    void init_bluestein() {
        m_ = 1;
        while (m_ < 2 * n_ - 1) m_ <<= 1;
        sub_ = std::make_unique<Fft>(m_);
        chirp_.resize(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            // k^2 mod 2n avoids precision loss for large k
            const std::size_t k2 = (k * k) % (2 * n_);
            const double ang = -M_PI * static_cast<double>(k2) / static_cast<double>(n_);
            chirp_[k] = {std::cos(ang), std::sin(ang)};
        }
        std::vector<Cplx> b(m_, Cplx{0.0, 0.0});
        b[0] = conj(chirp_[0]);
        for (std::size_t k = 1; k < n_; ++k) b[k] = b[m_ - k] = conj(chirp_[k]);
        sub_->forward(b.data());
        bhat_ = std::move(b);
    }

    void bluestein(Cplx* a, bool inv) const {
        std::vector<Cplx> x(m_, Cplx{0.0, 0.0});
        for (std::size_t k = 0; k < n_; ++k) {
            Cplx c = inv ? conj(chirp_[k]) : chirp_[k];
            x[k] = cmul(a[k], c);
        }
        sub_->forward(x.data());
        if (!inv) {
            for (std::size_t k = 0; k < m_; ++k) x[k] = cmul(x[k], bhat_[k]);
        } else {
            for (std::size_t k = 0; k < m_; ++k) x[k] = cmul(x[k], conj(bhat_[k]));
        }
        // unscaled inverse of the padded transform
        for (std::size_t k = 0; k < m_; ++k) x[k] = conj(x[k]);
        sub_->forward(x.data());
        const double s = 1.0 / static_cast<double>(m_);
        for (std::size_t k = 0; k < n_; ++k) {
            Cplx c = inv ? conj(chirp_[k]) : chirp_[k];
            Cplx y = cmul(conj(x[k]), c);
            a[k] = {y.re * s, y.im * s};
        }
    }

    void transform(Cplx* a, bool inv) const {
        if (pow2_)
            radix2(a, inv);
        else
            bluestein(a, inv);
    }
};

namespace detail {
inline bool line_zero(const Cplx* a, std::size_t n, std::size_t stride) {
    for (std::size_t i = 0; i < n; ++i)
        if (a[i * stride].re != 0.0 || a[i * stride].im != 0.0) return false;
    return true;
}
} // namespace detail

/// In-place 2D FFT of a row-major nx-by-ny complex array. All-zero lines are
/// skipped, which prunes inverse transforms of band-limited spectra.
inline void fft_2d(std::vector<Cplx>& a, int nx, int ny, bool inverse) {
    if (a.size() != static_cast<std::size_t>(nx) * ny)
        throw std::invalid_argument("fft_2d: size mismatch");
    Fft row(static_cast<std::size_t>(nx));
    Fft col(static_cast<std::size_t>(ny));
    for (int j = 0; j < ny; ++j) {
        Cplx* r = a.data() + static_cast<std::size_t>(j) * nx;
        if (detail::line_zero(r, nx, 1)) continue;
        if (inverse)
            row.inverse(r);
        else
            row.forward(r);
    }
    std::vector<Cplx> buf(ny);
    for (int i = 0; i < nx; ++i) {
        bool zero = true;
        for (int j = 0; j < ny; ++j) {
            buf[j] = a[static_cast<std::size_t>(j) * nx + i];
            zero = zero && buf[j].re == 0.0 && buf[j].im == 0.0;
        }
        if (zero) continue;
        if (inverse)
            col.inverse(buf.data());
        else
            col.forward(buf.data());
        for (int j = 0; j < ny; ++j) a[static_cast<std::size_t>(j) * nx + i] = buf[j];
    }
}

/// Signed integer frequency for index k of an n-point transform.
inline int fft_freq(int k, int n) { return k <= (n - 1) / 2 ? k : k - n; }

} // namespace eik

#endif
