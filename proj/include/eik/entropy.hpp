// Copyright the eik authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EIK_ENTROPY_HPP
#define EIK_ENTROPY_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "eik/grid.hpp"

namespace eik {

inline double wrap_angle(double s) {
    s = std::fmod(s, 2.0 * M_PI);
    return s < 0 ? s + 2.0 * M_PI : s;
}

/// Angular distance on the circle.
inline double circ_dist(double a, double b) {
    double d = std::abs(wrap_angle(a) - wrap_angle(b));
    return std::min(d, 2.0 * M_PI - d);
}

/// Angular generator psi on the circle. Closed forms carry their kink set so
/// quadrature can split panels there; sampled generators are interpolated.
struct Generator {
    std::function<double(double)> fn;       // closed form, if any
    std::function<double(double)> deriv_fn; // exact derivative, if any
    std::vector<double> samples;            // fallback: uniform on [0, 2pi)
    std::vector<double> kinks;              // sorted, in [0, 2pi)
    bool pi_periodic = false;
    bool odd = false;
    std::string tag = "samples";

    double operator()(double s) const {
        if (fn) return fn(s);
        return interp(s);
    }

    double deriv(double s) const {
        if (deriv_fn) return deriv_fn(s);
        const double h = 1e-6;
        return ((*this)(s + h) - (*this)(s - h)) / (2 * h);
    }

    double interp(double s) const {
        const int n = static_cast<int>(samples.size());
        const double x = wrap_angle(s) / (2.0 * M_PI) * n;
        int i = static_cast<int>(std::floor(x));
        const double t = x - i;
        i %= n;
        const double p0 = samples[(i + n - 1) % n];
        const double p1 = samples[i];
        const double p2 = samples[(i + 1) % n];
        const double p3 = samples[(i + 2) % n];
        return 0.5 * (2 * p1 + (-p0 + p2) * t + (2 * p0 - 5 * p1 + 4 * p2 - p3) * t * t +
                      (-p0 + 3 * p1 - 3 * p2 + p3) * t * t * t);
    }
};

/// psi(s) = sum_k a_k cos(k s) + b_k sin(k s).
struct TrigTerm {
    int k = 0;
    double cos_amp = 0.0;
    double sin_amp = 0.0;
};

inline Generator make_trig_generator(std::vector<TrigTerm> terms) {
    Generator g;
    bool all_even = true;
    for (const auto& t : terms)
        if (t.k % 2 != 0) all_even = false;
    g.pi_periodic = all_even;
    g.tag = "trig";
    auto tv = std::make_shared<std::vector<TrigTerm>>(std::move(terms));
    g.fn = [tv](double s) {
        double v = 0.0;
        for (const auto& t : *tv) v += t.cos_amp * std::cos(t.k * s) + t.sin_amp * std::sin(t.k * s);
        return v;
    };
    g.deriv_fn = [tv](double s) {
        double v = 0.0;
        for (const auto& t : *tv)
            v += t.k * (-t.cos_amp * std::sin(t.k * s) + t.sin_amp * std::cos(t.k * s));
        return v;
    };
    return g;
}

inline Generator make_sampled_generator(std::vector<double> values, bool pi_periodic = false) {
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("generator samples contain NaN");
    if (values.size() < 16) throw std::invalid_argument("too few generator samples");
    Generator g;
    g.samples = std::move(values);
    g.pi_periodic = pi_periodic;
    g.tag = "samples";
    return g;
}

/// Singular generator psi_0(.-sbar): odd, pi-periodic, even about pi/4, and on
/// [0, pi/4] the ramp t/delta^(1-alpha) capped at 2 delta^alpha past t = 2 delta.
inline Generator make_psi0_generator(double delta, double alpha, double sbar) {
    if (!(delta > 0.0 && delta < M_PI / 16))
        throw std::invalid_argument("psi0: delta must be in (0, pi/16)");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("psi0: alpha must be in (0, 1)");
    const double slope = std::pow(delta, alpha - 1.0);
    const double cap = 2.0 * std::pow(delta, alpha);

    auto base = [=](double u) { // u in [0, pi/2]
        if (u > M_PI / 4) u = M_PI / 2 - u;
        return u <= 2 * delta ? u * slope : cap;
    };
    auto base_d = [=](double u) {
        double sign = 1.0;
        if (u > M_PI / 4) {
            u = M_PI / 2 - u;
            sign = -1.0;
        }
        return u <= 2 * delta ? sign * slope : 0.0;
    };

    Generator g;
    g.pi_periodic = true;
    g.odd = true;
    g.tag = "psi0";
    g.fn = [=](double s) {
        double t = wrap_angle(s - sbar);
        if (t >= M_PI) t -= M_PI;
        return t <= M_PI / 2 ? base(t) : -base(M_PI - t);
    };
    g.deriv_fn = [=](double s) {
        double t = wrap_angle(s - sbar);
        if (t >= M_PI) t -= M_PI;
        return t <= M_PI / 2 ? base_d(t) : base_d(M_PI - t);
    };
    for (double t : {2 * delta, M_PI / 2 - 2 * delta, M_PI / 2 + 2 * delta, M_PI - 2 * delta}) {
        g.kinks.push_back(wrap_angle(sbar + t));
        g.kinks.push_back(wrap_angle(sbar + t + M_PI));
    }
    std::sort(g.kinks.begin(), g.kinks.end());
    return g;
}

namespace detail {

// 8-point Gauss-Legendre on [-1, 1].
inline constexpr double kGlNode[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
inline constexpr double kGlWeight[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

/// Integral of psi(s) e^{is} over [lo, hi], panels split at generator kinks.
inline Vec2 integrate_phi(const Generator& psi, double lo, double hi) {
    // collect breakpoints of psi inside [lo, hi]
    std::vector<double> cuts{lo};
    for (double k : psi.kinks) {
        // periodic images of the kink landing inside the window
        const double base = k + 2.0 * M_PI * std::floor((lo - k) / (2.0 * M_PI));
        for (double s = base; s < hi; s += 2.0 * M_PI)
            if (s > lo + 1e-14 && s < hi - 1e-14) cuts.push_back(s);
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());

    const double max_w = M_PI / 16;
    Vec2 acc{0.0, 0.0};
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double a = cuts[c], b = cuts[c + 1];
        const int parts = std::max(1, static_cast<int>(std::ceil((b - a) / max_w)));
        for (int p = 0; p < parts; ++p) {
            const double pa = a + (b - a) * p / parts;
            const double pb = a + (b - a) * (p + 1) / parts;
            const double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
            for (int q = 0; q < 8; ++q) {
                const double s = mid + half * kGlNode[q];
                const double w = half * kGlWeight[q] * psi(s);
                acc.x += w * std::cos(s);
                acc.y += w * std::sin(s);
            }
        }
    }
    return acc;
}

} // namespace detail

/// Entropy Phi with angular tables at ns uniform angles and, when built from a
/// generator, exact evaluators. dphi is the analytic derivative
/// i e^{i theta} (psi(theta+pi/2) + psi(theta-pi/2)) for generated entropies.
struct Entropy {
    int ns = 0;
    std::vector<Vec2> phi;
    std::vector<Vec2> dphi;
    std::vector<double> lambda; // dphi . (i e^{i theta})
    std::shared_ptr<const Generator> gen;
    std::function<Vec2(double)> phi_fn;  // optional exact/closed form
    std::function<Vec2(double)> dphi_fn;
    std::string id = "entropy";
    double scale = 1.0;

    double theta(int k) const { return 2.0 * M_PI * k / ns; }

    /// Periodic cubic interpolation of the Phi table.
    Vec2 phi_interp(double th) const {
        const double x = wrap_angle(th) / (2.0 * M_PI) * ns;
        int i = static_cast<int>(std::floor(x));
        const double t = x - i;
        i %= ns;
        auto cr = [t](double p0, double p1, double p2, double p3) {
            return 0.5 * (2 * p1 + (-p0 + p2) * t +
                          (2 * p0 - 5 * p1 + 4 * p2 - p3) * t * t +
                          (-p0 + 3 * p1 - 3 * p2 + p3) * t * t * t);
        };
        const int i0 = (i + ns - 1) % ns, i2 = (i + 1) % ns, i3 = (i + 2) % ns;
        return {cr(phi[i0].x, phi[i].x, phi[i2].x, phi[i3].x),
                cr(phi[i0].y, phi[i].y, phi[i2].y, phi[i3].y)};
    }

    /// Exact value when available (quadrature on the generator), else interp.
    Vec2 phi_at(double th) const { return phi_fn ? phi_fn(th) : phi_interp(th); }
    Vec2 dphi_at(double th) const {
        if (dphi_fn) return dphi_fn(th);
        // fall back to the tabulated values at the nearest node
        const int k = static_cast<int>(std::llround(wrap_angle(th) / (2 * M_PI) * ns)) % ns;
        return dphi[k];
    }
    double lambda_at(double th) const {
        if (gen) return (*gen)(th + M_PI / 2) + (*gen)(th - M_PI / 2);
        const Vec2 d = dphi_at(th);
        return dot(d, perp(unit_vector(th)));
    }

    Entropy scaled(double c) const {
        Entropy e = *this;
        e.scale = scale * c;
        for (auto& v : e.phi) v = c * v;
        for (auto& v : e.dphi) v = c * v;
        for (auto& v : e.lambda) v *= c;
        if (phi_fn) {
            auto f = phi_fn;
            e.phi_fn = [f, c](double th) { return c * f(th); };
        }
        if (dphi_fn) {
            auto f = dphi_fn;
            e.dphi_fn = [f, c](double th) { return c * f(th); };
        }
        if (gen) {
            auto base = gen;
            auto scaled_gen = std::make_shared<Generator>(*base);
            if (base->fn) {
                auto bf = base->fn;
                scaled_gen->fn = [bf, c](double s) { return c * bf(s); };
            }
            if (base->deriv_fn) {
                auto bd = base->deriv_fn;
                scaled_gen->deriv_fn = [bd, c](double s) { return c * bd(s); };
            }
            for (auto& v : scaled_gen->samples) v *= c;
            e.gen = scaled_gen;
        }
        return e;
    }
};

/// Phi_psi(e^{i theta}) = integral of psi(s) e^{is} over (theta-pi/2, theta+pi/2);
/// the tangential derivative comes from the endpoint values of psi.
inline Entropy phi_from_psi(const Generator& psi, int ns = 2048,
                            const std::string& id = "") {
    if (ns < 256) throw std::invalid_argument("phi_from_psi: ns too small (< 256)");
    if (!psi.fn && psi.samples.empty())
        throw std::invalid_argument("phi_from_psi: empty generator");
    Entropy e;
    e.ns = ns;
    e.gen = std::make_shared<Generator>(psi);
    e.id = id.empty() ? psi.tag : id;
    e.phi.resize(ns);
    e.dphi.resize(ns);
    e.lambda.resize(ns);
    const auto g = e.gen;
    for (int k = 0; k < ns; ++k) {
        const double th = e.theta(k);
        e.phi[k] = detail::integrate_phi(*g, th - M_PI / 2, th + M_PI / 2);
        const double lam = (*g)(th + M_PI / 2) + (*g)(th - M_PI / 2);
        e.lambda[k] = lam;
        e.dphi[k] = lam * perp(unit_vector(th));
    }
    e.phi_fn = [g](double th) {
        return detail::integrate_phi(*g, th - M_PI / 2, th + M_PI / 2);
    };
    e.dphi_fn = [g](double th) {
        const double lam = (*g)(th + M_PI / 2) + (*g)(th - M_PI / 2);
        return lam * perp(unit_vector(th));
    };
    return e;
}

struct EntropyResidualReport {
    double entropy_residual = 0.0; // max |dPhi . e^{i theta}|
    double oddness_residual = 0.0; // max |dPhi(theta+pi) + dPhi(theta)|
};

/// Entropy condition and the odd-class membership residual, from the tables.
inline EntropyResidualReport check_entropy(const Entropy& e) {
    EntropyResidualReport r;
    const int ns = e.ns;
    for (int k = 0; k < ns; ++k) {
        const Vec2 u = unit_vector(e.theta(k));
        r.entropy_residual = std::max(r.entropy_residual, std::abs(dot(e.dphi[k], u)));
        const Vec2 o = e.dphi[(k + ns / 2) % ns] + e.dphi[k];
        r.oddness_residual = std::max(r.oddness_residual, norm(o));
    }
    return r;
}

/// C^{0,alpha} seminorm of uniformly sampled circle data, over pair distances
/// up to a quarter circle, plus the sup norm.
struct HolderReport {
    double sup = 0.0;
    double seminorm = 0.0;
};

template <class T>
HolderReport holder_seminorm(const std::vector<T>& f, double alpha) {
    const int n = static_cast<int>(f.size());
    const int dmax = n / 4;
    const double h = 2.0 * M_PI / n;
    HolderReport r;
    std::vector<double> denom(dmax + 1, 1.0);
    for (int d = 1; d <= dmax; ++d) denom[d] = std::pow(d * h, alpha);
    for (int i = 0; i < n; ++i) {
        if constexpr (std::is_same_v<T, Vec2>)
            r.sup = std::max(r.sup, norm(f[i]));
        else
            r.sup = std::max(r.sup, std::abs(f[i]));
        for (int d = 1; d <= dmax; ++d) {
            const int j = (i + d) % n;
            double diff;
            if constexpr (std::is_same_v<T, Vec2>)
                diff = norm(f[j] - f[i]);
            else
                diff = std::abs(f[j] - f[i]);
            r.seminorm = std::max(r.seminorm, diff / denom[d]);
        }
    }
    return r;
}

/// ||Phi||_{C^{1,alpha}} = sup|Phi| + sup|dPhi| + [dPhi]_{C^{0,alpha}}.
inline double c1alpha_norm(const Entropy& e, double alpha) {
    double sup_phi = 0.0;
    for (const auto& v : e.phi) sup_phi = std::max(sup_phi, norm(v));
    const HolderReport hd = holder_seminorm(e.dphi, alpha);
    return sup_phi + hd.sup + hd.seminorm;
}

/// Scale so that ||Phi||_{C^{1,alpha}} <= 1 (no-op if already below 1).
inline Entropy normalize_entropy(const Entropy& e, double alpha) {
    const double nrm = c1alpha_norm(e, alpha);
    return nrm > 1.0 ? e.scaled(1.0 / nrm) : e;
}

/// The covering family psi_{sbar_j} = psi_0(. - sbar_j) over a uniform
/// partition with delta/2 < spacing <= delta, plus the intervals
/// I_j = [sbar_j - delta, sbar_j + delta].
struct Psi0Family {
    double delta = 0.0;
    double alpha = 0.0;
    double spacing = 0.0;
    std::vector<double> centers;
    std::vector<Generator> generators;
    std::vector<std::pair<double, double>> intervals;
};

inline Psi0Family psi0_family(double delta, double alpha) {
    if (!(delta > 0.0 && delta < M_PI / 16))
        throw std::invalid_argument("psi0_family: delta must be in (0, pi/16)");
    Psi0Family fam;
    fam.delta = delta;
    fam.alpha = alpha;
    const int n = static_cast<int>(std::ceil(2.0 * M_PI / delta));
    fam.spacing = 2.0 * M_PI / n;
    for (int j = 0; j < n; ++j) {
        const double sb = j * fam.spacing;
        fam.centers.push_back(sb);
        fam.generators.push_back(make_psi0_generator(delta, alpha, sb));
        fam.intervals.emplace_back(sb - delta, sb + delta);
    }
    return fam;
}

/// Radial extension: eta is a C^2 bump with eta(1)=1, eta'(1)=0, supported on
/// [1/2, 3/2]; Psi is the field with div PhiHat(m) = Psi(m) . grad(1-|m|^2)/...
/// assembled from eta, lambda, Phi.
struct RadialExtension {
    Entropy entropy;

    static double bump(double u) { // C^2, support [-1,1], bump(0)=1
        if (std::abs(u) >= 1.0) return 0.0;
        const double w = 1.0 - u * u;
        return w * w * w;
    }
    static double bump_d(double u) {
        if (std::abs(u) >= 1.0) return 0.0;
        const double w = 1.0 - u * u;
        return -6.0 * u * w * w;
    }

    static double eta(double r) {
        const double b = bump(2.0 * (r - 1.0));
        return b * b;
    }
    static double eta_d(double r) {
        const double u = 2.0 * (r - 1.0);
        return 2.0 * bump(u) * bump_d(u) * 2.0;
    }

    /// PhiHat(z) = eta(|z|) Phi(z/|z|).
    Vec2 phi_hat(Vec2 z) const {
        const double r = norm(z);
        if (r <= 0.5 || r >= 1.5) return {0.0, 0.0};
        const double th = std::atan2(z.y, z.x);
        return eta(r) * entropy.phi_interp(th);
    }

    /// Psi(r e^{i theta}) = eta(r) lambda(theta) e^{i theta} / (2 r^2)
    ///                      - eta'(r) Phi(theta) / (2 r).
    Vec2 psi_field(Vec2 z) const {
        const double r = norm(z);
        if (r <= 0.5 || r >= 1.5) return {0.0, 0.0};
        const double th = std::atan2(z.y, z.x);
        const Vec2 u = unit_vector(th);
        const double lam = entropy.lambda_at(th);
        const Vec2 a = (eta(r) * lam / (2.0 * r * r)) * u;
        const Vec2 b = (eta_d(r) / (2.0 * r)) * entropy.phi_interp(th);
        return a - b;
    }
};

inline RadialExtension radial_extension(const Entropy& e) {
    const auto rep = check_entropy(e);
    if (rep.entropy_residual > 1e-6)
        throw std::invalid_argument("radial_extension: input fails the entropy condition");
    return RadialExtension{e};
}

} // namespace eik

#endif
