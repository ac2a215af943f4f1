#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "racim/circle.hpp"
#include "racim/fourier.hpp"

namespace racim {

enum class Extension { Circle, ZeroExtend };

/// Real function sampled at the n midpoints (l+1/2)/n, with a declared
/// extension beyond [0,1): periodic wrap or zero.
struct GridFunction {
    int n = 0;
    std::vector<double> samples;
    Extension extension = Extension::ZeroExtend;

    static GridFunction from(int n, const std::function<double(double)>& fn,
                             Extension ext = Extension::ZeroExtend) {
        GridFunction g{n, std::vector<double>(static_cast<std::size_t>(n)), ext};
        for (int l = 0; l < n; ++l)
            g.samples[static_cast<std::size_t>(l)] = fn((l + 0.5) / static_cast<double>(n));
        return g;
    }

    /// Nearest-sample evaluation at an arbitrary real point.
    double at(double x) const {
        if (extension == Extension::Circle) x = frac(x);
        if (x < 0.0 || x >= 1.0) return 0.0;
        int l = static_cast<int>(x * n);
        if (l >= n) l = n - 1;
        return samples[static_cast<std::size_t>(l)];
    }
};

struct SobolevParams {
    double p = 2.0;
    double t = 0.4;
    double t_weak = 0.2;

    void validate() const {
        if (!(p > 1.0)) throw Error("SobolevParams: p > 1 required");
        if (!(t > 0.0 && t < 1.0)) throw Error("SobolevParams: t in (0,1) required");
        if (!(t < 1.0 / p)) throw Error("SobolevParams: t < 1/p required");
        if (!(t_weak > 0.0 && t_weak < t))
            throw Error("SobolevParams: 0 < t' < t required");
    }
};

/// Riemann-sum L^p norm: ((1/n) sum |f_l|^p)^(1/p).
inline double lp_norm(const GridFunction& f, double p) {
    if (p < 1.0) throw Error("lp_norm: p >= 1 required");
    double s = 0.0;
    for (double v : f.samples) s += std::pow(std::abs(v), p);
    return std::pow(s / static_cast<double>(f.n), 1.0 / p);
}

/// Total variation of the step interpolant; includes the wrap-around jump
/// for circle extension.
inline double bv_variation(const GridFunction& f) {
    double s = 0.0;
    for (int l = 1; l < f.n; ++l)
        s += std::abs(f.samples[static_cast<std::size_t>(l)] -
                      f.samples[static_cast<std::size_t>(l - 1)]);
    if (f.extension == Extension::Circle && f.n > 1)
        s += std::abs(f.samples[0] - f.samples[static_cast<std::size_t>(f.n - 1)]);
    return s;
}

/// Square function of averaged increments: at each x,
/// ( sum_r weight r^{-1-2t} (mean_{y in [-1,1]} |f(x+ry) - f(x)|)^2 )^{1/2}
/// with the outer integral truncated to [r_min, r_max] on a log-spaced grid.
inline GridFunction strichartz_St(const GridFunction& f, double t, double r_min,
                                  double r_max, int n_r, int n_y = 64) {
    if (!(t > 0.0 && t < 1.0)) throw Error("strichartz_St: t in (0,1) required");
    if (!(r_min > 0.0 && r_min < r_max)) throw Error("strichartz_St: bad r range");
    GridFunction out{f.n, std::vector<double>(static_cast<std::size_t>(f.n), 0.0),
                     f.extension};

    // Log-spaced r grid with trapezoid weights in log r:
    // int dr/r^{1+2t} G(r)^2 = int d(log r) r^{-2t} G(r)^2.
    std::vector<double> rs(static_cast<std::size_t>(n_r)), lw(static_cast<std::size_t>(n_r));
    double la = std::log(r_min), lb = std::log(r_max);
    double dl = (lb - la) / static_cast<double>(n_r - 1);
    for (int i = 0; i < n_r; ++i) {
        rs[static_cast<std::size_t>(i)] = std::exp(la + dl * i);
        lw[static_cast<std::size_t>(i)] = (i == 0 || i == n_r - 1) ? 0.5 * dl : dl;
    }
    std::vector<double> ys(static_cast<std::size_t>(n_y));
    for (int j = 0; j < n_y; ++j)
        ys[static_cast<std::size_t>(j)] = -1.0 + 2.0 * (j + 0.5) / static_cast<double>(n_y);

    parallel_chunks(static_cast<std::size_t>(f.n),
                    [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t l = b; l < e; ++l) {
            double x = (static_cast<double>(l) + 0.5) / static_cast<double>(f.n);
            double fx = f.samples[l];
            double acc = 0.0;
            for (int i = 0; i < n_r; ++i) {
                double r = rs[static_cast<std::size_t>(i)];
                double mean = 0.0;
                for (int j = 0; j < n_y; ++j)
                    mean += std::abs(f.at(x + r * ys[static_cast<std::size_t>(j)]) - fx);
                mean /= static_cast<double>(n_y);
                acc += lw[static_cast<std::size_t>(i)] * std::pow(r, -2.0 * t) * mean * mean;
            }
            out.samples[l] = std::sqrt(acc);
        }
    });
    return out;
}

/// ||f||_p + ||S_t f||_p with default truncation r_min = 1/(4n), r_max = 4.
inline double hpt_norm(const GridFunction& f, const SobolevParams& params) {
    params.validate();
    double r_min = 1.0 / (4.0 * f.n);
    GridFunction st = strichartz_St(f, params.t, r_min, 4.0, 128);
    return lp_norm(f, params.p) + lp_norm(st, params.p);
}

/// Same norm but at the weak smoothness t'.
inline double hpt_weak_norm(const GridFunction& f, const SobolevParams& params) {
    params.validate();
    double r_min = 1.0 / (4.0 * f.n);
    GridFunction st = strichartz_St(f, params.t_weak, r_min, 4.0, 128);
    return lp_norm(f, params.p) + lp_norm(st, params.p);
}

/// Symmetric principal-value hypersingular sum (diagnostic companion to S_t):
/// D_t f(x) ~ sum_{|y| >= eps_min} (f(x+y) - f(x)) / |y|^{1+t} * dy.
inline GridFunction dt_operator(const GridFunction& f, double t, double eps_min) {
    if (!(t > 0.0 && t < 1.0)) throw Error("dt_operator: t in (0,1) required");
    if (!(eps_min > 0.0 && eps_min <= 1.0 / f.n))
        throw Error("dt_operator: eps_min in (0, 1/n] required");
    GridFunction out{f.n, std::vector<double>(static_cast<std::size_t>(f.n), 0.0),
                     f.extension};
    const double dy = 1.0 / static_cast<double>(f.n);
    const int L = 2 * f.n;  // integrate |y| <= 2
    for (int l = 0; l < f.n; ++l) {
        double x = (l + 0.5) / static_cast<double>(f.n);
        double fx = f.samples[static_cast<std::size_t>(l)];
        double acc = 0.0;
        for (int s = 1; s <= L; ++s) {
            double y = s * dy;
            if (y < eps_min) continue;
            double w = dy / std::pow(y, 1.0 + t);
            acc += (f.at(x + y) - fx) * w;
            acc += (f.at(x - y) - fx) * w;
        }
        out.samples[static_cast<std::size_t>(l)] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Heat-type smoothing f_eps (Fourier-mode damping)
// ---------------------------------------------------------------------------

/// Coefficient damping a_j -> exp(-eps (1 + (2 pi j)^2)) a_j.
inline FourierDensity smooth_approx(const FourierDensity& f, double eps) {
    if (!(eps > 0.0)) throw Error("smooth_approx: eps > 0 required");
    FourierDensity out = f;
    for (int m = -f.K; m <= f.K; ++m) {
        double w = std::exp(-eps * (1.0 + kTwoPi * m * kTwoPi * m));
        out.set(m, f.c(m) * w);
    }
    return out;
}

/// Grid version: discrete transform of the midpoint samples, damp modes
/// |j| <= n/2, transform back.
inline GridFunction smooth_approx(const GridFunction& f, double eps) {
    if (!(eps > 0.0)) throw Error("smooth_approx: eps > 0 required");
    const int n = f.n;
    const int K = n / 2;
    std::vector<Complex> modes(static_cast<std::size_t>(2 * K + 1), Complex(0.0, 0.0));
    for (int l = 0; l < n; ++l) {
        double x = (l + 0.5) / static_cast<double>(n);
        double fl = f.samples[static_cast<std::size_t>(l)];
        Complex u = std::polar(1.0, -kTwoPi * x);
        Complex p(1.0, 0.0);
        modes[static_cast<std::size_t>(K)] += fl;
        for (int m = 1; m <= K; ++m) {
            p *= u;
            modes[static_cast<std::size_t>(K + m)] += fl * p;
            modes[static_cast<std::size_t>(K - m)] += fl * std::conj(p);
        }
    }
    for (auto& c : modes) c /= static_cast<double>(n);

    std::vector<double> damp(static_cast<std::size_t>(K + 1));
    for (int m = 0; m <= K; ++m) {
        damp[static_cast<std::size_t>(m)] = std::exp(-eps * (1.0 + kTwoPi * m * kTwoPi * m));
        // Edge modes +-n/2 are duplicated by the real transform; halve them.
        if (m == K && n % 2 == 0) damp[static_cast<std::size_t>(m)] *= 0.5;
    }
    GridFunction out{n, std::vector<double>(static_cast<std::size_t>(n), 0.0), f.extension};
    for (int l = 0; l < n; ++l) {
        double x = (l + 0.5) / static_cast<double>(n);
        Complex u = std::polar(1.0, kTwoPi * x);
        Complex p(1.0, 0.0);
        Complex acc = damp[0] * modes[static_cast<std::size_t>(K)];
        for (int m = 1; m <= K; ++m) {
            p *= u;
            acc += damp[static_cast<std::size_t>(m)] *
                   (modes[static_cast<std::size_t>(K + m)] * p +
                    modes[static_cast<std::size_t>(K - m)] * std::conj(p));
        }
        out.samples[static_cast<std::size_t>(l)] = acc.real();
    }
    return out;
}

/// Least-squares slope of log(values) against log(params) (rate fitting).
inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw Error("loglog_slope: need matching lists of length >= 2");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) continue;
        double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) throw Error("loglog_slope: not enough positive points");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace racim
