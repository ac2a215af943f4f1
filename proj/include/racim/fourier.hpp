#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "racim/circle.hpp"
#include "racim/maps.hpp"
#include "racim/parallel.hpp"
#include "racim/ulam.hpp"

namespace racim {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Trigonometric-polynomial density: coefficients c_m for |m| <= K in the
/// orthonormal complex basis phi_m(x) = exp(2 pi i m x).
struct FourierDensity {
    int K = 0;
    std::vector<Complex> coeffs;  // index m + K
    bool real_repr = true;        // Hermitian symmetry expected

    Complex c(int m) const {
        if (m < -K || m > K) return Complex(0.0, 0.0);
        return coeffs[static_cast<std::size_t>(m + K)];
    }
    void set(int m, Complex v) { coeffs[static_cast<std::size_t>(m + K)] = v; }

    static FourierDensity lebesgue(int K) {
        FourierDensity f{K, std::vector<Complex>(static_cast<std::size_t>(2 * K + 1)), true};
        f.set(0, Complex(1.0, 0.0));
        return f;
    }

    double hermitian_defect() const {
        double d = 0.0;
        for (int m = 1; m <= K; ++m)
            d = std::max(d, std::abs(c(-m) - std::conj(c(m))));
        return d;
    }
};

/// Convolution kernel given by its Fourier multiplier.
struct Kernel {
    int K = 0;
    std::vector<double> multiplier;  // index m + K
    bool is_identity = false;        // Dirac: convolution is a no-op

    double w(int m) const {
        if (is_identity) return 1.0;
        if (m < -K || m > K) return 0.0;
        return multiplier[static_cast<std::size_t>(m + K)];
    }
};

/// Fejér kernel of order K: triangular multiplier max(0, 1 - |m|/K).
inline Kernel fejer_multiplier(int K) {
    if (K < 1) throw Error("fejer_multiplier: K >= 1 required");
    Kernel q{K, std::vector<double>(static_cast<std::size_t>(2 * K + 1), 0.0)};
    for (int m = -K; m <= K; ++m)
        q.multiplier[static_cast<std::size_t>(m + K)] =
            std::max(0.0, 1.0 - std::abs(m) / static_cast<double>(K));
    return q;
}

/// Dirac identity kernel: convolution leaves every density unchanged.
inline Kernel dirac_kernel(int K = 0) {
    return Kernel{K, std::vector<double>(static_cast<std::size_t>(2 * K + 1), 1.0), true};
}

/// c_m -> w(m) c_m.
inline FourierDensity convolve(const Kernel& kernel, const FourierDensity& f) {
    FourierDensity out = f;
    for (int m = -f.K; m <= f.K; ++m) out.set(m, kernel.w(m) * f.c(m));
    return out;
}

/// Samples sum_m c_m exp(2 pi i m x) at the n midpoints (l+1/2)/n.
/// Imaginary residue is discarded; callers can check hermitian_defect().
inline std::vector<double> evaluate_density(const FourierDensity& f, int n) {
    if (n < 1) throw Error("evaluate_density: n >= 1 required");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
        double x = (l + 0.5) / static_cast<double>(n);
        Complex u = std::polar(1.0, kTwoPi * x);
        Complex up(1.0, 0.0);
        Complex acc = f.c(0);
        for (int m = 1; m <= f.K; ++m) {
            up *= u;
            acc += f.c(m) * up + f.c(-m) * std::conj(up);
        }
        out[static_cast<std::size_t>(l)] = acc.real();
    }
    return out;
}

/// Max imaginary residue of the sampled density (diagnostic).
inline double max_imag_residue(const FourierDensity& f, int n) {
    double worst = 0.0;
    for (int l = 0; l < n; ++l) {
        double x = (l + 0.5) / static_cast<double>(n);
        Complex u = std::polar(1.0, kTwoPi * x);
        Complex up(1.0, 0.0);
        Complex acc = f.c(0);
        for (int m = 1; m <= f.K; ++m) {
            up *= u;
            acc += f.c(m) * up + f.c(-m) * std::conj(up);
        }
        worst = std::max(worst, std::abs(acc.imag()));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Exact step-function <-> trigonometric polynomial conversions
// ---------------------------------------------------------------------------

namespace detail {
inline double sinc_ratio(double a) {  // sin(a)/a with the removable singularity
    if (std::abs(a) < 1e-8) return 1.0 - a * a / 6.0;
    return std::sin(a) / a;
}
}  // namespace detail

/// Exact Fourier coefficients (|m| <= K) of a binned step density.
inline FourierDensity binned_to_fourier(const BinnedDensity& v, int K) {
    FourierDensity f{K, std::vector<Complex>(static_cast<std::size_t>(2 * K + 1)), true};
    const int k = v.k;
    for (int m = 0; m <= K; ++m) {
        double s = detail::sinc_ratio(std::numbers::pi * m / k);
        Complex acc(0.0, 0.0);
        for (int j = 0; j < k; ++j) {
            double phase = -kTwoPi * m * (j + 0.5) / static_cast<double>(k);
            acc += v.values[static_cast<std::size_t>(j)] * std::polar(1.0, phase);
        }
        Complex cm = acc * (s / static_cast<double>(k));
        f.set(m, cm);
        if (m > 0) f.set(-m, std::conj(cm));
    }
    return f;
}

/// Exact bin averages of a trigonometric polynomial over k uniform bins.
inline BinnedDensity fourier_to_binned(const FourierDensity& f, int k) {
    BinnedDensity out{k, std::vector<double>(static_cast<std::size_t>(k), 0.0)};
    for (int j = 0; j < k; ++j) {
        Complex acc = f.c(0);
        for (int m = 1; m <= f.K; ++m) {
            double s = detail::sinc_ratio(std::numbers::pi * m / k);
            Complex ph = std::polar(1.0, kTwoPi * m * (j + 0.5) / static_cast<double>(k));
            acc += s * (f.c(m) * ph + f.c(-m) * std::conj(ph));
        }
        out.values[static_cast<std::size_t>(j)] = acc.real();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Galerkin matrix
// ---------------------------------------------------------------------------

enum class GalerkinWeighting { None, Cesaro };

/// (2K+1)x(2K+1) matrix of the fiber transfer operator on Fourier modes:
/// A_{m,m'} = <phi_m, L phi_{m'}> = int exp(-2 pi i m T(x)) exp(2 pi i m' x) dx.
/// Coefficient vectors transform as c_out[m] = sum_{m'} A_{m,m'} c[m'].
struct GalerkinMatrix {
    int K = 0;
    GalerkinWeighting weighting = GalerkinWeighting::None;
    double fiber = 0.0;
    std::vector<Complex> entries;  // row-major, index (m+K)*(2K+1) + (m'+K)

    Complex at(int m, int mp) const {
        return entries[static_cast<std::size_t>(m + K) * (2 * K + 1) + (mp + K)];
    }
    Complex& at(int m, int mp) {
        return entries[static_cast<std::size_t>(m + K) * (2 * K + 1) + (mp + K)];
    }

    FourierDensity apply(const FourierDensity& f) const {
        if (f.K != K) throw DimensionMismatch("GalerkinMatrix::apply: mode mismatch");
        FourierDensity out{K, std::vector<Complex>(static_cast<std::size_t>(2 * K + 1)),
                           f.real_repr};
        const int n = 2 * K + 1;
        for (int r = 0; r < n; ++r) {
            Complex acc(0.0, 0.0);
            const Complex* row = &entries[static_cast<std::size_t>(r) * n];
            for (int c = 0; c < n; ++c) acc += row[c] * f.coeffs[static_cast<std::size_t>(c)];
            out.coeffs[static_cast<std::size_t>(r)] = acc;
        }
        return out;
    }
};

namespace detail {

// 15-point Gauss-Legendre rule on [-1, 1].
inline const double kGLNodes[15] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601700, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601700,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
inline const double kGLWeights[15] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

/// GL15 estimate of int_a^b exp(2 pi i (c1 x - c2 T(x))) dx on one branch,
/// in local branch coordinates.
inline Complex panel_osc(const Branch& br, double xstart, double a, double b,
                         double c1, double c2) {
    Complex acc(0.0, 0.0);
    double h = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int q = 0; q < 15; ++q) {
        double u = mid + h * kGLNodes[q];
        double phase = kTwoPi * (c1 * (xstart + u) - c2 * br.value(u));
        acc += kGLWeights[q] * std::polar(1.0, phase);
    }
    return acc * h;
}

struct Panel {
    double a, b;
};

/// Adaptive bisection of [a0, b0] until the most oscillatory integrands the
/// assembly will see (|m| = |m'| = K, both relative signs) are integrated to
/// the requested absolute tolerance by a single GL15 panel.
inline void refine_panels(const Branch& br, double xstart, double a0, double b0,
                          int K, double tol, std::vector<Panel>& out,
                          std::size_t max_panels) {
    struct Item {
        double a, b;
        int depth;
    };
    // Seed with panels short enough that GL15 is already in the resolved
    // regime for the worst-case phase; the error estimate then cannot be
    // fooled by aliasing of a severely under-resolved oscillation.
    double dmax = 1.0;
    for (int s = 0; s < 32; ++s) {
        double u = a0 + (b0 - a0) * (s + 0.5) / 32.0;
        dmax = std::max(dmax, std::abs(br.deriv(u)));
    }
    std::size_t n0 = static_cast<std::size_t>(
        std::max(1.0, std::ceil((b0 - a0) * K * (1.0 + dmax) / 6.0)));
    std::vector<Item> stack;
    for (std::size_t s = n0; s-- > 0;) {
        double a = a0 + (b0 - a0) * static_cast<double>(s) / static_cast<double>(n0);
        double b = a0 + (b0 - a0) * static_cast<double>(s + 1) / static_cast<double>(n0);
        stack.push_back({a, b, 0});
    }
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        double m = 0.5 * (it.a + it.b);
        double err = 0.0;
        for (double sign : {1.0, -1.0}) {
            Complex whole = panel_osc(br, xstart, it.a, it.b, K, sign * K);
            Complex halves = panel_osc(br, xstart, it.a, m, K, sign * K) +
                             panel_osc(br, xstart, m, it.b, K, sign * K);
            err = std::max(err, std::abs(whole - halves));
        }
        double local_tol = tol * std::max((it.b - it.a) / (b0 - a0), 1e-6);
        if (err <= local_tol || it.depth >= 40) {
            out.push_back({it.a, it.b});
            if (out.size() > max_panels)
                throw QuadratureFailure("galerkin_matrix: panel budget exhausted");
        } else {
            stack.push_back({m, it.b, it.depth + 1});
            stack.push_back({it.a, m, it.depth + 1});
        }
    }
    std::sort(out.begin(), out.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
}

}  // namespace detail

/// Assembles the Galerkin matrix by adaptive panel quadrature, splitting at
/// branch breakpoints. All (m, m') entries share one set of panels and node
/// evaluations per branch: at each node the rank-1 update
/// A += w * z^m (x) u^{m'} with z = exp(-2 pi i T(x)), u = exp(2 pi i x)
/// costs O(K^2), which is what makes K = 100 feasible.
inline GalerkinMatrix galerkin_matrix(const PiecewiseMap& map, int K, double tol = 1e-9,
                                      double fiber = 0.0) {
    if (K < 1 || tol <= 0.0) throw Error("galerkin_matrix: K >= 1, tol > 0 required");
    const int n = 2 * K + 1;
    GalerkinMatrix A{K, GalerkinWeighting::None, fiber,
                     std::vector<Complex>(static_cast<std::size_t>(n) * n, Complex(0.0, 0.0))};
    constexpr std::size_t kMaxPanels = 1u << 16;

    for (const Branch& br : map.branches()) {
        double xstart = br.interval.start;
        double len = br.interval.length;

        std::vector<detail::Panel> panels;
        detail::refine_panels(br, xstart, 0.0, len, K, tol, panels, kMaxPanels);

        // Gather all quadrature nodes in deterministic order.
        struct Node {
            double x;   // global (lifted) coordinate
            double tx;  // lifted branch value
            double w;
        };
        std::vector<Node> nodes;
        nodes.reserve(panels.size() * 15);
        for (const auto& p : panels) {
            double h = 0.5 * (p.b - p.a), mid = 0.5 * (p.a + p.b);
            for (int q = 0; q < 15; ++q) {
                double u = mid + h * detail::kGLNodes[q];
                nodes.push_back({xstart + u, br.value(u), detail::kGLWeights[q] * h});
            }
        }

        // Per-chunk accumulators, combined in chunk order for determinism.
        unsigned chunks = worker_count();
        std::vector<std::vector<Complex>> partial(
            chunks, std::vector<Complex>(static_cast<std::size_t>(n) * n, Complex(0.0, 0.0)));
        parallel_chunks(nodes.size(), [&](std::size_t c, std::size_t b, std::size_t e) {
            std::vector<Complex> zpow(static_cast<std::size_t>(K) + 1);
            std::vector<Complex> upow(static_cast<std::size_t>(K) + 1);
            auto& acc = partial[c];
            for (std::size_t t = b; t < e; ++t) {
                const Node& nd = nodes[t];
                Complex z = std::polar(1.0, -kTwoPi * nd.tx);
                Complex u = std::polar(1.0, kTwoPi * nd.x);
                zpow[0] = Complex(1.0, 0.0);
                upow[0] = Complex(1.0, 0.0);
                for (int m = 1; m <= K; ++m) {
                    zpow[static_cast<std::size_t>(m)] = zpow[static_cast<std::size_t>(m - 1)] * z;
                    upow[static_cast<std::size_t>(m)] = upow[static_cast<std::size_t>(m - 1)] * u;
                }
                for (int m = -K; m <= K; ++m) {
                    Complex zm = (m >= 0) ? zpow[static_cast<std::size_t>(m)]
                                          : std::conj(zpow[static_cast<std::size_t>(-m)]);
                    Complex rf = nd.w * zm;
                    Complex* row = &acc[static_cast<std::size_t>(m + K) * n];
                    for (int mp = -K; mp <= K; ++mp) {
                        Complex um = (mp >= 0) ? upow[static_cast<std::size_t>(mp)]
                                               : std::conj(upow[static_cast<std::size_t>(-mp)]);
                        row[mp + K] += rf * um;
                    }
                }
            }
        });
        for (unsigned c = 0; c < chunks; ++c)
            for (std::size_t idx = 0; idx < A.entries.size(); ++idx)
                A.entries[idx] += partial[c][idx];
    }
    return A;
}

/// Cesàro averaging as entrywise triangular weights:
/// entry (m, m') *= max(0, 1 - max(|m|, |m'|)/K), equal to the literal
/// average (1/K) sum_j P_j A P_j over truncations P_j.
inline GalerkinMatrix cesaro_weighting(const GalerkinMatrix& A) {
    if (A.weighting != GalerkinWeighting::None)
        throw AlreadyWeighted("cesaro_weighting: matrix already weighted");
    GalerkinMatrix out = A;
    out.weighting = GalerkinWeighting::Cesaro;
    for (int m = -A.K; m <= A.K; ++m)
        for (int mp = -A.K; mp <= A.K; ++mp) {
            double w = std::max(
                0.0, 1.0 - std::max(std::abs(m), std::abs(mp)) / static_cast<double>(A.K));
            out.at(m, mp) = A.at(m, mp) * w;
        }
    return out;
}

/// Brute-force Cesàro average over explicit truncations (test oracle; O(K^3)).
inline GalerkinMatrix cesaro_weighting_bruteforce(const GalerkinMatrix& A) {
    if (A.weighting != GalerkinWeighting::None)
        throw AlreadyWeighted("cesaro_weighting_bruteforce: matrix already weighted");
    const int n = 2 * A.K + 1;
    GalerkinMatrix out{A.K, GalerkinWeighting::Cesaro, A.fiber,
                       std::vector<Complex>(static_cast<std::size_t>(n) * n, Complex(0.0, 0.0))};
    for (int j = 0; j < A.K; ++j)
        for (int m = -j; m <= j; ++m)
            for (int mp = -j; mp <= j; ++mp)
                out.at(m, mp) += A.at(m, mp) / static_cast<double>(A.K);
    return out;
}

}  // namespace racim
