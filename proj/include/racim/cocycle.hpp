#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "racim/driving.hpp"
#include "racim/fourier.hpp"
#include "racim/maps.hpp"
#include "racim/sobolev.hpp"
#include "racim/ulam.hpp"

namespace racim {

enum class Scheme { Ulam, GalerkinCesaro, GalerkinPlain };

/// Everything needed to run a transfer-operator cocycle along a base orbit.
struct CocycleSpec {
    MapFamily family;
    OrbitProvider base;
    Scheme scheme = Scheme::Ulam;
    int k = 1000;       // Ulam bins
    int q = 1000;       // Ulam test points per bin
    int modes = 100;    // Galerkin max mode
    double tol = 1e-9;  // Galerkin quadrature tolerance
    int steps = 20;
    bool ulam_exact = false;  // exact-preimage assembly instead of test points

    UlamMatrix ulam_matrix_at(double fiber) const {
        PiecewiseMap map = family(fiber);
        return ulam_exact ? assemble_ulam_exact(map, k, fiber)
                          : assemble_ulam_testpoints(map, k, q, fiber);
    }

    GalerkinMatrix galerkin_matrix_at(double fiber) const {
        GalerkinMatrix A = galerkin_matrix(family(fiber), modes, tol, fiber);
        return scheme == Scheme::GalerkinCesaro ? cesaro_weighting(A) : A;
    }
};

struct StepDiagnostics {
    int step = 0;
    double fiber = 0.0;
    double mass = 0.0;       // integral of the density after this step
    double l1_change = 0.0;  // L1 distance to the previous step's density
};

struct PushforwardResult {
    Scheme scheme = Scheme::Ulam;
    std::vector<int> recorded_steps;
    std::vector<double> recorded_fibers;  // fiber the density lives over
    std::vector<BinnedDensity> binned;
    std::vector<FourierDensity> fourier;
    std::vector<StepDiagnostics> diagnostics;
};

namespace detail {
inline double binned_l1_norm(const BinnedDensity& v) {
    double s = 0.0;
    for (double x : v.values) s += std::abs(x);
    return s / static_cast<double>(v.k);
}

inline double fourier_l1_norm(const FourierDensity& f, int grid = 2048) {
    std::vector<double> samples = evaluate_density(f, grid);
    double s = 0.0;
    for (double x : samples) s += std::abs(x);
    return s / static_cast<double>(grid);
}
}  // namespace detail

/// Pushes Lebesgue forward along the orbit, recording densities at the
/// requested steps (step s lives over fiber sigma^s omega0).
inline PushforwardResult push_forward(const CocycleSpec& spec,
                                      const std::vector<int>& record_at) {
    int max_step = spec.steps;
    for (int s : record_at) {
        if (s < 0 || s > spec.steps)
            throw Error("push_forward: record_at outside [0, steps]");
        max_step = std::max(max_step, s);
    }
    PushforwardResult res;
    res.scheme = spec.scheme;
    auto want = [&record_at](int s) {
        return std::find(record_at.begin(), record_at.end(), s) != record_at.end();
    };

    if (spec.scheme == Scheme::Ulam) {
        BinnedDensity v = BinnedDensity::lebesgue(spec.k);
        BinnedDensity prev = v;
        if (want(0)) {
            res.recorded_steps.push_back(0);
            res.recorded_fibers.push_back(spec.base.fiber(0));
            res.binned.push_back(v);
        }
        for (int s = 1; s <= max_step; ++s) {
            double fiber = spec.base.fiber(static_cast<std::size_t>(s - 1));
            UlamMatrix M = spec.ulam_matrix_at(fiber);
            prev = v;
            v = push(v, M);
            double mass = v.integral();
            if (std::abs(mass - 1.0) > 1e-8)
                throw MassDrift("push_forward: mass drift at step " + std::to_string(s));
            res.diagnostics.push_back(
                {s, fiber, mass, l1_distance(v, prev)});
            if (want(s)) {
                res.recorded_steps.push_back(s);
                res.recorded_fibers.push_back(spec.base.fiber(static_cast<std::size_t>(s)));
                res.binned.push_back(v);
            }
        }
    } else {
        FourierDensity c = FourierDensity::lebesgue(spec.modes);
        if (want(0)) {
            res.recorded_steps.push_back(0);
            res.recorded_fibers.push_back(spec.base.fiber(0));
            res.fourier.push_back(c);
        }
        for (int s = 1; s <= max_step; ++s) {
            double fiber = spec.base.fiber(static_cast<std::size_t>(s - 1));
            GalerkinMatrix A = spec.galerkin_matrix_at(fiber);
            FourierDensity prev = c;
            c = A.apply(c);
            double mass = c.c(0).real();
            if (std::abs(mass - 1.0) > 1e-5)
                throw MassDrift("push_forward: Galerkin mass drift at step " +
                                std::to_string(s));
            double change = detail::fourier_l1_norm(
                [&] {
                    FourierDensity d = c;
                    for (int m = -c.K; m <= c.K; ++m) d.set(m, c.c(m) - prev.c(m));
                    return d;
                }(),
                2048);
            res.diagnostics.push_back({s, fiber, mass, change});
            if (want(s)) {
                res.recorded_steps.push_back(s);
                res.recorded_fibers.push_back(spec.base.fiber(static_cast<std::size_t>(s)));
                res.fourier.push_back(c);
            }
        }
    }
    return res;
}

/// Ulam cocycle with each step followed by convolution with the kernel
/// (coefficients of the step density damped by the multiplier, then re-binned
/// exactly). Realizes the kernel-perturbed operator Q * L_omega numerically.
inline PushforwardResult push_forward_convolved(const CocycleSpec& spec,
                                                const Kernel& kernel,
                                                const std::vector<int>& record_at) {
    if (spec.scheme != Scheme::Ulam)
        throw Error("push_forward_convolved: Ulam scheme required");
    PushforwardResult res;
    res.scheme = spec.scheme;
    auto want = [&record_at](int s) {
        return std::find(record_at.begin(), record_at.end(), s) != record_at.end();
    };
    int max_step = spec.steps;
    for (int s : record_at) max_step = std::max(max_step, s);

    BinnedDensity v = BinnedDensity::lebesgue(spec.k);
    if (want(0)) {
        res.recorded_steps.push_back(0);
        res.recorded_fibers.push_back(spec.base.fiber(0));
        res.binned.push_back(v);
    }
    for (int s = 1; s <= max_step; ++s) {
        double fiber = spec.base.fiber(static_cast<std::size_t>(s - 1));
        UlamMatrix M = spec.ulam_matrix_at(fiber);
        BinnedDensity prev = v;
        v = push(v, M);
        if (!kernel.is_identity) {
            FourierDensity f = binned_to_fourier(v, kernel.K);
            v = fourier_to_binned(convolve(kernel, f), spec.k);
        }
        double mass = v.integral();
        if (std::abs(mass - 1.0) > 1e-8)
            throw MassDrift("push_forward_convolved: mass drift at step " +
                            std::to_string(s));
        res.diagnostics.push_back({s, fiber, mass, l1_distance(v, prev)});
        if (want(s)) {
            res.recorded_steps.push_back(s);
            res.recorded_fibers.push_back(spec.base.fiber(static_cast<std::size_t>(s)));
            res.binned.push_back(v);
        }
    }
    return res;
}

/// Top exponent from the L1-norm growth of the Lebesgue pushforward; zero up
/// to rounding (Ulam) or accumulated quadrature tolerance (Galerkin).
inline double estimate_lambda1(const CocycleSpec& spec, int n) {
    if (spec.scheme == Scheme::Ulam) {
        BinnedDensity v = BinnedDensity::lebesgue(spec.k);
        double norm0 = detail::binned_l1_norm(v);
        for (int s = 0; s < n; ++s)
            v = push(v, spec.ulam_matrix_at(spec.base.fiber(static_cast<std::size_t>(s))));
        return std::log(detail::binned_l1_norm(v) / norm0) / static_cast<double>(n);
    }
    FourierDensity c = FourierDensity::lebesgue(spec.modes);
    double norm0 = detail::fourier_l1_norm(c);
    for (int s = 0; s < n; ++s)
        c = spec.galerkin_matrix_at(spec.base.fiber(static_cast<std::size_t>(s))).apply(c);
    return std::log(detail::fourier_l1_norm(c) / norm0) / static_cast<double>(n);
}

struct LyapunovReport {
    double lambda1_hat = 0.0;
    double lambda2_hat = 0.0;
    int n_used = 0;
    int trials = 0;
    unsigned seed = 0;
};

/// Second exponent: median over seeded trials of the log-decay rate of
/// zero-mean vectors pushed through the Ulam cocycle with periodic L1
/// renormalization.
inline double estimate_lambda2(const CocycleSpec& spec, int n, int trials,
                               int renorm_every = 1, unsigned seed = 20240817) {
    if (spec.scheme != Scheme::Ulam)
        throw Error("estimate_lambda2: Ulam scheme required");
    if (trials < 1 || n < 1) throw Error("estimate_lambda2: bad arguments");

    // Assemble the fiber matrices once; they are reused by every trial.
    std::vector<UlamMatrix> mats;
    mats.reserve(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s)
        mats.push_back(spec.ulam_matrix_at(spec.base.fiber(static_cast<std::size_t>(s))));

    std::vector<double> rates;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    for (int tr = 0; tr < trials; ++tr) {
        BinnedDensity v{spec.k, std::vector<double>(static_cast<std::size_t>(spec.k))};
        double mean = 0.0;
        for (auto& x : v.values) {
            x = unif(rng);
            mean += x;
        }
        mean /= static_cast<double>(spec.k);
        for (auto& x : v.values) x -= mean;  // project to zero integral
        double norm = detail::binned_l1_norm(v);
        if (norm <= 0.0) throw DegenerateVector("estimate_lambda2: zero trial vector");
        for (auto& x : v.values) x /= norm;

        double total_log = 0.0;
        int steps_done = 0;
        for (int s = 0; s < n; ++s) {
            v = push(v, mats[static_cast<std::size_t>(s)]);
            ++steps_done;
            if (steps_done % renorm_every == 0 || s == n - 1) {
                double r = detail::binned_l1_norm(v);
                if (r == 0.0) {
                    // complete collapse below the representable range
                    total_log += std::log(std::numeric_limits<double>::denorm_min());
                    break;
                }
                total_log += std::log(r);
                for (auto& x : v.values) x /= r;
                // the zero-integral subspace is invariant under the transfer
                // operator; re-project to cancel rounding drift along the
                // recovered mass direction
                double m2 = 0.0;
                for (double x : v.values) m2 += x;
                m2 /= static_cast<double>(spec.k);
                for (auto& x : v.values) x -= m2;
                if (total_log / steps_done < -200.0) break;  // decay already resolved
            }
        }
        rates.push_back(total_log / static_cast<double>(steps_done));
    }
    std::sort(rates.begin(), rates.end());
    return rates[rates.size() / 2];
}

// ---------------------------------------------------------------------------
// Density comparison
// ---------------------------------------------------------------------------

enum class DistanceNorm { L1, Lp, WeakHpt };

inline GridFunction binned_to_grid(const BinnedDensity& v, int n,
                                   Extension ext = Extension::ZeroExtend) {
    if (n % v.k != 0)
        throw IncompatibleRepresentations("binned_to_grid: grid does not refine bins");
    GridFunction g{n, std::vector<double>(static_cast<std::size_t>(n)), ext};
    int per = n / v.k;
    for (int j = 0; j < v.k; ++j)
        for (int l = 0; l < per; ++l)
            g.samples[static_cast<std::size_t>(j * per + l)] = v.values[static_cast<std::size_t>(j)];
    return g;
}

/// Distance between two binned densities in the requested norm. L1 uses the
/// coarsest common partition; Lp and weak-Hpt use a common 4096 grid.
inline double compare_densities(const BinnedDensity& a, const BinnedDensity& b,
                                DistanceNorm norm,
                                const SobolevParams& params = SobolevParams{}) {
    if (norm == DistanceNorm::L1) return l1_distance(a, b);
    const int n = 4096;
    if (n % a.k != 0 || n % b.k != 0)
        throw IncompatibleRepresentations("compare_densities: no common grid");
    GridFunction ga = binned_to_grid(a, n), gb = binned_to_grid(b, n);
    GridFunction diff{n, std::vector<double>(static_cast<std::size_t>(n)), Extension::ZeroExtend};
    for (int l = 0; l < n; ++l)
        diff.samples[static_cast<std::size_t>(l)] =
            ga.samples[static_cast<std::size_t>(l)] - gb.samples[static_cast<std::size_t>(l)];
    if (norm == DistanceNorm::Lp) return lp_norm(diff, params.p);
    return hpt_weak_norm(diff, params);
}

/// Fourier vs binned: the trigonometric polynomial is binned exactly first.
inline double compare_densities(const FourierDensity& a, const BinnedDensity& b,
                                DistanceNorm norm,
                                const SobolevParams& params = SobolevParams{}) {
    return compare_densities(fourier_to_binned(a, b.k), b, norm, params);
}

// ---------------------------------------------------------------------------
// Studies
// ---------------------------------------------------------------------------

struct StudyRow {
    double parameter = 0.0;
    double distance = 0.0;
};

struct RunSummaryTable {
    std::string name;
    std::vector<StudyRow> rows;
    double fitted_slope = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> hypothesis_checks;  // per-fiber d_LY values (static study)
};

/// Theorem-A experiment: step-`steps` density distance to a fine reference as
/// the Ulam resolution k grows.
inline RunSummaryTable ulam_convergence_study(const CocycleSpec& base_spec,
                                              const std::vector<int>& k_list,
                                              int reference_k) {
    RunSummaryTable out;
    out.name = "ulam-convergence";
    CocycleSpec ref = base_spec;
    ref.k = reference_k;
    BinnedDensity ref_density =
        push_forward(ref, {base_spec.steps}).binned.at(0);
    for (int k : k_list) {
        CocycleSpec s = base_spec;
        s.k = k;
        BinnedDensity d = push_forward(s, {base_spec.steps}).binned.at(0);
        out.rows.push_back({static_cast<double>(k), l1_distance(d, ref_density)});
    }
    return out;
}

/// Theorem-B experiment: distance of the Fejér-convolved cocycle to the
/// unperturbed reference as the kernel order K grows.
inline RunSummaryTable convolution_stability_study(const CocycleSpec& base_spec,
                                                   const std::vector<int>& K_list) {
    RunSummaryTable out;
    out.name = "convolution-stability";
    BinnedDensity ref_density =
        push_forward(base_spec, {base_spec.steps}).binned.at(0);
    for (int K : K_list) {
        PushforwardResult r = push_forward_convolved(
            base_spec, fejer_multiplier(K), {base_spec.steps});
        out.rows.push_back(
            {static_cast<double>(K), l1_distance(r.binned.at(0), ref_density)});
    }
    return out;
}

/// Theorem-C experiment: distance of the translate-perturbed cocycle to the
/// unperturbed reference as the perturbation size rho shrinks, plus the
/// d_LY(T_rho, T) = rho hypothesis check at sampled fibers.
inline RunSummaryTable static_stability_study(const CocycleSpec& base_spec,
                                              const std::vector<double>& rho_list,
                                              int hypothesis_fibers = 5) {
    RunSummaryTable out;
    out.name = "static-stability";
    BinnedDensity ref_density =
        push_forward(base_spec, {base_spec.steps}).binned.at(0);
    for (double rho : rho_list) {
        CocycleSpec s = base_spec;
        MapFamily fam = base_spec.family;
        s.family = MapFamily{
            [fam, rho](double w) { return translate_perturbation(fam(w), rho); },
            fam.gamma};
        BinnedDensity d = push_forward(s, {base_spec.steps}).binned.at(0);
        out.rows.push_back({rho, l1_distance(d, ref_density)});
    }
    if (!rho_list.empty()) {
        double rho = rho_list.front();
        for (int j = 0; j < hypothesis_fibers; ++j) {
            double w = base_spec.base.fiber(static_cast<std::size_t>(j));
            PiecewiseMap T = base_spec.family(w);
            out.hypothesis_checks.push_back(
                d_LY(T, translate_perturbation(T, rho), 2048));
        }
    }
    // Fitted slope of log d against log rho (positive distances only).
    std::vector<double> xs, ys;
    for (const auto& row : out.rows)
        if (row.parameter > 0.0 && row.distance > 0.0) {
            xs.push_back(row.parameter);
            ys.push_back(row.distance);
        }
    if (xs.size() >= 2) out.fitted_slope = loglog_slope(xs, ys);
    return out;
}

}  // namespace racim
