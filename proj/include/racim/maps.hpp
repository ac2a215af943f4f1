#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "racim/circle.hpp"

namespace racim {

using RealFn = std::function<double(double)>;

/// One monotone expanding branch of a piecewise circle map.
/// value/deriv take the local offset u in [0, length]; value returns the
/// unreduced (lifted) image, which eval_map reduces mod 1.
struct Branch {
    Arc interval;  // domain arc on the circle
    RealFn value;
    RealFn deriv;
};

/// Piecewise C^{1+gamma} expanding circle map. Branch intervals are an
/// ordered partition of the circle starting at branches[0].interval.start.
class PiecewiseMap {
public:
    PiecewiseMap(std::vector<Branch> branches, double gamma)
        : branches_(std::move(branches)), gamma_(gamma) {
        if (branches_.empty()) throw Error("PiecewiseMap: no branches");
        cumulative_.resize(branches_.size() + 1);
        cumulative_[0] = 0.0;
        for (std::size_t i = 0; i < branches_.size(); ++i)
            cumulative_[i + 1] = cumulative_[i] + branches_[i].interval.length;
        if (std::abs(cumulative_.back() - 1.0) > 1e-12)
            throw Error("PiecewiseMap: branch intervals do not tile the circle");
        cumulative_.back() = 1.0;
    }

    std::size_t branch_count() const { return branches_.size(); }
    double gamma() const { return gamma_; }
    const Branch& branch(std::size_t i) const { return branches_[i]; }
    const std::vector<Branch>& branches() const { return branches_; }

    /// Index of the branch containing circle point x, plus the local offset.
    std::pair<std::size_t, double> locate(double x) const {
        double d = frac(x - branches_[0].interval.start);
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), d);
        std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
        i = (i == 0) ? 0 : i - 1;
        if (i >= branches_.size()) i = branches_.size() - 1;
        return {i, d - cumulative_[i]};
    }

private:
    std::vector<Branch> branches_;
    std::vector<double> cumulative_;
    double gamma_;
};

/// T(x), reduced mod 1.
inline double eval_map(const PiecewiseMap& map, double x) {
    auto [i, u] = map.locate(x);
    return frac(map.branch(i).value(u));
}

/// Unreduced branch value at x (used for norms and root finding).
inline double eval_map_lifted(const PiecewiseMap& map, double x) {
    auto [i, u] = map.locate(x);
    return map.branch(i).value(u);
}

/// DT(x). Throws BranchBoundaryError at breakpoints unless the left limit is
/// explicitly requested (left_limit picks the branch ending at x).
inline double eval_derivative(const PiecewiseMap& map, double x,
                              bool left_limit = false) {
    constexpr double kBoundaryEps = 1e-14;
    auto [i, u] = map.locate(x);
    const Branch& br = map.branch(i);
    bool at_left = u < kBoundaryEps;
    if (at_left) {
        if (!left_limit)
            throw BranchBoundaryError("eval_derivative: x is a branch breakpoint");
        std::size_t prev = (i + map.branch_count() - 1) % map.branch_count();
        const Branch& pb = map.branch(prev);
        return pb.deriv(pb.interval.length);
    }
    return br.deriv(u);
}

/// One preimage piece: the arc of points in a given branch mapping into the
/// target, plus the branch index it came from.
struct PreimagePiece {
    std::size_t branch;
    Arc arc;
};

namespace detail {

/// Solves value(u) = y on [0, len] for a monotone branch by bisection with a
/// Newton polish. Caller guarantees y is inside the value range.
inline double invert_branch(const Branch& br, double y, double tol = 1e-12,
                            int max_iter = 200) {
    double lo = 0.0, hi = br.interval.length;
    double flo = br.value(lo) - y, fhi = br.value(hi) - y;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0)
        throw ConvergenceFailure("invert_branch: target not bracketed");
    int iter = 0;
    while (hi - lo > tol) {
        if (++iter > max_iter)
            throw ConvergenceFailure("invert_branch: iteration cap exceeded");
        double mid = 0.5 * (lo + hi);
        double fm = br.value(mid) - y;
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    // Newton polish: branches are smooth and monotone, so two steps from the
    // bisection estimate reach machine precision.
    double u = 0.5 * (lo + hi);
    for (int s = 0; s < 3; ++s) {
        double d = br.deriv(u);
        if (d == 0.0) break;
        double step = (br.value(u) - y) / d;
        double un = u - step;
        if (un < 0.0 || un > br.interval.length) break;
        u = un;
    }
    return u;
}

}  // namespace detail

/// All points mapping into the target arc, per branch. Pieces are pairwise
/// disjoint and their union is T^{-1}(target) up to root-finding tolerance.
inline std::vector<PreimagePiece> preimage(const PiecewiseMap& map,
                                           const Arc& target) {
    std::vector<PreimagePiece> pieces;
    if (target.empty()) return pieces;
    for (std::size_t b = 0; b < map.branch_count(); ++b) {
        const Branch& br = map.branch(b);
        double len = br.interval.length;
        double v0 = br.value(0.0), v1 = br.value(len);
        bool increasing = v1 >= v0;
        double vlo = std::min(v0, v1), vhi = std::max(v0, v1);
        // Scan integer translates of the target through the lifted image.
        int n_lo = static_cast<int>(std::floor(vlo - target.length)) - 1;
        int n_hi = static_cast<int>(std::ceil(vhi)) + 1;
        for (int n = n_lo; n <= n_hi; ++n) {
            double t0 = target.start + n;
            double t1 = t0 + target.length;
            double lo = std::max(t0, vlo), hi = std::min(t1, vhi);
            if (hi <= lo) continue;
            double ua = detail::invert_branch(br, increasing ? lo : hi);
            double ub = detail::invert_branch(br, increasing ? hi : lo);
            if (ub < ua) std::swap(ua, ub);
            if (ub - ua <= 0.0) continue;
            pieces.push_back(
                {b, Arc{frac(br.interval.start + ua), ub - ua}});
        }
    }
    return pieces;
}

/// Per-branch grid report of the expansion/regularity bounds.
struct ValidationReport {
    std::size_t branch_count = 0;
    double min_abs_deriv = 0.0;       // grid min of |DT|
    double c1gamma_norm = 0.0;        // sup|T| + sup|DT| + Hölder quotient of DT
    double max_holder_quotient = 0.0;
    bool monotone = true;
    bool expansion_ok = false;  // min |DT| >= mu
    bool norm_ok = false;       // C^{1+gamma} proxy <= D
    bool count_ok = false;      // branch count <= b
    bool pass = false;
};

/// Checks (finitely many samples of) the expansion and regularity bounds:
/// branch count <= max_branches, min |DT| >= mu, C^{1+gamma} proxy <= D.
inline ValidationReport validate_bounds(const PiecewiseMap& map,
                                        std::size_t grid_points_per_branch,
                                        double mu = 1.0 + 1e-9,
                                        double norm_bound_D = 1e6,
                                        std::size_t max_branches = 100) {
    if (grid_points_per_branch < 2)
        throw Error("validate_bounds: need at least 2 grid points per branch");
    ValidationReport rep;
    rep.branch_count = map.branch_count();
    double min_deriv = std::numeric_limits<double>::infinity();
    double sup_val = 0.0, sup_deriv = 0.0, holder = 0.0;
    for (const Branch& br : map.branches()) {
        double len = br.interval.length;
        std::size_t n = grid_points_per_branch;
        std::vector<double> us(n), ds(n);
        double prev_v = 0.0;
        int dir = 0;
        for (std::size_t j = 0; j < n; ++j) {
            double u = len * (static_cast<double>(j) + 0.5) / static_cast<double>(n);
            us[j] = u;
            double v = br.value(u);
            double d = br.deriv(u);
            ds[j] = d;
            min_deriv = std::min(min_deriv, std::abs(d));
            sup_val = std::max(sup_val, std::abs(v));
            sup_deriv = std::max(sup_deriv, std::abs(d));
            if (j > 0) {
                int step = (v > prev_v) ? 1 : (v < prev_v ? -1 : 0);
                if (dir == 0) dir = step;
                if (step != 0 && dir != 0 && step != dir) rep.monotone = false;
            }
            prev_v = v;
        }
        // Hölder quotient of the derivative over adjacent grid pairs.
        for (std::size_t j = 1; j < n; ++j) {
            double h = us[j] - us[j - 1];
            if (h <= 0.0) continue;
            double q = std::abs(ds[j] - ds[j - 1]) / std::pow(h, map.gamma());
            holder = std::max(holder, q);
        }
    }
    rep.min_abs_deriv = min_deriv;
    rep.max_holder_quotient = holder;
    rep.c1gamma_norm = sup_val + sup_deriv + holder;
    rep.expansion_ok = min_deriv >= mu;
    rep.norm_ok = rep.c1gamma_norm <= norm_bound_D;
    rep.count_ok = rep.branch_count <= max_branches;
    rep.pass = rep.expansion_ok && rep.norm_ok && rep.count_ok && rep.monotone;
    return rep;
}

namespace detail {

struct BranchNormParts {
    double sup_val_circ = 0.0;  // sup of circle-distance of values to 0
    double sup_deriv = 0.0;
    double holder = 0.0;
    double total() const { return sup_val_circ + sup_deriv + holder; }
};

inline BranchNormParts branch_norm(const Branch& br, std::size_t n, double gamma) {
    BranchNormParts p;
    double len = br.interval.length;
    // The value part of the norm is the sup of the circle distance to 0 over
    // the branch; for a monotone branch the range is [vlo, vhi], so this is
    // exactly 1/2 when the range crosses a half-integer and an endpoint
    // distance otherwise. Computing it exactly (rather than on the grid)
    // makes norms of value-translated branches cancel exactly.
    double v0 = br.value(0.0), v1 = br.value(len);
    double vlo = std::min(v0, v1), vhi = std::max(v0, v1);
    if (std::floor(vhi - 0.5) >= vlo - 0.5)
        p.sup_val_circ = 0.5;
    else
        p.sup_val_circ = std::max(circle_dist(vlo, 0.0), circle_dist(vhi, 0.0));
    double prev_d = 0.0, prev_u = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double u = len * (static_cast<double>(j) + 0.5) / static_cast<double>(n);
        double d = br.deriv(u);
        p.sup_deriv = std::max(p.sup_deriv, std::abs(d));
        if (j > 0) {
            double h = u - prev_u;
            p.holder = std::max(p.holder,
                                std::abs(d - prev_d) / std::pow(h, gamma));
        }
        prev_d = d;
        prev_u = u;
    }
    return p;
}

}  // namespace detail

/// The branch-matched map metric: 1 if branch structures mismatch, else the
/// C^{1+gamma} difference on interval intersections + norm gap + Hausdorff
/// term. Map values are compared with the circle metric (maps are
/// circle-valued); derivatives are genuine reals.
inline double d_LY(const PiecewiseMap& S, const PiecewiseMap& T,
                   std::size_t grid_points_per_branch = 256) {
    if (S.branch_count() != T.branch_count()) return 1.0;
    const std::size_t b = S.branch_count();
    const std::size_t n = grid_points_per_branch;
    double gamma = std::min(S.gamma(), T.gamma());

    double term_diff = 0.0, term_norm = 0.0, term_hd = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        const Branch& sb = S.branch(i);
        const Branch& tb = T.branch(i);
        if (!arcs_intersect(sb.interval, tb.interval)) return 1.0;

        // Intersection of the two branch arcs, in offsets relative to the
        // S-branch start. T's start is unwrapped to the nearest representative.
        double ts0 = frac(tb.interval.start - sb.interval.start);
        if (ts0 > 0.5) ts0 -= 1.0;
        double is = std::max(0.0, ts0);
        double ie_off = std::min(sb.interval.length, ts0 + tb.interval.length);
        double inter_len = ie_off - is;
        if (inter_len <= 0.0) return 1.0;

        // C^{1+gamma} norm of the difference on the intersection.
        double sup_v = 0.0, sup_d = 0.0, hold = 0.0;
        double prev_dd = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double off = is + inter_len * (static_cast<double>(j) + 0.5) /
                                  static_cast<double>(n);
            double su = off;
            double tu = std::clamp(off - ts0, 0.0, tb.interval.length);
            double vdiff = circle_dist(sb.value(su), tb.value(tu));
            double ddiff = sb.deriv(su) - tb.deriv(tu);
            sup_v = std::max(sup_v, vdiff);
            sup_d = std::max(sup_d, std::abs(ddiff));
            if (j > 0) {
                double h = inter_len / static_cast<double>(n);
                hold = std::max(hold,
                                std::abs(ddiff - prev_dd) / std::pow(h, gamma));
            }
            prev_dd = ddiff;
        }
        term_diff = std::max(term_diff, sup_v + sup_d + hold);

        double ns = detail::branch_norm(sb, n, gamma).total();
        double nt = detail::branch_norm(tb, n, gamma).total();
        term_norm = std::max(term_norm, std::abs(ns - nt));

        term_hd = std::max(term_hd, arc_hausdorff(sb.interval, tb.interval));
    }
    return term_diff + term_norm + term_hd;
}

/// Shifts every branch value by +rho (mod 1 downstream); derivatives are
/// untouched, so d_LY(map, translated) == rho for small rho.
inline PiecewiseMap translate_perturbation(const PiecewiseMap& map, double rho) {
    std::vector<Branch> branches;
    branches.reserve(map.branch_count());
    for (const Branch& br : map.branches()) {
        RealFn v = br.value;
        branches.push_back(Branch{
            br.interval,
            [v, rho](double u) { return v(u) + rho; },
            br.deriv});
    }
    return PiecewiseMap(std::move(branches), map.gamma());
}

/// A measurable family omega -> map.
struct MapFamily {
    std::function<PiecewiseMap(double)> generator;
    double gamma = 1.0;

    PiecewiseMap operator()(double omega) const { return generator(omega); }
};

// ---------------------------------------------------------------------------
// Built-in families
// ---------------------------------------------------------------------------

/// The three-branch quadratic family rotating with omega; minimum slope > 2.
inline PiecewiseMap example_family(double omega) {
    const double third = 1.0 / 3.0;
    std::vector<Branch> branches;
    for (int i = 0; i < 3; ++i) {
        double base = i * third;
        double len = (i == 2) ? 1.0 - 2.0 * third : third;
        RealFn value, deriv;
        if (i == 0) {
            value = [](double u) { return 3.0 * u - 2.9 * u * (u - 1.0 / 3.0); };
            deriv = [](double u) { return 3.0 - 2.9 * (2.0 * u - 1.0 / 3.0); };
        } else if (i == 1) {
            value = [base](double u) {
                double s = base + u;
                return -3.0 * s + 1.0 - 2.9 * (s - 1.0 / 3.0) * (s - 2.0 / 3.0);
            };
            deriv = [base](double u) {
                double s = base + u;
                return -3.0 - 2.9 * (2.0 * s - 1.0);
            };
        } else {
            value = [base, omega](double u) {
                double s = base + u;
                return 7.0 / 3.0 * (s - 2.0 / 3.0) + 2.0 * omega / 9.0;
            };
            deriv = [](double) { return 7.0 / 3.0; };
        }
        branches.push_back(Branch{Arc{frac(omega + base), len}, value, deriv});
    }
    return PiecewiseMap(std::move(branches), 1.0);
}

inline MapFamily example_family_map() {
    return MapFamily{[](double w) { return example_family(w); }, 1.0};
}

/// x -> 2x mod 1 (omega-independent).
inline PiecewiseMap doubling_map() {
    std::vector<Branch> branches;
    for (int i = 0; i < 2; ++i) {
        double left = 0.5 * i;
        branches.push_back(Branch{
            Arc{left, 0.5},
            [left](double u) { return 2.0 * (left + u); },
            [](double) { return 2.0; }});
    }
    return PiecewiseMap(std::move(branches), 1.0);
}

/// Identity map as a single affine branch (slope 1; fails expansion checks,
/// used only as a test fixture).
inline PiecewiseMap identity_map() {
    std::vector<Branch> branches;
    branches.push_back(Branch{Arc{0.0, 1.0},
                              [](double u) { return u; },
                              [](double) { return 1.0; }});
    return PiecewiseMap(std::move(branches), 1.0);
}

/// Rigid rotation by beta as a one-branch map (test fixture).
inline PiecewiseMap rotation_map(double beta) {
    std::vector<Branch> branches;
    branches.push_back(Branch{Arc{0.0, 1.0},
                              [beta](double u) { return u + beta; },
                              [](double) { return 1.0; }});
    return PiecewiseMap(std::move(branches), 1.0);
}

/// Piecewise-polynomial map from breakpoints and per-branch coefficient lists
/// (coefficients in the local offset u, constant term first).
inline PiecewiseMap polynomial_map(const std::vector<double>& breakpoints,
                                   const std::vector<std::vector<double>>& coeffs,
                                   double gamma = 1.0) {
    if (breakpoints.size() != coeffs.size() || breakpoints.empty())
        throw ConfigError("polynomial_map: breakpoints/coefficients mismatch");
    std::size_t b = breakpoints.size();
    std::vector<Branch> branches;
    double covered = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        double len;
        if (i + 1 < b)
            len = frac(breakpoints[i + 1] - breakpoints[i]);
        else
            len = 1.0 - covered;
        covered += len;
        std::vector<double> c = coeffs[i];
        RealFn value = [c](double u) {
            double acc = 0.0;
            for (std::size_t j = c.size(); j-- > 0;) acc = acc * u + c[j];
            return acc;
        };
        RealFn deriv = [c](double u) {
            double acc = 0.0;
            for (std::size_t j = c.size(); j-- > 1;)
                acc = acc * u + c[j] * static_cast<double>(j);
            return acc;
        };
        branches.push_back(Branch{Arc{frac(breakpoints[i]), len}, value, deriv});
    }
    return PiecewiseMap(std::move(branches), gamma);
}

}  // namespace racim
