#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace racim {

// Base class for all numerical-domain errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BranchBoundaryError : Error {
    using Error::Error;
};
struct ConvergenceFailure : Error {
    using Error::Error;
};
struct GridMismatch : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct QuadratureFailure : Error {
    using Error::Error;
};
struct AlreadyWeighted : Error {
    using Error::Error;
};
struct MassDrift : Error {
    using Error::Error;
};
struct DegenerateVector : Error {
    using Error::Error;
};
struct IncompatibleRepresentations : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

/// Fractional part mapped into [0,1). frac(-0.25) == 0.75.
inline double frac(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f -= 1.0;  // guard against floor rounding at negative epsilons
    if (f < 0.0) f += 1.0;
    return f;
}

/// Distance between two points of the unit circle.
inline double circle_dist(double a, double b) {
    double d = frac(a - b);
    return std::min(d, 1.0 - d);
}

/// Half-open arc [start, start+length) on the unit circle, start in [0,1).
struct Arc {
    double start = 0.0;
    double length = 0.0;

    bool empty() const { return length <= 0.0; }

    /// Membership test; x is reduced mod 1 first.
    bool contains(double x) const {
        if (empty()) return false;
        return frac(x - start) < length;
    }
};

/// Splits an arc into at most two linear intervals inside [0,1).
/// Returned pairs are (lo, hi) with lo < hi.
inline std::vector<std::pair<double, double>> unroll(const Arc& a) {
    std::vector<std::pair<double, double>> parts;
    if (a.empty()) return parts;
    double s = frac(a.start);
    double e = s + a.length;
    if (e <= 1.0) {
        parts.push_back({s, e});
    } else {
        parts.push_back({s, 1.0});
        parts.push_back({0.0, e - 1.0});
    }
    return parts;
}

/// Total length of the overlap of two arcs on the circle.
inline double arc_overlap(const Arc& a, const Arc& b) {
    double total = 0.0;
    for (auto [alo, ahi] : unroll(a))
        for (auto [blo, bhi] : unroll(b)) {
            double lo = std::max(alo, blo), hi = std::min(ahi, bhi);
            if (hi > lo) total += hi - lo;
        }
    return total;
}

/// Hausdorff distance between two arcs, measured with the circle metric.
/// Endpoint-based: arcs are closed intervals [start, start+length].
inline double arc_hausdorff(const Arc& a, const Arc& b) {
    // For arcs, the Hausdorff distance is realized at endpoints as long as
    // neither arc is contained far inside the other; endpoint comparison of
    // start and end covers the ordered-branch use here.
    double d1 = circle_dist(a.start, b.start);
    double d2 = circle_dist(frac(a.start + a.length), frac(b.start + b.length));
    return std::max(d1, d2);
}

/// Whether two arcs intersect (as half-open sets, up to tolerance).
inline bool arcs_intersect(const Arc& a, const Arc& b) {
    return arc_overlap(a, b) > 0.0;
}

}  // namespace racim
