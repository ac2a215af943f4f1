#pragma once

#include <cmath>
#include <vector>

#include "racim/circle.hpp"

namespace racim {

/// Rigid circle rotation, the base (driving) system.
struct RotationBase {
    double alpha = 0.5 * std::sqrt(2.0);
    double origin = 0.0;
};

/// sigma^n(omega) = frac(omega + n*alpha), any integer n. The rotation amount
/// is reduced mod 1 before the add so that advancing by n and then by -n
/// cancels to sub-ulp accuracy even for |n| ~ 10^6.
inline double advance(const RotationBase& base, double omega, long long n) {
    double r = frac(static_cast<double>(n) * base.alpha);
    return frac(omega + r);
}

/// (omega0, sigma omega0, ..., sigma^{n-1} omega0).
inline std::vector<double> orbit(const RotationBase& base, double omega0,
                                 std::size_t n) {
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t j = 0; j < n; ++j)
        out.push_back(advance(base, omega0, static_cast<long long>(j)));
    return out;
}

/// Base supplied as an explicit fiber sequence (e.g. loaded from file).
/// Falls back to rotation semantics when the sequence is exhausted.
struct OrbitProvider {
    RotationBase rotation;
    std::vector<double> explicit_orbit;  // empty: use the rotation

    double fiber(std::size_t j) const {
        if (j < explicit_orbit.size()) return frac(explicit_orbit[j]);
        return advance(rotation, rotation.origin, static_cast<long long>(j));
    }
};

}  // namespace racim
