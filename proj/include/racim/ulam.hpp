#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "racim/circle.hpp"
#include "racim/maps.hpp"

namespace racim {

/// Nonnegative step-function density on k uniform bins, unit integral.
struct BinnedDensity {
    int k = 0;
    std::vector<double> values;  // density value on B_j = [j/k, (j+1)/k)

    double integral() const {
        double s = std::accumulate(values.begin(), values.end(), 0.0);
        return s / static_cast<double>(k);
    }

    static BinnedDensity lebesgue(int k) {
        return BinnedDensity{k, std::vector<double>(static_cast<std::size_t>(k), 1.0)};
    }
};

enum class UlamAssembly { TestPoint, ExactPreimage };

/// k x k row-stochastic fiber transfer matrix. Densities are ROW vectors and
/// the matrix acts on the right: push(v, M) = v * M. Rows with many zeros are
/// stored compressed once k >= sparse_threshold.
class UlamMatrix {
public:
    static constexpr int sparse_threshold = 512;

    UlamMatrix(int k, UlamAssembly assembly, double fiber)
        : k_(k), assembly_(assembly), fiber_(fiber), sparse_(k >= sparse_threshold) {
        if (sparse_)
            rows_.resize(static_cast<std::size_t>(k));
        else
            dense_.assign(static_cast<std::size_t>(k) * k, 0.0);
    }

    int k() const { return k_; }
    UlamAssembly assembly() const { return assembly_; }
    double fiber() const { return fiber_; }
    bool sparse() const { return sparse_; }

    void add(int i, int j, double w) {
        if (w == 0.0) return;
        if (sparse_) {
            auto& row = rows_[static_cast<std::size_t>(i)];
            for (auto& [jj, ww] : row)
                if (jj == j) {
                    ww += w;
                    return;
                }
            row.push_back({j, w});
        } else {
            dense_[static_cast<std::size_t>(i) * k_ + j] += w;
        }
    }

    double entry(int i, int j) const {
        if (sparse_) {
            for (const auto& [jj, ww] : rows_[static_cast<std::size_t>(i)])
                if (jj == j) return ww;
            return 0.0;
        }
        return dense_[static_cast<std::size_t>(i) * k_ + j];
    }

    double row_sum(int i) const {
        double s = 0.0;
        if (sparse_) {
            for (const auto& [j, w] : rows_[static_cast<std::size_t>(i)]) s += w;
        } else {
            for (int j = 0; j < k_; ++j) s += dense_[static_cast<std::size_t>(i) * k_ + j];
        }
        return s;
    }

    /// Rescales every row to sum exactly 1; mass conservation downstream is
    /// then exact up to rounding.
    void normalize_rows() {
        for (int i = 0; i < k_; ++i) {
            double s = row_sum(i);
            if (s <= 0.0)
                throw Error("UlamMatrix: empty row " + std::to_string(i));
            double inv = 1.0 / s;
            if (sparse_) {
                auto& row = rows_[static_cast<std::size_t>(i)];
                std::sort(row.begin(), row.end());
                for (auto& [j, w] : row) w *= inv;
            } else {
                for (int j = 0; j < k_; ++j)
                    dense_[static_cast<std::size_t>(i) * k_ + j] *= inv;
            }
        }
    }

    /// v * M with v a row vector.
    BinnedDensity apply(const BinnedDensity& v) const {
        if (v.k != k_) throw DimensionMismatch("push: density/matrix dimension mismatch");
        BinnedDensity out{k_, std::vector<double>(static_cast<std::size_t>(k_), 0.0)};
        if (sparse_) {
            for (int i = 0; i < k_; ++i) {
                double vi = v.values[static_cast<std::size_t>(i)];
                if (vi == 0.0) continue;
                for (const auto& [j, w] : rows_[static_cast<std::size_t>(i)])
                    out.values[static_cast<std::size_t>(j)] += vi * w;
            }
        } else {
            for (int i = 0; i < k_; ++i) {
                double vi = v.values[static_cast<std::size_t>(i)];
                if (vi == 0.0) continue;
                const double* row = &dense_[static_cast<std::size_t>(i) * k_];
                for (int j = 0; j < k_; ++j) out.values[static_cast<std::size_t>(j)] += vi * row[j];
            }
        }
        return out;
    }

    /// Entrywise max difference against another matrix of the same size.
    double max_entry_diff(const UlamMatrix& other) const {
        if (other.k_ != k_) throw DimensionMismatch("max_entry_diff: size mismatch");
        double m = 0.0;
        for (int i = 0; i < k_; ++i)
            for (int j = 0; j < k_; ++j)
                m = std::max(m, std::abs(entry(i, j) - other.entry(i, j)));
        return m;
    }

    /// Triplets (i, j, value) in row-major order.
    std::vector<std::tuple<int, int, double>> triplets() const {
        std::vector<std::tuple<int, int, double>> out;
        for (int i = 0; i < k_; ++i) {
            if (sparse_) {
                for (const auto& [j, w] : rows_[static_cast<std::size_t>(i)])
                    out.emplace_back(i, j, w);
            } else {
                for (int j = 0; j < k_; ++j) {
                    double w = dense_[static_cast<std::size_t>(i) * k_ + j];
                    if (w != 0.0) out.emplace_back(i, j, w);
                }
            }
        }
        return out;
    }

private:
    int k_;
    UlamAssembly assembly_;
    double fiber_;
    bool sparse_;
    std::vector<double> dense_;
    std::vector<std::vector<std::pair<int, double>>> rows_;
};

/// Bin-averaging projection E_k of a midpoint-sampled grid function. The
/// sample grid must refine the bin partition (n divisible by k).
inline BinnedDensity conditional_expectation(const std::vector<double>& samples,
                                             int k) {
    int n = static_cast<int>(samples.size());
    if (k < 1 || n % k != 0)
        throw GridMismatch("conditional_expectation: sample grid does not refine bins");
    int per = n / k;
    BinnedDensity out{k, std::vector<double>(static_cast<std::size_t>(k), 0.0)};
    for (int j = 0; j < k; ++j) {
        double s = 0.0;
        for (int l = 0; l < per; ++l) s += samples[static_cast<std::size_t>(j * per + l)];
        out.values[static_cast<std::size_t>(j)] = s / static_cast<double>(per);
    }
    return out;
}

/// Ulam matrix by test-point quadrature: q midpoint test points per bin,
/// entry (i,j) = fraction of points of B_i landing in B_j; rows renormalized.
inline UlamMatrix assemble_ulam_testpoints(const PiecewiseMap& map, int k, int q,
                                           double fiber = 0.0) {
    if (k < 2 || q < 1) throw Error("assemble_ulam_testpoints: need k >= 2, q >= 1");
    UlamMatrix M(k, UlamAssembly::TestPoint, fiber);
    const double inv_kq = 1.0 / (static_cast<double>(k) * q);
    const double w = 1.0 / static_cast<double>(q);
    for (int i = 0; i < k; ++i) {
        for (int l = 0; l < q; ++l) {
            double x = (static_cast<double>(i) * q + l + 0.5) * inv_kq;
            double y = eval_map(map, x);
            int j = static_cast<int>(std::floor(y * k));
            if (j >= k) j = k - 1;
            if (j < 0) j = 0;
            M.add(i, j, w);
        }
    }
    M.normalize_rows();
    return M;
}

/// Ulam matrix from exact branch inverses: entry (i,j) = k * m(B_i ∩ T^{-1}B_j).
inline UlamMatrix assemble_ulam_exact(const PiecewiseMap& map, int k,
                                      double fiber = 0.0) {
    if (k < 2) throw Error("assemble_ulam_exact: need k >= 2");
    UlamMatrix M(k, UlamAssembly::ExactPreimage, fiber);
    const double h = 1.0 / static_cast<double>(k);
    for (int j = 0; j < k; ++j) {
        Arc target{static_cast<double>(j) * h, h};
        for (const PreimagePiece& piece : preimage(map, target)) {
            for (auto [lo, hi] : unroll(piece.arc)) {
                int i0 = static_cast<int>(std::floor(lo * k));
                int i1 = static_cast<int>(std::ceil(hi * k));
                for (int i = std::max(0, i0); i < std::min(k, i1); ++i) {
                    double blo = static_cast<double>(i) * h;
                    double bhi = blo + h;
                    double ov = std::min(hi, bhi) - std::max(lo, blo);
                    if (ov > 0.0) M.add(i, j, ov * k);
                }
            }
        }
    }
    M.normalize_rows();
    return M;
}

/// Density pushforward v -> v * M.
inline BinnedDensity push(const BinnedDensity& v, const UlamMatrix& M) {
    return M.apply(v);
}

/// L1 distance of two binned densities after projection onto the coarsest
/// common partition (gcd of the bin counts, which must be > 1).
inline double l1_distance(const BinnedDensity& a, const BinnedDensity& b) {
    int g = std::gcd(a.k, b.k);
    if (g < 1 || a.k % g != 0 || b.k % g != 0)
        throw IncompatibleRepresentations("l1_distance: no common partition");
    auto coarsen = [g](const BinnedDensity& d) {
        BinnedDensity out{g, std::vector<double>(static_cast<std::size_t>(g), 0.0)};
        int per = d.k / g;
        for (int j = 0; j < g; ++j) {
            double s = 0.0;
            for (int l = 0; l < per; ++l) s += d.values[static_cast<std::size_t>(j * per + l)];
            out.values[static_cast<std::size_t>(j)] = s / per;
        }
        return out;
    };
    BinnedDensity ca = coarsen(a), cb = coarsen(b);
    double s = 0.0;
    for (int j = 0; j < g; ++j)
        s += std::abs(ca.values[static_cast<std::size_t>(j)] - cb.values[static_cast<std::size_t>(j)]);
    return s / static_cast<double>(g);
}

}  // namespace racim
