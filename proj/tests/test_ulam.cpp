#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "racim/driving.hpp"
#include "racim/maps.hpp"
#include "racim/ulam.hpp"

using namespace racim;

TEST_CASE("conditional expectation fixes constants and is idempotent") {
    std::vector<double> ones(64, 1.0);
    auto e = conditional_expectation(ones, 8);
    for (double v : e.values) CHECK(v == Catch::Approx(1.0));

    // f(x) = x with k = 2: bin averages 0.25 and 0.75
    std::vector<double> lin(1000);
    for (int l = 0; l < 1000; ++l) lin[static_cast<std::size_t>(l)] = (l + 0.5) / 1000.0;
    auto e2 = conditional_expectation(lin, 2);
    CHECK(e2.values[0] == Catch::Approx(0.25).margin(1e-12));
    CHECK(e2.values[1] == Catch::Approx(0.75).margin(1e-12));

    // idempotence: E_k E_k f = E_k f
    std::vector<double> expanded;
    for (double v : e2.values)
        for (int l = 0; l < 500; ++l) expanded.push_back(v);
    auto e3 = conditional_expectation(expanded, 2);
    CHECK(e3.values[0] == Catch::Approx(e2.values[0]));
    CHECK(e3.values[1] == Catch::Approx(e2.values[1]));

    CHECK_THROWS_AS(conditional_expectation(ones, 7), GridMismatch);
}

TEST_CASE("E_k is an L1 contraction on random step functions") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> f(240);
        for (auto& x : f) x = u(rng);
        auto e = conditional_expectation(f, 12);
        double n1 = 0.0, n2 = 0.0;
        for (double x : f) n1 += std::abs(x) / f.size();
        for (double x : e.values) n2 += std::abs(x) / e.values.size();
        CHECK(n2 <= n1 + 1e-14);
    }
}

TEST_CASE("identity map gives the identity matrix for both assemblies") {
    for (int k : {4, 16}) {
        auto Mt = assemble_ulam_testpoints(identity_map(), k, 50);
        auto Me = assemble_ulam_exact(identity_map(), k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                double expect = (i == j) ? 1.0 : 0.0;
                CHECK(Mt.entry(i, j) == Catch::Approx(expect).margin(1e-14));
                CHECK(Me.entry(i, j) == Catch::Approx(expect).margin(1e-12));
            }
    }
}

TEST_CASE("doubling map k=2 is uniform 0.5") {
    auto Mt = assemble_ulam_testpoints(doubling_map(), 2, 1000);
    auto Me = assemble_ulam_exact(doubling_map(), 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            CHECK(Mt.entry(i, j) == Catch::Approx(0.5).margin(1e-14));
            CHECK(Me.entry(i, j) == Catch::Approx(0.5).margin(1e-12));
        }
}

TEST_CASE("rotation by 1/4 at k=4 is a cyclic permutation") {
    auto M = assemble_ulam_exact(rotation_map(0.25), 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(M.entry(i, j) == Catch::Approx((j == (i + 1) % 4) ? 1.0 : 0.0).margin(1e-10));
}

TEST_CASE("rows are stochastic") {
    auto M = assemble_ulam_testpoints(example_family(0.3), 50, 200);
    for (int i = 0; i < 50; ++i) CHECK(M.row_sum(i) == Catch::Approx(1.0).margin(1e-12));
    auto Me = assemble_ulam_exact(example_family(0.3), 50);
    for (int i = 0; i < 50; ++i) CHECK(Me.row_sum(i) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("test-point assembly matches exact assembly") {
    RotationBase base;  // fibers sampled deterministically along the orbit
    for (int k : {10, 25, 50}) {
        for (int f = 0; f < 5; ++f) {
            double w = advance(base, 0.05, 3 * f + 1);
            PiecewiseMap T = example_family(w);
            auto Mt = assemble_ulam_testpoints(T, k, 1000);
            auto Me = assemble_ulam_exact(T, k);
            CHECK(Mt.max_entry_diff(Me) <= 5e-3);
        }
    }
}

TEST_CASE("push conserves mass and positivity") {
    auto M = assemble_ulam_testpoints(example_family(0.77), 64, 200);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    BinnedDensity v{64, std::vector<double>(64)};
    for (auto& x : v.values) x = u(rng);
    double mass = v.integral();
    BinnedDensity w = push(v, M);
    CHECK(w.integral() == Catch::Approx(mass).margin(1e-12));
    for (double x : w.values) CHECK(x >= 0.0);
}

TEST_CASE("push examples") {
    // Lebesgue is invariant for doubling
    auto M2 = assemble_ulam_exact(doubling_map(), 2);
    BinnedDensity leb = BinnedDensity::lebesgue(2);
    auto out = push(leb, M2);
    CHECK(out.values[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(out.values[1] == Catch::Approx(1.0).margin(1e-12));

    // permutation matrix permutes
    auto P = assemble_ulam_exact(rotation_map(0.25), 4);
    BinnedDensity v{4, {4.0, 0.0, 0.0, 0.0}};
    auto pv = push(v, P);
    CHECK(pv.values[1] == Catch::Approx(4.0).margin(1e-9));

    // dimension mismatch
    CHECK_THROWS_AS(push(BinnedDensity::lebesgue(8), M2), DimensionMismatch);
}

TEST_CASE("sparse storage kicks in at the threshold") {
    auto M = assemble_ulam_testpoints(doubling_map(), 512, 10);
    CHECK(M.sparse());
    BinnedDensity leb = BinnedDensity::lebesgue(512);
    auto out = push(leb, M);
    CHECK(out.integral() == Catch::Approx(1.0).margin(1e-12));
    for (double x : out.values) CHECK(x == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("l1_distance coarsens to the common partition") {
    BinnedDensity a{4, {1.0, 1.0, 1.0, 1.0}};
    BinnedDensity b{2, {0.0, 2.0}};
    CHECK(l1_distance(a, b) == Catch::Approx(1.0));
    CHECK(l1_distance(a, a) == 0.0);
}
