#include "common.hpp"

#include "dnfkpp/errors.hpp"
#include "dnfkpp/stationary.hpp"
#include "dnfkpp/uniqueness.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace dnfkpp;

TEST_CASE("dominance") {
    const ModelParams& mp = testing::example_params();
    const KernelPair same{Kernel::gaussian(2.0), Kernel::gaussian(2.0)};
    CHECK(check_dominance(mp, same).status == DominanceStatus::Pass);
    const DominanceReport r = check_dominance(mp, testing::gaussian_critical().kernels);
    CHECK(r.status == DominanceStatus::Fail);
    CHECK(r.min_margin < 0.0);
    const KernelPair hole{Kernel::uniform(3.0), Kernel::uniform_pair(2.0, 0.5)};
    CHECK(check_dominance(mp, hole).status == DominanceStatus::Indeterminate);
}

TEST_CASE("I_p of a uniform kernel on long periods") {
    // The sup over x splits the support evenly across two cells.
    for (auto [l, p] : {std::pair{1.0, 5.0}, std::pair{0.5, 8.0}, std::pair{2.0, 9.0}}) {
        CHECK(i_p_bound(Kernel::uniform(l), p).value == doctest::Approx(std::sqrt(p / l)).epsilon(1e-9));
    }
}

TEST_CASE("I_p is at least one and stable under refinement") {
    for (const Kernel& k : testing::builtin_kernels()) {
        for (double p : {1.0, 2.0 * std::numbers::pi, 11.0}) {
            const double a = i_p_bound(k, p).value, b = i_p_bound(k, p, 1024).value;
            CHECK(a >= 1.0);
            CHECK(std::abs(a - b) <= 0.01 * a);
        }
    }
    CHECK(std::isfinite(i_p_bound(Kernel::gaussian(2.0), 2.0 * std::numbers::pi).value));
}

TEST_CASE("gamma_p bounds") {
    auto g = testing::rng(61);
    const KernelPair k{Kernel::gaussian(2.0), Kernel::gaussian_pair(2.0, 3.0)};
    for (int i = 0; i < 30; ++i) {
        const ModelParams mp = testing::random_params(g);
        CHECK(gamma_p(mp, k, testing::uniform(g, 0.5, 30.0)) <= mp.gamma_lin() + 1e-15);
    }
}

TEST_CASE("gamma_p vanishes at criticality") {
    const CriticalPoint& cp = testing::gaussian_critical();
    const ModelParams& mp = testing::example_params();
    const double p = 2.0 * std::numbers::pi / cp.k_c;
    CHECK(std::abs(gamma_p(mp, cp.kernels, p)) < tol_root);
    try {
        l2_uniqueness_radius(mp, cp.kernels, p);
        FAIL("expected NotApplicable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotApplicable);
    }
}

TEST_CASE("dominance regime gives positive radii") {
    const ModelParams& mp = testing::example_params();
    const KernelPair k = gaussian_example_family(2.0, 2.0).at(0.1);
    for (double p : {1.0, 3.0, 2.0 * std::numbers::pi, 20.0}) {
        CHECK(gamma_p(mp, k, p) > 0.0);
        CHECK(l2_uniqueness_radius(mp, k, p) > 0.0);
    }
}

TEST_CASE("identical kernels") {
    const ModelParams mp(1.0, 2.0, 0.3);
    const KernelPair same{Kernel::gaussian(2.0), Kernel::gaussian(2.0)};
    CHECK(std::abs(j_theta_l1(mp, same).value - mp.m()) < 1e-12);
    CHECK(std::abs(linf_uniqueness_radius(mp, same) - mp.theta() / 2.0) < 1e-12);
    const KernelPair u{Kernel::uniform(1.0), Kernel::uniform(1.0)};
    CHECK(std::abs(j_theta_l1(mp, u).value - mp.m()) < 1e-12);
}

TEST_CASE("radius under strengthening competition") {
    const KernelPair same{Kernel::gaussian(2.0), Kernel::gaussian(2.0)};
    const KernelPair k{Kernel::gaussian(2.0), Kernel::gaussian(3.0)};
    double prev = 1e300;
    for (double km : {1.0, 10.0, 100.0, 1000.0}) {
        // θ fixed: identical kernels keep the radius at θ/2.
        const ModelParams fixed_theta(0.5 + 0.5 * km, km, 0.5);
        CHECK(linf_uniqueness_radius(fixed_theta, same) == doctest::Approx(0.25).epsilon(1e-12));
        // κ⁺ and m fixed: θ → 0 and the radius with it.
        const ModelParams mp(1.0, km, 0.5);
        const double r = linf_uniqueness_radius(mp, k);
        CHECK(r < prev);
        prev = r;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("J_theta norm is stable under refinement and at the critical point") {
    const CriticalPoint& cp = testing::gaussian_critical();
    const ModelParams& mp = testing::example_params();
    const CertifiedValue j = j_theta_l1(mp, cp.kernels);
    CHECK(j.value > mp.m());
    CHECK(j.tail_bound < 1e-12);
    CHECK_THROWS_AS(linf_uniqueness_radius(mp, cp.kernels), Error);
}

TEST_CASE("no patterns inside certified balls") {
    const ModelParams mp(1.0, 1.0, 0.5);
    const KernelPair same{Kernel::gaussian(2.0), Kernel::gaussian(2.0)};
    REQUIRE(check_dominance(mp, same).status == DominanceStatus::Pass);
    const double p = 2.0 * std::numbers::pi;
    const double r = std::min(l2_uniqueness_radius(mp, same, p), linf_uniqueness_radius(mp, same));
    auto g = testing::rng(62);
    SolveOptions o;
    o.require_pattern = false;
    for (int t = 0; t < 10; ++t) {
        FourierField v = FourierField::zeros(8, 1.0);
        double l1 = 0.0;
        for (auto& c : v.c) {
            c = testing::uniform(g, -1.0, 1.0);
            l1 += std::abs(c);
        }
        const double s = testing::uniform(g, 0.1, 1.0) * 0.5 * r / (l1 * std::sqrt(p));
        for (auto& c : v.c) c *= s;
        const BranchPoint bp = solve_branch_point(v, EpsParams{mp, 0.0}, same, o);
        CHECK(bp.field.norm() < 1e-12);
    }
}
