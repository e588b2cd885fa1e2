#include "common.hpp"

#include "dnfkpp/critical.hpp"
#include "dnfkpp/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace dnfkpp;

TEST_CASE("Gaussian example tangency matches the reference solve") {
    const CriticalPoint& cp = testing::gaussian_critical();
    CHECK(cp.h_c == doctest::Approx(testing::gauss_h_c).epsilon(1e-11));
    CHECK(cp.k_c == doctest::Approx(testing::gauss_k_c).epsilon(1e-11));
    CHECK(std::abs(cp.residual_alpha) < 1e-10);
    CHECK(std::abs(cp.residual_dk) < 1e-10);
    CHECK(std::abs(cp.h_c - cp.oracle_h) < 1e-6);
    CHECK(std::abs(cp.k_c - cp.oracle_k) < 1e-6);
    CHECK(alpha_dk2(testing::example_params().rates(), cp.kernels, cp.k_c) < 0.0);
}

TEST_CASE("uniform example tangency matches the reference solve") {
    const CriticalPoint& cp = testing::uniform_critical();
    CHECK(cp.h_c == doctest::Approx(testing::unif_h_c).epsilon(1e-11));
    CHECK(cp.k_c == doctest::Approx(testing::unif_k_c).epsilon(1e-11));
    CHECK(std::abs(cp.residual_alpha) < 1e-10);
    CHECK(std::abs(cp.residual_dk) < 1e-10);
    CHECK(std::abs(cp.h_c - cp.oracle_h) < 1e-6);
    CHECK(cp.assumptions.pass());
}

TEST_CASE("sup of alpha below and above the crossing") {
    const ModelParams& mp = testing::example_params();
    const KernelFamily fam = gaussian_example_family(2.0, 2.0);
    CHECK(scan_sup_alpha(mp, fam.at(0.1)).sup < 0.0);
    CHECK(scan_sup_alpha(mp, fam.at(15.0)).sup > 0.0);
}

TEST_CASE("near m = kappa+ the sup approaches zero from below") {
    const ModelParams mp(1.0, 1.0, 0.999);
    const KernelPair k = gaussian_example_family(2.0, 2.0).at(3.0);
    const ScanResult s = scan_sup_alpha(mp, k);
    CHECK(s.sup < 0.0);
    CHECK(s.sup > -0.05);
}

TEST_CASE("weak competition finds no tangency on a moderate range") {
    const ModelParams mp(1.0, 1.0, 0.99);
    CHECK_THROWS_AS(find_tangency(mp, gaussian_example_family(2.0, 2.0), 0.1, 8.0), Error);
}

TEST_CASE("Newton from displaced seeds returns to the same point") {
    const ModelParams& mp = testing::example_params();
    const KernelFamily fam = gaussian_example_family(2.0, 2.0);
    const TangencyProblem pr = dispersion_tangency_problem(mp, fam);
    const CriticalPoint& cp = testing::gaussian_critical();
    for (double s : {-0.01, 0.01}) {
        const TangencyResult r = polish_tangency(pr, cp.h_c * (1 + s), cp.k_c * (1 - s));
        CHECK(std::abs(r.h - cp.h_c) < 1e-8);
        CHECK(std::abs(r.k - cp.k_c) < 1e-8);
    }
}

TEST_CASE("finite-difference Jacobian gives the same tangency") {
    const ModelParams& mp = testing::example_params();
    TangencyProblem pr = dispersion_tangency_problem(mp, gaussian_example_family(2.0, 2.0));
    pr.f_h = nullptr;
    pr.f_hp = nullptr;
    const TangencyResult r = solve_tangency(pr, 0.1, 20.0);
    CHECK(r.h == doctest::Approx(testing::gauss_h_c).epsilon(1e-10));
    CHECK(r.k == doctest::Approx(testing::gauss_k_c).epsilon(1e-10));
}

TEST_CASE("the dispersion curve touches zero exactly once") {
    const ModelParams& mp = testing::example_params();
    for (const CriticalPoint* cp : {&testing::gaussian_critical(), &testing::uniform_critical()}) {
        const KernelPair& k = cp->kernels;
        auto f = [&](double p) { return alpha(mp.rates(), k, p); };
        int touching = 0;
        for (const ScanResult& s : scan_local_maxima(f, scan_horizon(mp.rates(), k), scan_step(k)))
            if (s.sup > -tol_sep) ++touching;
        CHECK(touching == 1);
    }
}

TEST_CASE("shift families reject single-bump kernels") {
    CHECK_THROWS_AS(shift_family(Kernel::gaussian(1.0), Kernel::gaussian(1.0)), Error);
    const KernelFamily u = uniform_example_family(1.0, 2.0);
    const auto* up = u.at(1.8).minus.as<UniformPair>();
    REQUIRE(up);
    CHECK(up->h_inner == doctest::Approx(0.8));
}
